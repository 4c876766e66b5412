"""The three training losses.

Task loss scores the aggregated prediction. The exploration loss is the
negative entropy of the batch-mean gate output (the batch mean is the online
estimator of the population average), minimized to spread expert usage. The
exploitation loss gives every activated expert a direct cross-entropy signal
on exactly the samples that activated it; the activation indicator is a
stop-gradient constant, so no gradient reaches the generator through it.
"""

from __future__ import annotations

import numpy as np

from .. import diffcore as dc
from ..hub import Hub, expert_forward
from ..pathway import PathwayWeights, RouteCache


def task_loss(logits, labels) -> dc.Tensor:
    return dc.cross_entropy(logits, labels)


def explore_loss(dense) -> dc.Tensor:
    """Negative entropy of the column means; range [-ln m, 0]."""
    dt = dense if isinstance(dense, dc.Tensor) else dc.Tensor(dense)
    d = dt.data
    if d.ndim != 2:
        raise ValueError(f"explore_loss expects [B,m] weights, got {d.shape}")
    if np.any(d < -1e-12) or np.any(np.abs(d.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("explore_loss rows must be probability vectors")
    return dc.neg_entropy(dc.column_mean(dt))


def exploit_loss(
    hub: Hub,
    pw: PathwayWeights,
    x,
    labels,
    cache: RouteCache | None = None,
) -> dc.Tensor:
    """Sum over experts of (1/B) * sum of per-sample CE on activating samples.

    Expert logits come straight from each expert's own head, unscaled and
    without the aggregator. When a route cache is given the sub-batch
    forwards are reused instead of recomputed.
    """
    xt = x if isinstance(x, dc.Tensor) else dc.Tensor(x)
    y = np.asarray(labels, dtype=np.int64)
    b = xt.data.shape[0]
    total = None
    for i, expert in enumerate(hub.experts):
        rows = cache.rows[i] if cache is not None else np.flatnonzero(
            pw.sparse.data[:, i] > 0.0
        )
        if rows.size == 0:
            continue
        if cache is not None and cache.logits[i] is not None:
            logits_i = cache.logits[i]
        else:
            logits_i = expert_forward(expert, dc.gather_rows(xt, rows))
        ce = dc.cross_entropy(logits_i, y[rows])
        term = dc.scale(ce, rows.size / b)
        total = term if total is None else dc.add(total, term)
    return total if total is not None else dc.Tensor(0.0)
