"""Top-k sparsification of dense pathway weights.

Non-surviving entries are set to exactly zero and the survivors keep their
softmax values unchanged: there is no renormalization. Ties break toward the
lowest expert index so runs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import diffcore as dc


@dataclass
class PathwayWeights:
    """Dense gate output, its sparse top-k form, and the active index sets.

    active holds min(k, m) ascending expert indices per row (0-based);
    sparse[i] equals dense[i] on active entries and exact zero elsewhere.
    """

    dense: dc.Tensor
    sparse: dc.Tensor
    active: np.ndarray
    k: int

    @property
    def m(self) -> int:
        return self.dense.data.shape[1]


def topk_filter(dense, k: int) -> PathwayWeights:
    """Keep the k largest entries per row, zero the rest; k >= m is the identity."""
    if int(k) < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = int(k)
    dt = dense if isinstance(dense, dc.Tensor) else dc.Tensor(dense)
    if dt.data.ndim != 2:
        raise ValueError(f"topk_filter expects [B,m] weights, got {dt.data.shape}")
    b, m = dt.data.shape
    kk = min(k, m)

    # stable argsort on negated values: equal values keep index order,
    # so ties resolve to the lowest index
    order = np.argsort(-dt.data, axis=1, kind="stable")
    keep = order[:, :kk]
    mask = np.zeros((b, m))
    mask[np.arange(b)[:, None], keep] = 1.0

    sparse = dc.mul_const(dt, mask)
    active = np.sort(keep, axis=1)
    return PathwayWeights(dense=dt, sparse=sparse, active=active, k=k)
