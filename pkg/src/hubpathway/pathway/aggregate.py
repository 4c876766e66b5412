"""Input-level routing and output-level aggregation.

Only experts with a positive sparse weight see any data: each expert runs on
the sub-batch of rows that activated it (its FLOP counter is the witness),
its logits are scaled by the surviving gate weight, and the per-expert slots
are concatenated in expert-index order before the aggregator fuses them into
final logits. Slots of inactive experts hold exact zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import diffcore as dc
from ..hub import Hub, expert_forward
from .generator import PathwayGenerator, generate
from .weights import PathwayWeights, topk_filter


class Aggregator:
    """Fuses m weighted expert logit blocks [B, m*C] into C outputs.

    Two paths: a direct affine map initialized to the block-sum matrix
    (m stacked C-by-C identities), plus a width-C hidden layer whose output
    map starts at zero. At initialization the aggregate therefore equals the
    weighted sum of expert logits, and the hidden path fades in with training.
    """

    def __init__(self, m: int, n_classes: int, seed: int):
        self.m = int(m)
        self.n_classes = int(n_classes)
        self.flops = 0
        mc = self.m * self.n_classes
        rng = np.random.default_rng(seed)
        bound = np.sqrt(1.0 / mc)
        block_sum = np.tile(np.eye(self.n_classes), (self.m, 1))
        self.direct_w = dc.Parameter(block_sum, "direct_w", "aggregator")
        self.direct_b = dc.Parameter(np.zeros(self.n_classes), "direct_b", "aggregator")
        self.hidden_w = dc.Parameter(
            rng.uniform(-bound, bound, (mc, self.n_classes)), "hidden_w", "aggregator"
        )
        self.hidden_b = dc.Parameter(np.zeros(self.n_classes), "hidden_b", "aggregator")
        self.out_w = dc.Parameter(
            np.zeros((self.n_classes, self.n_classes)), "out_w", "aggregator"
        )
        self.out_b = dc.Parameter(np.zeros(self.n_classes), "out_b", "aggregator")

    def parameters(self) -> list[dc.Parameter]:
        return [
            self.direct_w, self.direct_b,
            self.hidden_w, self.hidden_b,
            self.out_w, self.out_b,
        ]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def mac_count(self) -> int:
        mc = self.m * self.n_classes
        return mc * self.n_classes * 2 + self.n_classes * self.n_classes

    def reset_flops(self) -> None:
        self.flops = 0

    def forward(self, blocks: dc.Tensor) -> dc.Tensor:
        direct = dc.affine(blocks, self.direct_w, self.direct_b)
        hidden = dc.tanh(dc.affine(blocks, self.hidden_w, self.hidden_b))
        out = dc.add(direct, dc.affine(hidden, self.out_w, self.out_b))
        self.flops += self.mac_count() * blocks.data.shape[0]
        return out


@dataclass
class RouteCache:
    """Per-expert sub-batch forwards, reusable by the exploitation loss."""

    rows: list[np.ndarray]
    logits: list[dc.Tensor | None]


def route_and_aggregate(hub: Hub, agg: Aggregator, pw: PathwayWeights, x):
    """Final logits [B,C] plus the per-expert forward cache."""
    xt = x if isinstance(x, dc.Tensor) else dc.Tensor(x)
    b = xt.data.shape[0]
    c = hub.class_count()
    if pw.m != hub.m:
        raise ValueError(f"pathway weights cover {pw.m} experts, hub has {hub.m}")
    if agg.m != hub.m or agg.n_classes != c:
        raise ValueError(
            f"aggregator built for (m={agg.m}, C={agg.n_classes}), "
            f"hub provides (m={hub.m}, C={c})"
        )

    slots = []
    cache = RouteCache(rows=[], logits=[])
    for i, expert in enumerate(hub.experts):
        rows = np.flatnonzero(pw.sparse.data[:, i] > 0.0)
        cache.rows.append(rows)
        if rows.size == 0:
            cache.logits.append(None)
            slots.append(dc.Tensor(np.zeros((b, c))))
            continue
        sub_x = dc.gather_rows(xt, rows)
        logits_i = expert_forward(expert, sub_x)
        cache.logits.append(logits_i)
        w_i = dc.gather_col(pw.sparse, i, rows)
        weighted = dc.mul_rows(logits_i, w_i)
        slots.append(dc.scatter_rows(weighted, rows, b))

    blocks = dc.concat_cols(slots)
    return agg.forward(blocks), cache


def predict(gen: PathwayGenerator, hub: Hub, agg: Aggregator, x, k: int):
    """generate -> top-k filter -> route/aggregate; deterministic in eval mode."""
    if gen.m != hub.m:
        raise ValueError(f"generator sized for {gen.m} experts, hub has {hub.m}")
    dense, _ = generate(gen, x)
    pw = topk_filter(dense, k)
    logits, _ = route_and_aggregate(hub, agg, pw, x)
    return logits, pw
