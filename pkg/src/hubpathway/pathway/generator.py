"""Noisy pathway generator.

A shared trunk feeds two linear heads: the standard head scores each expert,
the noise head sets a per-expert noise scale. In train mode the gate is
softmax(standard + eps * softplus(noise_scale)) with eps drawn fresh from the
seeded standard-normal stream, one value per sample per expert; in eval mode
the noise term is identically zero and generation is a pure function of the
parameters and the input. The drawn eps is returned so any training forward
can be replayed bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .. import diffcore as dc
from ..errors import NumericalError

TRUNK_WIDTHS = (32, 32)


class PathwayGenerator:
    """Data-dependent gate over m experts; owns its noise stream."""

    def __init__(
        self,
        input_dim: int,
        m: int,
        seed: int,
        noise_seed: int,
        trunk_widths: tuple[int, ...] = TRUNK_WIDTHS,
        noise_bias_init: float = -3.0,
    ):
        if m < 1:
            raise ValueError(f"hub size must be >= 1, got {m}")
        self.input_dim = int(input_dim)
        self.m = int(m)
        self.trunk_widths = tuple(int(w) for w in trunk_widths)
        self.mode = "train"
        self.noise_rng = np.random.default_rng(noise_seed)
        self.flops = 0

        rng = np.random.default_rng(seed)
        dims = (self.input_dim,) + self.trunk_widths
        self.trunk: list[dc.Parameter] = []
        for li, (fi, fo) in enumerate(zip(dims[:-1], dims[1:])):
            bound = np.sqrt(1.0 / fi)
            self.trunk.append(
                dc.Parameter(rng.uniform(-bound, bound, (fi, fo)), f"trunk_w{li}", "generator")
            )
            self.trunk.append(
                dc.Parameter(rng.uniform(-bound, bound, fo), f"trunk_b{li}", "generator")
            )
        last = dims[-1]
        bound = np.sqrt(1.0 / last)
        self.head_p = [
            dc.Parameter(rng.uniform(-bound, bound, (last, m)), "gate_w", "generator"),
            dc.Parameter(rng.uniform(-bound, bound, m), "gate_b", "generator"),
        ]
        # the noise head starts near-silent (softplus of a negative bias);
        # exploration pressure then comes from the entropy objective, and the
        # noise scale stays trainable either way
        self.head_n = [
            dc.Parameter(rng.uniform(-bound, bound, (last, m)), "noise_w", "generator"),
            dc.Parameter(np.full(m, float(noise_bias_init)), "noise_b", "generator"),
        ]

    def train(self) -> "PathwayGenerator":
        self.mode = "train"
        return self

    def eval(self) -> "PathwayGenerator":
        self.mode = "eval"
        return self

    def parameters(self) -> list[dc.Parameter]:
        return self.trunk + self.head_p + self.head_n

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def mac_count(self, with_noise_head: bool) -> int:
        dims = (self.input_dim,) + self.trunk_widths
        macs = sum(fi * fo for fi, fo in zip(dims[:-1], dims[1:]))
        macs += self.trunk_widths[-1] * self.m
        if with_noise_head:
            macs += self.trunk_widths[-1] * self.m
        return macs

    def reset_flops(self) -> None:
        self.flops = 0


def generate(gen: PathwayGenerator, x, eps: np.ndarray | None = None):
    """Dense pathway weights for a batch: ([B,m] tensor, recorded eps).

    eps, when given, overrides the noise draw (replay / frozen-noise checks);
    otherwise train mode draws fresh values and eval mode uses none at all.
    Each output row is a probability vector.
    """
    xt = x if isinstance(x, dc.Tensor) else dc.Tensor(x)
    if xt.data.ndim != 2 or xt.data.shape[1] != gen.input_dim:
        raise ValueError(
            f"generator expects [B,{gen.input_dim}] input, got {xt.data.shape}"
        )
    b = xt.data.shape[0]

    h = xt
    for li in range(len(gen.trunk_widths)):
        h = dc.tanh(dc.affine(h, gen.trunk[2 * li], gen.trunk[2 * li + 1]))
    scores = dc.affine(h, gen.head_p[0], gen.head_p[1])

    use_noise = eps is not None or gen.mode == "train"
    if use_noise:
        if eps is None:
            eps = gen.noise_rng.standard_normal((b, gen.m))
        else:
            eps = np.asarray(eps, dtype=np.float64)
            if eps.shape != (b, gen.m):
                raise ValueError(
                    f"eps shape {eps.shape} does not match ({b}, {gen.m})"
                )
        spread = dc.softplus(dc.affine(h, gen.head_n[0], gen.head_n[1]))
        z = dc.add(scores, dc.mul_const(spread, eps))
    else:
        eps = np.zeros((b, gen.m))
        z = scores

    if not np.all(np.isfinite(z.data)):
        raise NumericalError(
            f"gate pre-activation has non-finite entries (mode={gen.mode})"
        )
    dense = dc.softmax(z)
    gen.flops += gen.mac_count(with_noise_head=use_noise) * b
    return dense, eps
