"""Experts: MLP predictors built from architecture descriptors.

An expert is a body of affine+activation layers followed by a replaceable
output head. Bodies may differ per expert in depth, widths and activation;
only the input dimension is pinned by the data. Forward passes maintain an
analytic multiply-accumulate counter used by the routing tests and the
complexity report (plain int increments; single-threaded per expert, distinct
experts may run concurrently).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import diffcore as dc

ACTIVATIONS = ("relu", "tanh")


@dataclass
class ArchDescriptor:
    """Layer plan: input dim first, body widths after, then the head.

    `target_head_width` stays None until the expert is adapted to a target
    task; the live head width is the target one when set, else the source.
    """

    widths: tuple[int, ...]
    activation: str
    source_head_width: int
    target_head_width: int | None = None

    def __post_init__(self):
        self.widths = tuple(int(w) for w in self.widths)
        if len(self.widths) < 2:
            raise ValueError(f"need input dim plus at least one body layer, got {self.widths}")
        if any(w <= 0 for w in self.widths):
            raise ValueError(f"widths must be positive, got {self.widths}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if self.source_head_width <= 0:
            raise ValueError(f"source head width must be positive, got {self.source_head_width}")
        if self.target_head_width is not None and self.target_head_width <= 0:
            raise ValueError(f"target head width must be positive, got {self.target_head_width}")

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def head_width(self) -> int:
        return self.target_head_width if self.target_head_width is not None else self.source_head_width

    def layer_shapes(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) of every affine layer, head included."""
        dims = list(self.widths) + [self.head_width]
        return list(zip(dims[:-1], dims[1:]))

    def param_count(self) -> int:
        return sum(i * o + o for i, o in self.layer_shapes())

    def mac_count(self) -> int:
        """Analytic multiply-accumulates per sample (affine layers only)."""
        return sum(i * o for i, o in self.layer_shapes())


@dataclass
class Expert:
    """One pretrained predictor in the hub."""

    id: int
    arch: ArchDescriptor
    params: list[dc.Parameter]
    provenance: str = ""
    flops: int = field(default=0, compare=False)

    @property
    def group(self) -> str:
        return f"expert:{self.id}"

    def parameters(self) -> list[dc.Parameter]:
        return self.params

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def reset_flops(self) -> None:
        self.flops = 0

    def clone(self, expert_id: int | None = None) -> "Expert":
        """Deep parameter copy; the clone starts with a zero FLOP counter."""
        new_id = self.id if expert_id is None else expert_id
        arch = ArchDescriptor(
            self.arch.widths,
            self.arch.activation,
            self.arch.source_head_width,
            self.arch.target_head_width,
        )
        params = [
            dc.Parameter(p.data.copy(), p.name, f"expert:{new_id}") for p in self.params
        ]
        return Expert(new_id, arch, params, self.provenance)


def _init_params(shapes, rng, group) -> list[dc.Parameter]:
    params = []
    for li, (fan_in, fan_out) in enumerate(shapes):
        bound = np.sqrt(1.0 / fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        b = rng.uniform(-bound, bound, size=fan_out)
        params.append(dc.Parameter(w, f"w{li}", group))
        params.append(dc.Parameter(b, f"b{li}", group))
    return params


def build_expert(
    arch: ArchDescriptor, seed: int, expert_id: int = 1, provenance: str = ""
) -> Expert:
    """Fresh expert with uniform fan-in initialization, deterministic in (arch, seed)."""
    rng = np.random.default_rng(seed)
    params = _init_params(arch.layer_shapes(), rng, f"expert:{expert_id}")
    return Expert(expert_id, arch, params, provenance)


def replace_head(expert: Expert, target_classes: int, seed: int) -> Expert:
    """Adapt an expert to a target task: keep the body, re-initialize the head.

    Body parameters are copied bit-exactly; the new head maps the last body
    width to `target_classes` logits.
    """
    if target_classes <= 0:
        raise ValueError(f"target class count must be positive, got {target_classes}")
    arch = ArchDescriptor(
        expert.arch.widths,
        expert.arch.activation,
        expert.arch.source_head_width,
        target_classes,
    )
    group = f"expert:{expert.id}"
    body = [
        dc.Parameter(p.data.copy(), p.name, group) for p in expert.params[:-2]
    ]
    rng = np.random.default_rng(seed)
    head_in = expert.arch.widths[-1]
    bound = np.sqrt(1.0 / head_in)
    li = len(expert.arch.widths) - 1
    head_w = dc.Parameter(
        rng.uniform(-bound, bound, size=(head_in, target_classes)), f"w{li}", group
    )
    head_b = dc.Parameter(rng.uniform(-bound, bound, size=target_classes), f"b{li}", group)
    return Expert(expert.id, arch, body + [head_w, head_b], expert.provenance)


def expert_forward(expert: Expert, x) -> dc.Tensor:
    """Logits for a batch; bumps the expert's MAC counter by mac_count * rows."""
    xt = x if isinstance(x, dc.Tensor) else dc.Tensor(x)
    if xt.data.ndim != 2 or xt.data.shape[1] != expert.arch.input_dim:
        raise ValueError(
            f"expert {expert.id} expects [B,{expert.arch.input_dim}] input, got {xt.data.shape}"
        )
    act = dc.relu if expert.arch.activation == "relu" else dc.tanh
    h = xt
    n_body = len(expert.arch.widths) - 1
    for li in range(n_body):
        h = act(dc.affine(h, expert.params[2 * li], expert.params[2 * li + 1]))
    logits = dc.affine(h, expert.params[-2], expert.params[-1])
    expert.flops += expert.arch.mac_count() * xt.data.shape[0]
    return logits
