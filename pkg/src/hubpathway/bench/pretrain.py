"""Hub manufacturing: pretrain one expert per source task and checkpoint it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import diffcore as dc
from ..hub import ArchDescriptor, Expert, Hub, build_expert, expert_forward, save_hub
from ..objectives import SGDMomentum, minibatches
from ..seeds import PRETRAIN, derive_seed
from .synth import SyntheticTask

# Heterogeneous default bodies: depths, widths and activations all differ.
DEFAULT_BODIES = (
    ((16, 96, 48), "relu"),
    ((16, 64, 64, 32), "tanh"),
    ((16, 80, 48), "relu"),
    ((16, 72, 56), "tanh"),
    ((16, 88, 44), "relu"),
)


@dataclass
class PretrainConfig:
    lr: float = 0.01
    momentum: float = 0.9
    iters: int = 600
    batch_size: int = 32
    decay_milestones: tuple[int, ...] = (400, 520)
    decay_factor: float = 0.1
    target_acc: float = 0.95
    floor_acc: float = 0.80
    check_every: int = 50


@dataclass
class HubEntry:
    task: SyntheticTask
    arch: ArchDescriptor
    config: PretrainConfig


@dataclass
class HubSpec:
    entries: list[HubEntry]
    seed: int

    def __post_init__(self):
        if len(self.entries) < 2:
            raise ValueError("a hub spec needs at least two source tasks")
        dims = {e.arch.input_dim for e in self.entries}
        task_dims = {e.task.input_dim for e in self.entries}
        if len(dims | task_dims) != 1:
            raise ValueError(
                f"hub entries disagree on input dim: archs {sorted(dims)}, tasks {sorted(task_dims)}"
            )


@dataclass
class PretrainReport:
    name: str
    train_acc: float
    test_acc: float
    iters_used: int
    converged: bool
    flagged: bool = field(default=False)


def default_hub_spec(sources: list[SyntheticTask], seed: int) -> HubSpec:
    if len(sources) != len(DEFAULT_BODIES):
        raise ValueError(
            f"default bodies cover {len(DEFAULT_BODIES)} sources, got {len(sources)}"
        )
    cfg = PretrainConfig()
    entries = [
        HubEntry(task, ArchDescriptor(widths, act, task.n_classes), cfg)
        for task, (widths, act) in zip(sources, DEFAULT_BODIES)
    ]
    return HubSpec(entries, seed)


def fit_expert(
    expert: Expert,
    x: np.ndarray,
    y: np.ndarray,
    cfg: PretrainConfig,
    seed: int,
    stop_acc: float | None = None,
):
    """Plain cross-entropy SGD on one expert; returns (train_acc, iters_used).

    Stops early once full-train-set accuracy reaches stop_acc (checked every
    cfg.check_every iterations), otherwise runs to the iteration cap.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    opt = SGDMomentum(expert.parameters(), cfg.momentum)
    rng = np.random.default_rng(seed)
    stop = cfg.target_acc if stop_acc is None else stop_acc

    def train_accuracy() -> float:
        logits = expert_forward(expert, x)
        return float((logits.data.argmax(axis=1) == y).mean())

    it = 0
    for xb, yb in minibatches(x, y, cfg.batch_size, cfg.iters, rng):
        it += 1
        lr = cfg.lr
        for ms in cfg.decay_milestones:
            if it >= ms:
                lr *= cfg.decay_factor
        expert.zero_grad()
        with dc.Tape() as tape:
            loss = dc.cross_entropy(expert_forward(expert, xb), yb)
            tape.backward(loss)
        opt.step(lr)
        if it % cfg.check_every == 0 and train_accuracy() >= stop:
            return train_accuracy(), it
    return train_accuracy(), it


def pretrain_hub(spec: HubSpec, out_dir=None):
    """Train each entry's expert on its source task; checkpoint when out_dir given.

    An expert that ends below its config's floor accuracy is flagged in the
    report but stays in the hub.
    """
    experts, reports = [], []
    for i, entry in enumerate(spec.entries):
        seed = derive_seed(spec.seed, PRETRAIN, i)
        expert = build_expert(entry.arch, seed, expert_id=i + 1, provenance=entry.task.name)
        xtr, ytr, xte, yte = entry.task.sample()
        train_acc, iters_used = fit_expert(expert, xtr, ytr, entry.config, seed + 1)
        logits = expert_forward(expert, xte)
        test_acc = float((logits.data.argmax(axis=1) == yte).mean())
        converged = train_acc >= entry.config.target_acc
        reports.append(
            PretrainReport(
                name=entry.task.name,
                train_acc=train_acc,
                test_acc=test_acc,
                iters_used=iters_used,
                converged=converged,
                flagged=train_acc < entry.config.floor_acc,
            )
        )
        expert.reset_flops()
        experts.append(expert)
    hub = Hub(experts)
    if out_dir is not None:
        save_hub(hub, out_dir)
    return hub, reports
