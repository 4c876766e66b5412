"""Dual-objective training loop.

One shared forward pass produces all three losses; a single backward then
delivers exactly the right gradients to each side because the graph keeps the
objectives structurally apart: the exploration term only reaches the
generator, the exploitation term only reaches expert parameters, and the task
term reaches everything on its path. Two optimizer instances, one for
generator+aggregator and one for the experts, share the same schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import diffcore as dc
from ..errors import NumericalError
from ..hub import Hub
from ..pathway import Aggregator, PathwayGenerator, generate, route_and_aggregate, topk_filter
from ..seeds import NOISE, RANDOM_PATH, SHUFFLE, derive_seed
from .config import MetricsRecord, TrainConfig
from .losses import exploit_loss, explore_loss, task_loss
from .optim import SGDMomentum


def usage_entropy(mean_weights: np.ndarray) -> float:
    p = np.asarray(mean_weights, dtype=np.float64)
    pos = p > 0
    return float(-(p[pos] * np.log(p[pos])).sum())


def total_flops(gen: PathwayGenerator, agg: Aggregator, hub: Hub) -> int:
    return gen.flops + agg.flops + hub.total_flops()


def train_step(
    gen: PathwayGenerator,
    agg: Aggregator,
    hub: Hub,
    batch,
    cfg: TrainConfig,
    optimizers: tuple[SGDMomentum, SGDMomentum],
    lr: float | None = None,
    path_rng: np.random.Generator | None = None,
    iteration: int = 0,
) -> MetricsRecord:
    """One optimization step on a (x, y) minibatch.

    Aborts before any parameter update if a loss comes out non-finite.
    """
    x, y = batch
    xt = x if isinstance(x, dc.Tensor) else dc.Tensor(x)
    y = np.asarray(y, dtype=np.int64)
    b = xt.data.shape[0]
    lr = cfg.lr_at(iteration) if lr is None else lr

    gen.zero_grad()
    agg.zero_grad()
    hub.zero_grad()

    with dc.Tape() as tape:
        if cfg.mode == "random_path":
            if path_rng is None:
                path_rng = np.random.default_rng(derive_seed(cfg.seed, RANDOM_PATH))
            dense = dc.Tensor(path_rng.dirichlet(np.ones(hub.m), size=b))
        else:
            dense, _ = generate(gen, xt)
        pw = topk_filter(dense, cfg.k)
        logits, cache = route_and_aggregate(hub, agg, pw, xt)

        l_task = task_loss(logits, y)
        l_explore = explore_loss(dense)
        l_exploit = exploit_loss(hub, pw, xt, y, cache=cache)

        total = l_task
        if cfg.mode != "no_explore":
            total = dc.add(total, dc.scale(l_explore, cfg.lam))
        if cfg.mode != "no_exploit":
            total = dc.add(total, l_exploit)

        for name, t in (
            ("task", l_task), ("explore", l_explore), ("exploit", l_exploit),
        ):
            if not np.isfinite(float(t.data)):
                raise NumericalError(
                    f"{name} loss is non-finite at iteration {iteration}; "
                    "step aborted, parameters unchanged"
                )
        tape.backward(total)

    for opt in optimizers:
        opt.step(lr)

    w_mean = dense.data.mean(axis=0)
    acc = float((logits.data.argmax(axis=1) == y).mean())
    counts = np.zeros(hub.m, dtype=np.int64)
    for i, rows in enumerate(cache.rows):
        counts[i] = rows.size
    return MetricsRecord(
        iteration=iteration,
        l_task=float(l_task.data),
        l_explore=float(l_explore.data),
        l_exploit=float(l_exploit.data),
        acc=acc,
        usage_entropy=usage_entropy(w_mean),
        flops_cum=total_flops(gen, agg, hub),
        w_mean=tuple(w_mean),
        activations=tuple(counts),
    )


def make_optimizers(
    gen: PathwayGenerator, agg: Aggregator, hub: Hub, cfg: TrainConfig
) -> tuple[SGDMomentum, SGDMomentum]:
    gate_side = SGDMomentum(gen.parameters() + agg.parameters(), cfg.momentum)
    expert_side = SGDMomentum(hub.parameters(), cfg.momentum)
    return gate_side, expert_side


def minibatches(x: np.ndarray, y: np.ndarray, batch_size: int, iters: int, rng):
    """Seeded shuffled minibatches, reshuffling at each pass over the data."""
    n = x.shape[0]
    b = min(batch_size, n)
    produced = 0
    while produced < iters:
        perm = rng.permutation(n)
        for lo in range(0, n - b + 1, b):
            if produced >= iters:
                return
            idx = perm[lo : lo + b]
            yield x[idx], y[idx]
            produced += 1


def train(
    gen: PathwayGenerator,
    agg: Aggregator,
    hub: Hub,
    dataset,
    cfg: TrainConfig,
    metrics_sink=None,
) -> list[MetricsRecord]:
    """Run cfg.iters steps over seeded-shuffled minibatches of (X, y).

    Deterministic for fixed (cfg, dataset, component seeds). Records one
    MetricsRecord every cfg.log_every iterations plus the final one;
    metrics_sink, when given, receives each record as it is produced.
    """
    x, y = dataset
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    gen.train()
    gen.noise_rng = np.random.default_rng(derive_seed(cfg.seed, NOISE))
    shuffle_rng = np.random.default_rng(derive_seed(cfg.seed, SHUFFLE))
    path_rng = np.random.default_rng(derive_seed(cfg.seed, RANDOM_PATH))
    optimizers = make_optimizers(gen, agg, hub, cfg)

    records: list[MetricsRecord] = []
    for it, batch in enumerate(
        minibatches(x, y, cfg.batch_size, cfg.iters, shuffle_rng), start=1
    ):
        rec = train_step(
            gen, agg, hub, batch, cfg, optimizers,
            lr=cfg.lr_at(it), path_rng=path_rng, iteration=it,
        )
        if it % cfg.log_every == 0 or it == cfg.iters:
            records.append(rec)
            if metrics_sink is not None:
                metrics_sink(rec)
    return records


@dataclass
class EvalResult:
    accuracy: float
    dense: np.ndarray
    active: np.ndarray
    mean_weights: np.ndarray
    usage_entropy: float


def evaluate(
    gen: PathwayGenerator,
    hub: Hub,
    agg: Aggregator,
    x: np.ndarray,
    y: np.ndarray,
    k: int,
    batch_size: int = 256,
) -> EvalResult:
    """Deterministic eval-mode pass over a dataset (noise off, no tape)."""
    from ..pathway import predict

    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    mode = gen.mode
    gen.eval()
    correct = 0
    dense_rows, active_rows = [], []
    for lo in range(0, x.shape[0], batch_size):
        xb, yb = x[lo : lo + batch_size], y[lo : lo + batch_size]
        logits, pw = predict(gen, hub, agg, xb, k)
        correct += int((logits.data.argmax(axis=1) == yb).sum())
        dense_rows.append(pw.dense.data)
        active_rows.append(pw.active)
    gen.mode = mode
    dense = np.vstack(dense_rows)
    mean_w = dense.mean(axis=0)
    return EvalResult(
        accuracy=correct / x.shape[0],
        dense=dense,
        active=np.vstack(active_rows),
        mean_weights=mean_w,
        usage_entropy=usage_entropy(mean_w),
    )
