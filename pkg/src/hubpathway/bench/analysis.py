"""Desk-scale analyses: ablation arms, weight quality, k sweeps, oracle table,
and the compute/memory comparison against single-model and ensemble baselines."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import diffcore as dc
from ..hub import Hub, expert_forward, replace_head
from ..objectives import MetricsRecord, TrainConfig, evaluate, train
from ..pathway import Aggregator, PathwayGenerator, predict
from ..seeds import AGGREGATOR, DRAWS, FINETUNE, GENERATOR, HEAD_INIT, NOISE, derive_seed
from .pretrain import PretrainConfig, fit_expert
from .synth import SyntheticTask


def adapt_hub(pretrained: Hub, n_classes: int, seed: int) -> Hub:
    """Clone the hub and swap every source head for a fresh target head."""
    adapted = []
    for i, e in enumerate(pretrained.experts):
        adapted.append(replace_head(e, n_classes, derive_seed(seed, HEAD_INIT, i)))
    return Hub(adapted)


@dataclass
class PathwayRun:
    mode: str
    k: int
    seed: int
    accuracy: float
    usage_entropy: float
    mean_weights: np.ndarray
    metrics: list[MetricsRecord]
    gen: PathwayGenerator = field(repr=False, default=None)
    agg: Aggregator = field(repr=False, default=None)
    hub: Hub = field(repr=False, default=None)


def run_pathway(pretrained: Hub, target_data, cfg: TrainConfig) -> PathwayRun:
    """One full target-training run from a fresh adaptation of the hub."""
    xtr, ytr, xte, yte = target_data
    n_classes = int(ytr.max()) + 1
    hub = adapt_hub(pretrained, n_classes, cfg.seed)
    gen = PathwayGenerator(
        hub.input_dim, hub.m,
        seed=derive_seed(cfg.seed, GENERATOR),
        noise_seed=derive_seed(cfg.seed, NOISE),
    )
    agg = Aggregator(hub.m, n_classes, seed=derive_seed(cfg.seed, AGGREGATOR))
    metrics = train(gen, agg, hub, (xtr, ytr), cfg)
    res = evaluate(gen, hub, agg, xte, yte, cfg.k)
    return PathwayRun(
        mode=cfg.mode, k=cfg.k, seed=cfg.seed,
        accuracy=res.accuracy, usage_entropy=res.usage_entropy,
        mean_weights=res.mean_weights, metrics=metrics,
        gen=gen, agg=agg, hub=hub,
    )


ABLATION_ARMS = ("full", "no_explore", "no_exploit", "random_path")


def run_ablations(
    pretrained: Hub,
    target_data,
    base_cfg: TrainConfig,
    seeds,
    arms=ABLATION_ARMS,
    keep_components: bool = False,
) -> dict[str, list[PathwayRun]]:
    out: dict[str, list[PathwayRun]] = {}
    for arm in arms:
        runs = []
        for seed in seeds:
            cfg = TrainConfig(
                k=base_cfg.k, lam=0.0 if arm == "no_explore" else base_cfg.lam,
                lr=base_cfg.lr, momentum=base_cfg.momentum, iters=base_cfg.iters,
                decay_milestones=base_cfg.decay_milestones,
                decay_factor=base_cfg.decay_factor, batch_size=base_cfg.batch_size,
                seed=seed, mode=arm, log_every=base_cfg.log_every,
            )
            run = run_pathway(pretrained, target_data, cfg)
            if not keep_components:
                run.gen, run.agg, run.hub = None, None, None
            runs.append(run)
        out[arm] = runs
    return out


@dataclass
class FinetunedSet:
    """Each hub expert individually adapted and fine-tuned on the target."""

    experts: list
    train_accs: list[float]
    test_accs: list[float]
    test_preds: np.ndarray      # [m, n_test] argmax predictions
    test_logits: np.ndarray     # [m, n_test, C]


def finetune_experts(
    pretrained: Hub, target_data, seed: int, cfg: TrainConfig
) -> FinetunedSet:
    """Fine-tune every expert alone on the target for the same budget."""
    xtr, ytr, xte, yte = target_data
    n_classes = int(ytr.max()) + 1
    pcfg = PretrainConfig(
        lr=cfg.lr, momentum=cfg.momentum, iters=cfg.iters,
        batch_size=cfg.batch_size, decay_milestones=cfg.decay_milestones,
        decay_factor=cfg.decay_factor,
    )
    experts, train_accs, test_accs = [], [], []
    preds, logits_all = [], []
    for i, e in enumerate(pretrained.experts):
        ft = replace_head(e, n_classes, derive_seed(seed, HEAD_INIT, i))
        acc, _ = fit_expert(
            ft, xtr, ytr, pcfg, derive_seed(seed, FINETUNE, i), stop_acc=2.0
        )
        logits = expert_forward(ft, xte).data
        experts.append(ft)
        train_accs.append(acc)
        test_accs.append(float((logits.argmax(axis=1) == yte).mean()))
        preds.append(logits.argmax(axis=1))
        logits_all.append(logits)
    return FinetunedSet(
        experts, train_accs, test_accs, np.array(preds), np.array(logits_all)
    )


@dataclass
class WeightQuality:
    top_acc: float
    random_acc: float
    subset_size: int


def weight_quality(
    run: PathwayRun, ft: FinetunedSet, xte: np.ndarray, yte: np.ndarray,
    draws: int = 100, seed: int = 0,
) -> WeightQuality:
    """On samples some fine-tuned expert gets right: highest-weight expert's
    accuracy vs a uniformly drawn expert (averaged over `draws` draws)."""
    if run.gen is None:
        raise ValueError("weight_quality needs a run kept with components")
    correct_any = (ft.test_preds == yte[None, :]).any(axis=0)
    subset = np.flatnonzero(correct_any)
    if subset.size == 0:
        return WeightQuality(float("nan"), float("nan"), 0)

    res = evaluate(run.gen, run.hub, run.agg, xte, yte, run.k)
    top_expert = res.dense.argmax(axis=1)
    hit = ft.test_preds[top_expert[subset], subset] == yte[subset]
    top_acc = float(hit.mean())

    rng = np.random.default_rng(derive_seed(seed, DRAWS))
    rand_accs = []
    for _ in range(draws):
        choice = rng.integers(0, len(ft.experts), size=subset.size)
        rand_accs.append(
            float((ft.test_preds[choice, subset] == yte[subset]).mean())
        )
    return WeightQuality(top_acc, float(np.mean(rand_accs)), int(subset.size))


@dataclass
class KSweepPoint:
    k: int
    accuracies: list[float]
    median_accuracy: float
    expert_macs_per_sample: float


def k_sweep(
    pretrained: Hub, target_data, base_cfg: TrainConfig, ks, seeds
) -> list[KSweepPoint]:
    """Full training per k; FLOPs measured on the test pass of the first seed."""
    xtr, ytr, xte, yte = target_data
    points = []
    for k in ks:
        accs, macs = [], None
        for si, seed in enumerate(seeds):
            cfg = TrainConfig(
                k=int(k), lam=base_cfg.lam, lr=base_cfg.lr,
                momentum=base_cfg.momentum, iters=base_cfg.iters,
                decay_milestones=base_cfg.decay_milestones,
                decay_factor=base_cfg.decay_factor,
                batch_size=base_cfg.batch_size, seed=seed,
                mode=base_cfg.mode, log_every=base_cfg.log_every,
            )
            run = run_pathway(pretrained, target_data, cfg)
            accs.append(run.accuracy)
            if si == 0:
                run.hub.reset_flops()
                evaluate(run.gen, run.hub, run.agg, xte, yte, cfg.k)
                macs = run.hub.total_flops() / xte.shape[0]
        points.append(
            KSweepPoint(int(k), accs, float(np.median(accs)), float(macs))
        )
    return points


@dataclass
class OracleTable:
    best_single: float
    ensemble_top2: float
    hub_pathway: float
    oracle: float


def oracle_comparison(ft: FinetunedSet, yte: np.ndarray, hub_pathway_acc: float) -> OracleTable:
    """Task-level baselines vs per-sample upper bound.

    Best Single picks one fine-tuned expert for the whole task; Ensemble
    Top-2 logit-averages the two best (both chosen by training accuracy, so
    no test leakage); Oracle counts a sample correct when any fine-tuned
    expert gets it right.
    """
    best_single = max(ft.test_accs)
    order = np.argsort(ft.train_accs)[::-1][:2]
    mean_logits = ft.test_logits[order].mean(axis=0)
    ensemble = float((mean_logits.argmax(axis=1) == yte).mean())
    oracle = float((ft.test_preds == yte[None, :]).any(axis=0).mean())
    return OracleTable(float(best_single), ensemble, float(hub_pathway_acc), oracle)


@dataclass
class ComplexityRow:
    method: str
    params: int
    expert_macs_per_sample: float
    generator_macs_per_sample: float
    aggregator_macs_per_sample: float
    samples_per_sec: float
    resident_bytes: int


def _time_forward(fn, x: np.ndarray, batch_size: int = 256, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for lo in range(0, x.shape[0], batch_size):
            fn(x[lo : lo + batch_size])
        best = min(best, time.perf_counter() - t0)
    return x.shape[0] / best


def _tape_bytes(fn, x: np.ndarray) -> int:
    with dc.Tape() as tape:
        fn(x)
        return tape.resident_bytes()


def complexity_table(
    run: PathwayRun, ft: FinetunedSet, xte: np.ndarray, batch_size: int = 256
) -> list[ComplexityRow]:
    """Single fine-tuned model vs full ensemble vs the routed hub."""
    if run.gen is None:
        raise ValueError("complexity_table needs a run kept with components")
    best = int(np.argmax(ft.train_accs))
    single = ft.experts[best]
    probe = xte[: min(batch_size, xte.shape[0])]

    def single_fwd(xb):
        expert_forward(single, xb)

    def ensemble_fwd(xb):
        for e in ft.experts:
            expert_forward(e, xb)

    def pathway_fwd(xb):
        predict(run.gen, run.hub, run.agg, xb, run.k)

    run.gen.eval()
    run.hub.reset_flops()
    run.gen.reset_flops()
    run.agg.reset_flops()
    for lo in range(0, xte.shape[0], batch_size):
        pathway_fwd(xte[lo : lo + batch_size])
    n = xte.shape[0]
    pathway_expert_macs = run.hub.total_flops() / n
    gen_macs = run.gen.flops / n
    agg_macs = run.agg.flops / n

    single_params = single.arch.param_count()
    ens_params = sum(e.arch.param_count() for e in ft.experts)
    pathway_params = (
        sum(e.arch.param_count() for e in run.hub.experts)
        + sum(p.data.size for p in run.gen.parameters())
        + sum(p.data.size for p in run.agg.parameters())
    )

    rows = [
        ComplexityRow(
            "single", single_params, float(single.arch.mac_count()), 0.0, 0.0,
            _time_forward(single_fwd, xte, batch_size),
            single_params * 8 + _tape_bytes(single_fwd, probe),
        ),
        ComplexityRow(
            "ensemble", ens_params,
            float(sum(e.arch.mac_count() for e in ft.experts)), 0.0, 0.0,
            _time_forward(ensemble_fwd, xte, batch_size),
            ens_params * 8 + _tape_bytes(ensemble_fwd, probe),
        ),
        ComplexityRow(
            "hub_pathway", pathway_params, float(pathway_expert_macs),
            float(gen_macs), float(agg_macs),
            _time_forward(pathway_fwd, xte, batch_size),
            pathway_params * 8 + _tape_bytes(pathway_fwd, probe),
        ),
    ]
    return rows
