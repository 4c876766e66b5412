"""Losses and the dual-parameter-group optimization loop."""

from .config import (
    MODES,
    MetricsRecord,
    TrainConfig,
    metrics_header,
    parse_metrics_line,
)
from .losses import exploit_loss, explore_loss, task_loss
from .optim import SGDMomentum
from .train import (
    EvalResult,
    evaluate,
    make_optimizers,
    minibatches,
    total_flops,
    train,
    train_step,
    usage_entropy,
)

__all__ = [
    "TrainConfig", "MODES", "MetricsRecord", "metrics_header", "parse_metrics_line",
    "task_loss", "explore_loss", "exploit_loss",
    "SGDMomentum", "make_optimizers",
    "train_step", "train", "minibatches", "usage_entropy", "total_flops",
    "evaluate", "EvalResult",
]
