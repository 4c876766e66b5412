"""Training configuration: everything a reproducible run needs."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError

MODES = ("full", "no_explore", "no_exploit", "random_path")


@dataclass
class TrainConfig:
    k: int = 2
    lam: float = 0.3
    lr: float = 0.01
    momentum: float = 0.9
    iters: int = 500
    decay_milestones: tuple[int, ...] = (200, 400)
    decay_factor: float = 0.1
    batch_size: int = 32
    seed: int = 0
    mode: str = "full"
    log_every: int = 100

    def __post_init__(self):
        self.decay_milestones = tuple(int(v) for v in self.decay_milestones)
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if not 0 < self.decay_factor <= 1:
            raise ConfigError(
                f"decay factor must be in (0, 1], got {self.decay_factor}"
            )
        if self.iters < 1 or self.batch_size < 1 or self.log_every < 1:
            raise ConfigError(
                f"iters/batch_size/log_every must be positive, got "
                f"{self.iters}/{self.batch_size}/{self.log_every}"
            )
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")

    def lr_at(self, iteration: int) -> float:
        """Step schedule: multiply by the decay factor at each passed milestone."""
        lr = self.lr
        for ms in self.decay_milestones:
            if iteration >= ms:
                lr *= self.decay_factor
        return lr


@dataclass
class MetricsRecord:
    """One logged training snapshot."""

    iteration: int
    l_task: float
    l_explore: float
    l_exploit: float
    acc: float
    usage_entropy: float
    flops_cum: int
    w_mean: tuple[float, ...]
    activations: tuple[int, ...] = field(default=(), compare=False)

    def line(self) -> str:
        """Fixed-layout text record; %.17g keeps float round trips bit-faithful."""
        vals = [
            str(self.iteration),
            *(f"{v:.17g}" for v in (
                self.l_task, self.l_explore, self.l_exploit,
                self.acc, self.usage_entropy,
            )),
            str(self.flops_cum),
            *(f"{w:.17g}" for w in self.w_mean),
        ]
        return ",".join(vals)


def metrics_header(m: int) -> str:
    cols = ["iter", "l_task", "l_explore", "l_exploit", "acc", "usage_entropy", "flops_cum"]
    cols += [f"w_mean_{i}" for i in range(1, m + 1)]
    return ",".join(cols)


def parse_metrics_line(line: str) -> MetricsRecord:
    parts = line.strip().split(",")
    m = len(parts) - 7
    return MetricsRecord(
        iteration=int(parts[0]),
        l_task=float(parts[1]),
        l_explore=float(parts[2]),
        l_exploit=float(parts[3]),
        acc=float(parts[4]),
        usage_entropy=float(parts[5]),
        flops_cum=int(parts[6]),
        w_mean=tuple(float(v) for v in parts[7 : 7 + m]),
    )
