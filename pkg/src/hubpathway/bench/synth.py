"""Synthetic Gaussian-mixture tasks with controllable source/target relevance.

The default suite pairs an 8-class target with five source tasks whose
transferability genuinely varies:

  rot_copy    a gently rotated copy of the whole target (near-target)
  shift_copy  the target with slightly displaced cluster means (near-target)
  low_half    only the target's classes 0..3 (strong in half the input space)
  high_half   only the target's classes 4..7
  disjoint    freshly drawn clusters, unrelated to the target

The half-coverage sources make routing genuinely data-dependent: which expert
helps most depends on where the sample sits, not just on which dataset it
came from. The "redundant" suite instead uses five near-duplicate rotated
copies, the setting in which a gate trained without the exploration term
collapses onto a few experts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..seeds import SUITE, derive_seed

INPUT_DIM = 16
TARGET_CLASSES = 8
TARGET_TRAIN = 2000
TARGET_TEST = 1000
SOURCE_TRAIN = 1400
SOURCE_TEST = 600

MEAN_SCALE = 0.62          # cluster-center spread; sets target difficulty
NEAR_ROTATION = 0.35       # skew magnitude for the rotated near copy
NEAR_SHIFT = 0.30          # per-coordinate displacement of the shifted copy
ALT_ROTATION = 0.9         # rotation for the alternative target variant
REDUNDANT_ROTATIONS = (0.04, 0.08, 0.12, 0.16, 0.20)

SUITE_NAMES = ("default", "redundant")


@dataclass
class SyntheticTask:
    """A Gaussian cluster classification task, bit-reproducible from its spec."""

    name: str
    means: np.ndarray          # [C, D] cluster centers
    std: float                 # isotropic within-cluster scale
    n_train: int
    n_test: int
    seed: int

    @property
    def input_dim(self) -> int:
        return self.means.shape[1]

    @property
    def n_classes(self) -> int:
        return self.means.shape[0]

    def _balanced_counts(self, n: int) -> np.ndarray:
        c = self.n_classes
        counts = np.full(c, n // c, dtype=np.int64)
        counts[: n % c] += 1
        return counts

    def _draw(self, rng, n: int):
        xs, ys = [], []
        for cls, cnt in enumerate(self._balanced_counts(n)):
            xs.append(self.means[cls] + self.std * rng.standard_normal((cnt, self.input_dim)))
            ys.append(np.full(cnt, cls, dtype=np.int64))
        x = np.vstack(xs)
        y = np.concatenate(ys)
        perm = rng.permutation(n)
        return x[perm], y[perm]

    def sample(self):
        """(x_train, y_train, x_test, y_test); identical for identical (spec, seed)."""
        rng = np.random.default_rng(self.seed)
        xtr, ytr = self._draw(rng, self.n_train)
        xte, yte = self._draw(rng, self.n_test)
        return xtr, ytr, xte, yte


def _rotation(rng, dim: int, magnitude: float) -> np.ndarray:
    """Orthogonal matrix near the identity; magnitude scales the skew part."""
    a = rng.standard_normal((dim, dim))
    skew = (a - a.T) / 2.0
    q, r = np.linalg.qr(np.eye(dim) + magnitude * skew)
    return q * np.sign(np.diag(r))


def make_suite(seed: int, name: str = "default"):
    """Source tasks plus the target task; see the module docstring for roles."""
    if name not in SUITE_NAMES:
        raise ValueError(f"suite name must be one of {SUITE_NAMES}, got {name!r}")
    base = derive_seed(seed, SUITE)
    rng = np.random.default_rng(base)
    means = MEAN_SCALE * rng.standard_normal((TARGET_CLASSES, INPUT_DIM))
    target = SyntheticTask("target", means, 1.0, TARGET_TRAIN, TARGET_TEST, base + 100)

    if name == "redundant":
        sources = []
        for i, mag in enumerate(REDUNDANT_ROTATIONS):
            rot = _rotation(rng, INPUT_DIM, mag)
            sources.append(
                SyntheticTask(
                    f"copy_{i}", means @ rot, 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 200 + i
                )
            )
        return sources, target

    rot_near = _rotation(rng, INPUT_DIM, NEAR_ROTATION)
    shift = NEAR_SHIFT * rng.standard_normal((TARGET_CLASSES, INPUT_DIM))
    disjoint_means = MEAN_SCALE * rng.standard_normal((6, INPUT_DIM))
    sources = [
        SyntheticTask("rot_copy", means @ rot_near, 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 200),
        SyntheticTask("shift_copy", means + shift, 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 201),
        SyntheticTask("low_half", means[:4].copy(), 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 202),
        SyntheticTask("high_half", means[4:].copy(), 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 203),
        SyntheticTask("disjoint", disjoint_means, 1.0, SOURCE_TRAIN, SOURCE_TEST, base + 204),
    ]
    return sources, target


def alt_target(seed: int) -> SyntheticTask:
    """A second target over the same input space, for weight-profile contrasts."""
    base = derive_seed(seed, SUITE)
    rng = np.random.default_rng(base)
    means = MEAN_SCALE * rng.standard_normal((TARGET_CLASSES, INPUT_DIM))
    rot = _rotation(rng, INPUT_DIM, ALT_ROTATION)
    return SyntheticTask("target_alt", means @ rot, 1.0, TARGET_TRAIN, TARGET_TEST, base + 300)


def write_task_csv(path, x: np.ndarray, y: np.ndarray) -> None:
    """Dataset file: header row, columns f_0..f_{D-1}, label."""
    d = x.shape[1]
    header = ",".join([f"f_{i}" for i in range(d)] + ["label"])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row, label in zip(x, y):
            fh.write(",".join(f"{v:.17g}" for v in row) + f",{int(label)}\n")


def read_task_csv(path):
    raw = Path(path).read_text().splitlines()
    header = raw[0].split(",")
    d = len(header) - 1
    x = np.empty((len(raw) - 1, d))
    y = np.empty(len(raw) - 1, dtype=np.int64)
    for i, line in enumerate(raw[1:]):
        parts = line.split(",")
        x[i] = [float(v) for v in parts[:d]]
        y[i] = int(parts[d])
    return x, y


def linear_probe_accuracy(
    f_train: np.ndarray,
    y_train: np.ndarray,
    f_test: np.ndarray,
    y_test: np.ndarray,
    ridge: float = 1e-3,
) -> float:
    """Closed-form ridge regression to one-hot targets, argmax prediction.

    Used as the independent oracle for feature quality; no iterative training
    involved.
    """
    n, d = f_train.shape
    c = int(y_train.max()) + 1
    a = np.hstack([f_train, np.ones((n, 1))])
    onehot = np.zeros((n, c))
    onehot[np.arange(n), y_train] = 1.0
    gram = a.T @ a + ridge * np.eye(d + 1)
    w = np.linalg.solve(gram, a.T @ onehot)
    pred = (np.hstack([f_test, np.ones((f_test.shape[0], 1))]) @ w).argmax(axis=1)
    return float((pred == y_test).mean())
