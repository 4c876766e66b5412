"""SGD with momentum, one instance per objective line.

Momentum buffers exist only for the parameters handed to the optimizer, so
each instance can only ever touch its own group. A step with zero gradient
and zero momentum leaves parameters bit-unchanged.
"""

from __future__ import annotations

import numpy as np

from ..diffcore import Parameter


class SGDMomentum:
    def __init__(self, params: list[Parameter], momentum: float = 0.9):
        self.params = list(params)
        self.momentum = float(momentum)
        self.buffers = {id(p): np.zeros_like(p.data) for p in self.params}

    def groups(self) -> set[str]:
        return {p.group for p in self.params}

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self, lr: float) -> None:
        for p in self.params:
            g = p.grad
            if g is None:
                continue
            buf = self.buffers[id(p)]
            buf *= self.momentum
            buf += g
            p.tensor.data -= lr * buf
