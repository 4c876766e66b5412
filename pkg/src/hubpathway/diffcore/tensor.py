"""Dense float64 tensors and the flat recording tape.

Everything downstream (experts, gate, aggregator) is built from these pieces.
A `Tape` records one entry per primitive op in forward order; `backward`
replays the entries strictly in reverse, accumulating gradients additively
into each tensor's `grad` buffer. Callers zero gradients between optimization
steps; the tape never does it for them.

Threading contract: a tape and the tensors attached to it belong to a single
thread. Tensors that are not being recorded may be shared read-only.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Tensor", "Parameter", "TapeEntry", "Tape", "active_tape"]


class Tensor:
    """A shape-carrying float64 array with an optional gradient buffer.

    `grad` stays None until the tensor participates in a backward pass.
    """

    __slots__ = ("data", "grad")

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    def ensure_grad(self) -> np.ndarray:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        return self.grad

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def nbytes(self) -> int:
        n = self.data.nbytes
        if self.grad is not None:
            n += self.grad.nbytes
        return n

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"


class Parameter:
    """A named, trainable tensor pinned to an optimizer group.

    The group ("generator", "aggregator", or "expert:<i>") is fixed at
    construction and decides which of the two training objectives updates it.
    """

    __slots__ = ("tensor", "name", "group")

    def __init__(self, data, name: str, group: str):
        self.tensor = data if isinstance(data, Tensor) else Tensor(data)
        self.name = name
        self.group = group

    @property
    def data(self) -> np.ndarray:
        return self.tensor.data

    @property
    def grad(self):
        return self.tensor.grad

    def zero_grad(self) -> None:
        self.tensor.zero_grad()

    def __repr__(self):
        return f"Parameter({self.name!r}, group={self.group!r}, shape={self.data.shape})"


class TapeEntry:
    __slots__ = ("op", "inputs", "output", "backward")

    def __init__(self, op: str, inputs, output: Tensor, backward):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.backward = backward


_ACTIVE: list["Tape"] = []


def active_tape():
    """The innermost recording tape, or None when running forward-only."""
    return _ACTIVE[-1] if _ACTIVE else None


class Tape:
    """Flat op recording; backward walks entries in exact reverse order."""

    def __init__(self):
        self.entries: list[TapeEntry] = []

    def __enter__(self):
        _ACTIVE.append(self)
        return self

    def __exit__(self, *exc):
        popped = _ACTIVE.pop()
        assert popped is self, "tape enter/exit mismatch"
        return False

    def record(self, op: str, inputs, output: Tensor, backward) -> None:
        self.entries.append(TapeEntry(op, inputs, output, backward))

    def backward(self, loss: Tensor) -> None:
        if loss.data.ndim != 0:
            raise ValueError(
                f"backward needs a scalar loss, got shape {loss.data.shape}"
            )
        loss.ensure_grad()
        loss.grad += 1.0
        for entry in reversed(self.entries):
            if entry.output.grad is not None:
                entry.backward()

    def resident_bytes(self) -> int:
        """Bytes held live by tensors recorded on this tape.

        Inputs and outputs are both counted, each tensor once; parameters
        referenced by ops are included via their underlying tensors.
        """
        seen: set[int] = set()
        total = 0
        for entry in self.entries:
            for t in (*entry.inputs, entry.output):
                if isinstance(t, Parameter):
                    t = t.tensor
                if isinstance(t, Tensor) and id(t) not in seen:
                    seen.add(id(t))
                    total += t.nbytes()
        return total
