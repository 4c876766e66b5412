"""Differentiable primitives recorded on the active tape.

Each op computes forward through the selected kernel backend (or plain numpy
for the cheap indexing/glue ops) and, when a tape is recording, registers a
closure that accumulates exact analytic gradients into its inputs. With no
active tape the ops run forward-only.
"""

from __future__ import annotations

import numpy as np

from .backend import kernels as K
from .tensor import Parameter, Tensor, active_tape

__all__ = [
    "affine", "relu", "tanh", "softplus", "softmax", "cross_entropy",
    "add", "mul_const", "scale", "total_sum", "column_mean", "neg_entropy",
    "gather_rows", "scatter_rows", "gather_col", "mul_rows", "concat_cols",
]


def _t(x) -> Tensor:
    return x.tensor if isinstance(x, Parameter) else x


def _accum(t: Tensor, g) -> None:
    t.ensure_grad()
    t.grad += g


def _as2d(a: np.ndarray) -> np.ndarray:
    if a.ndim == 2:
        return a
    if a.ndim == 0:
        return a.reshape(1, 1)
    return a.reshape(-1, a.shape[-1]) if a.ndim > 2 else a.reshape(1, -1)


def affine(x, w, b) -> Tensor:
    """out = x @ w + b, batched over rows of x."""
    xt, wt, bt = _t(x), _t(w), _t(b)
    if (
        xt.data.ndim != 2
        or wt.data.ndim != 2
        or bt.data.ndim != 1
        or xt.data.shape[1] != wt.data.shape[0]
        or wt.data.shape[1] != bt.data.shape[0]
    ):
        raise ValueError(
            "affine shape mismatch: x"
            f"{xt.data.shape} w{wt.data.shape} b{bt.data.shape}"
        )
    out = Tensor(K.affine_fwd(xt.data, wt.data, bt.data))
    tape = active_tape()
    if tape is not None:
        def backward():
            gx, gw, gb = K.affine_bwd(xt.data, wt.data, out.grad)
            _accum(xt, gx)
            _accum(wt, gw)
            _accum(bt, gb)
        tape.record("affine", (x, w, b), out, backward)
    return out


def _elementwise(name, fwd, bwd, x, saved_from_output=False) -> Tensor:
    xt = _t(x)
    x2 = _as2d(xt.data)
    out = Tensor(fwd(x2).reshape(xt.data.shape))
    tape = active_tape()
    if tape is not None:
        saved = _as2d(out.data) if saved_from_output else x2
        def backward():
            g = bwd(saved, _as2d(out.grad)).reshape(xt.data.shape)
            _accum(xt, g)
        tape.record(name, (x,), out, backward)
    return out


def relu(x) -> Tensor:
    return _elementwise("relu", K.relu_fwd, K.relu_bwd, x)


def tanh(x) -> Tensor:
    return _elementwise("tanh", K.tanh_fwd, K.tanh_bwd, x, saved_from_output=True)


def softplus(x) -> Tensor:
    """Elementwise log(1 + exp(x)) in the overflow-safe split form."""
    return _elementwise("softplus", K.softplus_fwd, K.softplus_bwd, x)


def softmax(z) -> Tensor:
    """Probability vectors along the last axis, stabilized by max-subtraction."""
    zt = _t(z)
    if zt.data.ndim == 0 or zt.data.shape[-1] < 1:
        raise ValueError(f"softmax needs a last dimension, got shape {zt.data.shape}")
    z2 = zt.data.reshape(-1, zt.data.shape[-1])
    p2 = K.softmax_fwd(np.ascontiguousarray(z2))
    out = Tensor(p2.reshape(zt.data.shape))
    tape = active_tape()
    if tape is not None:
        def backward():
            g2 = _as2d(out.grad).reshape(-1, zt.data.shape[-1])
            gz = K.softmax_bwd(p2, np.ascontiguousarray(g2))
            _accum(zt, gz.reshape(zt.data.shape))
        tape.record("softmax", (z,), out, backward)
    return out


def cross_entropy(logits, labels) -> Tensor:
    """Mean over the batch of -log softmax(logits)[label]."""
    lt = _t(logits)
    if lt.data.ndim != 2:
        raise ValueError(f"cross_entropy expects [B,C] logits, got {lt.data.shape}")
    y = np.ascontiguousarray(labels, dtype=np.int64)
    c = lt.data.shape[1]
    if y.ndim != 1 or y.shape[0] != lt.data.shape[0]:
        raise ValueError(
            f"cross_entropy labels shape {y.shape} does not match batch {lt.data.shape[0]}"
        )
    if y.size and (y.min() < 0 or y.max() >= c):
        raise ValueError(
            f"cross_entropy label out of range [0,{c}): min={y.min()} max={y.max()}"
        )
    loss, probs = K.cross_entropy_fwd(lt.data, y)
    out = Tensor(loss)
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(lt, K.cross_entropy_bwd(probs, y, float(out.grad)))
        tape.record("cross_entropy", (logits,), out, backward)
    return out


def add(a, b) -> Tensor:
    at, bt = _t(a), _t(b)
    if at.data.shape != bt.data.shape:
        raise ValueError(f"add shape mismatch: {at.data.shape} vs {bt.data.shape}")
    out = Tensor(at.data + bt.data)
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(at, out.grad)
            _accum(bt, out.grad)
        tape.record("add", (a, b), out, backward)
    return out


def mul_const(x, c) -> Tensor:
    """Multiply by a non-differentiable constant (scalar or same-shape array)."""
    xt = _t(x)
    carr = np.asarray(c, dtype=np.float64)
    if carr.ndim != 0 and carr.shape != xt.data.shape:
        raise ValueError(
            f"mul_const shape mismatch: {xt.data.shape} vs constant {carr.shape}"
        )
    out = Tensor(xt.data * carr)
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(xt, out.grad * carr)
        tape.record("mul_const", (x,), out, backward)
    return out


def scale(x, s: float) -> Tensor:
    return mul_const(x, float(s))


def total_sum(x) -> Tensor:
    xt = _t(x)
    out = Tensor(xt.data.sum())
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(xt, np.broadcast_to(out.grad, xt.data.shape))
        tape.record("total_sum", (x,), out, backward)
    return out


def column_mean(x) -> Tensor:
    """Mean over rows: [B,M] -> [M]."""
    xt = _t(x)
    if xt.data.ndim != 2:
        raise ValueError(f"column_mean expects a [B,M] tensor, got {xt.data.shape}")
    b = xt.data.shape[0]
    out = Tensor(xt.data.mean(axis=0))
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(xt, np.broadcast_to(out.grad / b, xt.data.shape))
        tape.record("column_mean", (x,), out, backward)
    return out


def neg_entropy(p) -> Tensor:
    """sum(p * log p) with the 0*log(0) = 0 convention; scalar output."""
    pt = _t(p)
    d = pt.data
    pos = d > 0.0
    logs = np.zeros_like(d)
    np.log(d, out=logs, where=pos)
    out = Tensor((d * logs).sum())
    tape = active_tape()
    if tape is not None:
        def backward():
            g = np.where(pos, logs + 1.0, 0.0) * float(out.grad)
            _accum(pt, g)
        tape.record("neg_entropy", (p,), out, backward)
    return out


def gather_rows(x, rows) -> Tensor:
    """Select rows by index; backward scatter-adds into those rows."""
    xt = _t(x)
    idx = np.asarray(rows, dtype=np.intp)
    out = Tensor(xt.data[idx])
    tape = active_tape()
    if tape is not None:
        def backward():
            xt.ensure_grad()
            np.add.at(xt.grad, idx, out.grad)
        tape.record("gather_rows", (x,), out, backward)
    return out


def scatter_rows(x, rows, nrows: int) -> Tensor:
    """Place rows of x at the given (unique) indices of a zero [nrows,...] tensor."""
    xt = _t(x)
    idx = np.asarray(rows, dtype=np.intp)
    buf = np.zeros((nrows,) + xt.data.shape[1:])
    buf[idx] = xt.data
    out = Tensor(buf)
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(xt, out.grad[idx])
        tape.record("scatter_rows", (x,), out, backward)
    return out


def gather_col(x, col: int, rows) -> Tensor:
    """Select x[rows, col] as a vector."""
    xt = _t(x)
    idx = np.asarray(rows, dtype=np.intp)
    out = Tensor(xt.data[idx, col])
    tape = active_tape()
    if tape is not None:
        def backward():
            xt.ensure_grad()
            np.add.at(xt.grad, (idx, col), out.grad)
        tape.record("gather_col", (x,), out, backward)
    return out


def mul_rows(x, w) -> Tensor:
    """Scale each row of x [R,C] by the matching entry of w [R]."""
    xt, wt = _t(x), _t(w)
    if xt.data.ndim != 2 or wt.data.shape != (xt.data.shape[0],):
        raise ValueError(
            f"mul_rows shape mismatch: x{xt.data.shape} w{wt.data.shape}"
        )
    out = Tensor(xt.data * wt.data[:, None])
    tape = active_tape()
    if tape is not None:
        def backward():
            _accum(xt, out.grad * wt.data[:, None])
            _accum(wt, (out.grad * xt.data).sum(axis=1))
        tape.record("mul_rows", (x, w), out, backward)
    return out


def concat_cols(parts) -> Tensor:
    """Concatenate [B,Ci] tensors along columns."""
    ts = [_t(p) for p in parts]
    widths = [t.data.shape[1] for t in ts]
    out = Tensor(np.concatenate([t.data for t in ts], axis=1))
    tape = active_tape()
    if tape is not None:
        offsets = np.cumsum([0] + widths)
        def backward():
            for t, lo, hi in zip(ts, offsets[:-1], offsets[1:]):
                _accum(t, out.grad[:, lo:hi])
        tape.record("concat_cols", tuple(parts), out, backward)
    return out
