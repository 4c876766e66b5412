"""Numpy implementations of the dense numeric kernels.

This is the fallback backend; `_kernels_cy` provides the same functions as a
compiled extension. Both operate on C-contiguous float64 arrays and are
deterministic run-to-run. Shape validation happens in the ops layer, not here.
"""

import numpy as np


def affine_fwd(x, w, b):
    return x @ w + b


def affine_bwd(x, w, gout):
    gx = gout @ w.T
    gw = x.T @ gout
    gb = gout.sum(axis=0)
    return gx, gw, gb


def relu_fwd(x):
    return np.maximum(x, 0.0)


def relu_bwd(x, gout):
    return np.where(x > 0.0, gout, 0.0)


def tanh_fwd(x):
    return np.tanh(x)


def tanh_bwd(y, gout):
    return (1.0 - y * y) * gout


def softplus_fwd(x):
    # max(x,0) + log1p(exp(-|x|)) never overflows and is exact in both tails
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def softplus_bwd(x, gout):
    # d softplus / dx = sigmoid(x), evaluated branch-wise to stay overflow-safe
    s = np.empty_like(x)
    pos = x >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    s[~pos] = ex / (1.0 + ex)
    return s * gout


def softmax_fwd(z):
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_bwd(p, gout):
    dot = (p * gout).sum(axis=1, keepdims=True)
    return p * (gout - dot)


def cross_entropy_fwd(logits, labels):
    m = logits.max(axis=1, keepdims=True)
    shifted = logits - m
    lse = np.log(np.exp(shifted).sum(axis=1)) + m[:, 0]
    picked = logits[np.arange(logits.shape[0]), labels]
    loss = float(np.mean(lse - picked))
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    return loss, probs


def cross_entropy_bwd(probs, labels, gscale):
    b = probs.shape[0]
    g = probs.copy()
    g[np.arange(b), labels] -= 1.0
    g *= gscale / b
    return g
