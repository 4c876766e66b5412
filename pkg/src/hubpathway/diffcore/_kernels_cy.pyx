# Compiled kernels mirroring _kernels_np. Same signatures, same float64
# contract; loop orders are fixed so results are deterministic run-to-run
# (they may differ from the numpy backend in the last bits because BLAS
# sums in a different order).

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log, log1p, tanh

cnp.import_array()


def affine_fwd(double[:, ::1] x, double[:, ::1] w, double[::1] b):
    cdef Py_ssize_t n = x.shape[0], din = x.shape[1], dout = w.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, dout))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(dout):
            acc = b[j]
            for k in range(din):
                acc += x[i, k] * w[k, j]
            o[i, j] = acc
    return out


def affine_bwd(double[:, ::1] x, double[:, ::1] w, double[:, ::1] gout):
    cdef Py_ssize_t n = x.shape[0], din = x.shape[1], dout = w.shape[1]
    cdef cnp.ndarray[double, ndim=2] gx = np.zeros((n, din))
    cdef cnp.ndarray[double, ndim=2] gw = np.zeros((din, dout))
    cdef cnp.ndarray[double, ndim=1] gb = np.zeros(dout)
    cdef double[:, ::1] gxv = gx
    cdef double[:, ::1] gwv = gw
    cdef double[::1] gbv = gb
    cdef Py_ssize_t i, j, k
    cdef double g
    for i in range(n):
        for j in range(dout):
            g = gout[i, j]
            gbv[j] += g
            for k in range(din):
                gxv[i, k] += g * w[k, j]
                gwv[k, j] += g * x[i, k]
    return gx, gw, gb


def relu_fwd(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            o[i, j] = x[i, j] if x[i, j] > 0.0 else 0.0
    return out


def relu_bwd(double[:, ::1] x, double[:, ::1] gout):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] gx = np.empty((n, m))
    cdef double[:, ::1] g = gx
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            g[i, j] = gout[i, j] if x[i, j] > 0.0 else 0.0
    return gx


def tanh_fwd(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            o[i, j] = tanh(x[i, j])
    return out


def tanh_bwd(double[:, ::1] y, double[:, ::1] gout):
    cdef Py_ssize_t n = y.shape[0], m = y.shape[1]
    cdef cnp.ndarray[double, ndim=2] gx = np.empty((n, m))
    cdef double[:, ::1] g = gx
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(m):
            g[i, j] = (1.0 - y[i, j] * y[i, j]) * gout[i, j]
    return gx


def softplus_fwd(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(n):
        for j in range(m):
            v = x[i, j]
            o[i, j] = (v if v > 0.0 else 0.0) + log1p(exp(-fabs(v)))
    return out


def softplus_bwd(double[:, ::1] x, double[:, ::1] gout):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] gx = np.empty((n, m))
    cdef double[:, ::1] g = gx
    cdef Py_ssize_t i, j
    cdef double v, e
    for i in range(n):
        for j in range(m):
            v = x[i, j]
            if v >= 0.0:
                g[i, j] = gout[i, j] / (1.0 + exp(-v))
            else:
                e = exp(v)
                g[i, j] = gout[i, j] * e / (1.0 + e)
    return gx


def softmax_fwd(double[:, ::1] z):
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double mx, tot
    for i in range(n):
        mx = z[i, 0]
        for j in range(1, m):
            if z[i, j] > mx:
                mx = z[i, j]
        tot = 0.0
        for j in range(m):
            o[i, j] = exp(z[i, j] - mx)
            tot += o[i, j]
        for j in range(m):
            o[i, j] /= tot
    return out


def softmax_bwd(double[:, ::1] p, double[:, ::1] gout):
    cdef Py_ssize_t n = p.shape[0], m = p.shape[1]
    cdef cnp.ndarray[double, ndim=2] gz = np.empty((n, m))
    cdef double[:, ::1] g = gz
    cdef Py_ssize_t i, j
    cdef double dot
    for i in range(n):
        dot = 0.0
        for j in range(m):
            dot += p[i, j] * gout[i, j]
        for j in range(m):
            g[i, j] = p[i, j] * (gout[i, j] - dot)
    return gz


def cross_entropy_fwd(double[:, ::1] logits, long long[::1] labels):
    cdef Py_ssize_t n = logits.shape[0], c = logits.shape[1]
    cdef cnp.ndarray[double, ndim=2] probs = np.empty((n, c))
    cdef double[:, ::1] p = probs
    cdef Py_ssize_t i, j
    cdef double mx, tot, loss = 0.0
    for i in range(n):
        mx = logits[i, 0]
        for j in range(1, c):
            if logits[i, j] > mx:
                mx = logits[i, j]
        tot = 0.0
        for j in range(c):
            p[i, j] = exp(logits[i, j] - mx)
            tot += p[i, j]
        loss += log(tot) + mx - logits[i, labels[i]]
        for j in range(c):
            p[i, j] /= tot
    return loss / n, probs


def cross_entropy_bwd(double[:, ::1] probs, long long[::1] labels, double gscale):
    cdef Py_ssize_t n = probs.shape[0], c = probs.shape[1]
    cdef cnp.ndarray[double, ndim=2] g = np.empty((n, c))
    cdef double[:, ::1] gv = g
    cdef Py_ssize_t i, j
    cdef double s = gscale / n
    for i in range(n):
        for j in range(c):
            gv[i, j] = probs[i, j] * s
        gv[i, labels[i]] -= s
    return g
