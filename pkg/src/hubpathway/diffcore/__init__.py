"""Minimal reverse-mode engine: tensors, a flat tape, and dense primitives."""

from .backend import BACKEND
from .grad_check import GradCheckReport, grad_check
from .ops import (
    add,
    affine,
    column_mean,
    concat_cols,
    cross_entropy,
    gather_col,
    gather_rows,
    mul_const,
    mul_rows,
    neg_entropy,
    relu,
    scale,
    scatter_rows,
    softmax,
    softplus,
    tanh,
    total_sum,
)
from .tensor import Parameter, Tape, TapeEntry, Tensor, active_tape

__all__ = [
    "BACKEND",
    "Tensor", "Parameter", "Tape", "TapeEntry", "active_tape",
    "affine", "relu", "tanh", "softplus", "softmax", "cross_entropy",
    "add", "mul_const", "scale", "total_sum", "column_mean", "neg_entropy",
    "gather_rows", "scatter_rows", "gather_col", "mul_rows", "concat_cols",
    "grad_check", "GradCheckReport",
]
