"""Basic dense-tensor operations. Tensors are float64 numpy arrays."""

from __future__ import annotations

import numpy as np

from .. import kernels


class ShapeMismatchError(Exception):
    pass


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Standard matrix product of two 2-D tensors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatchError(f"expected 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"inner dims differ: {a.shape} x {b.shape}")
    return a @ b


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Softmax along `axis`, max-subtracted so large inputs cannot overflow."""
    x = np.asarray(x, dtype=np.float64)
    moved = np.moveaxis(x, axis, -1)
    flat = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    out = kernels.softmax_rows(flat).reshape(moved.shape)
    return np.moveaxis(out, -1, axis)


def layer_norm(
    x: np.ndarray, gain: np.ndarray, bias: np.ndarray, eps: float = 1e-5
) -> np.ndarray:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    x = np.asarray(x, dtype=np.float64)
    gain = np.asarray(gain, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise ShapeMismatchError(
            f"gain/bias must have shape ({x.shape[-1]},), got {gain.shape}/{bias.shape}"
        )
    flat = np.ascontiguousarray(x.reshape(-1, x.shape[-1]))
    y, _, _ = kernels.layernorm_rows(flat, gain, bias, eps)
    return y.reshape(x.shape)
