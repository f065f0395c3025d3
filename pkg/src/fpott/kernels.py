"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Every kernel exists in two variants: ``<name>_np`` (vectorized numpy) and
``<name>_nb`` (numba ``@njit``). The module-level alias ``<name>`` points at
the variant selected once at import time by the ``FPOTT_BACKEND`` environment
variable:

    FPOTT_BACKEND=numba   force the jit path (error if numba is missing)
    FPOTT_BACKEND=numpy   force the fallback
    FPOTT_BACKEND=auto    numba if importable, else numpy (default)

Both variants compute the same quantities; they may differ in the last few
ulps because reduction order differs. All kernels are single-threaded and
deterministic. ``benchmarks/bench_kernels.py`` times the two paths side by
side.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_A = 0.044715


def _select_backend() -> bool:
    choice = os.environ.get("FPOTT_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"FPOTT_BACKEND must be one of auto/numba/numpy, got {choice!r}"
        )
    if choice == "numpy":
        return False
    if choice == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("FPOTT_BACKEND=numba but numba is not importable")
        return True
    return HAVE_NUMBA


USING_NUMBA = _select_backend()


# ---------------------------------------------------------------------------
# numpy variants
# ---------------------------------------------------------------------------

def softmax_rows_np(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax of a 2-D array, max-subtracted for stability."""
    m = np.max(x, axis=1, keepdims=True)
    e = np.exp(x - m)
    return e / np.sum(e, axis=1, keepdims=True)


def softmax_rows_grad_np(a: np.ndarray, da: np.ndarray) -> np.ndarray:
    """Backward of row softmax: a = softmax(x), da = dL/da -> dL/dx."""
    inner = np.sum(da * a, axis=1, keepdims=True)
    return a * (da - inner)


def layernorm_rows_np(x, gain, bias, eps):
    """Row layer norm. Returns (y, xhat, inv_std) with xhat cached for backward."""
    mu = np.mean(x, axis=1, keepdims=True)
    var = np.mean((x - mu) ** 2, axis=1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv
    return xhat * gain + bias, xhat, inv


def layernorm_rows_grad_np(dy, xhat, inv, gain):
    """Backward of row layer norm. Returns (dx, dgain, dbias)."""
    dg = np.sum(dy * xhat, axis=0)
    db = np.sum(dy, axis=0)
    dxhat = dy * gain
    m1 = np.mean(dxhat, axis=1, keepdims=True)
    m2 = np.mean(dxhat * xhat, axis=1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, dg, db


def gelu_np(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + np.tanh(_GELU_C * (x + _GELU_A * x**3)))


def gelu_grad_np(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    u = _GELU_C * (x + _GELU_A * x**3)
    t = np.tanh(u)
    du = _GELU_C * (1.0 + 3.0 * _GELU_A * x**2)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t**2) * du)


def attention_np(q, k, v, scale):
    """Scaled dot-product attention over (B, H, T, dh). Returns (ctx, attn)."""
    s = np.matmul(q, np.swapaxes(k, -1, -2)) * scale
    b, h, t, _ = s.shape
    a = softmax_rows_np(s.reshape(b * h * t, t)).reshape(s.shape)
    return np.matmul(a, v), a


def attention_grad_np(dctx, attn, q, k, v, scale):
    """Backward of attention. Returns (dq, dk, dv)."""
    da = np.matmul(dctx, np.swapaxes(v, -1, -2))
    dv = np.matmul(np.swapaxes(attn, -1, -2), dctx)
    b, h, t, _ = da.shape
    ds = softmax_rows_grad_np(
        attn.reshape(b * h * t, t), da.reshape(b * h * t, t)
    ).reshape(da.shape)
    dq = np.matmul(ds, k) * scale
    dk = np.matmul(np.swapaxes(ds, -1, -2), q) * scale
    return dq, dk, dv


def adam_step_np(p, g, m, v, lr, b1, b2, eps, t):
    """One bias-corrected Adam update, in place on flat float64 arrays."""
    m *= b1
    m += (1.0 - b1) * g
    v *= b2
    v += (1.0 - b2) * g * g
    mhat = m / (1.0 - b1**t)
    vhat = v / (1.0 - b2**t)
    p -= lr * mhat / (np.sqrt(vhat) + eps)


def sgd_step_np(p, g, buf, lr, momentum):
    """One momentum-SGD update, in place on flat float64 arrays."""
    buf *= momentum
    buf += g
    p -= lr * buf


# ---------------------------------------------------------------------------
# numba variants
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True, fastmath=False)

    @_jit
    def softmax_rows_nb(x):
        n, d = x.shape
        out = np.empty((n, d))
        for i in range(n):
            m = x[i, 0]
            for j in range(1, d):
                if x[i, j] > m:
                    m = x[i, j]
            s = 0.0
            for j in range(d):
                e = math.exp(x[i, j] - m)
                out[i, j] = e
                s += e
            for j in range(d):
                out[i, j] /= s
        return out

    @_jit
    def softmax_rows_grad_nb(a, da):
        n, d = a.shape
        out = np.empty((n, d))
        for i in range(n):
            inner = 0.0
            for j in range(d):
                inner += da[i, j] * a[i, j]
            for j in range(d):
                out[i, j] = a[i, j] * (da[i, j] - inner)
        return out

    @_jit
    def layernorm_rows_nb(x, gain, bias, eps):
        n, d = x.shape
        y = np.empty((n, d))
        xhat = np.empty((n, d))
        inv = np.empty((n, 1))
        for i in range(n):
            mu = 0.0
            for j in range(d):
                mu += x[i, j]
            mu /= d
            var = 0.0
            for j in range(d):
                c = x[i, j] - mu
                var += c * c
            var /= d
            iv = 1.0 / math.sqrt(var + eps)
            inv[i, 0] = iv
            for j in range(d):
                h = (x[i, j] - mu) * iv
                xhat[i, j] = h
                y[i, j] = h * gain[j] + bias[j]
        return y, xhat, inv

    @_jit
    def layernorm_rows_grad_nb(dy, xhat, inv, gain):
        n, d = dy.shape
        dx = np.empty((n, d))
        dg = np.zeros(d)
        db = np.zeros(d)
        for i in range(n):
            m1 = 0.0
            m2 = 0.0
            for j in range(d):
                dg[j] += dy[i, j] * xhat[i, j]
                db[j] += dy[i, j]
                dh = dy[i, j] * gain[j]
                m1 += dh
                m2 += dh * xhat[i, j]
            m1 /= d
            m2 /= d
            iv = inv[i, 0]
            for j in range(d):
                dh = dy[i, j] * gain[j]
                dx[i, j] = iv * (dh - m1 - xhat[i, j] * m2)
        return dx, dg, db

    @_jit
    def _gelu_flat_nb(x):
        n = x.size
        out = np.empty(n)
        for i in range(n):
            xi = x[i]
            out[i] = 0.5 * xi * (1.0 + math.tanh(_GELU_C * (xi + _GELU_A * xi**3)))
        return out

    @_jit
    def _gelu_grad_flat_nb(x, dy):
        n = x.size
        out = np.empty(n)
        for i in range(n):
            xi = x[i]
            u = _GELU_C * (xi + _GELU_A * xi**3)
            t = math.tanh(u)
            du = _GELU_C * (1.0 + 3.0 * _GELU_A * xi * xi)
            out[i] = dy[i] * (0.5 * (1.0 + t) + 0.5 * xi * (1.0 - t * t) * du)
        return out

    def gelu_nb(x):
        return _gelu_flat_nb(np.ascontiguousarray(x).ravel()).reshape(x.shape)

    def gelu_grad_nb(x, dy):
        flat = _gelu_grad_flat_nb(
            np.ascontiguousarray(x).ravel(), np.ascontiguousarray(dy).ravel()
        )
        return flat.reshape(x.shape)

    @_jit
    def attention_nb(q, k, v, scale):
        b, h, t, dh = q.shape
        ctx = np.empty((b, h, t, dh))
        attn = np.empty((b, h, t, t))
        for bi in range(b):
            for hi in range(h):
                for i in range(t):
                    # scores row, softmax fused
                    m = -1.0e300
                    for j in range(t):
                        s = 0.0
                        for c in range(dh):
                            s += q[bi, hi, i, c] * k[bi, hi, j, c]
                        s *= scale
                        attn[bi, hi, i, j] = s
                        if s > m:
                            m = s
                    z = 0.0
                    for j in range(t):
                        e = math.exp(attn[bi, hi, i, j] - m)
                        attn[bi, hi, i, j] = e
                        z += e
                    for j in range(t):
                        attn[bi, hi, i, j] /= z
                    for c in range(dh):
                        acc = 0.0
                        for j in range(t):
                            acc += attn[bi, hi, i, j] * v[bi, hi, j, c]
                        ctx[bi, hi, i, c] = acc
        return ctx, attn

    @_jit
    def attention_grad_nb(dctx, attn, q, k, v, scale):
        b, h, t, dh = q.shape
        dq = np.zeros((b, h, t, dh))
        dk = np.zeros((b, h, t, dh))
        dv = np.zeros((b, h, t, dh))
        ds = np.empty(t)
        for bi in range(b):
            for hi in range(h):
                for i in range(t):
                    inner = 0.0
                    for j in range(t):
                        da = 0.0
                        for c in range(dh):
                            da += dctx[bi, hi, i, c] * v[bi, hi, j, c]
                        ds[j] = da
                        inner += da * attn[bi, hi, i, j]
                    for j in range(t):
                        a = attn[bi, hi, i, j]
                        g = a * (ds[j] - inner)
                        for c in range(dh):
                            dq[bi, hi, i, c] += g * k[bi, hi, j, c] * scale
                            dk[bi, hi, j, c] += g * q[bi, hi, i, c] * scale
                            dv[bi, hi, j, c] += a * dctx[bi, hi, i, c]
        return dq, dk, dv

    @_jit
    def adam_step_nb(p, g, m, v, lr, b1, b2, eps, t):
        bc1 = 1.0 - b1**t
        bc2 = 1.0 - b2**t
        for i in range(p.size):
            m[i] = b1 * m[i] + (1.0 - b1) * g[i]
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i]
            p[i] -= lr * (m[i] / bc1) / (math.sqrt(v[i] / bc2) + eps)

    @_jit
    def sgd_step_nb(p, g, buf, lr, momentum):
        for i in range(p.size):
            buf[i] = momentum * buf[i] + g[i]
            p[i] -= lr * buf[i]


if USING_NUMBA:
    softmax_rows = softmax_rows_nb
    softmax_rows_grad = softmax_rows_grad_nb
    layernorm_rows = layernorm_rows_nb
    layernorm_rows_grad = layernorm_rows_grad_nb
    gelu = gelu_nb
    gelu_grad = gelu_grad_nb
    attention = attention_nb
    attention_grad = attention_grad_nb
    adam_step = adam_step_nb
    sgd_step = sgd_step_nb
else:
    softmax_rows = softmax_rows_np
    softmax_rows_grad = softmax_rows_grad_np
    layernorm_rows = layernorm_rows_np
    layernorm_rows_grad = layernorm_rows_grad_np
    gelu = gelu_np
    gelu_grad = gelu_grad_np
    attention = attention_np
    attention_grad = attention_grad_np
    adam_step = adam_step_np
    sgd_step = sgd_step_np


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
