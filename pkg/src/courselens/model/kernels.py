"""Hot attention kernels: numba-compiled loops with a pure-numpy twin.

The numba path fuses masking, softmax and the value contraction per
(sequence, head) pair, avoiding the large [N, heads, T, T] temporaries the
vectorized path materializes. Both paths compute the same math; which one
runs is decided once at import time:

  * ``COURSELENS_DISABLE_NUMBA=1`` forces the numpy path;
  * numba failing to import falls back to numpy with a warning.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_MASKED = -1e30  # additive mask; exp underflows to exactly 0.0

NUMBA_REQUESTED = os.environ.get("COURSELENS_DISABLE_NUMBA", "0") != "1"

try:  # pragma: no cover - exercised implicitly by the import
    if NUMBA_REQUESTED:
        from numba import njit
    else:
        njit = None
except ImportError:  # pragma: no cover
    njit = None
    warnings.warn("numba unavailable, using pure-numpy kernels")

HAS_NUMBA = njit is not None


def attention_forward_numpy(q, k, v, key_valid):
    """Masked scaled-dot-product attention over [N, heads, T, dh] arrays.

    key_valid is [N, T] with 1.0 for attendable positions. Returns the
    context tensor and the attention weights (kept for backward).
    """
    scale = 1.0 / np.sqrt(q.shape[-1])
    scores = np.matmul(q, np.swapaxes(k, -1, -2)) * scale
    scores = np.where(key_valid[:, None, None, :] > 0.0, scores, _MASKED)
    scores -= scores.max(axis=-1, keepdims=True)
    np.exp(scores, out=scores)
    scores /= scores.sum(axis=-1, keepdims=True)
    return np.matmul(scores, v), scores


def attention_backward_numpy(d_ctx, attn, q, k, v):
    """Gradients of attention_forward w.r.t. q, k and v."""
    scale = 1.0 / np.sqrt(q.shape[-1])
    dv = np.matmul(np.swapaxes(attn, -1, -2), d_ctx)
    d_attn = np.matmul(d_ctx, np.swapaxes(v, -1, -2))
    # softmax backward: rows of attn are a probability simplex
    d_scores = attn * (d_attn - np.sum(d_attn * attn, axis=-1, keepdims=True))
    dq = np.matmul(d_scores, k) * scale
    dk = np.matmul(np.swapaxes(d_scores, -1, -2), q) * scale
    return dq, dk, dv


if HAS_NUMBA:

    @njit(cache=True)
    def _attention_forward_jit(q, k, v, key_valid):  # pragma: no cover - jitted
        n, nh, t, dh = q.shape
        scale = 1.0 / np.sqrt(dh)
        ctx = np.empty_like(q)
        attn = np.empty((n, nh, t, t))
        for b in range(n):
            for h in range(nh):
                s = np.dot(np.ascontiguousarray(q[b, h]),
                           np.ascontiguousarray(k[b, h]).T) * scale
                for i in range(t):
                    row_max = _MASKED
                    for j in range(t):
                        if key_valid[b, j] <= 0.0:
                            s[i, j] = _MASKED
                        if s[i, j] > row_max:
                            row_max = s[i, j]
                    total = 0.0
                    for j in range(t):
                        e = np.exp(s[i, j] - row_max)
                        s[i, j] = e
                        total += e
                    for j in range(t):
                        s[i, j] /= total
                attn[b, h] = s
                ctx[b, h] = np.dot(s, np.ascontiguousarray(v[b, h]))
        return ctx, attn

    @njit(cache=True)
    def _attention_backward_jit(d_ctx, attn, q, k, v):  # pragma: no cover - jitted
        n, nh, t, dh = q.shape
        scale = 1.0 / np.sqrt(dh)
        dq = np.empty_like(q)
        dk = np.empty_like(k)
        dv = np.empty_like(v)
        for b in range(n):
            for h in range(nh):
                a = np.ascontiguousarray(attn[b, h])
                g = np.ascontiguousarray(d_ctx[b, h])
                dv[b, h] = np.dot(a.T, g)
                d_attn = np.dot(g, np.ascontiguousarray(v[b, h]).T)
                d_scores = np.empty((t, t))
                for i in range(t):
                    dot = 0.0
                    for j in range(t):
                        dot += d_attn[i, j] * a[i, j]
                    for j in range(t):
                        d_scores[i, j] = a[i, j] * (d_attn[i, j] - dot)
                dq[b, h] = np.dot(d_scores, np.ascontiguousarray(k[b, h])) * scale
                dk[b, h] = np.dot(d_scores.T, np.ascontiguousarray(q[b, h])) * scale
        return dq, dk, dv

    def attention_forward_numba(q, k, v, key_valid):
        return _attention_forward_jit(q, k, v, key_valid)

    def attention_backward_numba(d_ctx, attn, q, k, v):
        return _attention_backward_jit(d_ctx, attn, q, k, v)

    attention_forward = attention_forward_numba
    attention_backward = attention_backward_numba
    ACTIVE_BACKEND = "numba"
else:
    attention_forward_numba = None
    attention_backward_numba = None
    attention_forward = attention_forward_numpy
    attention_backward = attention_backward_numpy
    ACTIVE_BACKEND = "numpy"
