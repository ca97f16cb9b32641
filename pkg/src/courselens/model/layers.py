"""Transformer building blocks with explicit forward/backward passes.

Every forward returns (output, cache); the matching backward consumes the
cache and returns input gradients plus parameter gradients. Dropout is
applied before each linear map (projection inputs, attention output, both
FFN maps), active only in train mode, with inverted scaling.
"""

from __future__ import annotations

import numpy as np

from .kernels import attention_backward, attention_forward

LAYER_NORM_EPS = 1e-5


# ---------------------------------------------------------------- dropout

def dropout_forward(x, p, rng, train):
    if not train or p <= 0.0:
        return x, None
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * mask, mask


def dropout_backward(d_out, mask):
    return d_out if mask is None else d_out * mask


# ----------------------------------------------------------------- linear

def linear_forward(x, w, b):
    return x @ w + b, (x, w)


def linear_backward(d_out, cache):
    x, w = cache
    x2 = x.reshape(-1, x.shape[-1])
    d2 = d_out.reshape(-1, d_out.shape[-1])
    dw = x2.T @ d2
    db = d2.sum(axis=0)
    dx = d_out @ w.T
    return dx, dw, db


# ------------------------------------------------------------- layer norm

def layer_norm_forward(x, gain, bias):
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    normalized = centered * inv
    return normalized * gain + bias, (normalized, inv, gain)


def layer_norm_backward(d_out, cache):
    normalized, inv, gain = cache
    axes = tuple(range(d_out.ndim - 1))
    d_gain = (d_out * normalized).sum(axis=axes)
    d_bias = d_out.sum(axis=axes)
    d_norm = d_out * gain
    dx = inv * (
        d_norm
        - d_norm.mean(axis=-1, keepdims=True)
        - normalized * (d_norm * normalized).mean(axis=-1, keepdims=True)
    )
    return dx, d_gain, d_bias


# ---------------------------------------------------------- multi-head attn

def _split_heads(x, n_heads):
    n, t, h = x.shape
    return np.ascontiguousarray(
        x.reshape(n, t, n_heads, h // n_heads).transpose(0, 2, 1, 3)
    )


def _merge_heads(x):
    n, nh, t, dh = x.shape
    return np.ascontiguousarray(x.transpose(0, 2, 1, 3)).reshape(n, t, nh * dh)


def mha_forward(x, key_valid, params, prefix, n_heads, drop_p, rng, train):
    xd, m_in = dropout_forward(x, drop_p, rng, train)
    q, cq = linear_forward(xd, params[f"{prefix}.wq"], params[f"{prefix}.bq"])
    k, ck = linear_forward(xd, params[f"{prefix}.wk"], params[f"{prefix}.bk"])
    v, cv = linear_forward(xd, params[f"{prefix}.wv"], params[f"{prefix}.bv"])
    qh, kh, vh = (_split_heads(t, n_heads) for t in (q, k, v))
    ctx_h, attn = attention_forward(qh, kh, vh, key_valid)
    ctx = _merge_heads(ctx_h)
    cd, m_ctx = dropout_forward(ctx, drop_p, rng, train)
    out, co = linear_forward(cd, params[f"{prefix}.wo"], params[f"{prefix}.bo"])
    cache = (m_in, cq, ck, cv, qh, kh, vh, attn, m_ctx, co)
    return out, cache


def mha_backward(d_out, cache, grads, prefix):
    m_in, cq, ck, cv, qh, kh, vh, attn, m_ctx, co = cache
    dcd, dwo, dbo = linear_backward(d_out, co)
    grads[f"{prefix}.wo"] += dwo
    grads[f"{prefix}.bo"] += dbo
    dctx_h = _split_heads(dropout_backward(dcd, m_ctx), qh.shape[1])
    dqh, dkh, dvh = attention_backward(dctx_h, attn, qh, kh, vh)
    dxd = np.zeros_like(d_out)
    for name, dh, c in (("q", dqh, cq), ("k", dkh, ck), ("v", dvh, cv)):
        dx_part, dw, db = linear_backward(_merge_heads(dh), c)
        grads[f"{prefix}.w{name}"] += dw
        grads[f"{prefix}.b{name}"] += db
        dxd += dx_part
    return dropout_backward(dxd, m_in)


# ------------------------------------------------------------ feed-forward

def ffn_forward(x, params, prefix, drop_p, rng, train):
    xd, m1 = dropout_forward(x, drop_p, rng, train)
    pre, c1 = linear_forward(xd, params[f"{prefix}.w1"], params[f"{prefix}.b1"])
    act = np.maximum(pre, 0.0)
    ad, m2 = dropout_forward(act, drop_p, rng, train)
    out, c2 = linear_forward(ad, params[f"{prefix}.w2"], params[f"{prefix}.b2"])
    return out, (m1, c1, pre, m2, c2)


def ffn_backward(d_out, cache, grads, prefix):
    m1, c1, pre, m2, c2 = cache
    dad, dw2, db2 = linear_backward(d_out, c2)
    grads[f"{prefix}.w2"] += dw2
    grads[f"{prefix}.b2"] += db2
    dact = dropout_backward(dad, m2)
    dpre = dact * (pre > 0.0)
    dxd, dw1, db1 = linear_backward(dpre, c1)
    grads[f"{prefix}.w1"] += dw1
    grads[f"{prefix}.b1"] += db1
    return dropout_backward(dxd, m1)


# -------------------------------------------------------- transformer layer

def transformer_layer_forward(x, key_valid, params, prefix, n_heads,
                              drop_p, rng, train):
    """Post-norm residual layer: LN(x + MHAtt(x)), then LN(h + FFN(h))."""
    attn_out, c_attn = mha_forward(
        x, key_valid, params, f"{prefix}.attn", n_heads, drop_p, rng, train
    )
    h, c_ln1 = layer_norm_forward(
        x + attn_out, params[f"{prefix}.ln1.g"], params[f"{prefix}.ln1.b"]
    )
    ffn_out, c_ffn = ffn_forward(h, params, f"{prefix}.ffn", drop_p, rng, train)
    out, c_ln2 = layer_norm_forward(
        h + ffn_out, params[f"{prefix}.ln2.g"], params[f"{prefix}.ln2.b"]
    )
    return out, (c_attn, c_ln1, c_ffn, c_ln2)


def transformer_layer_backward(d_out, cache, grads, prefix):
    c_attn, c_ln1, c_ffn, c_ln2 = cache
    d_res2, dg2, db2 = layer_norm_backward(d_out, c_ln2)
    grads[f"{prefix}.ln2.g"] += dg2
    grads[f"{prefix}.ln2.b"] += db2
    dh = d_res2 + ffn_backward(d_res2, c_ffn, grads, f"{prefix}.ffn")
    d_res1, dg1, db1 = layer_norm_backward(dh, c_ln1)
    grads[f"{prefix}.ln1.g"] += dg1
    grads[f"{prefix}.ln1.b"] += db1
    return d_res1 + mha_backward(d_res1, c_attn, grads, f"{prefix}.attn")
