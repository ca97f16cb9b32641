"""Layer-level checks, including an independent straight-line oracle.

The naive_* functions below re-implement the forward pass with plain
Python loops and math.* scalar ops; they share no code with the batched
implementation and act as the dual-implementation oracle.
"""

import math

import numpy as np
import pytest

from courselens.model import ModelConfig, forward_batch, init_params, make_batch
from courselens.model.layers import (
    layer_norm_backward,
    layer_norm_forward,
    transformer_layer_forward,
)
from courselens.model.network import EncodedCourse
from courselens.model.vocab import CLS_ID


# --------------------------------------------------------------- naive math

def naive_linear(x, w, b):
    rows, d_in, d_out = len(x), len(w), len(w[0])
    out = []
    for t in range(rows):
        out.append(
            [sum(x[t][i] * w[i][j] for i in range(d_in)) + b[j]
             for j in range(d_out)]
        )
    return out


def naive_layer_norm(x, gain, bias, eps=1e-5):
    out = []
    for row in x:
        h = len(row)
        mu = sum(row) / h
        var = sum((v - mu) ** 2 for v in row) / h
        inv = 1.0 / math.sqrt(var + eps)
        out.append([(row[i] - mu) * inv * gain[i] + bias[i] for i in range(h)])
    return out


def naive_attention(x, p, prefix, n_heads, valid):
    t_len, hidden = len(x), len(x[0])
    dh = hidden // n_heads
    q = naive_linear(x, p[f"{prefix}.wq"], p[f"{prefix}.bq"])
    k = naive_linear(x, p[f"{prefix}.wk"], p[f"{prefix}.bk"])
    v = naive_linear(x, p[f"{prefix}.wv"], p[f"{prefix}.bv"])
    ctx = [[0.0] * hidden for _ in range(t_len)]
    for head in range(n_heads):
        lo = head * dh
        for i in range(t_len):
            scores = []
            for j in range(t_len):
                if valid[j]:
                    s = sum(q[i][lo + d] * k[j][lo + d] for d in range(dh))
                    scores.append(s / math.sqrt(dh))
                else:
                    scores.append(-1e30)
            top = max(scores)
            exps = [math.exp(s - top) for s in scores]
            z = sum(exps)
            for j in range(t_len):
                w_ij = exps[j] / z
                for d in range(dh):
                    ctx[i][lo + d] += w_ij * v[j][lo + d]
    return naive_linear(ctx, p[f"{prefix}.wo"], p[f"{prefix}.bo"])


def naive_transformer_layer(x, p, prefix, n_heads, valid):
    attn = naive_attention(x, p, f"{prefix}.attn", n_heads, valid)
    residual = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(x, attn)]
    h = naive_layer_norm(residual, p[f"{prefix}.ln1.g"], p[f"{prefix}.ln1.b"])
    inner = naive_linear(h, p[f"{prefix}.ffn.w1"], p[f"{prefix}.ffn.b1"])
    inner = [[max(v, 0.0) for v in row] for row in inner]
    ffn = naive_linear(inner, p[f"{prefix}.ffn.w2"], p[f"{prefix}.ffn.b2"])
    residual = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(h, ffn)]
    return naive_layer_norm(residual, p[f"{prefix}.ln2.g"], p[f"{prefix}.ln2.b"])


def as_lists(params):
    return {k: v.tolist() for k, v in params.items()}


# -------------------------------------------------------------------- tests

class TestLayerNorm:
    def test_pre_gain_stats(self):
        rng = np.random.default_rng(0)
        x = rng.normal(2.0, 3.0, size=(6, 5, 16))
        _, (normalized, _, _) = layer_norm_forward(
            x, np.ones(16), np.zeros(16)
        )
        assert np.abs(normalized.mean(axis=-1)).max() < 1e-10
        assert np.abs(normalized.var(axis=-1) - 1.0).max() < 1e-4

    def test_zero_input_yields_bias(self):
        bias = np.arange(8.0)
        out, _ = layer_norm_forward(np.zeros((2, 8)), np.ones(8), bias)
        np.testing.assert_array_equal(out, np.tile(bias, (2, 1)))

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(3, 6))
        gain = rng.normal(size=6)
        bias = rng.normal(size=6)
        d_out = rng.normal(size=(3, 6))
        out, cache = layer_norm_forward(x, gain, bias)
        dx, dg, db = layer_norm_backward(d_out, cache)
        eps = 1e-6

        def objective():
            val, _ = layer_norm_forward(x, gain, bias)
            return float((val * d_out).sum())

        for arr, grad in ((x, dx), (gain, dg), (bias, db)):
            flat = arr.reshape(-1)
            gflat = grad.reshape(-1)
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + eps
                up = objective()
                flat[idx] = orig - eps
                down = objective()
                flat[idx] = orig
                assert gflat[idx] == pytest.approx(
                    (up - down) / (2 * eps), abs=1e-7, rel=1e-6
                )


class TestDualImplementationOracle:
    def test_tiny_lecture_encoder_matches_naive(self):
        """H=8, 1 layer, 1 head vs the straight-line re-implementation."""
        config = ModelConfig(vocab_size=12, hidden=8, encoder_layers=1,
                             encoder_heads=1, global_layers=1, global_heads=1,
                             ffn_multiplier=2, max_lecture_tokens=5)
        params = init_params(config, 12, seed=9)
        ids = np.array([CLS_ID, 4, 7, 5])
        enc = EncodedCourse(
            course_id="c", token_ids=[ids], section_idx=np.array([1]),
            position_idx=np.array([1]), features=np.zeros(8), rating=None,
        )
        batch = make_batch([enc], config, np.zeros(8), np.ones(8))
        collect = {}
        forward_batch(params, batch, config, train=False, collect=collect)

        p = as_lists(params)
        x = [
            [p["tok_emb"][tok][i] + p["tok_pos_emb"][pos][i] for i in range(8)]
            for pos, tok in enumerate(ids)
        ]
        expected_h = naive_transformer_layer(x, p, "enc0", 1, [1, 1, 1, 1])

        # re-run the batched encoder alone to inspect its h output
        from courselens.model.layers import transformer_layer_forward

        xb = params["tok_emb"][batch.lec_ids] + params["tok_pos_emb"][:4]
        out, _ = transformer_layer_forward(
            xb, batch.lec_valid, params, "enc0", 1, 0.0, None, False
        )
        np.testing.assert_allclose(out[0], np.array(expected_h), atol=1e-10)

    def test_tiny_global_layer_matches_naive(self):
        """H=4, 1 head global layer vs the straight-line re-implementation."""
        config = ModelConfig(vocab_size=8, hidden=4, encoder_layers=1,
                             encoder_heads=1, global_layers=1, global_heads=1,
                             ffn_multiplier=2, max_lecture_tokens=4)
        params = init_params(config, 8, seed=3)
        rng = np.random.default_rng(11)
        z = rng.normal(size=(1, 3, 4))
        valid = np.ones((1, 3))
        out, _ = transformer_layer_forward(
            z, valid, params, "glob0", 1, 0.0, None, False
        )
        expected = naive_transformer_layer(
            z[0].tolist(), as_lists(params), "glob0", 1, [1, 1, 1]
        )
        np.testing.assert_allclose(out[0], np.array(expected), atol=1e-10)

    def test_multi_head_matches_naive(self):
        config = ModelConfig(vocab_size=8, hidden=8, encoder_layers=1,
                             encoder_heads=2, global_layers=1, global_heads=2,
                             ffn_multiplier=2, max_lecture_tokens=4)
        params = init_params(config, 8, seed=5)
        rng = np.random.default_rng(12)
        z = rng.normal(size=(1, 4, 8))
        valid = np.array([[1.0, 1.0, 1.0, 0.0]])
        out, _ = transformer_layer_forward(
            z, valid, params, "glob0", 2, 0.0, None, False
        )
        expected = naive_transformer_layer(
            z[0].tolist(), as_lists(params), "glob0", 2, [1, 1, 1, 0]
        )
        np.testing.assert_allclose(out[0], np.array(expected), atol=1e-10)


class TestPermutationEquivariance:
    def test_global_layer_is_permutation_equivariant(self):
        config = ModelConfig(vocab_size=8, hidden=16, encoder_layers=1,
                             encoder_heads=4, global_layers=1, global_heads=4,
                             ffn_multiplier=4, max_lecture_tokens=4)
        params = init_params(config, 8, seed=7)
        rng = np.random.default_rng(13)
        z = rng.normal(size=(2, 6, 16))
        valid = np.ones((2, 6))
        out, _ = transformer_layer_forward(
            z, valid, params, "glob0", 4, 0.0, None, False
        )
        perm = rng.permutation(6)
        out_perm, _ = transformer_layer_forward(
            z[:, perm], valid, params, "glob0", 4, 0.0, None, False
        )
        # equal up to float summation reordering
        np.testing.assert_allclose(out_perm, out[:, perm], atol=1e-12)
