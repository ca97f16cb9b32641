"""The hierarchical course rating network.

Pipeline: a small lecture encoder produces one [CLS] vector per lecture;
section and lecture-position embeddings are added to place each lecture in
the course hierarchy; global transformer layers exchange information
between lectures of the same course behind a learned course-[CLS] token;
the course vector, concatenated with the extracted feature vector, feeds a
linear head. Ablations switch off the feature block, the structure
embeddings, or the whole global stage (see config.Ablation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Course
from .config import ModelConfig
from .layers import (
    dropout_backward,
    dropout_forward,
    linear_backward,
    linear_forward,
    transformer_layer_backward,
    transformer_layer_forward,
)
from .vocab import PAD_ID, Vocabulary


@dataclass
class EncodedCourse:
    """A course pre-encoded to id arrays, ready for batching."""

    course_id: str
    token_ids: list[np.ndarray]  # per lecture, [CLS] + token ids
    section_idx: np.ndarray  # 1-based, per lecture
    position_idx: np.ndarray  # 1-based, per lecture
    features: np.ndarray  # raw feature vector
    rating: float | None


@dataclass
class CourseBatch:
    lec_ids: np.ndarray  # [L, T] int64, PAD-padded
    lec_valid: np.ndarray  # [L, T] 1.0 where a real token (or CLS) sits
    lec_course: np.ndarray  # [L] owning course row
    lec_slot: np.ndarray  # [L] slot in the course sequence (0 is course CLS)
    section_idx: np.ndarray  # [L] clipped to the section table
    position_idx: np.ndarray  # [L] clipped to the position table
    course_valid: np.ndarray  # [B, S]
    features: np.ndarray  # [B, F] standardized
    course_ids: list[str]

    @property
    def n_courses(self) -> int:
        return len(self.course_ids)


def encode_course(course: Course, features: np.ndarray, vocab: Vocabulary,
                  config: ModelConfig, target: str) -> EncodedCourse:
    lectures = course.lectures()
    if not lectures:
        raise ValueError(f"course {course.id} has no lectures")
    return EncodedCourse(
        course_id=course.id,
        token_ids=[vocab.encode(lec.tokens, config.max_lecture_tokens)
                   for lec in lectures],
        section_idx=np.array([lec.section_index for lec in lectures]),
        position_idx=np.array([lec.position_in_section for lec in lectures]),
        features=np.asarray(features, dtype=float),
        rating=course.rating(target),
    )


def make_batch(encoded: list[EncodedCourse], config: ModelConfig,
               feat_mean: np.ndarray, feat_std: np.ndarray) -> CourseBatch:
    n_lec = sum(len(e.token_ids) for e in encoded)
    t_max = max(len(ids) for e in encoded for ids in e.token_ids)
    j_max = max(len(e.token_ids) for e in encoded)

    lec_ids = np.full((n_lec, t_max), PAD_ID, dtype=np.int64)
    lec_valid = np.zeros((n_lec, t_max))
    lec_course = np.empty(n_lec, dtype=np.int64)
    lec_slot = np.empty(n_lec, dtype=np.int64)
    section_idx = np.empty(n_lec, dtype=np.int64)
    position_idx = np.empty(n_lec, dtype=np.int64)
    course_valid = np.zeros((len(encoded), 1 + j_max))
    course_valid[:, 0] = 1.0
    feats = np.empty((len(encoded), config.feature_dim))

    row = 0
    for b, enc in enumerate(encoded):
        feats[b] = (enc.features - feat_mean) / feat_std
        for j, ids in enumerate(enc.token_ids):
            lec_ids[row, : len(ids)] = ids
            lec_valid[row, : len(ids)] = 1.0
            lec_course[row] = b
            lec_slot[row] = 1 + j
            course_valid[b, 1 + j] = 1.0
            row += 1
        section_idx[row - len(enc.token_ids): row] = np.minimum(
            enc.section_idx, config.max_sections
        )
        position_idx[row - len(enc.token_ids): row] = np.minimum(
            enc.position_idx, config.max_lecture_positions
        )
    return CourseBatch(
        lec_ids=lec_ids,
        lec_valid=lec_valid,
        lec_course=lec_course,
        lec_slot=lec_slot,
        section_idx=section_idx,
        position_idx=position_idx,
        course_valid=course_valid,
        features=feats,
        course_ids=[e.course_id for e in encoded],
    )


# ------------------------------------------------------------- parameters

def _layer_param_shapes(prefix: str, hidden: int, ffn_mult: int) -> dict:
    ffn = hidden * ffn_mult
    shapes = {}
    for name in ("q", "k", "v", "o"):
        shapes[f"{prefix}.attn.w{name}"] = (hidden, hidden)
        shapes[f"{prefix}.attn.b{name}"] = (hidden,)
    shapes[f"{prefix}.ffn.w1"] = (hidden, ffn)
    shapes[f"{prefix}.ffn.b1"] = (ffn,)
    shapes[f"{prefix}.ffn.w2"] = (ffn, hidden)
    shapes[f"{prefix}.ffn.b2"] = (hidden,)
    for ln in ("ln1", "ln2"):
        shapes[f"{prefix}.{ln}.g"] = (hidden,)
        shapes[f"{prefix}.{ln}.b"] = (hidden,)
    return shapes


def param_shapes(config: ModelConfig, vocab_size: int) -> dict[str, tuple]:
    """Named tensor shapes for a configuration (the ablation lattice)."""
    h = config.hidden
    shapes: dict[str, tuple] = {
        "tok_emb": (vocab_size, h),
        "tok_pos_emb": (config.max_lecture_tokens + 1, h),
    }
    for i in range(config.encoder_layers):
        shapes.update(_layer_param_shapes(f"enc{i}", h, config.ffn_multiplier))
    if config.uses_structure_embeddings:
        shapes["sec_emb"] = (config.max_sections, h)
        shapes["lecpos_emb"] = (config.max_lecture_positions, h)
    if config.uses_global:
        shapes["course_cls"] = (h,)
        for i in range(config.global_layers):
            shapes.update(_layer_param_shapes(f"glob{i}", h, config.ffn_multiplier))
    shapes["head.w"] = (config.head_in_dim,)
    shapes["head.b"] = (1,)
    return shapes


def init_params(config: ModelConfig, vocab_size: int, seed: int) -> dict:
    """uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases, unit LN gains."""
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(config.hidden)
    params = {}
    for name, shape in param_shapes(config, vocab_size).items():
        if name.endswith(".g"):
            params[name] = np.ones(shape)
        elif name.endswith((".b", ".b1", ".b2", ".bq", ".bk", ".bv", ".bo")):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-bound, bound, size=shape)
    return params


def zero_grads(params: dict) -> dict:
    return {name: np.zeros_like(value) for name, value in params.items()}


# ---------------------------------------------------------------- forward

def _finite_or_die(name, *arrays):
    for arr in arrays:
        if not np.isfinite(arr).all():
            raise FloatingPointError(f"non-finite values in {name}")


def forward_batch(params: dict, batch: CourseBatch, config: ModelConfig,
                  train: bool = False, rng=None, collect: dict | None = None):
    """Predicts one (standardized-scale) scalar per course.

    Returns (predictions [B], cache). With collect={} the attention
    matrices of every layer are stored under 'attention'.
    """
    if train and rng is None:
        raise ValueError("train-mode forward needs an rng for dropout")
    drop = config.dropout
    t_len = batch.lec_ids.shape[1]

    x = params["tok_emb"][batch.lec_ids] + params["tok_pos_emb"][:t_len]
    enc_caches = []
    for i in range(config.encoder_layers):
        x, cache = transformer_layer_forward(
            x, batch.lec_valid, params, f"enc{i}", config.encoder_heads,
            drop, rng, train,
        )
        enc_caches.append(cache)
        if collect is not None:
            collect.setdefault("attention", []).append(cache[0][7])
        if config.debug_checks:
            _finite_or_die(f"enc{i}", x)
    h_lec = x[:, 0, :]

    glob_caches = []
    if config.uses_global:
        z_lec = h_lec
        if config.uses_structure_embeddings:
            z_lec = (
                h_lec
                + params["sec_emb"][batch.section_idx - 1]
                + params["lecpos_emb"][batch.position_idx - 1]
            )
        n_courses, s_len = batch.course_valid.shape
        zc = np.zeros((n_courses, s_len, config.hidden))
        zc[:, 0] = params["course_cls"]
        zc[batch.lec_course, batch.lec_slot] = z_lec
        for i in range(config.global_layers):
            zc, cache = transformer_layer_forward(
                zc, batch.course_valid, params, f"glob{i}", config.global_heads,
                drop, rng, train,
            )
            glob_caches.append(cache)
            if collect is not None:
                collect.setdefault("attention", []).append(cache[0][7])
            if config.debug_checks:
                _finite_or_die(f"glob{i}", zc)
        z_course = zc[:, 0, :]
    else:
        counts = np.bincount(batch.lec_course, minlength=batch.n_courses)
        z_course = np.zeros((batch.n_courses, config.hidden))
        np.add.at(z_course, batch.lec_course, h_lec)
        z_course /= counts[:, None]

    if config.uses_features:
        u = np.concatenate([z_course, batch.features], axis=1)
    else:
        u = z_course
    ud, m_head = dropout_forward(u, drop, rng, train)
    pred, c_head = linear_forward(ud, params["head.w"][:, None], params["head.b"])
    pred = pred[:, 0]
    if config.debug_checks:
        _finite_or_die("head", pred)
    cache = (enc_caches, glob_caches, m_head, c_head)
    return pred, cache


def backward_batch(d_pred: np.ndarray, cache, params: dict,
                   batch: CourseBatch, config: ModelConfig) -> dict:
    """Exact reverse-mode gradients for every parameter tensor."""
    enc_caches, glob_caches, m_head, c_head = cache
    grads = zero_grads(params)

    du, dw, db = linear_backward(d_pred[:, None], c_head)
    grads["head.w"] += dw[:, 0]
    grads["head.b"] += db
    du = dropout_backward(du, m_head)
    dz_course = du[:, : config.hidden]

    if config.uses_global:
        s_len = batch.course_valid.shape[1]
        dzc = np.zeros((batch.n_courses, s_len, config.hidden))
        dzc[:, 0] = dz_course
        for i in reversed(range(config.global_layers)):
            dzc = transformer_layer_backward(dzc, glob_caches[i], grads, f"glob{i}")
        grads["course_cls"] += dzc[:, 0].sum(axis=0)
        dz_lec = dzc[batch.lec_course, batch.lec_slot]
        if config.uses_structure_embeddings:
            np.add.at(grads["sec_emb"], batch.section_idx - 1, dz_lec)
            np.add.at(grads["lecpos_emb"], batch.position_idx - 1, dz_lec)
        dh_lec = dz_lec
    else:
        counts = np.bincount(batch.lec_course, minlength=batch.n_courses)
        dh_lec = dz_course[batch.lec_course] / counts[batch.lec_course, None]

    t_len = batch.lec_ids.shape[1]
    dx = np.zeros((batch.lec_ids.shape[0], t_len, config.hidden))
    dx[:, 0, :] = dh_lec
    for i in reversed(range(config.encoder_layers)):
        dx = transformer_layer_backward(dx, enc_caches[i], grads, f"enc{i}")
    np.add.at(
        grads["tok_emb"],
        batch.lec_ids.reshape(-1),
        dx.reshape(-1, config.hidden),
    )
    grads["tok_pos_emb"][:t_len] += dx.sum(axis=0)
    return grads


def mse_loss(predicted, observed) -> float:
    predicted = np.asarray(predicted, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if predicted.shape != observed.shape:
        raise ValueError("mse_loss needs equal-length inputs")
    diff = predicted - observed
    return float(diff @ diff) / diff.size


def loss_and_grads(params: dict, batch: CourseBatch, targets: np.ndarray,
                   config: ModelConfig, train: bool = True, rng=None):
    """MSE loss over the batch plus gradients for every parameter."""
    pred, cache = forward_batch(params, batch, config, train=train, rng=rng)
    if pred.shape != targets.shape:
        raise ValueError("batch predictions and targets disagree in length")
    diff = pred - targets
    loss = float(diff @ diff) / diff.size
    d_pred = 2.0 * diff / diff.size
    grads = backward_batch(d_pred, cache, params, batch, config)
    return loss, grads, pred
