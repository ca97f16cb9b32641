"""Training loop, metrics, and prediction for the rating model.

Targets are z-scored with training-split statistics before optimization
(minimizing the same MSE objective up to a constant factor, but keeping
gradient scales sane at desk scale); predictions are mapped back to the
0-5 rating scale and clamped to it. Extracted features are z-scored the
same way. Both sets of statistics travel with the trained model so that
prediction is self-contained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..corpus import RATING_MAX, RATING_MIN, Course, DatasetSplit
from ..verbal_cues import FeatureVector
from .config import ModelConfig, TrainConfig
from .network import (
    CourseBatch,
    EncodedCourse,
    encode_course,
    forward_batch,
    init_params,
    loss_and_grads,
    make_batch,
)
from .optimizer import Adam
from .vocab import Vocabulary, build_vocabulary


def rmse(observed, predicted) -> float:
    """Root mean squared error."""
    observed = np.asarray(observed, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if observed.shape != predicted.shape or observed.size == 0:
        raise ValueError("rmse needs equal-length nonempty inputs")
    diff = observed - predicted
    return math.sqrt(float(diff @ diff) / diff.size)


def mae(observed, predicted) -> float:
    """Mean absolute error."""
    observed = np.asarray(observed, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if observed.shape != predicted.shape or observed.size == 0:
        raise ValueError("mae needs equal-length nonempty inputs")
    return float(np.abs(observed - predicted).mean())


@dataclass
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float
    lr: float


@dataclass
class TrainedModel:
    """Everything needed to score unseen courses."""

    params: dict
    model_config: ModelConfig
    vocab: Vocabulary
    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: float
    target_std: float
    target: str
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    def predict(self, courses: list[Course],
                features: dict[str, FeatureVector],
                batch_size: int = 32) -> np.ndarray:
        """Clamped 0-5 predictions, eval mode, in course order."""
        encoded = [
            encode_course(c, np.asarray(features[c.id].as_list()), self.vocab,
                          self.model_config, self.target)
            for c in courses
        ]
        preds = np.empty(len(encoded))
        for start in range(0, len(encoded), batch_size):
            chunk = encoded[start:start + batch_size]
            batch = make_batch(chunk, self.model_config,
                               self.feature_mean, self.feature_std)
            out, _ = forward_batch(self.params, batch, self.model_config,
                                   train=False)
            preds[start:start + len(chunk)] = out
        preds = self.target_mean + self.target_std * preds
        return np.clip(preds, RATING_MIN, RATING_MAX)

    def evaluate(self, courses: list[Course],
                 features: dict[str, FeatureVector]) -> dict[str, float]:
        observed = np.array([c.rating(self.target) for c in courses], dtype=float)
        predicted = self.predict(courses, features)
        return {"rmse": rmse(observed, predicted), "mae": mae(observed, predicted)}


def _standardization(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return mean, std


def train(courses: list[Course], features: dict[str, FeatureVector],
          split: DatasetSplit, model_config: ModelConfig,
          train_config: TrainConfig,
          init: dict | None = None) -> TrainedModel:
    """Mini-batch training; returns the parameters of the best-validation epoch."""
    by_id = {c.id: c for c in courses}
    target = train_config.target
    for name, ids in (("train", split.train), ("validation", split.validation)):
        if not ids:
            raise ValueError(f"{name} split is empty")
        missing = [i for i in ids if by_id[i].rating(target) is None]
        if missing:
            raise ValueError(
                f"{name} courses missing {target} rating: {missing[:10]}"
            )

    train_courses = [by_id[i] for i in split.train]
    val_courses = [by_id[i] for i in split.validation]

    vocab = build_vocabulary(train_courses, model_config.vocab_size)
    feat_matrix = np.array([features[c.id].as_list() for c in train_courses])
    feat_mean, feat_std = _standardization(feat_matrix)
    ratings = np.array([c.rating(target) for c in train_courses], dtype=float)
    target_mean = float(ratings.mean())
    target_std = float(ratings.std()) or 1.0

    def encode_all(cs):
        return [
            encode_course(c, np.asarray(features[c.id].as_list()), vocab,
                          model_config, target)
            for c in cs
        ]

    train_enc = encode_all(train_courses)
    train_targets = (ratings - target_mean) / target_std

    seeds = np.random.SeedSequence(train_config.seed).spawn(3)
    init_seed = int(seeds[0].generate_state(1)[0])
    shuffle_rng = np.random.default_rng(seeds[1])
    dropout_rng = np.random.default_rng(seeds[2])

    params = init_params(model_config, len(vocab), init_seed)
    if init is not None:
        for name, value in params.items():
            if name not in init or init[name].shape != value.shape:
                raise ValueError(f"incompatible init checkpoint: tensor {name}")
            params[name] = init[name].copy()
    optimizer = Adam(params, train_config)

    model = TrainedModel(
        params=params, model_config=model_config, vocab=vocab,
        feature_mean=feat_mean, feature_std=feat_std,
        target_mean=target_mean, target_std=target_std, target=target,
    )
    val_observed = np.array([c.rating(target) for c in val_courses], dtype=float)

    best_val = math.inf
    best_params = {k: v.copy() for k, v in params.items()}
    history: list[EpochRecord] = []
    n = len(train_enc)
    for epoch in range(1, train_config.epochs + 1):
        order = shuffle_rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, train_config.batch_size):
            chosen = order[start:start + train_config.batch_size]
            batch = make_batch([train_enc[i] for i in chosen], model_config,
                               feat_mean, feat_std)
            loss, grads, _ = loss_and_grads(
                params, batch, train_targets[chosen], model_config,
                train=True, rng=dropout_rng,
            )
            optimizer.step(params, grads)
            epoch_losses.append(loss)
        # batch losses live on the standardized scale; report rating scale
        train_mse = float(np.mean(epoch_losses)) * target_std**2
        val_pred = model.predict(val_courses, features)
        val_mse = float(np.mean((val_pred - val_observed) ** 2))
        history.append(EpochRecord(epoch, train_mse, val_mse, optimizer.current_lr))
        if val_mse < best_val:
            best_val = val_mse
            best_params = {k: v.copy() for k, v in params.items()}
            model.best_epoch = epoch

    model.params = best_params
    model.history = history
    return model
