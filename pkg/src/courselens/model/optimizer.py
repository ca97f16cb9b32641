"""Adam with linear warmup and inverse-square-root decay.

lr(step) = base_lr * min(step / warmup, sqrt(warmup / step)); the peak
base_lr is reached exactly at the warmup step.
"""

from __future__ import annotations

import math

import numpy as np

from .config import TrainConfig


def learning_rate(step: int, base_lr: float, warmup_steps: int) -> float:
    if step < 1:
        raise ValueError("step counts from 1")
    return base_lr * min(step / warmup_steps, math.sqrt(warmup_steps / step))


class Adam:
    def __init__(self, params: dict, config: TrainConfig):
        self.config = config
        self.step_count = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    @property
    def current_lr(self) -> float:
        step = max(self.step_count, 1)
        return learning_rate(step, self.config.learning_rate,
                             self.config.warmup_steps)

    def step(self, params: dict, grads: dict) -> None:
        """One in-place update; bias-corrected first/second moments."""
        self.step_count += 1
        cfg = self.config
        lr = learning_rate(self.step_count, cfg.learning_rate, cfg.warmup_steps)
        bc1 = 1.0 - cfg.beta1 ** self.step_count
        bc2 = 1.0 - cfg.beta2 ** self.step_count
        for name, grad in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * grad
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * grad * grad
            params[name] -= lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.adam_eps)
