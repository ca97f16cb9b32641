"""Model and training configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


class Ablation:
    """Model variants: each drops one capability relative to FULL.

    FULL         structure embeddings + global layers + extracted features
    STRUC_COURSE as FULL but without the extracted-feature block
    COURSE       as FULL but without section/lecture-position embeddings
    LECTURE      no global layers; course vector = mean of lecture vectors
    """

    FULL = "full"
    STRUC_COURSE = "struc_course"
    COURSE = "course"
    LECTURE = "lecture"

    ALL = (FULL, STRUC_COURSE, COURSE, LECTURE)


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int = 2000
    hidden: int = 32
    encoder_layers: int = 2
    encoder_heads: int = 4
    global_layers: int = 2
    global_heads: int = 4
    ffn_multiplier: int = 4
    max_lecture_tokens: int = 128
    max_sections: int = 8
    max_lecture_positions: int = 10
    dropout: float = 0.1
    feature_dim: int = 8
    ablation: str = Ablation.FULL
    debug_checks: bool = False

    def __post_init__(self):
        if self.hidden % self.encoder_heads or self.hidden % self.global_heads:
            raise ValueError("hidden size must be divisible by the head counts")
        if self.ablation not in Ablation.ALL:
            raise ValueError(f"unknown ablation {self.ablation!r}")
        if self.vocab_size < 4:
            raise ValueError("vocab_size must cover the reserved tokens")
        for name in ("encoder_layers", "encoder_heads", "global_layers",
                     "global_heads", "ffn_multiplier", "max_lecture_tokens",
                     "max_sections", "max_lecture_positions", "feature_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def uses_features(self) -> bool:
        return self.ablation != Ablation.STRUC_COURSE

    @property
    def uses_structure_embeddings(self) -> bool:
        return self.ablation in (Ablation.FULL, Ablation.STRUC_COURSE)

    @property
    def uses_global(self) -> bool:
        return self.ablation != Ablation.LECTURE

    @property
    def head_in_dim(self) -> int:
        return self.hidden + (self.feature_dim if self.uses_features else 0)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown model config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 3e-5
    beta1: float = 0.9
    beta2: float = 0.998
    adam_eps: float = 1e-8
    warmup_steps: int = 500
    epochs: int = 50
    batch_size: int = 16
    seed: int = 0
    target: str = "instructor"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        for name in ("learning_rate", "beta1", "beta2", "adam_eps",
                     "warmup_steps", "batch_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (self.beta1 < 1.0 and self.beta2 < 1.0):
            raise ValueError("Adam betas must be < 1")
        if self.target not in ("instructor", "course"):
            raise ValueError("target must be 'instructor' or 'course'")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**data)
