"""Single-file checkpoint format.

Layout: one UTF-8 JSON header line, then the named tensors as raw 64-bit
little-endian values in the order listed by the header. The header carries
the model config, the vocabulary, and the feature/target standardization
statistics, so a checkpoint alone suffices for prediction.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..verbal_cues import FEATURE_NAMES
from .config import ModelConfig
from .network import param_shapes
from .training import TrainedModel
from .vocab import Vocabulary

FORMAT_VERSION = 1


def save_checkpoint(model: TrainedModel, path: str | Path) -> None:
    names = sorted(model.params)
    header = {
        "format_version": FORMAT_VERSION,
        "model_config": model.model_config.to_dict(),
        "target": model.target,
        "vocab": model.vocab.tokens,
        "feature_names": list(FEATURE_NAMES),
        "feature_mean": [float(v) for v in model.feature_mean],
        "feature_std": [float(v) for v in model.feature_std],
        "target_mean": model.target_mean,
        "target_std": model.target_std,
        "tensors": [
            {"name": n, "shape": list(model.params[n].shape)} for n in names
        ],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8"))
        fh.write(b"\n")
        for name in names:
            fh.write(np.ascontiguousarray(model.params[name], dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> TrainedModel:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("format_version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported checkpoint format: {header.get('format_version')}"
            )
        config = ModelConfig.from_dict(header["model_config"])
        vocab = Vocabulary(header["vocab"])
        expected = param_shapes(config, len(vocab))
        params = {}
        for spec in header["tensors"]:
            name, shape = spec["name"], tuple(spec["shape"])
            if name not in expected:
                raise ValueError(f"checkpoint tensor {name!r} not in model config")
            if shape != expected[name]:
                raise ValueError(
                    f"checkpoint tensor {name!r} has shape {shape}, "
                    f"config implies {expected[name]}"
                )
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise ValueError(f"checkpoint truncated in tensor {name!r}")
            params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        missing = set(expected) - set(params)
        if missing:
            raise ValueError(f"checkpoint missing tensors: {sorted(missing)}")
    return TrainedModel(
        params=params,
        model_config=config,
        vocab=vocab,
        feature_mean=np.asarray(header["feature_mean"], dtype=float),
        feature_std=np.asarray(header["feature_std"], dtype=float),
        target_mean=float(header["target_mean"]),
        target_std=float(header["target_std"]),
        target=header["target"],
    )
