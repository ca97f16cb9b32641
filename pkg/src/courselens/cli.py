"""Command-line interface.

Subcommands: synth, features, correlate, train, predict. Exit codes:
0 success, 2 input/validation error, 1 internal error. Every command
writes a run manifest next to its primary output; manifests carry a
timestamp, primary outputs are byte-stable for identical flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import correlation_report, report_to_csv, report_to_table
from .baselines import linear_regression, mean_predictor
from .corpus import Course, ValidationError, load_corpus, save_corpus, split_dataset
from .lexicons import load_lexicon_set
from .model import (
    ModelConfig,
    TrainConfig,
    load_checkpoint,
    mae,
    rmse,
    save_checkpoint,
    train,
)
from .synth import GeneratorSpec, generate
from .verbal_cues import FEATURE_NAMES, FeatureVector, extract_features


def write_manifest(out_path: Path, command: str, args: dict, seed) -> None:
    manifest = {
        "tool": "courselens",
        "version": __version__,
        "command": command,
        "arguments": {k: str(v) for k, v in args.items() if v is not None},
        "seed": seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path = out_path.with_name(out_path.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _read_features_csv(path: Path) -> dict[str, FeatureVector]:
    features = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("course_id", *FEATURE_NAMES)
                   if c not in (reader.fieldnames or [])]
        if missing:
            raise ValidationError(f"features CSV missing columns: {missing}")
        for row in reader:
            features[row["course_id"]] = FeatureVector(
                **{name: float(row[name]) for name in FEATURE_NAMES}
            )
    return features


def _write_features_csv(path: Path, courses: list[Course],
                        features: dict[str, FeatureVector]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", *FEATURE_NAMES,
                         "instructor_rating", "course_rating"])
        for course in courses:
            vec = features[course.id]
            writer.writerow(
                [course.id]
                + [repr(float(v)) for v in vec.as_list()]
                + ["" if course.instructor_rating is None
                   else repr(course.instructor_rating)]
                + ["" if course.course_rating is None
                   else repr(course.course_rating)]
            )


def cmd_synth(args) -> int:
    spec_data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed is not None:
        spec_data["seed"] = args.seed
    spec = GeneratorSpec.from_dict(spec_data)
    lexicons = load_lexicon_set(args.lexicons)
    courses = generate(spec, lexicons)
    out = Path(args.out)
    save_corpus(courses, out)
    write_manifest(out, "synth", vars(args), spec.seed)
    print(f"wrote {len(courses)} courses to {out}")
    return 0


def cmd_features(args) -> int:
    courses = load_corpus(args.corpus)
    lexicons = load_lexicon_set(args.lexicons)
    features = {c.id: extract_features(c, lexicons) for c in courses}
    out = Path(args.out)
    _write_features_csv(out, courses, features)
    write_manifest(out, "features", vars(args), args.seed)
    print(f"wrote features for {len(courses)} courses to {out}")
    return 0


def cmd_correlate(args) -> int:
    courses = load_corpus(args.corpus)
    features = _read_features_csv(Path(args.features))
    missing = [c.id for c in courses if c.id not in features]
    if missing:
        raise ValidationError(f"features CSV missing courses: {missing[:10]}")
    try:
        rows = correlation_report(courses, features, args.target)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    out = Path(args.out)
    out.write_text(report_to_csv(rows), encoding="utf-8")
    write_manifest(out, "correlate", vars(args), args.seed)
    print(report_to_table(rows), end="")
    return 0


def _load_json_config(path, cls, overrides=None):
    data = json.loads(Path(path).read_text(encoding="utf-8")) if path else {}
    data.update(overrides or {})
    try:
        return cls.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad config {path}: {exc}") from None


def cmd_train(args) -> int:
    courses = load_corpus(args.corpus)
    features = _read_features_csv(Path(args.features))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.target:
        overrides["target"] = args.target
    model_overrides = {"ablation": args.ablation} if args.ablation else {}
    model_config = _load_json_config(args.model_config, ModelConfig,
                                     model_overrides)
    train_config = _load_json_config(args.train_config, TrainConfig, overrides)

    labeled = [c for c in courses if c.rating(train_config.target) is not None]
    if len(labeled) < len(courses):
        raise ValidationError(
            f"{len(courses) - len(labeled)} courses lack the "
            f"{train_config.target} rating"
        )
    try:
        split = split_dataset(courses, train_config.seed)
    except ValidationError:
        raise
    init = None
    if args.init_from:
        loaded = load_checkpoint(args.init_from)
        if loaded.model_config != model_config:
            raise ValidationError(
                "checkpoint config does not match the requested model config"
            )
        init = loaded.params

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        model = train(courses, features, split, model_config, train_config,
                      init=init)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    ckpt_path = out_dir / "model.ckpt"
    save_checkpoint(model, ckpt_path)

    history_path = out_dir / "history.csv"
    with open(history_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_mse", "val_mse", "lr"])
        for rec in model.history:
            writer.writerow([rec.epoch, repr(rec.train_mse), repr(rec.val_mse),
                             repr(rec.lr)])

    by_id = {c.id: c for c in courses}
    test_courses = [by_id[i] for i in split.test]
    observed = np.array([c.rating(train_config.target) for c in test_courses],
                        dtype=float)
    predicted = model.predict(test_courses, features)

    train_targets = [by_id[i].rating(train_config.target) for i in split.train]
    feat_train = np.array([features[i].as_list() for i in split.train])
    feat_test = np.array([features[c.id].as_list() for c in test_courses])
    mean_pred = mean_predictor(train_targets, len(test_courses))
    lin_pred = linear_regression(feat_train, train_targets, feat_test)

    metrics = {
        "target": train_config.target,
        "ablation": model_config.ablation,
        "n_train": len(split.train),
        "n_validation": len(split.validation),
        "n_test": len(split.test),
        "best_epoch": model.best_epoch,
        "test_rmse": rmse(observed, predicted),
        "test_mae": mae(observed, predicted),
        "baselines": {
            "mean_predictor": {"rmse": rmse(observed, mean_pred),
                               "mae": mae(observed, mean_pred)},
            "linear_regression": {"rmse": rmse(observed, lin_pred),
                                  "mae": mae(observed, lin_pred)},
        },
    }
    metrics_path = out_dir / "metrics.json"
    metrics_path.write_text(json.dumps(metrics, indent=2) + "\n",
                            encoding="utf-8")
    write_manifest(out_dir / "run", "train", vars(args), train_config.seed)
    print(f"test rmse {metrics['test_rmse']:.4f} mae {metrics['test_mae']:.4f} "
          f"(best epoch {model.best_epoch})")
    return 0


def cmd_predict(args) -> int:
    courses = load_corpus(args.corpus)
    features = _read_features_csv(Path(args.features))
    model = load_checkpoint(args.checkpoint)
    predictions = model.predict(courses, features)
    out = Path(args.out)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "prediction"])
        for course, pred in zip(courses, predictions):
            writer.writerow([course.id, repr(float(pred))])
    write_manifest(out, "predict", vars(args), args.seed)
    print(f"wrote {len(courses)} predictions to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="courselens",
        description="Course transcript analytics and rating prediction",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--config", dest="spec", required=True,
                   help="GeneratorSpec JSON file")
    p.add_argument("--lexicons", default=None,
                   help="lexicon directory (bundled set by default)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output corpus JSONL")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("features", help="extract the 8 course features")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicons", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output features CSV")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("correlate", help="feature-rating correlation report")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--target", choices=["instructor", "course"],
                   default="instructor")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output report CSV")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("train", help="train the rating model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--model-config", default=None, help="ModelConfig JSON")
    p.add_argument("--train-config", default=None, help="TrainConfig JSON")
    p.add_argument("--target", choices=["instructor", "course"], default=None)
    p.add_argument("--ablation",
                   choices=["full", "struc_course", "course", "lecture"],
                   default=None)
    p.add_argument("--init-from", default=None,
                   help="checkpoint to initialize parameters from")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score courses with a checkpoint")
    p.add_argument("--corpus", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output predictions CSV")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
