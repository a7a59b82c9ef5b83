"""Command-line front end.

Subcommands: ``eval`` (threshold sweep + expected matrices for a series),
``loss`` (loss value and optional gradient for a series), ``verify``
(oracle check suite), ``train`` (fit the demo MLP), and ``demo-figure1``
(emit the paired same-matrix series).  Exit codes: 0 ok, 1 bad input
data, 2 bad config, 3 verification failure, 4 training divergence.
``WSOL_SEED`` overrides the default seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from .demo import (
    DEFAULT_DEMO_WEIGHTS,
    adjacent_error_series,
    compare_series,
    isolated_error_series,
)
from .errors import ConfigError, InputError, TrainingDivergedError, ValidationError
from .loss import CombinedLossSpec, combined_loss, loss_gradient, loss_value
from .series import LabeledSeries, read_series_csv, write_series_csv
from .threshold import ThresholdDistribution
from .trainer import (
    MLPModel,
    TrainConfig,
    expected_report,
    generate_temporal_dataset,
    sweep_report,
    train,
    write_history_csv,
)
from .verify import format_table, run_verify
from .weights import UnitWeight, ValueMaxWeight

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_DIVERGED = 4


def _default_seed() -> int:
    return int(os.environ.get("WSOL_SEED", "2024"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsol")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="score a series file under a config")
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--out", default="report.json")
    p_eval.add_argument("--sweep-step", type=float, default=0.01)

    p_loss = sub.add_parser("loss", help="evaluate a loss spec on a series")
    p_loss.add_argument("--data", required=True)
    p_loss.add_argument("--loss", required=True)
    p_loss.add_argument(
        "--gradient",
        action="store_true",
        help="also print the per-prediction gradient as CSV",
    )

    p_verify = sub.add_parser("verify", help="run the oracle check suite")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--samples", type=int, default=20000)
    p_verify.add_argument("--only", default=None)
    p_verify.add_argument("--out", default=None)

    p_train = sub.add_parser("train", help="train the demo MLP")
    p_train.add_argument("--data", default=None, help="CSV with feature columns + label")
    p_train.add_argument("--synth", default=None, help="synthetic dataset config JSON")
    p_train.add_argument("--loss", required=True)
    p_train.add_argument("--epochs", type=int, default=300)
    p_train.add_argument("--lr", type=float, default=0.5)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--hidden", default="8")
    p_train.add_argument("--chunk", type=int, default=None)
    p_train.add_argument("--out-dir", default="train_out")

    p_demo = sub.add_parser(
        "demo-figure1", help="emit the paired series with identical matrices"
    )
    p_demo.add_argument("--out-dir", default="demo_out")
    p_demo.add_argument("--omega", default="0.6,0.3,0.1")
    p_demo.add_argument("--tau", type=float, default=0.5)
    return parser


def read_dataset_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a training CSV: feature columns f1..fm then a final label column."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip().lower() for h in next(reader)]
            except StopIteration:
                raise InputError(f"{path}: empty dataset") from None
            if len(header) < 2 or header[-1] != "label":
                raise InputError(f"{path}: expected feature columns then 'label'")
            rows = []
            labels = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise InputError(f"{path}:{lineno}: wrong field count")
                try:
                    rows.append([float(v) for v in row[:-1]])
                    labels.append(int(row[-1]))
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: {exc}") from None
    except OSError as exc:
        raise InputError(str(exc)) from None
    if not rows:
        raise InputError(f"{path}: empty dataset")
    y = np.array(labels)
    if not np.all(np.isin(y, (0, 1))):
        raise InputError(f"{path}: labels must be 0 or 1")
    return np.array(rows), y


def write_dataset_csv(path: str | Path, features: np.ndarray, labels: np.ndarray) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j + 1}" for j in range(features.shape[1])] + ["label"])
        for row, label in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def cmd_eval(args) -> int:
    document = cfg.load_config(args.config)
    dist = document.get("distribution") or ThresholdDistribution.uniform()
    weights = document.get("weights") or UnitWeight()
    series = read_series_csv(args.data)
    thresholds = np.round(np.arange(args.sweep_step, 1.0, args.sweep_step), 10)
    report = {
        "n": series.n,
        "positives": int(series.labels.sum()),
        "expected": expected_report(series, dist, weights),
    }
    report.update(sweep_report(series, thresholds, weights))
    if "score" in document:
        report["headline_score"] = document["score"].value
    Path(args.out).write_text(json.dumps(report, indent=2))
    print(f"wrote {args.out} ({series.n} samples, {len(thresholds)} thresholds)")
    return EXIT_OK


def cmd_loss(args) -> int:
    spec = cfg.load_loss(args.loss)
    series = read_series_csv(args.data)
    if isinstance(spec, CombinedLossSpec):
        value, grad = combined_loss(series, spec)
    else:
        value = loss_value(series, spec)
        grad = loss_gradient(series, spec) if args.gradient else None
    print(f"loss,{float(value)!r}")
    if args.gradient:
        print("index,gradient")
        for i, v in enumerate(grad.values):
            print(f"{i},{float(v)!r}")
        if grad.nonsmooth:
            print(
                f"warning: one-sided derivatives at kink indices "
                f"{list(grad.kink_indices)}",
                file=sys.stderr,
            )
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    results = run_verify(seed=seed, samples=args.samples, only=args.only)
    if not results:
        print(f"no checks match --only {args.only!r}", file=sys.stderr)
        return EXIT_VERIFY
    print(format_table(results))
    if args.out:
        Path(args.out).write_text(json.dumps([r.to_dict() for r in results], indent=2))
    if all(r.passed for r in results):
        return EXIT_OK
    for r in results:
        if not r.passed:
            print(f"failed: {r.name}: {r.detail}", file=sys.stderr)
    return EXIT_VERIFY


def cmd_train(args) -> int:
    if args.data is None and args.synth is None:
        raise InputError("train needs --data or --synth")
    loss = cfg.load_loss(args.loss)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.data is not None:
        features, labels = read_dataset_csv(args.data)
    else:
        synth = cfg.parse_synth(cfg.load_json(args.synth))
        features, labels = generate_temporal_dataset(synth)
    hidden = tuple(int(h) for h in args.hidden.split(",") if h)
    train_cfg = TrainConfig(
        loss=loss,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=seed,
        hidden=hidden,
        chunk=args.chunk,
    )
    model = MLPModel.init((features.shape[1], *hidden, 1), seed=seed)
    result = train(features, labels, model, train_cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.model.save(out / "checkpoint.json")
    write_history_csv(out / "history.csv", result.history)
    head = loss.components[0][0] if isinstance(loss, CombinedLossSpec) else loss
    preds = result.model.forward(features)
    series = LabeledSeries(preds, labels, chronological=True)
    thresholds = np.round(np.arange(0.01, 1.0, 0.01), 10)
    report = sweep_report(series, thresholds, head.weights)
    report["expected"] = expected_report(series, head.dist, head.weights)
    (out / "evaluation.json").write_text(json.dumps(report, indent=2))
    final = result.history[-1] if result.history else None
    if final:
        print(
            f"trained {args.epochs} epochs; final loss {final.loss:.6f}, "
            f"{head.score.value} classical {final.score_classical:.4f}, "
            f"weighted {final.score_weighted:.4f}"
        )
    print(f"wrote {out}/checkpoint.json, history.csv, evaluation.json")
    return EXIT_OK


def cmd_demo_figure1(args) -> int:
    omega = tuple(float(v) for v in args.omega.split(","))
    weights = ValueMaxWeight(omega=omega) if omega else DEFAULT_DEMO_WEIGHTS
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_series_csv(out / "series_adjacent_errors.csv", adjacent_error_series())
    write_series_csv(out / "series_isolated_errors.csv", isolated_error_series())
    comparison = compare_series(weights=weights, tau=args.tau)
    (out / "comparison.json").write_text(json.dumps(comparison.to_dict(), indent=2))
    cm = comparison.confusion
    print(
        f"both series: tn={cm['tn']} fp={cm['fp']} fn={cm['fn']} tp={cm['tp']} "
        f"at tau={comparison.tau}"
    )
    print(f"{'score':<14}{'classical':>12}{'adjacent':>12}{'isolated':>12}")
    for name in comparison.classical_scores:
        print(
            f"{name:<14}"
            f"{comparison.classical_scores[name]:>12.5f}"
            f"{comparison.weighted_scores_adjacent[name]:>12.5f}"
            f"{comparison.weighted_scores_isolated[name]:>12.5f}"
        )
    print(f"wrote {out}/series_*.csv, comparison.json")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "eval": cmd_eval,
        "loss": cmd_loss,
        "verify": cmd_verify,
        "train": cmd_train,
        "demo-figure1": cmd_demo_figure1,
    }
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
