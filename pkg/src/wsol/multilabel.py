"""One-versus-rest extension: per-class expected matrices, one global score.

Each class gets its own threshold prior and weight spec; the per-class
scores are gathered by an aggregator (mean, weighted mean, or min) into a
global score, and the multilabel loss is its negation.  A sample may be
positive in several columns at once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ValidationError
from .expected import expected_confusion
from .loss import GradientVector, LossSpec, loss_gradient
from .scores import ScoreKind, apply_score
from .series import LabeledSeries
from .threshold import ThresholdDistribution
from .weights import WeightSpec


@dataclass(frozen=True, eq=False)
class MultilabelSeries:
    labels: np.ndarray
    predictions: np.ndarray
    chronological: bool = True

    def __post_init__(self):
        labels = np.asarray(self.labels)
        preds = np.asarray(self.predictions, dtype=np.float64)
        if labels.ndim != 2 or preds.shape != labels.shape:
            raise ValidationError("labels and predictions must be (n, d) and congruent")
        if labels.shape[1] < 2:
            raise ValidationError("multilabel series needs at least 2 classes")
        if not np.all(np.isin(labels, (0, 1))):
            raise ValidationError("labels must be exactly 0 or 1")
        if np.any((preds <= 0.0) | (preds >= 1.0)):
            raise ValidationError("predictions must lie strictly inside (0, 1)")
        object.__setattr__(self, "labels", labels.astype(np.int64))
        object.__setattr__(self, "predictions", preds)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def num_classes(self) -> int:
        return self.labels.shape[1]

    def column(self, j: int) -> LabeledSeries:
        return LabeledSeries(
            self.predictions[:, j], self.labels[:, j], self.chronological
        )


@dataclass(frozen=True)
class Aggregator:
    """How per-class scores merge: ``mean``, ``weighted_mean``, or ``min``."""

    kind: str
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("mean", "weighted_mean", "min"):
            raise ValidationError(f"unknown aggregator {self.kind!r}")
        if self.kind == "weighted_mean":
            if not self.weights:
                raise ValidationError("weighted_mean needs weights")
            w = tuple(float(x) for x in self.weights)
            if any(x < 0 for x in w):
                raise ValidationError("aggregator weights must be non-negative")
            if abs(sum(w) - 1.0) > 1e-12:
                raise ValidationError("aggregator weights must sum to 1")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValidationError(f"{self.kind} aggregator takes no weights")

    def combine(self, scores: np.ndarray) -> float:
        if self.kind == "mean":
            return float(np.mean(scores))
        if self.kind == "weighted_mean":
            return float(np.dot(self.weights, scores))
        return float(np.min(scores))

    def partials(self, scores: np.ndarray) -> tuple[np.ndarray, bool]:
        """Derivative of the combined score per class; min flags ties."""
        d = scores.size
        if self.kind == "mean":
            return np.full(d, 1.0 / d), False
        if self.kind == "weighted_mean":
            return np.asarray(self.weights), False
        out = np.zeros(d)
        winner = int(np.argmin(scores))
        out[winner] = 1.0
        tied = bool(np.sum(scores == scores[winner]) > 1)
        return out, tied


@dataclass(frozen=True)
class MultilabelSpec:
    class_specs: tuple[tuple[ThresholdDistribution, WeightSpec], ...]
    score: ScoreKind
    aggregator: Aggregator

    def __post_init__(self):
        if len(self.class_specs) < 2:
            raise ValidationError("multilabel spec needs at least 2 classes")
        if (
            self.aggregator.kind == "weighted_mean"
            and len(self.aggregator.weights) != len(self.class_specs)
        ):
            raise ValidationError("aggregator weights must match the class count")

    @property
    def num_classes(self) -> int:
        return len(self.class_specs)


def _check_shape(ml: MultilabelSeries, spec: MultilabelSpec) -> None:
    if ml.num_classes != spec.num_classes:
        raise ValidationError(
            f"series has {ml.num_classes} classes, spec has {spec.num_classes}"
        )


def per_class_scores(ml: MultilabelSeries, spec: MultilabelSpec) -> np.ndarray:
    """Score of each class column; degenerate columns score 0."""
    _check_shape(ml, spec)
    out = np.empty(spec.num_classes)
    for j, (dist, wspec) in enumerate(spec.class_specs):
        exp = expected_confusion(ml.column(j), dist, wspec)
        out[j] = apply_score(spec.score, *exp.entries()).value
    return out


def multilabel_global_score(ml: MultilabelSeries, spec: MultilabelSpec) -> float:
    return spec.aggregator.combine(per_class_scores(ml, spec))


@dataclass(frozen=True)
class MultilabelGradient:
    values: np.ndarray
    nonsmooth: bool = False


def multilabel_wsol(
    ml: MultilabelSeries, spec: MultilabelSpec
) -> tuple[float, MultilabelGradient]:
    """Loss (negated global score) and its gradient over all n x d predictions.

    Perturbing class j's predictions moves only class j's score, so the
    gradient factors into per-class blocks scaled by the aggregator
    partials; for ``min`` only the active class carries gradient, one-sided
    at ties.
    """
    _check_shape(ml, spec)
    scores = per_class_scores(ml, spec)
    mu_partials, tied = spec.aggregator.partials(scores)
    grad = np.zeros_like(ml.predictions)
    nonsmooth = tied
    for j, (dist, wspec) in enumerate(spec.class_specs):
        if mu_partials[j] == 0.0:
            continue
        g: GradientVector = loss_gradient(
            ml.column(j), LossSpec(score=spec.score, weights=wspec, dist=dist)
        )
        grad[:, j] = mu_partials[j] * g.values
        nonsmooth = nonsmooth or g.nonsmooth
    return -spec.aggregator.combine(scores), MultilabelGradient(
        values=grad, nonsmooth=nonsmooth
    )


def read_multilabel_csv(path: str | Path) -> MultilabelSeries:
    """Read `timestamp,label_1..label_d,pred_1..pred_d` (timestamp optional)."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip().lower() for h in next(reader)]
            except StopIteration:
                raise InputError(f"{path}: empty series") from None
            has_ts = bool(header) and header[0] == "timestamp"
            cols = header[1:] if has_ts else header
            d = len(cols) // 2
            expected = [f"label_{j + 1}" for j in range(d)] + [
                f"pred_{j + 1}" for j in range(d)
            ]
            if d < 2 or cols != expected:
                raise InputError(
                    f"{path}: expected columns label_1..label_d,pred_1..pred_d"
                )
            labels = []
            preds = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise InputError(f"{path}:{lineno}: wrong field count")
                body = row[1:] if has_ts else row
                try:
                    labels.append([int(v) for v in body[:d]])
                    preds.append([float(v) for v in body[d:]])
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: {exc}") from None
    except OSError as exc:
        raise InputError(str(exc)) from None
    if not labels:
        raise InputError(f"{path}: empty series")
    try:
        return MultilabelSeries(np.array(labels), np.array(preds), chronological=True)
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_multilabel_csv(path: str | Path, ml: MultilabelSeries) -> None:
    d = ml.num_classes
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["timestamp"]
            + [f"label_{j + 1}" for j in range(d)]
            + [f"pred_{j + 1}" for j in range(d)]
        )
        for i in range(ml.n):
            writer.writerow(
                [i]
                + [int(v) for v in ml.labels[i]]
                + [repr(float(v)) for v in ml.predictions[i]]
            )
