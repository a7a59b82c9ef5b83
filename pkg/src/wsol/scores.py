"""Classification metrics on (weighted or expected) confusion entries.

Every score is non-decreasing in the tn/tp entries and non-increasing in
the error entries on the positive orthant, which is what lets a loss built
from one steer training in the right direction.  Entries are real-valued
because they may be weighted sums or threshold averages, not just counts.

Zero denominators evaluate to 0 (the skill-less convention) with a flag in
the result, so threshold sweeps never poison downstream aggregates;
partial derivatives at such points raise instead, naming the denominator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, ValidationError


class ScoreKind(str, enum.Enum):
    ACCURACY = "accuracy"
    F1 = "f1"
    TSS = "tss"
    HSS = "hss"
    NEG_ERROR_SUM = "neg_error_sum"

    @classmethod
    def parse(cls, name: str) -> "ScoreKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValidationError(f"unknown score {name!r}; expected one of {valid}")


@dataclass(frozen=True)
class ScoreValue:
    value: float
    degenerate: bool = False


def _entries(tn, wfp, wfn, tp):
    vals = (float(tn), float(wfp), float(wfn), float(tp))
    if min(vals) < 0:
        raise ValidationError("confusion entries must be non-negative")
    return vals


def apply_score(kind: ScoreKind, tn, wfp, wfn, tp) -> ScoreValue:
    """Evaluate a score on real-valued confusion entries."""
    tn, wfp, wfn, tp = _entries(tn, wfp, wfn, tp)
    if kind is ScoreKind.NEG_ERROR_SUM:
        return ScoreValue(-(wfp + wfn))
    if kind is ScoreKind.ACCURACY:
        denom = tp + tn + wfp + wfn
        if denom == 0:
            return ScoreValue(0.0, degenerate=True)
        return ScoreValue((tp + tn) / denom)
    if kind is ScoreKind.F1:
        denom = 2 * tp + wfp + wfn
        if denom == 0:
            return ScoreValue(0.0, degenerate=True)
        return ScoreValue(2 * tp / denom)
    if kind is ScoreKind.TSS:
        pos = tp + wfn
        neg = tn + wfp
        if pos == 0 or neg == 0:
            return ScoreValue(0.0, degenerate=True)
        return ScoreValue(tp / pos + tn / neg - 1.0)
    if kind is ScoreKind.HSS:
        denom = (tp + wfn) * (wfn + tn) + (tp + wfp) * (wfp + tn)
        if denom == 0:
            return ScoreValue(0.0, degenerate=True)
        return ScoreValue(2.0 * (tp * tn - wfp * wfn) / denom)
    raise ValidationError(f"unknown score kind {kind!r}")


def score_partials(kind: ScoreKind, tn, wfp, wfn, tp) -> np.ndarray:
    """Partial derivatives (d/dtn, d/dwfp, d/dwfn, d/dtp) of apply_score."""
    tn, wfp, wfn, tp = _entries(tn, wfp, wfn, tp)
    if kind is ScoreKind.NEG_ERROR_SUM:
        return np.array([0.0, -1.0, -1.0, 0.0])
    if kind is ScoreKind.ACCURACY:
        denom = tp + tn + wfp + wfn
        if denom == 0:
            raise DegenerateDenominatorError("tp + tn + wfp + wfn == 0")
        num = tp + tn
        err = wfp + wfn
        return np.array([err, -num, -num, err]) / denom**2
    if kind is ScoreKind.F1:
        denom = 2 * tp + wfp + wfn
        if denom == 0:
            raise DegenerateDenominatorError("2*tp + wfp + wfn == 0")
        return np.array([0.0, -2 * tp, -2 * tp, 2 * (wfp + wfn)]) / denom**2
    if kind is ScoreKind.TSS:
        pos = tp + wfn
        neg = tn + wfp
        if pos == 0:
            raise DegenerateDenominatorError("tp + wfn == 0")
        if neg == 0:
            raise DegenerateDenominatorError("tn + wfp == 0")
        return np.array(
            [wfp / neg**2, -tn / neg**2, -tp / pos**2, wfn / pos**2]
        )
    if kind is ScoreKind.HSS:
        num = 2.0 * (tp * tn - wfp * wfn)
        denom = (tp + wfn) * (wfn + tn) + (tp + wfp) * (wfp + tn)
        if denom == 0:
            raise DegenerateDenominatorError(
                "(tp + wfn)*(wfn + tn) + (tp + wfp)*(wfp + tn) == 0"
            )
        dnum = np.array([2 * tp, -2 * wfn, -2 * wfp, 2 * tn])
        ddenom = np.array(
            [
                (tp + wfn) + (tp + wfp),
                (wfp + tn) + (tp + wfp),
                (wfn + tn) + (tp + wfn),
                (wfn + tn) + (wfp + tn),
            ]
        )
        return (dnum * denom - num * ddenom) / denom**2
    raise ValidationError(f"unknown score kind {kind!r}")


def score_array(kind: ScoreKind, tn, wfp, wfn, tp):
    """Vectorized apply_score; degenerate entries become 0.

    Returns (values, degenerate_mask).  Used by the Monte Carlo oracle,
    where per-draw scalar dispatch would dominate the runtime.
    """
    tn, wfp, wfn, tp = (np.asarray(v, dtype=np.float64) for v in (tn, wfp, wfn, tp))
    if kind is ScoreKind.NEG_ERROR_SUM:
        return -(wfp + wfn), np.zeros(np.broadcast(tn, wfp).shape, dtype=bool)
    if kind is ScoreKind.ACCURACY:
        denom = tp + tn + wfp + wfn
        bad = denom == 0
        return np.where(bad, 0.0, (tp + tn) / np.where(bad, 1.0, denom)), bad
    if kind is ScoreKind.F1:
        denom = 2 * tp + wfp + wfn
        bad = denom == 0
        return np.where(bad, 0.0, 2 * tp / np.where(bad, 1.0, denom)), bad
    if kind is ScoreKind.TSS:
        pos = tp + wfn
        neg = tn + wfp
        bad = (pos == 0) | (neg == 0)
        val = tp / np.where(pos == 0, 1.0, pos) + tn / np.where(neg == 0, 1.0, neg) - 1.0
        return np.where(bad, 0.0, val), bad
    if kind is ScoreKind.HSS:
        denom = (tp + wfn) * (wfn + tn) + (tp + wfp) * (wfp + tn)
        bad = denom == 0
        val = 2.0 * (tp * tn - wfp * wfn) / np.where(bad, 1.0, denom)
        return np.where(bad, 0.0, val), bad
    raise ValidationError(f"unknown score kind {kind!r}")
