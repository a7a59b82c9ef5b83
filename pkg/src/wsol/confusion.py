"""Hard confusion matrices at a fixed threshold.

A prediction counts as an alarm only when it exceeds the threshold
strictly; a prediction exactly at the threshold is classified negative.
This matters only on a measure-zero set once the threshold is averaged
over a continuous prior, but the hard path pins it down so the oracles
and the closed forms agree on every input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .series import LabeledSeries
from .weights import UnitWeight, WeightSpec, eval_weight


@dataclass(frozen=True)
class ConfusionCounts:
    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self):
        if min(self.tn, self.fp, self.fn, self.tp) < 0:
            raise ValidationError("confusion counts must be non-negative")

    @property
    def n(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def to_dict(self) -> dict:
        return {"tn": self.tn, "fp": self.fp, "fn": self.fn, "tp": self.tp}


@dataclass(frozen=True)
class WeightedCounts:
    """Confusion matrix with weighted error entries; tn/tp stay integer."""

    tn: int
    wfp: float
    wfn: float
    tp: int

    def to_dict(self) -> dict:
        return {"tn": self.tn, "wfp": self.wfp, "wfn": self.wfn, "tp": self.tp}


def _check_tau(tau: float) -> float:
    if not (0.0 < tau < 1.0):
        raise ValidationError(f"threshold must lie in (0, 1), got {tau}")
    return float(tau)


def hard_confusion(series: LabeledSeries, tau: float) -> ConfusionCounts:
    """Classical counts at a fixed threshold (alarm iff prediction > tau)."""
    tau = _check_tau(tau)
    alarm = series.predictions > tau
    pos = series.labels == 1
    return ConfusionCounts(
        tn=int(np.sum(~pos & ~alarm)),
        fp=int(np.sum(~pos & alarm)),
        fn=int(np.sum(pos & ~alarm)),
        tp=int(np.sum(pos & alarm)),
    )


def weighted_hard_confusion(
    series: LabeledSeries, tau: float, spec: WeightSpec
) -> WeightedCounts:
    """Counts with the weight function applied per sample to FP and FN sums."""
    tau = _check_tau(tau)
    if spec.requires_chronological() and not series.chronological:
        raise ValidationError("value weights require a chronological series")
    alarm = series.predictions > tau
    pos = series.labels == 1
    tn = int(np.sum(~pos & ~alarm))
    tp = int(np.sum(pos & alarm))
    if isinstance(spec, UnitWeight):
        return WeightedCounts(
            tn=tn,
            wfp=float(np.sum(~pos & alarm)),
            wfn=float(np.sum(pos & ~alarm)),
            tp=tp,
        )
    wfp = 0.0
    wfn = 0.0
    for i in range(series.n):
        if pos[i] and not alarm[i]:
            wfn += eval_weight(spec, tau, i, series)
        elif not pos[i] and alarm[i]:
            wfp += eval_weight(spec, tau, i, series)
    return WeightedCounts(tn=tn, wfp=wfp, wfn=wfn, tp=tp)
