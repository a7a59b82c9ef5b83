"""Closed-form expected confusion entries under the threshold prior.

Averaging the hard matrix over the threshold replaces every indicator
with the prior cdf F.  For the unit, cost, and cross-entropy weights the
error entries stay per-sample sums; for the value weights the
false-negative entry couples each positive sample to the window of past
predictions.  The dot-product form needs only pairwise cdf differences,
while the max form needs the power-interval decomposition of the window:
the ranges of thresholds on which each past prediction is the nearest
alarm, linked into a chain of strictly increasing precursors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedCombinationError, ValidationError
from .series import LabeledSeries
from .threshold import ThresholdDistribution
from .weights import (
    CostWeight,
    CrossEntropyWeight,
    UnitWeight,
    ValueMaxWeight,
    ValueProdWeight,
    WeightSpec,
    future_labels,
)


@dataclass(frozen=True)
class ExpectedConfusion:
    e_tn: float
    e_wfp: float
    e_wfn: float
    e_tp: float

    def __post_init__(self):
        for name in ("e_tn", "e_wfp", "e_wfn", "e_tp"):
            v = getattr(self, name)
            if v < -1e-9:
                raise ValidationError(f"expected entry {name} is negative: {v}")
            if v < 0.0:
                object.__setattr__(self, name, 0.0)

    def entries(self) -> tuple[float, float, float, float]:
        """(tn, wfp, wfn, tp) order, matching the score functions."""
        return (self.e_tn, self.e_wfp, self.e_wfn, self.e_tp)

    def to_dict(self) -> dict:
        return {
            "e_tn": self.e_tn,
            "e_wfp": self.e_wfp,
            "e_wfn": self.e_wfn,
            "e_tp": self.e_tp,
        }


@dataclass(frozen=True)
class PowerInterval:
    """Threshold range on which the prediction at `lag` is the nearest alarm.

    `precursor` is the lag whose prediction forms the lower endpoint; 0
    stands for the lower support bound (the first interval has no
    predecessor).
    """

    lag: int
    lower: float
    upper: float
    precursor: int


@dataclass(frozen=True)
class PowerIntervalDecomposition:
    intervals: tuple[PowerInterval, ...]
    chain: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.chain)


def _chain_decomposition(
    past: np.ndarray, a: float
) -> tuple[PowerIntervalDecomposition, bool]:
    # Non-empty intervals belong exactly to the strict running maxima of the
    # window; ties keep the earlier lag (later equal predictions never hold
    # the maximum on a set of positive measure).  A prediction exactly equal
    # to the running maximum sits on a chain-membership boundary, which the
    # gradient path flags as a kink; the second return reports it.
    intervals = []
    chain: list[int] = []
    run_max = a
    tied = False
    for lag, p in enumerate(past, start=1):
        if p > run_max:
            intervals.append(
                PowerInterval(
                    lag=lag,
                    lower=run_max,
                    upper=float(p),
                    precursor=chain[-1] if chain else 0,
                )
            )
            chain.append(lag)
            run_max = float(p)
        elif p == run_max:
            tied = True
    return PowerIntervalDecomposition(tuple(intervals), tuple(chain)), tied


def power_intervals(
    past, a: float = 0.0, b: float = 1.0
) -> PowerIntervalDecomposition:
    """Decompose a window of past predictions (nearest lag first).

    Every past prediction must lie inside the open support (a, b); the
    closed forms below reject windows that violate this rather than guess
    how clamped predictions should enter the chain.
    """
    past = np.asarray(past, dtype=np.float64)
    if past.ndim != 1 or past.size == 0:
        raise ValidationError("past window must be a non-empty 1-d sequence")
    if np.any((past <= a) | (past >= b)):
        raise ValidationError(
            "past prediction outside the open support "
            f"({a}, {b}); the threshold prior must give every window "
            "prediction positive density"
        )
    return _chain_decomposition(past, a)[0]


def _require_support(series: LabeledSeries, dist: ThresholdDistribution) -> None:
    a, b = dist.support
    if a > 0.0 or b < 1.0:
        p = series.predictions
        if np.any((p <= a) | (p >= b)):
            raise ValidationError(
                "value weights need every prediction inside the open support "
                f"({a}, {b}) of the threshold prior"
            )


def _require_chronological(series: LabeledSeries) -> None:
    if not series.chronological:
        raise ValidationError("value weights require a chronological series")


def expected_tp_tn(
    series: LabeledSeries, dist: ThresholdDistribution
) -> tuple[float, float]:
    """(E[TP], E[TN]): correct entries are untouched by any weight variant."""
    cdf = dist.cdf(series.predictions)
    y = series.labels
    e_tp = float(np.sum(y * cdf))
    e_tn = float(np.sum((1 - y) * (1.0 - cdf)))
    return e_tp, e_tn


def _future_reward_factors(series: LabeledSeries, spec) -> np.ndarray:
    # 1 - g(future-label window) per sample; constant in the threshold.
    n = series.n
    out = np.empty(n)
    for i in range(n):
        out[i] = 1.0 - spec.g(future_labels(series, i, spec.window))
    return out


def expected_wfp(
    series: LabeledSeries, dist: ThresholdDistribution, spec: WeightSpec
) -> float:
    """Expected weighted false-positive entry."""
    y = series.labels
    neg = y == 0
    if isinstance(spec, UnitWeight):
        return float(np.sum(dist.cdf(series.predictions)[neg]))
    if isinstance(spec, CostWeight):
        return spec.c01 * float(np.sum(dist.cdf(series.predictions)[neg]))
    if isinstance(spec, CrossEntropyWeight):
        _require_uniform01(dist)
        return float(-spec.omega0 * np.sum(np.log1p(-series.predictions[neg])))
    if isinstance(spec, (ValueProdWeight, ValueMaxWeight)):
        _require_chronological(series)
        _require_support(series, dist)
        factors = _future_reward_factors(series, spec)
        return float(np.sum(factors[neg] * dist.cdf(series.predictions)[neg]))
    raise ValidationError(f"unknown weight spec {spec!r}")


def expected_wfn(
    series: LabeledSeries, dist: ThresholdDistribution, spec: WeightSpec
) -> float:
    """Expected weighted false-negative entry."""
    y = series.labels
    pos = y == 1
    cdf = dist.cdf(series.predictions)
    if isinstance(spec, UnitWeight):
        return float(np.sum(1.0 - cdf[pos]))
    if isinstance(spec, CostWeight):
        return spec.c10 * float(np.sum(1.0 - cdf[pos]))
    if isinstance(spec, CrossEntropyWeight):
        _require_uniform01(dist)
        return float(-spec.omega1 * np.sum(np.log(series.predictions[pos])))
    if isinstance(spec, ValueProdWeight):
        _require_chronological(series)
        _require_support(series, dist)
        total = 0.0
        omega = np.asarray(spec.omega)
        for i in np.flatnonzero(pos):
            reduction = 0.0
            for j in range(1, min(spec.window, i) + 1):
                reduction += omega[j - 1] * max(cdf[i - j] - cdf[i], 0.0)
            total += 1.0 - cdf[i] - reduction
        return float(total)
    if isinstance(spec, ValueMaxWeight):
        _require_chronological(series)
        _require_support(series, dist)
        a = dist.support[0]
        total = 0.0
        for i in np.flatnonzero(pos):
            total += 1.0 - cdf[i] - _max_window_reduction(series, dist, spec, int(i), a)
        return float(total)
    raise ValidationError(f"unknown weight spec {spec!r}")


def _max_window_reduction(
    series: LabeledSeries,
    dist: ThresholdDistribution,
    spec: ValueMaxWeight,
    i: int,
    a: float,
) -> float:
    # Chain form of the expected reduction: telescoping the per-interval
    # integrals leaves one term per chain element, weighted by the drop
    # between consecutive omega entries (0 after the last element).
    depth = min(spec.window, i)
    if depth == 0:
        return 0.0
    past = series.predictions[i - depth : i][::-1]
    dec, _ = _chain_decomposition(past, a)
    cdf_i = float(dist.cdf(series.predictions[i]))
    reduction = 0.0
    for pos_in_chain, lag in enumerate(dec.chain):
        omega_here = spec.omega[lag - 1]
        if pos_in_chain + 1 < dec.length:
            omega_next = spec.omega[dec.chain[pos_in_chain + 1] - 1]
        else:
            omega_next = 0.0
        excess = max(float(dist.cdf(past[lag - 1])) - cdf_i, 0.0)
        reduction += (omega_here - omega_next) * excess
    return reduction


def _require_uniform01(dist: ThresholdDistribution) -> None:
    if dist.kind != "uniform" or dist.support != (0.0, 1.0):
        raise UnsupportedCombinationError(
            "cross-entropy weights have a closed-form expectation only under "
            "the uniform prior on [0, 1]"
        )


def expected_confusion(
    series: LabeledSeries, dist: ThresholdDistribution, spec: WeightSpec
) -> ExpectedConfusion:
    """Assemble all four expected entries."""
    e_tp, e_tn = expected_tp_tn(series, dist)
    return ExpectedConfusion(
        e_tn=e_tn,
        e_wfp=expected_wfp(series, dist, spec),
        e_wfn=expected_wfn(series, dist, spec),
        e_tp=e_tp,
    )
