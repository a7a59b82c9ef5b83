"""Weight functions applied to the false-positive and false-negative sums.

Five variants: unit (classical matrix), cost (fixed per-error-type cost),
cross-entropy (prediction-dependent), and two value variants that reward
errors adjacent in time to events or alarms through a window of length T.
Each variant reads only the arguments it needs, but ``eval_weight`` exposes
the full argument list so dispatch stays total across variants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .series import LabeledSeries


class WeightSpec:
    """Base for the weight-function variants."""

    name = "abstract"

    def requires_chronological(self) -> bool:
        return False


@dataclass(frozen=True)
class UnitWeight(WeightSpec):
    name = "unit"


@dataclass(frozen=True)
class CostWeight(WeightSpec):
    """Cost c01 on false positives, c10 on false negatives."""

    c01: float
    c10: float
    name = "cost"

    def __post_init__(self):
        if self.c01 < 0 or self.c10 < 0:
            raise ValidationError("costs must be non-negative")


@dataclass(frozen=True)
class CrossEntropyWeight(WeightSpec):
    """Prediction-dependent weight whose threshold average yields weighted CE."""

    omega0: float
    omega1: float
    name = "cross_entropy"

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega1 <= 0:
            raise ValidationError("cross-entropy weight parameters must be positive")


def _check_omega(omega: tuple[float, ...]) -> tuple[float, ...]:
    omega = tuple(float(w) for w in omega)
    if len(omega) < 1:
        raise ValidationError("omega must have at least one entry")
    if any(w < 0 for w in omega):
        raise ValidationError("omega entries must be non-negative")
    if any(omega[i] < omega[i + 1] for i in range(len(omega) - 1)):
        raise ValidationError("omega must be non-increasing")
    return omega


@dataclass(frozen=True)
class ValueProdWeight(WeightSpec):
    """Value weight 1 - omega . z over the temporal window (dot-product form)."""

    omega: tuple[float, ...]
    name = "value_prod"

    def __post_init__(self):
        omega = _check_omega(self.omega)
        if sum(omega) >= 1.0:
            raise ValidationError("value_prod needs sum(omega) < 1")
        object.__setattr__(self, "omega", omega)

    @property
    def window(self) -> int:
        return len(self.omega)

    def requires_chronological(self) -> bool:
        return True

    def g(self, z: np.ndarray) -> float:
        return float(np.dot(self.omega, z))


@dataclass(frozen=True)
class ValueMaxWeight(WeightSpec):
    """Value weight 1 - max(omega * z): only the nearest hit in the window counts."""

    omega: tuple[float, ...]
    name = "value_max"

    def __post_init__(self):
        omega = _check_omega(self.omega)
        if max(omega) >= 1.0:
            raise ValidationError("value_max needs max(omega) < 1")
        object.__setattr__(self, "omega", omega)

    @property
    def window(self) -> int:
        return len(self.omega)

    def requires_chronological(self) -> bool:
        return True

    def g(self, z: np.ndarray) -> float:
        return float(np.max(np.asarray(self.omega) * z)) if len(self.omega) else 0.0


def future_labels(series: LabeledSeries, i: int, window: int) -> np.ndarray:
    """Labels at i+1 .. i+window; indices past the end contribute 0."""
    out = np.zeros(window, dtype=np.float64)
    hi = min(window, series.n - 1 - i)
    if hi > 0:
        out[:hi] = series.labels[i + 1 : i + 1 + hi]
    return out


def past_alarm_indicators(
    series: LabeledSeries, i: int, window: int, tau: float
) -> np.ndarray:
    """Alarm indicators 1{pred > tau} at i-1 .. i-window; pre-record lags are 0."""
    out = np.zeros(window, dtype=np.float64)
    lo = min(window, i)
    if lo > 0:
        past = series.predictions[i - lo : i][::-1]
        out[:lo] = (past > tau).astype(np.float64)
    return out


def eval_weight(spec: WeightSpec, tau: float, i: int, series: LabeledSeries) -> float:
    """Weight of sample i (0-based) at a fixed threshold.

    Value variants require a chronological series; window positions falling
    outside the record contribute nothing (no alarm before the record
    starts, no event after it ends).
    """
    if spec.requires_chronological() and not series.chronological:
        raise ValidationError("value weights require a chronological series")
    y = int(series.labels[i])
    if isinstance(spec, UnitWeight):
        return 1.0
    if isinstance(spec, CostWeight):
        return (1 - y) * spec.c01 + y * spec.c10
    if isinstance(spec, CrossEntropyWeight):
        p = float(series.predictions[i])
        if y == 0:
            return -spec.omega0 * np.log1p(-p) / p
        return -spec.omega1 * np.log(p) / (1.0 - p)
    if isinstance(spec, (ValueProdWeight, ValueMaxWeight)):
        if y == 1:
            z = past_alarm_indicators(series, i, spec.window, tau)
        else:
            z = future_labels(series, i, spec.window)
        return 1.0 - spec.g(z)
    raise ValidationError(f"unknown weight spec {spec!r}")
