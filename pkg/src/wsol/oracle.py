"""Ground-truth engines for validating the closed forms.

Two independent routes to the same expectations:

* exact piecewise integration -- every integrand is piecewise constant in
  the threshold, with breakpoints only at prediction values, so
  evaluating the hard weighted matrix at each subinterval midpoint and
  accumulating weight * (F(upper) - F(lower)) is exact up to cdf accuracy;
* Monte Carlo -- averaging the hard weighted matrix over i.i.d. threshold
  draws, with unbiased standard errors for the acceptance bands (4
  standard errors keeps the false-failure rate of a whole suite of such
  checks around 1e-4).

Neither route touches the closed-form algebra, which is the point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .confusion import weighted_hard_confusion
from .errors import ValidationError
from .expected import ExpectedConfusion
from .scores import ScoreKind, apply_score, score_array
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

_CHUNK = 1 << 15


def _breakpoints(series: LabeledSeries, dist: ThresholdDistribution) -> np.ndarray:
    a, b = dist.support
    p = series.predictions
    inner = np.unique(p[(p > a) & (p < b)])
    return np.concatenate([[a], inner, [b]])


def exact_expected_confusion(
    series: LabeledSeries, dist: ThresholdDistribution, spec: WeightSpec
) -> ExpectedConfusion:
    """Integrate the hard weighted matrix over the threshold prior exactly.

    Between consecutive prediction values every indicator in the matrix
    (the per-sample alarm and every window alarm) is constant, so the
    integrand is constant on each open subinterval and the midpoint value
    is its exact value there.  Duplicated prediction values collapse into
    a single breakpoint and cannot change the sum.
    """
    bps = _breakpoints(series, dist)
    acc = np.zeros(4)
    cdf_at = dist.cdf(bps)
    for k in range(len(bps) - 1):
        mass = cdf_at[k + 1] - cdf_at[k]
        if mass <= 0.0:
            continue
        mid = 0.5 * (bps[k] + bps[k + 1])
        wc = weighted_hard_confusion(series, mid, spec)
        acc += mass * np.array([wc.tn, wc.wfp, wc.wfn, wc.tp])
    return ExpectedConfusion(e_tn=acc[0], e_wfp=acc[1], e_wfn=acc[2], e_tp=acc[3])


def exact_expected_score(
    series: LabeledSeries,
    dist: ThresholdDistribution,
    spec: WeightSpec,
    kind: ScoreKind,
) -> float:
    """E[s(wCM)] by the same piecewise integration; degenerate slabs score 0."""
    bps = _breakpoints(series, dist)
    cdf_at = dist.cdf(bps)
    total = 0.0
    for k in range(len(bps) - 1):
        mass = cdf_at[k + 1] - cdf_at[k]
        if mass <= 0.0:
            continue
        mid = 0.5 * (bps[k] + bps[k + 1])
        wc = weighted_hard_confusion(series, mid, spec)
        total += mass * apply_score(kind, wc.tn, wc.wfp, wc.wfn, wc.tp).value
    return total


def _fp_sample_weights(series: LabeledSeries, spec: WeightSpec) -> np.ndarray:
    # Per-sample false-positive weights; threshold-free for every variant.
    p = series.predictions
    if isinstance(spec, UnitWeight):
        return np.ones(series.n)
    if isinstance(spec, CostWeight):
        return np.full(series.n, spec.c01)
    if isinstance(spec, CrossEntropyWeight):
        return -spec.omega0 * np.log1p(-p) / p
    out = np.empty(series.n)
    for i in range(series.n):
        out[i] = 1.0 - spec.g(future_labels(series, i, spec.window))
    return out


def batch_weighted_entries(
    series: LabeledSeries, taus: np.ndarray, spec: WeightSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(tn, wfp, wfn, tp) of the hard weighted matrix, vectorized over taus.

    Column b equals weighted_hard_confusion(series, taus[b], spec); the
    test suite pins that equivalence down, and the Monte Carlo oracle
    relies on it for throughput.
    """
    if spec.requires_chronological() and not series.chronological:
        raise ValidationError("value weights require a chronological series")
    p = series.predictions
    y = series.labels
    n = series.n
    taus = np.asarray(taus, dtype=np.float64)
    alarm = p[:, None] > taus[None, :]
    pos = y == 1
    tp = alarm[pos].sum(axis=0).astype(np.float64)
    tn = (~alarm)[~pos].sum(axis=0).astype(np.float64)
    fp_w = _fp_sample_weights(series, spec)
    wfp = (fp_w[~pos, None] * alarm[~pos]).sum(axis=0)
    if isinstance(spec, (ValueProdWeight, ValueMaxWeight)):
        window = spec.window
        padded = np.zeros((n + window, taus.size), dtype=bool)
        padded[window:] = alarm
        if isinstance(spec, ValueProdWeight):
            g_past = np.zeros((n, taus.size))
            for j in range(1, window + 1):
                g_past += spec.omega[j - 1] * padded[window - j : window - j + n]
        else:
            g_past = np.zeros((n, taus.size))
            for j in range(1, window + 1):
                np.maximum(
                    g_past,
                    spec.omega[j - 1] * padded[window - j : window - j + n],
                    out=g_past,
                )
        fn_w = 1.0 - g_past
    elif isinstance(spec, UnitWeight):
        fn_w = np.ones((n, 1))
    elif isinstance(spec, CostWeight):
        fn_w = np.full((n, 1), spec.c10)
    elif isinstance(spec, CrossEntropyWeight):
        fn_w = (-spec.omega1 * np.log(p) / (1.0 - p))[:, None]
    else:
        raise ValidationError(f"unknown weight spec {spec!r}")
    wfn = (fn_w[pos] * (~alarm[pos])).sum(axis=0)
    return tn, wfp, wfn, tp


@dataclass(frozen=True)
class ScoreEstimate:
    mean: float
    stderr: float
    draws: int
    degenerate_draws: int = 0


def mc_expected_confusion(
    series: LabeledSeries,
    dist: ThresholdDistribution,
    spec: WeightSpec,
    samples: int,
    seed: int,
) -> tuple[ExpectedConfusion, ExpectedConfusion]:
    """Monte Carlo estimate of the expected matrix with per-entry standard errors."""
    if samples < 1000:
        raise ValidationError("Monte Carlo oracle needs at least 1000 samples")
    rng = np.random.default_rng(seed)
    sums = np.zeros(4)
    sq_sums = np.zeros(4)
    done = 0
    while done < samples:
        b = min(_CHUNK, samples - done)
        taus = np.asarray(dist.sample(rng, b))
        entries = np.stack(batch_weighted_entries(series, taus, spec))
        sums += entries.sum(axis=1)
        sq_sums += (entries**2).sum(axis=1)
        done += b
    mean = sums / samples
    var = np.maximum(sq_sums / samples - mean**2, 0.0) * samples / (samples - 1)
    se = np.sqrt(var / samples)
    return (
        ExpectedConfusion(e_tn=mean[0], e_wfp=mean[1], e_wfn=mean[2], e_tp=mean[3]),
        ExpectedConfusion(e_tn=se[0], e_wfp=se[1], e_wfn=se[2], e_tp=se[3]),
    )


def mc_expected_score(
    series: LabeledSeries,
    dist: ThresholdDistribution,
    spec: WeightSpec,
    kind: ScoreKind,
    samples: int,
    seed: int,
) -> ScoreEstimate:
    """Monte Carlo estimate of E[s(wCM)]; degenerate draws score 0 and are counted."""
    if samples < 1000:
        raise ValidationError("Monte Carlo oracle needs at least 1000 samples")
    rng = np.random.default_rng(seed)
    total = 0.0
    sq_total = 0.0
    degenerate = 0
    done = 0
    while done < samples:
        b = min(_CHUNK, samples - done)
        taus = np.asarray(dist.sample(rng, b))
        tn, wfp, wfn, tp = batch_weighted_entries(series, taus, spec)
        vals, bad = score_array(kind, tn, wfp, wfn, tp)
        total += vals.sum()
        sq_total += (vals**2).sum()
        degenerate += int(bad.sum())
        done += b
    mean = total / samples
    var = max(sq_total / samples - mean**2, 0.0) * samples / (samples - 1)
    return ScoreEstimate(
        mean=mean,
        stderr=float(np.sqrt(var / samples)),
        draws=samples,
        degenerate_draws=degenerate,
    )


@dataclass(frozen=True)
class FiniteDiffGradient:
    """Central-difference loss gradient; flagged entries hit the (0,1) clamp."""

    values: np.ndarray
    clamped_indices: tuple[int, ...] = ()


def finite_diff_gradient(series: LabeledSeries, spec, step: float = 1e-6):
    """Central differences of the loss value with respect to each prediction.

    Entries whose two-sided stencil would leave (0, 1) are evaluated with
    the stencil shifted inward and flagged.
    """
    from .loss import loss_value  # deferred: loss builds on this module

    if not (1e-8 <= step <= 1e-3):
        raise ValidationError("finite-difference step must lie in [1e-8, 1e-3]")
    p0 = series.predictions
    values = np.empty(series.n)
    clamped = []
    for i in range(series.n):
        lo = p0[i] - step
        hi = p0[i] + step
        if lo <= 0.0 or hi >= 1.0:
            clamped.append(i)
            lo = max(lo, p0[i] / 2)
            hi = min(hi, (1.0 + p0[i]) / 2)
        p_hi = p0.copy()
        p_hi[i] = hi
        p_lo = p0.copy()
        p_lo[i] = lo
        values[i] = (
            loss_value(series.with_predictions(p_hi), spec)
            - loss_value(series.with_predictions(p_lo), spec)
        ) / (hi - lo)
    return FiniteDiffGradient(values=values, clamped_indices=tuple(clamped))
