"""Score-oriented losses: negated scores of expected weighted matrices.

The loss of a batch is -s(expected weighted confusion matrix).  Because
the expectation replaces indicators with the prior cdf, the loss is
differentiable in the predictions; the gradient here is assembled by the
chain rule through the score partials and the closed-form entry
derivatives.  Composing with a model's own Jacobian is the trainer's job.

At value-weight kinks (a window prediction exactly equal to the current
one, or a tie inside the window's chain) a one-sided derivative is
returned and the result is flagged non-smooth rather than silently
picking a subgradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedCombinationError, ValidationError
from .expected import (
    ExpectedConfusion,
    _chain_decomposition,
    _future_reward_factors,
    _require_support,
    expected_confusion,
)
from .oracle import exact_expected_score, mc_expected_score
from .scores import ScoreKind, apply_score, score_partials
from .series import LabeledSeries
from .threshold import ThresholdDistribution
from .weights import (
    CostWeight,
    CrossEntropyWeight,
    UnitWeight,
    ValueMaxWeight,
    ValueProdWeight,
    WeightSpec,
)


@dataclass(frozen=True)
class LossSpec:
    score: ScoreKind
    weights: WeightSpec
    dist: ThresholdDistribution

    def __post_init__(self):
        if isinstance(self.weights, CrossEntropyWeight) and (
            self.dist.kind != "uniform" or self.dist.support != (0.0, 1.0)
        ):
            raise UnsupportedCombinationError(
                "cross-entropy weights pair only with the uniform prior on [0, 1]"
            )


@dataclass(frozen=True)
class CombinedLossSpec:
    """Convex combination of losses; coefficients must sum to one."""

    components: tuple[tuple[LossSpec, float], ...]

    def __post_init__(self):
        if not self.components:
            raise ValidationError("combined loss needs at least one component")
        betas = [beta for _, beta in self.components]
        if any(beta < 0 for beta in betas):
            raise ValidationError("combination coefficients must be non-negative")
        if abs(sum(betas) - 1.0) > 1e-12:
            raise ValidationError("combination coefficients must sum to 1")


@dataclass(frozen=True)
class GradientVector:
    values: np.ndarray
    nonsmooth: bool = False
    kink_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class LossResult:
    value: float
    degenerate: bool
    expected: ExpectedConfusion = field(repr=False)


def loss_eval(series: LabeledSeries, spec: LossSpec) -> LossResult:
    exp = expected_confusion(series, spec.dist, spec.weights)
    score = apply_score(spec.score, *exp.entries())
    return LossResult(value=-score.value, degenerate=score.degenerate, expected=exp)


def loss_value(series: LabeledSeries, spec: LossSpec) -> float:
    return loss_eval(series, spec).value


def _entry_gradients(series: LabeledSeries, dist: ThresholdDistribution, wspec):
    """Per-prediction derivatives of the four expected entries.

    Returns (d_tn, d_wfp, d_wfn, d_tp, kink_indices); the value variants
    contribute cross terms, since a prediction enters the windows of up to
    `window` later positives.
    """
    p = series.predictions
    y = series.labels
    dens = np.asarray(dist.pdf(p), dtype=np.float64)
    neg = (y == 0).astype(np.float64)
    pos = y.astype(np.float64)
    d_tp = pos * dens
    d_tn = -neg * dens
    kinks: set[int] = set()

    if isinstance(wspec, UnitWeight):
        return d_tn, neg * dens, -pos * dens, d_tp, kinks
    if isinstance(wspec, CostWeight):
        return d_tn, wspec.c01 * neg * dens, -wspec.c10 * pos * dens, d_tp, kinks
    if isinstance(wspec, CrossEntropyWeight):
        d_wfp = wspec.omega0 * neg / (1.0 - p)
        d_wfn = -wspec.omega1 * pos / p
        return d_tn, d_wfp, d_wfn, d_tp, kinks
    if not isinstance(wspec, (ValueProdWeight, ValueMaxWeight)):
        raise ValidationError(f"unknown weight spec {wspec!r}")

    if not series.chronological:
        raise ValidationError("value weights require a chronological series")
    _require_support(series, dist)
    factors = _future_reward_factors(series, wspec)
    d_wfp = factors * neg * dens
    d_wfn = np.zeros(series.n)
    a = dist.support[0]
    omega = wspec.omega
    for i in np.flatnonzero(y == 1):
        depth = min(wspec.window, i)
        own_coeff = -1.0
        if isinstance(wspec, ValueProdWeight):
            for j in range(1, depth + 1):
                k = i - j
                if p[k] > p[i]:
                    own_coeff += omega[j - 1]
                    d_wfn[k] -= omega[j - 1] * dens[k]
                elif p[k] == p[i]:
                    kinks.update((int(i), int(k)))
        else:
            if depth > 0:
                past = p[i - depth : i][::-1]
                dec, tied = _chain_decomposition(past, a)
                if tied:
                    kinks.add(int(i))
                for m, lag in enumerate(dec.chain):
                    diff = omega[lag - 1] - (
                        omega[dec.chain[m + 1] - 1] if m + 1 < dec.length else 0.0
                    )
                    k = i - lag
                    if p[k] > p[i]:
                        own_coeff += diff
                        d_wfn[k] -= diff * dens[k]
                    elif p[k] == p[i]:
                        kinks.update((int(i), int(k)))
        d_wfn[i] += own_coeff * dens[i]
    return d_tn, d_wfp, d_wfn, d_tp, kinks


def loss_gradient(series: LabeledSeries, spec: LossSpec) -> GradientVector:
    """Analytic gradient of the loss with respect to each prediction."""
    exp = expected_confusion(series, spec.dist, spec.weights)
    s_tn, s_wfp, s_wfn, s_tp = score_partials(spec.score, *exp.entries())
    d_tn, d_wfp, d_wfn, d_tp, kinks = _entry_gradients(series, spec.dist, spec.weights)
    values = -(s_tn * d_tn + s_wfp * d_wfp + s_wfn * d_wfn + s_tp * d_tp)
    return GradientVector(
        values=values,
        nonsmooth=bool(kinks),
        kink_indices=tuple(sorted(kinks)),
    )


def combined_loss(
    series: LabeledSeries, spec: CombinedLossSpec
) -> tuple[float, GradientVector]:
    """Value and gradient of a convex combination of losses."""
    total = 0.0
    grad = np.zeros(series.n)
    kinks: set[int] = set()
    nonsmooth = False
    for component, beta in spec.components:
        total += beta * loss_value(series, component)
        g = loss_gradient(series, component)
        grad += beta * g.values
        nonsmooth = nonsmooth or g.nonsmooth
        kinks.update(g.kink_indices)
    return total, GradientVector(
        values=grad, nonsmooth=nonsmooth, kink_indices=tuple(sorted(kinks))
    )


@dataclass(frozen=True)
class ScoreGap:
    """Both sides of the loss/score alignment and their difference.

    ``score_of_expected`` is s(E[wCM]) (the negated loss);
    ``expected_score`` is E[s(wCM)] from an oracle.  For linear scores
    the gap vanishes; for nonlinear scores it quantifies the remainder
    the loss construction accepts.
    """

    score_of_expected: float
    expected_score: float
    gap: float
    stderr: float = 0.0


def expected_score_gap(
    series: LabeledSeries,
    spec: LossSpec,
    mc_samples: int | None = None,
    seed: int = 0,
) -> ScoreGap:
    """Compare s(E[wCM]) with E[s(wCM)].

    With ``mc_samples`` unset the right-hand side comes from the exact
    piecewise oracle (stderr 0); otherwise from Monte Carlo with its
    standard error.
    """
    lhs = apply_score(
        spec.score, *expected_confusion(series, spec.dist, spec.weights).entries()
    ).value
    if mc_samples is None:
        rhs = exact_expected_score(series, spec.dist, spec.weights, spec.score)
        se = 0.0
    else:
        est = mc_expected_score(
            series, spec.dist, spec.weights, spec.score, mc_samples, seed
        )
        rhs = est.mean
        se = est.stderr
    return ScoreGap(
        score_of_expected=lhs, expected_score=rhs, gap=rhs - lhs, stderr=se
    )
