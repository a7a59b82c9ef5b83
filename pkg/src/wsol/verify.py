"""Self-contained check suite: closed forms against both oracles.

Each check draws its own seeded inputs, compares the closed-form
expectations with the exact piecewise oracle (absolute 1e-10) and the
Monte Carlo oracle (4 standard errors), and reports one pass/fail row.
The ``thm2``/``thm3`` checks cover the two value-weight closed forms,
including the worked window decompositions and the constant-omega
special case of the max form.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .confusion import weighted_hard_confusion
from .expected import expected_confusion, power_intervals
from .loss import LossSpec, expected_score_gap, loss_gradient, loss_value
from .oracle import exact_expected_confusion, finite_diff_gradient, mc_expected_confusion
from .scores import ScoreKind
from .series import LabeledSeries
from .threshold import ThresholdDistribution
from .weights import (
    CostWeight,
    CrossEntropyWeight,
    UnitWeight,
    ValueMaxWeight,
    ValueProdWeight,
)

EXACT_TOL = 1e-10
MC_SIGMA = 4.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "detail": self.detail,
            "seconds": round(float(self.seconds), 3),
        }


def _random_series(rng: np.random.Generator, n: int | None = None) -> LabeledSeries:
    n = n or int(rng.integers(8, 40))
    preds = rng.uniform(0.02, 0.98, size=n)
    labels = (rng.random(n) < 0.4).astype(int)
    if labels.sum() == 0:
        labels[int(rng.integers(0, n))] = 1
    if labels.sum() == n:
        labels[int(rng.integers(0, n))] = 0
    return LabeledSeries(preds, labels, chronological=True)


def _random_omega(rng: np.random.Generator, kind: str) -> tuple[float, ...]:
    t = int(rng.integers(1, 7))
    raw = np.sort(rng.uniform(0.0, 1.0, size=t))[::-1]
    if kind == "prod":
        raw = raw / (raw.sum() + rng.uniform(0.05, 1.0))
    else:
        raw = raw * rng.uniform(0.3, 0.99) / max(raw.max(), 1e-12)
    return tuple(np.sort(raw)[::-1])


def _priors() -> list[ThresholdDistribution]:
    return [
        ThresholdDistribution.uniform(),
        ThresholdDistribution.beta_prior(2.0, 2.0),
    ]


def _spec_menu(rng: np.random.Generator):
    return [
        ("unit", lambda: UnitWeight()),
        ("cost", lambda: CostWeight(c01=rng.uniform(0.1, 4), c10=rng.uniform(0.1, 4))),
        (
            "cross_entropy",
            lambda: CrossEntropyWeight(
                omega0=rng.uniform(0.2, 3), omega1=rng.uniform(0.2, 3)
            ),
        ),
        ("value_prod", lambda: ValueProdWeight(omega=_random_omega(rng, "prod"))),
        ("value_max", lambda: ValueMaxWeight(omega=_random_omega(rng, "max"))),
    ]


def _entry_diff(a, b) -> float:
    return float(np.max(np.abs(np.array(a.entries()) - np.array(b.entries()))))


def check_closed_vs_exact(seed: int, _samples: int) -> CheckResult:
    """Closed-form expected matrices match the piecewise oracle for all variants."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_at = ""
    for name, make in _spec_menu(rng):
        for dist in _priors():
            if name == "cross_entropy" and dist.kind != "uniform":
                continue
            for _ in range(6):
                series = _random_series(rng)
                spec = make()
                diff = _entry_diff(
                    expected_confusion(series, dist, spec),
                    exact_expected_confusion(series, dist, spec),
                )
                if diff > worst:
                    worst, worst_at = diff, f"{name}/{dist.kind}"
    return CheckResult(
        name="closed_vs_exact_all_variants",
        passed=worst < EXACT_TOL,
        detail=f"max |closed - exact| = {worst:.2e} ({worst_at})",
    )


def check_closed_vs_mc(seed: int, samples: int) -> CheckResult:
    """Closed forms sit within 4 standard errors of the Monte Carlo oracle."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    worst_at = ""
    for name, make in _spec_menu(rng):
        for dist in _priors():
            if name == "cross_entropy" and dist.kind != "uniform":
                continue
            series = _random_series(rng)
            spec = make()
            closed = np.array(expected_confusion(series, dist, spec).entries())
            mean, se = mc_expected_confusion(series, dist, spec, samples, seed + 7)
            pulls = np.abs(closed - np.array(mean.entries())) / np.maximum(
                np.array(se.entries()), 1e-12
            )
            pull = float(np.max(pulls))
            if pull > worst:
                worst, worst_at = pull, f"{name}/{dist.kind}"
    return CheckResult(
        name="closed_vs_mc_all_variants",
        passed=worst < MC_SIGMA,
        detail=f"max pull = {worst:.2f} sigma ({worst_at}), {samples} draws",
    )


def check_thm2_prod_window(seed: int, _samples: int) -> CheckResult:
    """Dot-product value weights: random series vs exact oracle, plus a hand case."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for dist in _priors():
        for _ in range(25):
            series = _random_series(rng)
            spec = ValueProdWeight(omega=_random_omega(rng, "prod"))
            worst = max(
                worst,
                _entry_diff(
                    expected_confusion(series, dist, spec),
                    exact_expected_confusion(series, dist, spec),
                ),
            )
    # One positive with window (0.9, 0.2) in lag order (nearest first),
    # prediction 0.5, omega (0.4, 0.2): reduction is 0.4*(0.9-0.5), so the
    # contribution is 1-0.5-0.16 = 0.34.
    series = LabeledSeries(np.array([0.3, 0.2, 0.9, 0.5]), np.array([0, 0, 0, 1]))
    spec = ValueProdWeight(omega=(0.4, 0.2))
    dist = ThresholdDistribution.uniform()
    hand = expected_confusion(series, dist, spec).e_wfn
    hand_err = abs(hand - 0.34)
    passed = worst < EXACT_TOL and hand_err < EXACT_TOL
    return CheckResult(
        name="thm2_prod_window_closed_form",
        passed=passed,
        detail=f"max diff {worst:.2e}; hand case err {hand_err:.2e}",
    )


def check_thm3_max_window(seed: int, _samples: int) -> CheckResult:
    """Max value weights: window decompositions, chains, and the closed form."""
    problems = []
    dec = power_intervals([0.5, 0.6, 0.1, 0.8], a=0.0)
    if dec.chain != (1, 2, 4):
        problems.append(f"chain {dec.chain} != (1, 2, 4)")
    got = [(iv.lag, iv.lower, iv.upper, iv.precursor) for iv in dec.intervals]
    if got != [(1, 0.0, 0.5, 0), (2, 0.5, 0.6, 1), (4, 0.6, 0.8, 2)]:
        problems.append(f"intervals {got}")
    dec2 = power_intervals([0.7, 0.2, 0.9, 0.3], a=0.0)
    if dec2.chain != (1, 3):
        problems.append(f"chain {dec2.chain} != (1, 3)")
    got2 = [(iv.lag, iv.lower, iv.upper, iv.precursor) for iv in dec2.intervals]
    if got2 != [(1, 0.0, 0.7, 0), (3, 0.7, 0.9, 1)]:
        problems.append(f"intervals {got2}")

    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for dist in _priors():
        for _ in range(25):
            series = _random_series(rng)
            spec = ValueMaxWeight(omega=_random_omega(rng, "max"))
            worst = max(
                worst,
                _entry_diff(
                    expected_confusion(series, dist, spec),
                    exact_expected_confusion(series, dist, spec),
                ),
            )
        # Constant omega: only the largest chain prediction contributes.
        for _ in range(10):
            series = _random_series(rng)
            c = float(rng.uniform(0.1, 0.95))
            t = int(rng.integers(1, 5))
            spec = ValueMaxWeight(omega=(c,) * t)
            cdf = dist.cdf(series.predictions)
            manual = 0.0
            for i in np.flatnonzero(series.labels == 1):
                depth = min(t, int(i))
                contrib = 1.0 - cdf[i]
                if depth:
                    top = float(np.max(series.predictions[i - depth : i]))
                    contrib -= c * (dist.cdf(top) - dist.cdf(min(top, series.predictions[i])))
                manual += contrib
            diff = abs(expected_confusion(series, dist, spec).e_wfn - manual)
            worst = max(worst, diff)
    passed = not problems and worst < EXACT_TOL
    detail = f"max diff {worst:.2e}" + ("; " + "; ".join(problems) if problems else "")
    return CheckResult(name="thm3_max_window_closed_form", passed=passed, detail=detail)


def check_linear_score_equality(seed: int, samples: int) -> CheckResult:
    """For the linear score, -loss equals the expected score exactly."""
    rng = np.random.default_rng(seed + 4)
    worst_exact = 0.0
    worst_pull = 0.0
    for name, make in _spec_menu(rng):
        for dist in _priors():
            if name == "cross_entropy" and dist.kind != "uniform":
                continue
            series = _random_series(rng)
            spec = LossSpec(ScoreKind.NEG_ERROR_SUM, make(), dist)
            exact = expected_score_gap(series, spec)
            worst_exact = max(worst_exact, abs(exact.gap))
            mc = expected_score_gap(series, spec, mc_samples=samples, seed=seed + 9)
            worst_pull = max(worst_pull, abs(mc.gap) / max(mc.stderr, 1e-12))
    passed = worst_exact < EXACT_TOL and worst_pull < MC_SIGMA
    return CheckResult(
        name="thm1_linear_score_equality",
        passed=passed,
        detail=f"exact gap {worst_exact:.2e}; mc pull {worst_pull:.2f} sigma",
    )


def check_weighted_ce_identity(seed: int, _samples: int) -> CheckResult:
    """The cross-entropy weight plus the linear score reproduces weighted CE."""
    rng = np.random.default_rng(seed + 5)
    dist = ThresholdDistribution.uniform()
    worst = 0.0
    for _ in range(30):
        series = _random_series(rng)
        w0, w1 = rng.uniform(0.05, 5.0, size=2)
        spec = LossSpec(
            ScoreKind.NEG_ERROR_SUM, CrossEntropyWeight(omega0=w0, omega1=w1), dist
        )
        y = series.labels
        p = series.predictions
        reference = -float(
            np.sum(w0 * (1 - y) * np.log1p(-p) + w1 * y * np.log(p))
        )
        worst = max(worst, abs(loss_value(series, spec) - reference))
    return CheckResult(
        name="weighted_cross_entropy_identity",
        passed=worst < 1e-12,
        detail=f"max |loss - weighted CE| = {worst:.2e}",
    )


def check_cost_scaling(seed: int, _samples: int) -> CheckResult:
    """Cost weights scale the unit expected errors exactly."""
    rng = np.random.default_rng(seed + 6)
    worst = 0.0
    for dist in _priors():
        for _ in range(10):
            series = _random_series(rng)
            c01, c10 = rng.uniform(0.1, 5.0, size=2)
            unit = expected_confusion(series, dist, UnitWeight())
            cost = expected_confusion(series, dist, CostWeight(c01=c01, c10=c10))
            worst = max(
                worst,
                abs(cost.e_wfp - c01 * unit.e_wfp),
                abs(cost.e_wfn - c10 * unit.e_wfn),
            )
    return CheckResult(
        name="cost_scaling_exact",
        passed=worst == 0.0,
        detail=f"max scaling residual = {worst:.2e}",
    )


def check_gradient_finite_diff(seed: int, _samples: int) -> CheckResult:
    """Analytic loss gradients match central differences away from kinks."""
    rng = np.random.default_rng(seed + 8)
    scores = list(ScoreKind)
    worst = 0.0
    worst_at = ""
    for k in range(24):
        series = _random_series(rng, n=int(rng.integers(6, 16)))
        name, make = _spec_menu(rng)[k % 5]
        dist = _priors()[k % 2]
        if name == "cross_entropy" and dist.kind != "uniform":
            dist = ThresholdDistribution.uniform()
        spec = LossSpec(scores[k % len(scores)], make(), dist)
        grad = loss_gradient(series, spec)
        fd = finite_diff_gradient(series, spec, step=1e-6)
        scale = np.maximum(np.abs(grad.values), 1.0)
        rel = np.max(np.abs(grad.values - fd.values) / scale)
        if rel > worst:
            worst, worst_at = float(rel), f"{name}/{spec.score.value}"
    return CheckResult(
        name="gradient_matches_finite_differences",
        passed=worst < 1e-5,
        detail=f"max rel err {worst:.2e} ({worst_at})",
    )


def check_value_weight_bounds(seed: int, _samples: int) -> CheckResult:
    """Value weights never increase an error entry of the hard matrix."""
    rng = np.random.default_rng(seed + 10)
    violations = 0
    for _ in range(120):
        series = _random_series(rng)
        tau = float(rng.uniform(0.1, 0.9))
        kind = "prod" if rng.random() < 0.5 else "max"
        spec = (
            ValueProdWeight(omega=_random_omega(rng, "prod"))
            if kind == "prod"
            else ValueMaxWeight(omega=_random_omega(rng, "max"))
        )
        unit = weighted_hard_confusion(series, tau, UnitWeight())
        weighted = weighted_hard_confusion(series, tau, spec)
        if weighted.wfn > unit.wfn + 1e-12 or weighted.wfp > unit.wfp + 1e-12:
            violations += 1
    return CheckResult(
        name="value_weights_reward_only",
        passed=violations == 0,
        detail=f"{violations} violations in 120 draws",
    )


_CHECKS = [
    ("closed_vs_exact_all_variants", check_closed_vs_exact),
    ("closed_vs_mc_all_variants", check_closed_vs_mc),
    ("thm2_prod_window_closed_form", check_thm2_prod_window),
    ("thm3_max_window_closed_form", check_thm3_max_window),
    ("thm1_linear_score_equality", check_linear_score_equality),
    ("weighted_cross_entropy_identity", check_weighted_ce_identity),
    ("cost_scaling_exact", check_cost_scaling),
    ("gradient_matches_finite_differences", check_gradient_finite_diff),
    ("value_weights_reward_only", check_value_weight_bounds),
]


def run_verify(
    seed: int = 2024, samples: int = 20000, only: str | None = None
) -> list[CheckResult]:
    """Run the checks whose name contains ``only`` (all of them by default)."""
    results = []
    for name, check in _CHECKS:
        if only and only not in name:
            continue
        start = time.perf_counter()
        result = check(seed, samples)
        result.seconds = time.perf_counter() - start
        results.append(result)
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results) if results else 10
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name.ljust(width)}  {r.seconds:6.2f}s  {r.detail}")
    return "\n".join(lines)
