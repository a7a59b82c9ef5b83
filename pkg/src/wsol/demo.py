"""Two series with identical confusion matrices but different error timing.

Both series hold the same multiset of (prediction, label) pairs, so every
threshold sees the same classical matrix -- (tn, fp, fn, tp) =
(15, 4, 2, 5) at 0.5 -- and every classical score agrees.  They differ
only in arrangement: in the adjacent-error series each missed event is
preceded by alarms and each false alarm anticipates a nearby event, while
in the isolated-error series the misses come out of the blue and the
false alarms trail after everything.  Value weights tell them apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .confusion import hard_confusion, weighted_hard_confusion
from .expected import expected_confusion
from .scores import ScoreKind, apply_score
from .series import LabeledSeries
from .threshold import ThresholdDistribution
from .weights import ValueMaxWeight, WeightSpec

DEMO_THRESHOLD = 0.5
DEFAULT_DEMO_WEIGHTS = ValueMaxWeight(omega=(0.6, 0.3, 0.1))

# fmt: off
_ADJACENT = [
    # timeline: alarms (0.70..0.88) cluster around the event bursts; both
    # misses (0.30, 0.32) sit right after alarms inside a burst.
    (0.10, 0), (0.11, 0), (0.12, 0), (0.13, 0), (0.14, 0),
    (0.70, 0), (0.72, 0), (0.80, 1), (0.82, 1), (0.30, 1),
    (0.15, 0), (0.16, 0), (0.74, 0), (0.84, 1), (0.32, 1),
    (0.86, 1), (0.17, 0), (0.18, 0), (0.19, 0), (0.76, 0),
    (0.88, 1), (0.20, 0), (0.21, 0), (0.22, 0), (0.23, 0),
    (0.24, 0),
]
_ISOLATED = [
    # same pairs rearranged: the first event is missed with no prior alarm,
    # the second miss is equally unheralded, and all false alarms come last
    # with no event anywhere near.
    (0.10, 0), (0.11, 0), (0.30, 1), (0.12, 0), (0.13, 0),
    (0.14, 0), (0.15, 0), (0.80, 1), (0.82, 1), (0.84, 1),
    (0.16, 0), (0.17, 0), (0.18, 0), (0.86, 1), (0.88, 1),
    (0.19, 0), (0.20, 0), (0.21, 0), (0.22, 0), (0.32, 1),
    (0.23, 0), (0.24, 0), (0.70, 0), (0.72, 0), (0.74, 0),
    (0.76, 0),
]
# fmt: on


def adjacent_error_series() -> LabeledSeries:
    return LabeledSeries.from_pairs(_ADJACENT)


def isolated_error_series() -> LabeledSeries:
    return LabeledSeries.from_pairs(_ISOLATED)


@dataclass(frozen=True)
class DemoComparison:
    tau: float
    confusion: dict
    classical_scores: dict
    weighted_scores_adjacent: dict
    weighted_scores_isolated: dict
    expected_weighted_adjacent: dict
    expected_weighted_isolated: dict

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "confusion": self.confusion,
            "classical_scores": self.classical_scores,
            "weighted_scores": {
                "adjacent_errors": self.weighted_scores_adjacent,
                "isolated_errors": self.weighted_scores_isolated,
            },
            "expected_weighted_scores": {
                "adjacent_errors": self.expected_weighted_adjacent,
                "isolated_errors": self.expected_weighted_isolated,
            },
        }


def compare_series(
    weights: WeightSpec = DEFAULT_DEMO_WEIGHTS,
    dist: ThresholdDistribution | None = None,
    tau: float = DEMO_THRESHOLD,
) -> DemoComparison:
    """Score both arrangements classically and with value weights."""
    dist = dist or ThresholdDistribution.uniform()
    series_a = adjacent_error_series()
    series_b = isolated_error_series()
    cm = hard_confusion(series_a, tau)
    classical = {
        kind.value: apply_score(kind, cm.tn, cm.fp, cm.fn, cm.tp).value
        for kind in ScoreKind
    }

    def hard_weighted(series):
        wc = weighted_hard_confusion(series, tau, weights)
        return {
            kind.value: apply_score(kind, wc.tn, wc.wfp, wc.wfn, wc.tp).value
            for kind in ScoreKind
        }

    def expected_weighted(series):
        exp = expected_confusion(series, dist, weights)
        return {
            kind.value: apply_score(kind, *exp.entries()).value for kind in ScoreKind
        }

    return DemoComparison(
        tau=tau,
        confusion=cm.to_dict(),
        classical_scores=classical,
        weighted_scores_adjacent=hard_weighted(series_a),
        weighted_scores_isolated=hard_weighted(series_b),
        expected_weighted_adjacent=expected_weighted(series_a),
        expected_weighted_isolated=expected_weighted(series_b),
    )


def pair_prediction_multiset() -> np.ndarray:
    """Sorted (prediction, label) pairs shared by both series."""
    a = np.array(sorted(_ADJACENT))
    b = np.array(sorted(_ISOLATED))
    assert np.array_equal(a, b)
    return a
