"""Random-threshold priors on [a, b] within the unit interval.

A classification threshold is modelled as a continuous random variable
with density f supported on [a, b], 0 <= a < b <= 1.  Two families are
provided: Uniform(a, b) and Beta(alpha, beta) on [0, 1].  The Beta cdf is
the regularized incomplete beta function, evaluated with a modified Lentz
continued fraction so the cdf used by expectations and the cdf used by
inverse-transform sampling are one and the same routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

_CF_MAX_ITER = 400
_CF_EPS = 1e-15
_TINY = 1e-300


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a, b, x):
    """Continued fraction for the incomplete beta, vectorized over x.

    Modified Lentz evaluation of the standard even/odd-term expansion;
    converges fast for x < (a + 1) / (a + b + 2), which the caller
    guarantees via the symmetry transformation.
    """
    x = np.asarray(x, dtype=np.float64)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    np.copyto(d, _TINY, where=np.abs(d) < _TINY)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        np.copyto(d, _TINY, where=np.abs(d) < _TINY)
        c = 1.0 + num / c
        np.copyto(c, _TINY, where=np.abs(c) < _TINY)
        d = 1.0 / d
        h = h * d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        np.copyto(d, _TINY, where=np.abs(d) < _TINY)
        c = 1.0 + num / c
        np.copyto(c, _TINY, where=np.abs(c) < _TINY)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _CF_EPS):
            return h
    raise ValidationError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}"
    )


def regularized_incomplete_beta(a: float, b: float, x):
    """Regularized incomplete beta I_x(a, b), vectorized over x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValidationError("beta shape parameters must be positive")
    x_arr = np.asarray(x, dtype=np.float64)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr).copy()
    if np.any((x_arr < 0) | (x_arr > 1)):
        raise ValidationError("incomplete beta argument must lie in [0, 1]")
    out = np.empty_like(x_arr)
    lo = x_arr <= 0.0
    hi = x_arr >= 1.0
    out[lo] = 0.0
    out[hi] = 1.0
    mid = ~(lo | hi)
    if np.any(mid):
        xm = x_arr[mid]
        # Symmetry keeps the continued fraction in its fast-convergence region.
        flip = xm > (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xm)
        for use_flip in (False, True):
            sel = flip if use_flip else ~flip
            if not np.any(sel):
                continue
            aa, bb = (b, a) if use_flip else (a, b)
            xs = 1.0 - xm[sel] if use_flip else xm[sel]
            front = np.exp(
                aa * np.log(xs) + bb * np.log1p(-xs) - _log_beta(aa, bb)
            ) / aa
            val = front * _beta_cf(aa, bb, xs)
            res[sel] = 1.0 - val if use_flip else val
        out[mid] = np.clip(res, 0.0, 1.0)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=32)
def _beta_quantile_grid(alpha: float, beta: float):
    # Coarse inverse-cdf table; refined by Newton/bisection in sample().
    x = np.linspace(0.0, 1.0, 2049)
    return x, regularized_incomplete_beta(alpha, beta, x)


@dataclass(frozen=True)
class ThresholdDistribution:
    """Prior on the threshold: kind is ``uniform`` (a, b) or ``beta`` (alpha, beta).

    Immutable after construction; pdf/cdf accept scalars or arrays and
    sampling draws from a caller-owned numpy Generator.
    """

    kind: str
    a: float = 0.0
    b: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kind == "uniform":
            if not (0.0 <= self.a < self.b <= 1.0):
                raise ValidationError(
                    f"uniform support needs 0 <= a < b <= 1, got [{self.a}, {self.b}]"
                )
        elif self.kind == "beta":
            if self.alpha <= 0 or self.beta <= 0:
                raise ValidationError("beta shapes must be strictly positive")
            if (self.a, self.b) != (0.0, 1.0):
                raise ValidationError("beta prior is supported on [0, 1] only")
        else:
            raise ValidationError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "ThresholdDistribution":
        return cls(kind="uniform", a=float(a), b=float(b))

    @classmethod
    def beta_prior(cls, alpha: float, beta: float) -> "ThresholdDistribution":
        return cls(kind="beta", alpha=float(alpha), beta=float(beta))

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)

    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        return self.alpha / (self.alpha + self.beta)

    def pdf(self, x):
        """Density value; zero outside the support."""
        x_arr = np.asarray(x, dtype=np.float64)
        if self.kind == "uniform":
            inside = (x_arr >= self.a) & (x_arr <= self.b)
            out = np.where(inside, 1.0 / (self.b - self.a), 0.0)
        else:
            inside = (x_arr > 0.0) & (x_arr < 1.0)
            safe = np.where(inside, x_arr, 0.5)
            log_pdf = (
                (self.alpha - 1.0) * np.log(safe)
                + (self.beta - 1.0) * np.log1p(-safe)
                - _log_beta(self.alpha, self.beta)
            )
            out = np.where(inside, np.exp(log_pdf), 0.0)
        return float(out) if np.ndim(x) == 0 else out

    def cdf(self, x):
        """Cumulative probability F(x); clamps to 0 below a and 1 above b."""
        x_arr = np.asarray(x, dtype=np.float64)
        if self.kind == "uniform":
            out = np.clip((x_arr - self.a) / (self.b - self.a), 0.0, 1.0)
            return float(out) if np.ndim(x) == 0 else out
        clipped = np.clip(x_arr, 0.0, 1.0)
        return regularized_incomplete_beta(self.alpha, self.beta, clipped)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw i.i.d. thresholds by inverse-transform on cdf().

        Beta draws invert the implemented cdf (grid bracket, Newton polish,
        bisection fallback), so sampler and cdf cannot drift apart.
        """
        u = rng.random(size)
        if self.kind == "uniform":
            return self.a + (self.b - self.a) * u
        u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
        x = self._invert_beta_cdf(u_arr)
        return float(x[0]) if size is None else x

    def _invert_beta_cdf(self, u: np.ndarray) -> np.ndarray:
        grid_x, grid_f = _beta_quantile_grid(self.alpha, self.beta)
        idx = np.clip(np.searchsorted(grid_f, u, side="right"), 1, len(grid_x) - 1)
        lo = grid_x[idx - 1].copy()
        hi = grid_x[idx].copy()
        x = np.interp(u, grid_f, grid_x)
        for _ in range(3):
            f_err = regularized_incomplete_beta(self.alpha, self.beta, x) - u
            lo = np.where(f_err <= 0, x, lo)
            hi = np.where(f_err > 0, x, hi)
            dens = self.pdf(x)
            step = np.where(dens > 1e-12, f_err / np.maximum(dens, 1e-12), 0.0)
            x_new = x - step
            # Newton step must stay inside the running bracket to be trusted.
            bad = (x_new <= lo) | (x_new >= hi) | (dens <= 1e-12)
            x = np.where(bad, 0.5 * (lo + hi), x_new)
        residual = np.abs(regularized_incomplete_beta(self.alpha, self.beta, x) - u)
        stubborn = residual > 1e-12
        if np.any(stubborn):
            # Flat-density tails where Newton stalls: finish with bisection,
            # vectorized over the remaining entries.
            l = lo[stubborn]
            h = hi[stubborn]
            target = u[stubborn]
            for _ in range(50):
                m = 0.5 * (l + h)
                below = regularized_incomplete_beta(self.alpha, self.beta, m) < target
                l = np.where(below, m, l)
                h = np.where(below, h, m)
            x[stubborn] = 0.5 * (l + h)
        return x
