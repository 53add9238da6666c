"""Closed-form distortion bounds and radii, with oracle comparisons.

All bounds run through the same pipeline: a coefficient-sum estimate from
the class inequality (``sum a_n <= S`` or ``sum (mu n) a_n <= S'``) times
the largest per-term factor, which sits at ``n = 2`` because the factors
decrease in ``n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .classes import ClassParams, NotAMemberError, Verdict, extremal_function, is_member, xi_weight
from .fps import DiskPoint, FractionalSeries, differentiate, evaluate_polar
from .geometry import FunctionalKind, sample_angles
from .operators import frac_derivative, frac_integral, gamma, gamma_ratio, pochhammer
from .reports import BoundReport

__all__ = [
    "DiskRadiusKind",
    "DiskRadiusVariants",
    "RadiusResult",
    "TailCheckError",
    "derivative_distortion_bounds",
    "derivative_distortion_report",
    "disk_radius",
    "disk_radius_variants",
    "distortion_bounds",
    "distortion_report",
    "frac_derivative_distortion",
    "frac_distortion_report",
    "frac_integral_distortion",
    "integral_gamma_factor",
    "derivative_gamma_factor",
    "printed_fractional_coefficient",
    "radius",
    "radius_candidates",
    "radius_with_minimizer",
    "require_member",
    "sharpness_witness",
]

DEFAULT_N_MAX = 512


class TailCheckError(RuntimeError):
    """Radius candidates were not nondecreasing past the minimizer."""


class DiskRadiusKind(enum.Enum):
    FRAC_INTEGRAL = "frac_integral"
    FRAC_DERIVATIVE = "frac_derivative"


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    return r


def _C(p: ClassParams) -> float:
    return p.scale / xi_weight(p, 2)


def distortion_bounds(p: ClassParams, r: float) -> tuple[float, float]:
    """``r -/+ C r^(2 mu)`` with ``C = (A-B)(1-gamma)/Xi(2)``."""
    r = _check_r(r)
    t = _C(p) * r ** (2.0 * float(p.mu))
    return r - t, r + t


def derivative_distortion_bounds(p: ClassParams, r: float) -> tuple[float, float]:
    r = _check_r(r)
    mu = float(p.mu)
    t = 2.0 * mu * _C(p) * r ** (2.0 * mu - 1.0)
    return 1.0 - t, 1.0 + t


# ---------------------------------------------------------------------------
# radii


def _rho(kind: FunctionalKind, x: float, psi: float) -> float:
    if kind is FunctionalKind.STARLIKE:
        return (1.0 - psi) / (x - psi)
    if kind is FunctionalKind.CONVEX:
        return (1.0 - psi) / (x * (x - psi))
    return (1.0 - psi) / x


def radius_candidates(kind: FunctionalKind, p: ClassParams, psi: float,
                      n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """Per-index radius candidates for ``n = 2..n_max`` (index 0 is ``n = 2``)."""
    kind = FunctionalKind(kind)
    if not 0.0 <= psi < 1.0:
        raise ValueError("psi must lie in [0, 1)")
    out = np.empty(n_max - 1)
    for i, n in enumerate(range(2, n_max + 1)):
        x = float(p.mu * n)
        base = xi_weight(p, n) / p.scale * _rho(kind, x, psi)
        out[i] = math.exp(math.log(base) / (x - 1.0))
    return out


@dataclass(frozen=True)
class RadiusResult:
    radius: float
    minimizer_n: int
    unclamped: float


def radius_with_minimizer(kind: FunctionalKind, p: ClassParams, psi: float,
                          n_max: int = DEFAULT_N_MAX) -> RadiusResult:
    """Infimum over ``n <= n_max`` of the radius candidates, clamped to 1.

    Truncating the infimum is only safe when the candidates are
    nondecreasing beyond the minimizer; that is checked over the last
    quarter of the range.  Candidates that stay at or above 1 cannot move
    the clamped value, so a tail that decreases towards 1 is accepted.
    The reported minimizer is the first ``n`` attaining the clamped value.
    """
    if n_max < 16:
        raise ValueError("n_max must be at least 16")
    cand = radius_candidates(kind, p, psi, n_max)
    clamped = np.minimum(cand, 1.0)
    i = int(np.argmin(clamped))
    tail = cand[max(i, (3 * len(cand)) // 4):]
    if not np.all(tail >= 1.0):
        if len(tail) < 2 or np.any(np.diff(tail) < -1e-12 * np.abs(tail[1:])):
            raise TailCheckError("radius candidates still decrease at n_max; increase n_max")
    value = float(np.min(cand))
    return RadiusResult(float(clamped[i]), i + 2, value)


def radius(kind: FunctionalKind, p: ClassParams, psi: float, n_max: int = DEFAULT_N_MAX) -> float:
    return radius_with_minimizer(kind, p, psi, n_max).radius


# ---------------------------------------------------------------------------
# fractional operators


def integral_gamma_factor(p: ClassParams, delta: float, n: int = 2) -> float:
    """``Gamma(mu n + 1) Gamma(2 + delta) / Gamma(mu n + 1 + delta)``."""
    x = float(p.mu * n)
    return gamma_ratio(x + 1.0, x + 1.0 + delta) * gamma(2.0 + delta)


def derivative_gamma_factor(p: ClassParams, delta: float, n: int = 2) -> float:
    """``Gamma(mu n) Gamma(2 - delta) / Gamma(mu n + 1 - delta)``."""
    x = float(p.mu * n)
    return gamma_ratio(x, x + 1.0 - delta) * gamma(2.0 - delta)


def frac_integral_distortion(p: ClassParams, delta: float, r: float) -> tuple[float, float]:
    """Bounds on ``|I^delta F|`` over ``|z| = r``.

    ``G = Gamma(2+delta) z^-delta I^delta F = z - sum Ups(n) a_n z^(mu n)``
    obeys ``r -/+ Ups(2) S r^(2 mu)``; the result is rescaled by
    ``r^delta / Gamma(2 + delta)``.
    """
    r = _check_r(r)
    if not delta > 0:
        raise ValueError("delta must be positive")
    t = integral_gamma_factor(p, delta) * _C(p) * r ** (2.0 * float(p.mu))
    scale = r**delta / gamma(2.0 + delta)
    return scale * (r - t), scale * (r + t)


def frac_derivative_distortion(p: ClassParams, delta: float, r: float) -> tuple[float, float]:
    """Bounds on ``|D^delta F|`` over ``|z| = r`` via
    ``G = Gamma(2-delta) z^delta D^delta F = z - sum Om(n) (mu n) a_n z^(mu n)``."""
    r = _check_r(r)
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    s_prime = 2.0 * float(p.mu) * _C(p)
    t = derivative_gamma_factor(p, delta) * s_prime * r ** (2.0 * float(p.mu))
    scale = r ** (-delta) / gamma(2.0 - delta)
    return scale * (r - t), scale * (r + t)


@dataclass(frozen=True)
class DiskRadiusVariants:
    """Enclosing radius with the ``+`` sign and the ``-`` sign counterpart."""

    upper: float
    lower_sign: float


def disk_radius_variants(kind: DiskRadiusKind, p: ClassParams, delta: float) -> DiskRadiusVariants:
    kind = DiskRadiusKind(kind)
    if kind is DiskRadiusKind.FRAC_INTEGRAL:
        if not delta > 0:
            raise ValueError("delta must be positive")
        t = integral_gamma_factor(p, delta) * _C(p)
        g = gamma(2.0 + delta)
    else:
        if not 0.0 <= delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")
        t = derivative_gamma_factor(p, delta) * 2.0 * float(p.mu) * _C(p)
        g = gamma(2.0 - delta)
    return DiskRadiusVariants((1.0 + t) / g, (1.0 - t) / g)


def disk_radius(kind: DiskRadiusKind, p: ClassParams, delta: float) -> float:
    """Radius of the origin-centred disk containing the operator image."""
    return disk_radius_variants(kind, p, delta).upper


def printed_fractional_coefficient(p: ClassParams, delta: float) -> float:
    """Pochhammer form of the ``|z|``-power coefficient, for comparison only.

    ``(1)_{2mu-1} (A-B)(1-gamma) / ((2-delta)_{2mu-1} X)`` with
    ``X = (1-B)[(2mu)^(k-1) th_2 - (2mu)^(m-1) la_2] + (A-B)(1-gamma)(2mu)^(k-1) th_2``.
    The bounds above do not use it; reports list it next to the computed
    coefficient.
    """
    x = 2.0 * float(p.mu)
    th, la = p.phi.coeff(2), p.psi.coeff(2)
    X = (1.0 - p.B) * (x ** (p.k - 1) * th - x ** (p.m - 1) * la) + p.scale * x ** (p.k - 1) * th
    return pochhammer(1.0, x - 1.0) * p.scale / (pochhammer(2.0 - delta, x - 1.0) * X)


# ---------------------------------------------------------------------------
# oracle reports


def _sample(series, r: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    theta = sample_angles(samples)
    return theta, np.abs(evaluate_polar(series, r, theta))


def _report_pair(kind: str, lower: float, upper: float, series, r: float,
                 samples: int, tolerance: float) -> tuple[BoundReport, BoundReport]:
    theta, mags = _sample(series, r, samples)
    i_lo, i_hi = int(np.argmin(mags)), int(np.argmax(mags))
    return (
        BoundReport.lower(f"{kind}_lower", lower, mags[i_lo], DiskPoint(r, float(theta[i_lo])), tolerance),
        BoundReport.upper(f"{kind}_upper", upper, mags[i_hi], DiskPoint(r, float(theta[i_hi])), tolerance),
    )


def distortion_report(p: ClassParams, f: FractionalSeries, r: float, samples: int = 1024,
                      tolerance: float = 1e-9) -> tuple[BoundReport, BoundReport]:
    """Sampled min/max of ``|F|`` on ``|z| = r`` against ``distortion_bounds``."""
    lo, hi = distortion_bounds(p, r)
    return _report_pair("distortion", lo, hi, f, r, samples, tolerance)


def derivative_distortion_report(p: ClassParams, f: FractionalSeries, r: float,
                                 samples: int = 1024,
                                 tolerance: float = 1e-9) -> tuple[BoundReport, BoundReport]:
    lo, hi = derivative_distortion_bounds(p, r)
    return _report_pair("derivative_distortion", lo, hi, differentiate(f), r, samples, tolerance)


def frac_distortion_report(kind: DiskRadiusKind, p: ClassParams, f: FractionalSeries,
                           delta: float, r: float, samples: int = 1024,
                           tolerance: float = 1e-9) -> tuple[BoundReport, BoundReport]:
    """Direct evaluation of ``I^delta F`` or ``D^delta F`` against its bounds."""
    kind = DiskRadiusKind(kind)
    if kind is DiskRadiusKind.FRAC_INTEGRAL:
        lo, hi = frac_integral_distortion(p, delta, r)
        image = frac_integral(f, delta)
    else:
        lo, hi = frac_derivative_distortion(p, delta, r)
        image = frac_derivative(f, delta)
    return _report_pair(kind.value, lo, hi, image, r, samples, tolerance)


def sharpness_witness(p: ClassParams, r: float) -> BoundReport:
    """``|F|`` of the ``n = 2`` extremal at ``z = r`` against the lower bound."""
    f = extremal_function(p, 2)
    value = abs(complex(evaluate_polar(f, r, 0.0)))
    lo, _ = distortion_bounds(p, r)
    return BoundReport.lower("distortion_sharpness", lo, value, DiskPoint(r, 0.0), 1e-12)


def require_member(p: ClassParams, f: FractionalSeries) -> None:
    if is_member(p, f) is not Verdict.MEMBER_CERTIFIED:
        raise NotAMemberError("bound containment needs a certified member")
