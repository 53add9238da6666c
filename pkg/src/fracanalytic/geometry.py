"""Numerical verification on sampled circles of the slit disk.

Everything here is an oracle for the closed forms in ``classes`` and
``bounds``: order functionals sampled on circles, the subordination
residual obtained by inverting the Moebius target explicitly, brute-force
radius search, and quadrature of integral means.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .classes import ClassParams, NotAMemberError, Verdict, extremal_function, is_member
from .fps import (
    DiskPoint,
    DomainError,
    FractionalSeries,
    GeneralSeries,
    Sign,
    differentiate,
    evaluate_polar,
    hadamard,
)
from .operators import apply_D
from .reports import BoundReport

__all__ = [
    "CriticalCoefficient",
    "FunctionalKind",
    "NonMonotonicProfileError",
    "PoleError",
    "THREADS_ENV",
    "VerificationGrid",
    "brute_force_radius",
    "critical_coefficient",
    "functional_values",
    "grid_records",
    "integral_mean",
    "l2_integral",
    "min_re_functional",
    "sample_angles",
    "subordination_residual",
    "subordination_values",
    "verify_integral_means_dominance",
    "write_grid_csv",
]

THREADS_ENV = "FRACANALYTIC_THREADS"
POLE_EPS = 1e-14

DEFAULT_RADII = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)


class PoleError(ArithmeticError):
    """A denominator vanished (to 1e-14) at a sampled point."""

    def __init__(self, message: str, r: float = float("nan"), theta: float = float("nan")):
        super().__init__(message)
        self.r = r
        self.theta = theta


class NonMonotonicProfileError(RuntimeError):
    """The coarse radial profile of a functional minimum increased."""


class FunctionalKind(enum.Enum):
    BOUNDED_TURNING = "bounded_turning"
    STARLIKE = "starlike"
    CONVEX = "convex"


@dataclass(frozen=True)
class VerificationGrid:
    """Concentric circles with equally spaced angles, minus a band at the cut.

    Angles are ``-pi + 2*pi*j/N``; ``theta = 0`` is always a node, which is
    where single-term negative-coefficient series attain their extremes.
    """

    radii: tuple[float, ...] = DEFAULT_RADII
    angular_samples: int = 1024
    slit_margin: float = 1e-3

    def __post_init__(self) -> None:
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise ValueError("grid needs at least one radius")
        if any(not 0.0 < r < 1.0 for r in radii):
            raise ValueError("grid radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("grid radii must be strictly increasing")
        n = self.angular_samples
        if n < 64 or n & (n - 1):
            raise ValueError("angular_samples must be a power of two >= 64")
        if not 0.0 < self.slit_margin < 1.0:
            raise ValueError("slit_margin must lie in (0, 1)")
        object.__setattr__(self, "radii", radii)

    def angles(self) -> np.ndarray:
        return sample_angles(self.angular_samples, self.slit_margin)

    def restricted(self, r_max: float) -> "VerificationGrid":
        return VerificationGrid(tuple(r for r in self.radii if r <= r_max),
                                self.angular_samples, self.slit_margin)

    @classmethod
    def boundary(cls, angular_samples: int = 2048) -> "VerificationGrid":
        """Default radii extended towards the boundary, up to 0.995."""
        radii = tuple(r for r in DEFAULT_RADII if r < 0.985) + (0.985, 0.99, 0.995)
        return cls(radii, angular_samples)


def sample_angles(samples: int, slit_margin: float = 1e-3) -> np.ndarray:
    theta = -math.pi + 2.0 * math.pi * np.arange(samples) / samples
    return theta[np.abs(theta) < math.pi - slit_margin]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map_rings(fn: Callable[[float], float], radii: Sequence[float]) -> list[float]:
    """Apply ``fn`` per ring; results come back in ring order."""
    threads = min(_thread_count(), len(radii))
    if threads <= 1:
        return [fn(r) for r in radii]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, radii))


# ---------------------------------------------------------------------------
# order functionals


def functional_values(f, kind: FunctionalKind, r, theta) -> np.ndarray:
    """``F'``, ``zF'/F`` or ``1 + zF''/F'`` at ``r * exp(i*theta)``."""
    kind = FunctionalKind(kind)
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    d1 = differentiate(f)
    fp = evaluate_polar(d1, r, theta)
    if kind is FunctionalKind.BOUNDED_TURNING:
        return fp
    z = r * np.exp(1j * theta)
    if kind is FunctionalKind.STARLIKE:
        den = evaluate_polar(f, r, theta)
        num = z * fp
    else:
        den = fp
        num = z * evaluate_polar(differentiate(d1), r, theta)
    small = np.abs(den) < POLE_EPS
    if np.any(small):
        i = np.flatnonzero(small.ravel())[0]
        raise PoleError(f"{kind.value} functional has a pole", float(r.ravel()[i]), float(theta.ravel()[i]))
    if kind is FunctionalKind.STARLIKE:
        return num / den
    return 1.0 + num / den


def min_re_functional(f, kind: FunctionalKind, r: float, samples: int = 1024,
                      slit_margin: float = 1e-3) -> float:
    """Minimum real part of the functional over the sampled circle ``|z| = r``."""
    if not 0.0 < r < 1.0:
        raise DomainError("radius must lie in (0, 1)")
    theta = sample_angles(samples, slit_margin)
    return float(np.min(functional_values(f, kind, r, theta).real))


def brute_force_radius(f, kind: FunctionalKind, psi: float, tol: float = 1e-6,
                       samples: int = 1024, coarse_points: int = 40) -> float:
    """Largest ``r`` with ``min_re_functional(f, kind, r) >= psi``, to within ``tol``.

    A coarse radial scan checks that the minimum does not increase with
    ``r`` before bisecting on the first crossing.
    """
    if not 0.0 <= psi < 1.0:
        raise ValueError("psi must lie in [0, 1)")
    if not 0.0 < tol < 0.05:
        raise ValueError("tol must lie in (0, 0.05)")
    top = 1.0 - tol

    def value(r: float) -> float:
        try:
            return min_re_functional(f, kind, r, samples)
        except PoleError:
            return -math.inf

    start = min(1e-3, tol)
    if not value(start) > psi:
        raise ValueError(f"functional minimum near the origin does not exceed psi={psi}")
    coarse = np.linspace(start, top, coarse_points)
    profile = []
    for r in coarse:
        v = value(float(r))
        if profile and v > profile[-1] + 1e-9 * (1.0 + abs(profile[-1])):
            raise NonMonotonicProfileError(
                f"minimum of the {FunctionalKind(kind).value} functional rises at r={r:.4f}"
            )
        profile.append(v)
        if v < psi:
            break
    else:
        return top
    hi = float(coarse[len(profile) - 1])
    lo = float(coarse[len(profile) - 2])
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if value(mid) >= psi:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# subordination


def _ratio_parts(p: ClassParams, f: FractionalSeries):
    """Series for the ratio denominator ``M`` and for ``N - M``."""
    if f.mu != p.mu:
        raise ValueError("series and class parameters use different mu")
    num = apply_D(hadamard(f, p.phi.series(f.truncation)), p.k)
    den = apply_D(hadamard(f, p.psi.series(f.truncation)), p.m)
    # N - M has no z term; build it from coefficient differences so it does
    # not cancel near the origin.
    diff = GeneralSeries.from_terms(
        (f.exponent(n), f.sign.factor * (num.coefficient(n) - den.coefficient(n)))
        for n in f.coeffs
    )
    return den, diff


def subordination_values(p: ClassParams, f: FractionalSeries, r, theta) -> np.ndarray:
    """The Schwarz-function candidate ``w`` solving ``t = (1-g)(1+Aw)/(1+Bw) + g``.

    With ``u = (t - gamma)/(1 - gamma)``, ``w = (u - 1)/(A - uB)``.
    """
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    den_series, diff_series = _ratio_parts(p, f)
    M = evaluate_polar(den_series, r, theta)
    D = evaluate_polar(diff_series, r, theta)
    bad = np.abs(M) < POLE_EPS
    if np.any(bad & (r > 0)):
        i = np.flatnonzero((bad & (r > 0)).ravel())[0]
        raise PoleError("D^m(F*Psi) vanishes", float(r.ravel()[i]), float(theta.ravel()[i]))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_minus_1 = np.where(bad, 0.0, D / np.where(bad, 1.0, M))
    u_minus_1 = t_minus_1 / (1.0 - p.gamma)
    denom = (p.A - p.B) - p.B * u_minus_1
    small = np.abs(denom) < POLE_EPS
    if np.any(small):
        i = np.flatnonzero(small.ravel())[0]
        raise PoleError("Moebius inversion denominator A - uB vanishes",
                        float(r.ravel()[i]), float(theta.ravel()[i]))
    return u_minus_1 / denom


def subordination_residual(p: ClassParams, f: FractionalSeries,
                           grid: Optional[VerificationGrid] = None) -> float:
    """``max |w|`` over the grid; at most 1 means the subordination holds there."""
    grid = grid or VerificationGrid()
    theta = grid.angles()

    def ring(r: float) -> float:
        return float(np.max(np.abs(subordination_values(p, f, r, theta))))

    return max(_map_rings(ring, grid.radii))


@dataclass(frozen=True)
class CriticalCoefficient:
    """Largest ``a`` with ``z - a z^(mu n)`` passing the residual test.

    ``per_radius`` holds the bisection result on grids truncated at each of
    the outer radii; ``boundary`` is their polynomial extrapolation to
    ``r = 1``.
    """

    n: int
    per_radius: tuple[tuple[float, float], ...]
    boundary: float


def critical_coefficient(p: ClassParams, n: int, grid: Optional[VerificationGrid] = None,
                         outer: int = 3, tol: float = 1e-10) -> CriticalCoefficient:
    """Bisect on the coefficient of a single-term series against the residual.

    The supremum of ``|w|`` over the open disk is only reached as ``r -> 1``;
    the critical coefficient found on a grid capped at ``R`` is
    extrapolated in ``R`` from the ``outer`` largest radii.
    """
    grid = grid or VerificationGrid.boundary()
    outer_radii = [r for r in grid.radii if r >= 0.5][-outer:]
    if not outer_radii:
        raise ValueError("grid has no radii beyond 0.5")

    def passes(a: float, sub: VerificationGrid) -> bool:
        f = FractionalSeries(p.mu, {n: a}, Sign.MINUS, max(n, 2))
        try:
            return subordination_residual(p, f, sub) <= 1.0
        except PoleError:
            return False

    results = []
    for R in outer_radii:
        sub = grid.restricted(R)
        lo, hi = 0.0, 1.0
        while passes(hi, sub):
            lo, hi = hi, 2.0 * hi
            if hi > 1e12:
                raise RuntimeError("residual never exceeded 1")
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if passes(mid, sub):
                lo = mid
            else:
                hi = mid
        results.append((R, lo))
    if len(results) == 1:
        boundary = results[0][1]
    else:
        xs = np.array([r for r, _ in results])
        ys = np.array([a for _, a in results])
        coef = np.polyfit(xs - 1.0, ys, len(results) - 1)
        boundary = float(coef[-1])
    return CriticalCoefficient(n, tuple(results), boundary)


def grid_records(p: Optional[ClassParams], f: FractionalSeries, kind: FunctionalKind,
                 grid: Optional[VerificationGrid] = None) -> list[dict]:
    """Per-point rows ``r, theta, re_functional, abs_w`` for CSV export."""
    grid = grid or VerificationGrid()
    theta = grid.angles()
    rows = []
    for r in grid.radii:
        fun = functional_values(f, kind, r, theta).real
        if p is not None:
            w = np.abs(subordination_values(p, f, r, theta))
        else:
            w = np.full_like(theta, np.nan)
        rows.extend(
            {"r": r, "theta": float(t), "re_functional": float(v), "abs_w": float(a)}
            for t, v, a in zip(theta, fun, w)
        )
    return rows


def write_grid_csv(path, rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["r", "theta", "re_functional", "abs_w"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(float(v)) for k, v in row.items()})


# ---------------------------------------------------------------------------
# integral means


def integral_mean(f, q: float, r: float, quadrature_n: int = 4096) -> float:
    """``int_{-pi}^{pi} |f(r e^{i theta})|^q d theta``.

    Trapezoidal rule on the closed interval, taking the endpoint values as
    one-sided limits at the cut, plus the first Euler-Maclaurin endpoint
    correction.  When the integrand is periodic (integer exponent gaps) the
    endpoint terms cancel and this is the plain periodic trapezoidal rule.
    """
    if not q > 0:
        raise ValueError("q must be positive")
    if not 0.0 < r < 1.0:
        raise DomainError("radius must lie in (0, 1)")
    if quadrature_n < 4:
        raise ValueError("quadrature_n must be at least 4")
    h = 2.0 * math.pi / quadrature_n
    theta = -math.pi + h * np.arange(quadrature_n + 1)
    theta[-1] = math.pi
    values = np.abs(evaluate_polar(f, r, theta, closed=True)) ** q
    trap = h * (math.fsum(values[1:-1]) + 0.5 * (values[0] + values[-1]))
    ends = np.array([-math.pi, math.pi])
    F = evaluate_polar(f, r, ends, closed=True)
    dF = 1j * r * np.exp(1j * ends) * evaluate_polar(differentiate(f), r, ends, closed=True)
    absF = np.abs(F)
    if np.any(absF == 0):
        return trap
    slope = q * absF ** (q - 2) * np.real(np.conj(F) * dF)
    return float(trap - h * h / 12.0 * (slope[1] - slope[0]))


def l2_integral(f, r: float) -> float:
    """Exact ``int_{-pi}^{pi} |f|^2 d theta`` for a finite series.

    Cross terms of exponents ``e_j, e_k`` integrate to
    ``2 sin(pi (e_j - e_k)) / (e_j - e_k)``, which is ``2 pi`` on the
    diagonal and vanishes for nonzero integer gaps (Parseval).
    """
    g = f.as_general() if isinstance(f, FractionalSeries) else f
    e = np.asarray(g.exponents)
    c = np.asarray(g.coefficients)
    gap = e[:, None] - e[None, :]
    kernel = 2.0 * math.pi * np.sinc(gap)
    weights = c[:, None] * c[None, :] * r ** (e[:, None] + e[None, :])
    return float(np.sum(weights * kernel))


def verify_integral_means_dominance(p: ClassParams, f: FractionalSeries, q: float, r: float,
                                    quadrature_n: int = 4096) -> BoundReport:
    """Compare the integral mean of ``f`` with that of the ``n = 2`` extremal."""
    if is_member(p, f) is not Verdict.MEMBER_CERTIFIED:
        raise NotAMemberError("integral-means dominance needs a certified member")
    extremal = extremal_function(p, 2, f.truncation)
    left = integral_mean(f, q, r, quadrature_n)
    right = integral_mean(extremal, q, r, quadrature_n)
    return BoundReport.upper("integral_means", right, left, tolerance=1e-9 * max(1.0, right))
