"""Differential operator ``D^beta_mu``, Theta kernels and fractional calculus.

The fractional derivative and integral are applied termwise on the
monomial basis::

    D^delta z^e = Gamma(e+1) / Gamma(e+1-delta) * z^(e-delta)
    I^delta z^e = Gamma(e+1) / Gamma(e+1+delta) * z^(e+delta)

No integral is ever evaluated numerically.
"""

from __future__ import annotations

import math

from .fps import DomainError, FractionalSeries, GeneralSeries, Sign, differentiate, parse_mu

__all__ = [
    "apply_D",
    "frac_derivative",
    "frac_derivative_higher",
    "frac_integral",
    "gamma",
    "gamma_ratio",
    "pochhammer",
    "theta_series",
]


def gamma(x: float) -> float:
    """Gamma function for real ``x`` (poles raise ``DomainError``)."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """``Gamma(a) / Gamma(b)`` without overflow for large positive arguments."""
    a, b = float(a), float(b)
    if a > 0 and b > 0:
        if a < 170 and b < 170:
            return math.gamma(a) / math.gamma(b)
        return math.exp(math.lgamma(a) - math.lgamma(b))
    return gamma(a) / gamma(b)


def pochhammer(x: float, y: float) -> float:
    """Generalized rising factorial ``(x)_y = Gamma(x+y) / Gamma(x)``."""
    return gamma_ratio(x + y, x)


def theta_series(mu, k: int, N: int) -> FractionalSeries:
    """``z + sum_{n=2}^N (mu*n)**k z**(mu*n)``."""
    mu = parse_mu(mu)
    if N < 2:
        raise ValueError("N must be >= 2")
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    return FractionalSeries(
        mu, {n: float(mu * n) ** k for n in range(2, N + 1)}, Sign.PLUS, N
    )


def apply_D(f: FractionalSeries, beta: int) -> FractionalSeries:
    """Multiply the n-th coefficient by ``(mu*n)**beta``.

    Equivalent to ``hadamard(theta_series(f.mu, beta, f.truncation), f)``
    but computed directly on the stored coefficients.
    """
    if beta < 0 or int(beta) != beta:
        raise ValueError("beta must be a nonnegative integer")
    if beta == 0:
        return f
    mu = f.mu
    return f.with_coeffs({n: float(mu * n) ** beta * a for n, a in f.coeffs.items()})


def _as_general(s) -> GeneralSeries:
    return s.as_general() if isinstance(s, FractionalSeries) else s


def frac_derivative(s, delta: float) -> GeneralSeries:
    """Fractional derivative of order ``0 <= delta < 1``."""
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"fractional derivative order must lie in [0, 1), got {delta}")
    g = _as_general(s)
    if delta == 0.0:
        return g
    terms = []
    for e, c in g.terms:
        if e + 1.0 - delta <= 0:
            raise DomainError(f"Gamma argument {e + 1.0 - delta} is not positive")
        if e - delta < 0:
            raise DomainError(f"D^{delta} z^{e} has negative exponent {e - delta}")
        terms.append((e - delta, c * gamma_ratio(e + 1.0, e + 1.0 - delta)))
    return GeneralSeries.from_terms(terms)


def frac_integral(s, delta: float) -> GeneralSeries:
    """Fractional integral of order ``delta > 0``."""
    delta = float(delta)
    if not delta > 0.0 or not math.isfinite(delta):
        raise ValueError(f"fractional integral order must be positive, got {delta}")
    g = _as_general(s)
    terms = []
    for e, c in g.terms:
        factor = gamma_ratio(e + 1.0, e + 1.0 + delta)
        if not math.isfinite(factor):
            raise OverflowError(f"Gamma ratio overflow for exponent {e}")
        terms.append((e + delta, c * factor))
    return GeneralSeries.from_terms(terms)


def frac_derivative_higher(s, delta: float, upsilon: int) -> GeneralSeries:
    """``(d/dz)**upsilon`` applied after ``frac_derivative(s, delta)``."""
    if upsilon < 0 or int(upsilon) != upsilon:
        raise ValueError("upsilon must be a nonnegative integer")
    out = frac_derivative(s, delta)
    for _ in range(int(upsilon)):
        out = differentiate(out)
    return out

