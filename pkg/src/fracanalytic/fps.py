"""Fractional power series on the slit unit disk.

Two value types live here:

``FractionalSeries``
    ``z + sum a_n z**(mu*n)`` (sign plus) or ``z - sum a_n z**(mu*n)``
    (sign minus), with ``a_n >= 0`` stored for ``n = 2..truncation``.

``GeneralSeries``
    ``sum c_k z**e_k`` for arbitrary real exponents ``e_k >= 0``.  This is
    what derivatives and fractional operators produce.

Non-integer powers use the principal logarithm, so the domain is the unit
disk with the negative real axis removed.  On the positive real axis every
series evaluates to a real number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

import numpy as np

__all__ = [
    "DEFAULT_TRUNCATION",
    "DiskPoint",
    "DomainError",
    "FractionalSeries",
    "GeneralSeries",
    "Sign",
    "differentiate",
    "evaluate",
    "evaluate_polar",
    "hadamard",
    "parse_mu",
]

DEFAULT_TRUNCATION = 64


class DomainError(ValueError):
    """A point or exponent falls outside the slit disk / series domain."""


class Sign(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


def parse_mu(value: Union[str, int, float, Fraction]) -> Fraction:
    """Read an exponent base such as ``"3/2"``, ``2`` or ``1.5``.

    Floats are converted through ``Fraction.limit_denominator`` so that
    ``1.5`` and ``"3/2"`` give the same value.
    """
    if isinstance(value, Fraction):
        mu = value
    elif isinstance(value, bool):
        raise TypeError("mu must be a rational number")
    elif isinstance(value, int):
        mu = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("mu must be finite")
        mu = Fraction(value).limit_denominator(10**6)
    elif isinstance(value, str):
        try:
            mu = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse mu from {value!r}") from exc
    else:
        raise TypeError(f"unsupported mu type {type(value).__name__}")
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    return mu


def format_mu(mu: Fraction) -> str:
    return f"{mu.numerator}/{mu.denominator}" if mu.denominator != 1 else str(mu.numerator)


@dataclass(frozen=True)
class DiskPoint:
    """A point ``r * exp(i*theta)`` of the slit disk."""

    r: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and math.isfinite(self.theta)):
            raise DomainError("disk point must be finite")
        if not 0.0 <= self.r < 1.0:
            raise DomainError(f"|z| = {self.r} is outside the open unit disk")
        if not -math.pi < self.theta < math.pi:
            raise DomainError(f"theta = {self.theta} lies on or beyond the slit")

    @property
    def z(self) -> complex:
        return complex(self.r * math.cos(self.theta), self.r * math.sin(self.theta))

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        z = complex(z)
        if z.imag == 0.0 and z.real < 0.0:
            raise DomainError("negative real axis is the branch cut")
        return cls(abs(z), math.atan2(z.imag, z.real))


@dataclass(frozen=True)
class GeneralSeries:
    """Finite sum ``sum c_k z**e_k`` with strictly increasing exponents."""

    exponents: tuple[float, ...] = ()
    coefficients: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        exps = tuple(float(e) for e in self.exponents)
        coefs = tuple(float(c) for c in self.coefficients)
        if len(exps) != len(coefs):
            raise ValueError("exponents and coefficients differ in length")
        for e, c in zip(exps, coefs):
            if not (math.isfinite(e) and math.isfinite(c)):
                raise ValueError("series terms must be finite")
            if e < 0:
                raise DomainError(f"negative exponent {e} is outside the series domain")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly increasing")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coefficients", coefs)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, float]]) -> "GeneralSeries":
        """Build from unordered ``(exponent, coefficient)`` pairs, merging repeats."""
        merged: dict[float, float] = {}
        for e, c in terms:
            e = float(e)
            merged[e] = merged.get(e, 0.0) + float(c)
        keys = sorted(merged)
        return cls(tuple(keys), tuple(merged[k] for k in keys))

    @property
    def terms(self) -> list[tuple[float, float]]:
        return list(zip(self.exponents, self.coefficients))

    def __len__(self) -> int:
        return len(self.exponents)

    def __add__(self, other: "GeneralSeries") -> "GeneralSeries":
        if not isinstance(other, GeneralSeries):
            return NotImplemented
        return GeneralSeries.from_terms(self.terms + other.terms)

    def scale(self, factor: float) -> "GeneralSeries":
        return GeneralSeries(self.exponents, tuple(factor * c for c in self.coefficients))

    def __neg__(self) -> "GeneralSeries":
        return self.scale(-1.0)

    def __sub__(self, other: "GeneralSeries") -> "GeneralSeries":
        if not isinstance(other, GeneralSeries):
            return NotImplemented
        return self + (-other)

    def to_json(self) -> dict:
        return {
            "terms": [{"exponent": e, "coefficient": c} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "GeneralSeries":
        return cls.from_terms((t["exponent"], t["coefficient"]) for t in obj.get("terms", []))


@dataclass(frozen=True)
class FractionalSeries:
    """Normalized series ``z +/- sum_{n>=2} a_n z**(mu*n)`` with ``a_n >= 0``.

    Parameters
    ----------
    mu : Fraction
        Exponent base, at least 1.
    coeffs : mapping
        ``n -> a_n`` for ``2 <= n <= truncation``.  Zero entries are dropped.
    sign : Sign
        ``Sign.MINUS`` for the negative-coefficient subclass.
    truncation : int
        Largest admissible index ``n``.
    """

    mu: Fraction = Fraction(1)
    coeffs: Mapping[int, float] = field(default_factory=dict)
    sign: Sign = Sign.MINUS
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", parse_mu(self.mu))
        object.__setattr__(self, "sign", Sign(self.sign))
        if int(self.truncation) != self.truncation or self.truncation < 2:
            raise ValueError("truncation must be an integer >= 2")
        object.__setattr__(self, "truncation", int(self.truncation))
        clean: dict[int, float] = {}
        for n, a in dict(self.coeffs).items():
            n_int = int(n)
            if n_int != float(n) or not 2 <= n_int <= self.truncation:
                raise ValueError(f"coefficient index {n!r} outside 2..{self.truncation}")
            a = float(a)
            if not math.isfinite(a) or a < 0:
                raise ValueError(f"coefficient a_{n_int} = {a} must be finite and >= 0")
            if a != 0.0:
                clean[n_int] = a
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))

    def __hash__(self) -> int:
        return hash((self.mu, self.sign, self.truncation, tuple(self.coeffs.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionalSeries):
            return NotImplemented
        return (
            self.mu == other.mu
            and self.sign == other.sign
            and self.truncation == other.truncation
            and dict(self.coeffs) == dict(other.coeffs)
        )

    @classmethod
    def identity(cls, mu=Fraction(1), truncation: int = DEFAULT_TRUNCATION) -> "FractionalSeries":
        """The series ``F(z) = z``."""
        return cls(mu=mu, coeffs={}, truncation=truncation)

    @classmethod
    def ones(cls, mu=Fraction(1), truncation: int = DEFAULT_TRUNCATION) -> "FractionalSeries":
        """``z + sum z**(mu*n)``, the unit of the Hadamard product."""
        return cls(mu=mu, coeffs={n: 1.0 for n in range(2, truncation + 1)},
                   sign=Sign.PLUS, truncation=truncation)

    def coefficient(self, n: int) -> float:
        return self.coeffs.get(n, 0.0)

    def signed_coefficient(self, n: int) -> float:
        return self.sign.factor * self.coeffs.get(n, 0.0)

    def exponent(self, n: int) -> float:
        return float(self.mu * n)

    def as_general(self) -> GeneralSeries:
        terms = [(1.0, 1.0)]
        terms += [(self.exponent(n), self.sign.factor * a) for n, a in self.coeffs.items()]
        return GeneralSeries.from_terms(terms)

    def with_coeffs(self, coeffs: Mapping[int, float]) -> "FractionalSeries":
        return FractionalSeries(self.mu, coeffs, self.sign, self.truncation)

    def to_json(self) -> dict:
        return {
            "mu": format_mu(self.mu),
            "sign": self.sign.value,
            "coeffs": {str(n): a for n, a in self.coeffs.items()},
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, obj: Mapping, default_mu=None) -> "FractionalSeries":
        if not isinstance(obj, Mapping):
            raise ValueError("series must be a JSON object")
        unknown = set(obj) - {"mu", "sign", "coeffs", "truncation"}
        if unknown:
            raise ValueError(f"unknown series fields: {sorted(unknown)}")
        mu = obj.get("mu", default_mu if default_mu is not None else "1")
        coeffs = obj.get("coeffs", {})
        if not isinstance(coeffs, Mapping):
            raise ValueError("coeffs must be an object mapping n to a_n")
        try:
            parsed = {int(k): v for k, v in coeffs.items()}
        except ValueError as exc:
            raise ValueError("coefficient keys must be integers") from exc
        return cls(
            mu=parse_mu(mu),
            coeffs=parsed,
            sign=Sign(obj.get("sign", "minus")),
            truncation=obj.get("truncation", DEFAULT_TRUNCATION),
        )


AnySeries = Union[FractionalSeries, GeneralSeries]


def _general(s: AnySeries) -> GeneralSeries:
    return s.as_general() if isinstance(s, FractionalSeries) else s


def _check_polar(r, theta) -> None:
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r >= 1):
        raise DomainError("evaluation radius must lie in [0, 1)")
    if np.any(np.abs(theta) >= math.pi):
        raise DomainError("evaluation angle must lie strictly inside (-pi, pi)")


def _powers(exponents: np.ndarray, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``z**e`` on the principal branch for every exponent (last axis)."""
    e = exponents.reshape((1,) * r.ndim + (-1,))
    rr = r[..., None]
    with np.errstate(divide="ignore"):
        mag = np.where(e == 0.0, 1.0, np.where(rr == 0.0, 0.0, rr ** e))
    return mag * np.exp(1j * e * theta[..., None])


def evaluate_polar(s: AnySeries, r, theta, *, closed: bool = False) -> np.ndarray:
    """Evaluate ``s`` at ``r * exp(i*theta)`` (arrays broadcast).

    ``closed=True`` admits ``theta = +/-pi`` as the one-sided limit from the
    upper/lower half plane, which quadrature over the full circle needs.
    """
    g = _general(s)
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if closed:
        _check_polar(r, np.zeros_like(theta))
        if np.any(np.abs(theta) > math.pi):
            raise DomainError("angle beyond +/-pi")
    else:
        _check_polar(r, theta)
    if len(g) == 0:
        return np.zeros(r.shape, dtype=complex)
    exps = np.asarray(g.exponents)
    coefs = np.asarray(g.coefficients)
    return _powers(exps, r, theta) @ coefs


def evaluate(s: AnySeries, z: Union[DiskPoint, complex, float]) -> complex:
    """Value of the series at a single point of the slit disk."""
    if not isinstance(z, DiskPoint):
        z = DiskPoint.from_complex(z)
    value = complex(evaluate_polar(s, z.r, z.theta))
    if z.theta == 0.0:
        value = complex(value.real, 0.0)
    return value


def differentiate(s: AnySeries) -> GeneralSeries:
    """Power rule termwise; constant terms vanish."""
    g = _general(s)
    terms = [(e - 1.0, c * e) for e, c in g.terms if e != 0.0]
    for e, _ in terms:
        if e < 0:
            raise DomainError(f"derivative produces negative exponent {e}")
    return GeneralSeries.from_terms(terms)


def hadamard(f: FractionalSeries, g: FractionalSeries) -> FractionalSeries:
    """Coefficientwise product of two series sharing the same ``mu``.

    The sign of the product is the product of the signs, so that
    ``(z - a z^2) * (z + b z^2) = z - ab z^2``.
    """
    if f.mu != g.mu:
        raise ValueError(f"Hadamard product needs equal mu, got {f.mu} and {g.mu}")
    n_max = min(f.truncation, g.truncation)
    sign = Sign.PLUS if f.sign == g.sign else Sign.MINUS
    coeffs = {n: a * g.coefficient(n) for n, a in f.coeffs.items() if n <= n_max}
    return FractionalSeries(f.mu, coeffs, sign, n_max)
