"""Class parameters, the coefficient weight and membership decisions.

A series ``F = z -/+ sum a_n z^(mu n)`` belongs to the class determined by
``ClassParams`` when::

    sum_n Xi(n) |a_n| <= (A - B)(1 - gamma)

with::

    Xi(n) = (1-B) * ((mu n)^k th_n - (mu n)^m la_n) + (A-B)(1-gamma)(mu n)^m w_n

where ``th_n``/``la_n`` are the numerator/denominator kernel coefficients
and ``w_n`` is ``la_n`` (``WeightVariant.LAMBDA``, the default) or ``th_n``
(``WeightVariant.THETA``).  For negative-coefficient series the inequality
is also necessary; for general series it is only sufficient.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

from .fps import DEFAULT_TRUNCATION, FractionalSeries, Sign, format_mu, parse_mu

__all__ = [
    "ClassParams",
    "ExtremePointWeights",
    "KernelCoeffs",
    "KernelFamily",
    "NotAMemberError",
    "PresetName",
    "Verdict",
    "WeightVariant",
    "coefficient_bound",
    "coefficient_margin",
    "decompose_extreme_points",
    "extremal_function",
    "extreme_point_combination",
    "is_member",
    "preset",
    "xi_weight",
]

# Indices checked when validating kernel ordering for closed-form families.
_VALIDATION_DEPTH = 512


class KernelFamily(enum.Enum):
    ALL_ONES = "all_ones"
    KOEBE = "koebe"
    KOEBE2 = "koebe2"
    CUSTOM = "custom"


class WeightVariant(enum.Enum):
    LAMBDA = "lambda"
    THETA = "theta"


class Verdict(enum.Enum):
    MEMBER_CERTIFIED = "member_certified"
    NOT_MEMBER = "not_member"
    INCONCLUSIVE = "inconclusive"


class PresetName(enum.Enum):
    STARLIKE_MU = "starlike_mu"
    CONVEX_MU = "convex_mu"


class NotAMemberError(ValueError):
    """Raised when an operation needs a certified member and did not get one."""


@dataclass(frozen=True)
class KernelCoeffs:
    """Coefficients of ``z + sum c_n z^(mu n)`` used as a convolution kernel.

    Closed-form families give ``1``, ``mu n`` or ``(mu n)^2``; ``CUSTOM``
    reads the ``custom`` map and treats missing indices as zero.
    """

    family: KernelFamily = KernelFamily.ALL_ONES
    mu: Fraction = Fraction(1)
    custom: Optional[Mapping[int, float]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", KernelFamily(self.family))
        object.__setattr__(self, "mu", parse_mu(self.mu))
        if self.family is KernelFamily.CUSTOM:
            if self.custom is None:
                raise ValueError("custom kernel needs a coefficient map")
            values = {}
            for n, v in dict(self.custom).items():
                v = float(v)
                if int(n) < 2 or not math.isfinite(v) or v < 0:
                    raise ValueError(f"custom kernel entry {n}: {v} must have n >= 2 and value >= 0")
                values[int(n)] = v
            object.__setattr__(self, "custom", MappingProxyType(values))
        elif self.custom is not None:
            raise ValueError("custom values are only allowed for the custom family")

    def __hash__(self) -> int:
        custom = tuple(sorted(self.custom.items())) if self.custom is not None else None
        return hash((self.family, self.mu, custom))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KernelCoeffs):
            return NotImplemented
        return (self.family, self.mu) == (other.family, other.mu) and (
            dict(self.custom or {}) == dict(other.custom or {})
        )

    def coeff(self, n: int) -> float:
        if self.family is KernelFamily.ALL_ONES:
            return 1.0
        # correctly rounded, same as float(mu * n) without Fraction overhead
        x = self.mu.numerator * n / self.mu.denominator
        if self.family is KernelFamily.KOEBE:
            return x
        if self.family is KernelFamily.KOEBE2:
            return x * x
        return self.custom.get(n, 0.0)

    def series(self, truncation: int = DEFAULT_TRUNCATION) -> FractionalSeries:
        """The kernel as a plus-sign series, leading coefficient fixed at 1."""
        return FractionalSeries(
            self.mu, {n: self.coeff(n) for n in range(2, truncation + 1)}, Sign.PLUS, truncation
        )

    def to_json(self) -> dict:
        out: dict = {"family": self.family.value}
        if self.family is KernelFamily.CUSTOM:
            out["custom"] = {str(n): v for n, v in sorted(self.custom.items())}
        return out

    @classmethod
    def from_json(cls, obj: Mapping, mu) -> "KernelCoeffs":
        if not isinstance(obj, Mapping) or "family" not in obj:
            raise ValueError("kernel must be an object with a 'family' field")
        custom = obj.get("custom")
        if custom is not None:
            custom = {int(k): v for k, v in custom.items()}
        return cls(KernelFamily(obj["family"]), mu, custom)


@dataclass(frozen=True)
class ClassParams:
    """Everything needed to decide membership in one class."""

    phi: KernelCoeffs
    psi: KernelCoeffs
    A: float = 1.0
    B: float = -1.0
    gamma: float = 0.0
    k: int = 0
    m: int = 0
    mu: Fraction = Fraction(1)
    weight_variant: WeightVariant = WeightVariant.LAMBDA

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", parse_mu(self.mu))
        object.__setattr__(self, "weight_variant", WeightVariant(self.weight_variant))
        for name in ("A", "B", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        A, B = self.A, self.B
        if not (-1.0 <= B < A <= 1.0) or not B < 0.0:
            raise ValueError(f"need -1 <= B < A <= 1 and B < 0, got A={A}, B={B}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        for name in ("k", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer")
            object.__setattr__(self, name, int(value))
        if self.k < self.m:
            raise ValueError(f"need k >= m, got k={self.k}, m={self.m}")
        if self.phi.mu != self.mu or self.psi.mu != self.mu:
            raise ValueError("kernel mu must match class mu")
        for n in self._validation_indices():
            th, la = self.phi.coeff(n), self.psi.coeff(n)
            if th < la:
                raise ValueError(f"kernel ordering violated at n={n}: {th} < {la}")

    def _validation_indices(self):
        keys = set(range(2, _VALIDATION_DEPTH + 1))
        for kern in (self.phi, self.psi):
            if kern.custom is not None:
                keys.update(kern.custom)
        return sorted(keys)

    @property
    def scale(self) -> float:
        """Right-hand side ``(A - B)(1 - gamma)`` of the coefficient inequality."""
        return (self.A - self.B) * (1.0 - self.gamma)

    def to_json(self) -> dict:
        return {
            "phi": self.phi.to_json(),
            "psi": self.psi.to_json(),
            "A": self.A,
            "B": self.B,
            "gamma": self.gamma,
            "k": self.k,
            "m": self.m,
            "mu": format_mu(self.mu),
            "variant": self.weight_variant.value,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ClassParams":
        if not isinstance(obj, Mapping):
            raise ValueError("params must be a JSON object")
        allowed = {"phi", "psi", "A", "B", "gamma", "k", "m", "mu", "variant"}
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown params fields: {sorted(unknown)}")
        missing = {"phi", "psi"} - set(obj)
        if missing:
            raise ValueError(f"params missing fields: {sorted(missing)}")
        mu = parse_mu(obj.get("mu", "1"))
        for name in ("A", "B", "gamma"):
            if name in obj and (isinstance(obj[name], bool) or not isinstance(obj[name], (int, float))):
                raise ValueError(f"{name} must be a number")
        return cls(
            phi=KernelCoeffs.from_json(obj["phi"], mu),
            psi=KernelCoeffs.from_json(obj["psi"], mu),
            A=obj.get("A", 1.0),
            B=obj.get("B", -1.0),
            gamma=obj.get("gamma", 0.0),
            k=obj.get("k", 0),
            m=obj.get("m", 0),
            mu=mu,
            weight_variant=WeightVariant(obj.get("variant", "lambda")),
        )


def preset(name, mu=Fraction(1), gamma: float = 0.0,
           weight_variant: WeightVariant = WeightVariant.LAMBDA) -> ClassParams:
    """Starlike (``th_n = mu n``, ``la_n = 1``) or convex
    (``th_n = (mu n)^2``, ``la_n = mu n``) classes of order ``gamma``."""
    name = PresetName(name)
    mu = parse_mu(mu)
    if name is PresetName.STARLIKE_MU:
        phi, psi = KernelFamily.KOEBE, KernelFamily.ALL_ONES
    else:
        phi, psi = KernelFamily.KOEBE2, KernelFamily.KOEBE
    return ClassParams(
        phi=KernelCoeffs(phi, mu), psi=KernelCoeffs(psi, mu),
        A=1.0, B=-1.0, gamma=gamma, k=0, m=0, mu=mu, weight_variant=weight_variant,
    )


def xi_weight(p: ClassParams, n: int) -> float:
    if n < 2:
        raise ValueError("xi_weight needs n >= 2")
    x = float(p.mu * n)
    th, la = p.phi.coeff(n), p.psi.coeff(n)
    last = la if p.weight_variant is WeightVariant.LAMBDA else th
    xi = (1.0 - p.B) * (x**p.k * th - x**p.m * la) + p.scale * x**p.m * last
    if not xi > 0.0:
        raise ValueError(f"degenerate kernel: Xi({n}) = {xi} is not positive")
    return xi


def _check_mu(p: ClassParams, f: FractionalSeries) -> None:
    if f.mu != p.mu:
        raise ValueError(f"series mu {f.mu} differs from class mu {p.mu}")


def coefficient_margin(p: ClassParams, f: FractionalSeries) -> float:
    """``(A-B)(1-gamma) - sum Xi(n) |a_n|``; nonnegative certifies membership."""
    _check_mu(p, f)
    return p.scale - math.fsum(xi_weight(p, n) * a for n, a in f.coeffs.items())


def is_member(p: ClassParams, f: FractionalSeries) -> Verdict:
    if coefficient_margin(p, f) >= 0.0:
        return Verdict.MEMBER_CERTIFIED
    if f.sign is Sign.MINUS:
        return Verdict.NOT_MEMBER
    return Verdict.INCONCLUSIVE


def coefficient_bound(p: ClassParams, n: int) -> float:
    return p.scale / xi_weight(p, n)


def extremal_function(p: ClassParams, n: int,
                      truncation: int = DEFAULT_TRUNCATION) -> FractionalSeries:
    """``z - bound(n) z^(mu n)``, the single-term series saturating the class."""
    return FractionalSeries(p.mu, {n: coefficient_bound(p, n)}, Sign.MINUS, max(truncation, n))


@dataclass(frozen=True)
class ExtremePointWeights:
    """Convex weights ``eta_n`` over the extreme points (``n = 1`` is ``z``)."""

    eta: Mapping[int, float] = field(default_factory=lambda: {1: 1.0})

    def __post_init__(self) -> None:
        clean = {}
        for n, v in dict(self.eta).items():
            v = float(v)
            if int(n) < 1 or not math.isfinite(v) or v < 0:
                raise ValueError(f"weight eta_{n} = {v} must be >= 0 with n >= 1")
            clean[int(n)] = v
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "eta", MappingProxyType(dict(sorted(clean.items()))))

    def __getitem__(self, n: int) -> float:
        return self.eta.get(n, 0.0)


def extreme_point_combination(p: ClassParams, w: ExtremePointWeights,
                              truncation: int = DEFAULT_TRUNCATION) -> FractionalSeries:
    coeffs = {n: eta * coefficient_bound(p, n) for n, eta in w.eta.items() if n >= 2 and eta > 0}
    top = max(coeffs, default=2)
    return FractionalSeries(p.mu, coeffs, Sign.MINUS, max(truncation, top))


def decompose_extreme_points(p: ClassParams, f: FractionalSeries) -> ExtremePointWeights:
    _check_mu(p, f)
    if f.sign is not Sign.MINUS:
        raise NotAMemberError("extreme-point decomposition needs a negative-coefficient series")
    eta = {n: xi_weight(p, n) * a / p.scale for n, a in f.coeffs.items()}
    rest = 1.0 - math.fsum(eta.values())
    if rest < -1e-12:
        raise NotAMemberError(f"series is not a member: eta_1 = {rest} < 0")
    eta[1] = max(rest, 0.0)
    # Absorb rounding so the weights sum to 1 exactly.
    eta[1] = max(eta[1] + 1.0 - math.fsum(eta.values()), 0.0)
    return ExtremePointWeights(eta)
