"""Closed-form value paired with a numerical oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .fps import DiskPoint

__all__ = ["BoundReport"]


@dataclass(frozen=True)
class BoundReport:
    """A closed-form bound next to the value an oracle measured.

    ``margin`` is signed so that a nonnegative value means the oracle
    respects the bound (``oracle - bound`` for lower bounds,
    ``bound - oracle`` for upper bounds).
    """

    kind: str
    closed_form: float
    oracle: float
    margin: float
    sharp_witness: Optional[DiskPoint] = None
    tolerance: float = 1e-9

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tolerance

    @classmethod
    def lower(cls, kind, bound, observed, witness=None, tolerance=1e-9) -> "BoundReport":
        return cls(kind, float(bound), float(observed), float(observed - bound), witness, tolerance)

    @classmethod
    def upper(cls, kind, bound, observed, witness=None, tolerance=1e-9) -> "BoundReport":
        return cls(kind, float(bound), float(observed), float(bound - observed), witness, tolerance)

    def to_json(self) -> dict:
        witness = None
        if self.sharp_witness is not None:
            witness = {"r": self.sharp_witness.r, "theta": self.sharp_witness.theta}
        return {
            "kind": self.kind,
            "closed_form": self.closed_form,
            "oracle": self.oracle,
            "margin": self.margin,
            "witness": witness,
            "holds": self.holds,
        }
