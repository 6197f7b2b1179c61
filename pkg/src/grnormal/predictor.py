"""Closed-form predictions for normal bundles of rational curves in Gr(a, a+b).

Parameters are normalized to ``a <= b`` by the duality ``Gr(a, V) = Gr(b, V^*)``
before any formula is evaluated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .splitcore import (
    SplittingType,
    balanced_type,
    direct_sum,
    parity_two_balanced_type,
    tensor,
)


class DegenerateGrassmannian(ValueError):
    pass


class NotDegenerateRange(ValueError):
    pass


class Classification(str, enum.Enum):
    BALANCED = "Balanced"
    DEGENERACY = "Degeneracy"
    CHAR2 = "Char2"
    TANGENT_EXCEPTION = "TangentException"


PROVEN_UNBALANCED = (Classification.DEGENERACY, Classification.CHAR2, Classification.TANGENT_EXCEPTION)


@dataclass(frozen=True)
class GrassmannianParams:
    a: int
    b: int
    d: int
    char: int = 0
    swapped: bool = False

    @classmethod
    def normalized(cls, a: int, b: int, d: int, char: int = 0) -> GrassmannianParams:
        if a < 1 or b < 1 or d < 1:
            raise ValueError(f"need a, b, d >= 1, got {(a, b, d)}")
        if a > b:
            return cls(b, a, d, char, swapped=True)
        return cls(a, b, d, char, swapped=False)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.d, "char": self.char, "swapped": self.swapped}


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def division_data(a: int, b: int, d: int):
    """``(q1, r1, q2, r2)`` with ``d = a q1 + r1 = b q2 + r2``."""
    q1, r1 = divmod(d, a)
    q2, r2 = divmod(d, b)
    return q1, r1, q2, r2


def tangent_restriction_type(a: int, b: int, d: int) -> SplittingType:
    """Splitting type of the tangent bundle of Gr(a, a+b) on a general degree-d curve."""
    if a < 1 or b < 1 or d < 0:
        raise ValueError("need a, b >= 1 and d >= 0")
    q1, r1, q2, r2 = division_data(a, b, d)
    q = q1 + q2
    mult = {
        q + 2: r1 * r2,
        q + 1: r1 * (b - r2) + r2 * (a - r1),
        q: (a - r1) * (b - r2),
    }
    return SplittingType(tuple(k for k, c in mult.items() for _ in range(c)))


def normal_slope(a: int, b: int, d: int, n: int = 0) -> Fraction:
    if a * b == 1:
        raise DegenerateGrassmannian("Gr(1, 2) is a point-free line; normal bundle has rank 0")
    return Fraction((a + b) * d - 2 + a * n, a * b - 1)


def normal_rank_degree(a: int, b: int, d: int):
    return a * b - 1, (a + b) * d - 2


def char2_projective_type(b: int, d: int) -> SplittingType:
    """Normal bundle of a general degree-d rational curve in P^b in characteristic 2."""
    if b < 2 or d < 1:
        raise ValueError("need b >= 2 and d >= 1")
    q, r = divmod(d - 1, b - 1)
    return SplittingType((d + 2 * q + 2,) * r + (d + 2 * q,) * (b - 1 - r))


def degeneracy_decomposition(a: int, b: int, d: int) -> SplittingType:
    """Predicted type when the curve lies in a smaller Grassmannian.

    The normal bundle of the curve inside the smaller Grassmannian is taken to
    be balanced; that factor is a prediction, the rest is forced.
    """
    p = GrassmannianParams.normalized(a, b, d)
    a, b = p.a, p.b
    if 1 < d < a:
        # lies in {lambda containing a fixed (a-d)-space} = Gr(d, d+b); extra part Q^(a-d)
        inner = balanced_type(*normal_rank_degree(d, b, d))
        extra = [balanced_type(b, d)] * (a - d)
    elif a < d < b:
        # lies in Gr(a, a+d); extra part (S^vee)^(b-d)
        inner = balanced_type(*normal_rank_degree(a, d, d))
        extra = [balanced_type(a, d)] * (b - d)
    else:
        raise NotDegenerateRange(f"d={d} is outside (1, a) and (a, b) for (a, b) = ({a}, {b})")
    return direct_sum(inner, *extra)


def conjecture_conditions(a: int, b: int, d: int, char: int = 0) -> list:
    """Every exception family that applies, in listing order."""
    p = GrassmannianParams.normalized(a, b, d, char)
    a, b = p.a, p.b
    out = []
    if d < b and d not in (1, a):
        out.append(Classification.DEGENERACY)
    if char == 2 and a == 1 and b >= 2 and (d - 1) % (b - 1) != 0:
        out.append(Classification.CHAR2)
    if _tangent_forces_unbalanced(a, b, d):
        out.append(Classification.TANGENT_EXCEPTION)
    return out


def _tangent_forces_unbalanced(a: int, b: int, d: int) -> bool:
    q1, r1, q2, r2 = division_data(a, b, d)
    q = q1 + q2
    if r1 * r2 == 0 or q > (a - r1) * (b - r2):
        return False
    # T_C = O(2) can absorb a lone O(2) summand: only lines (q = 0, r1 = r2 = 1) escape
    return q >= 1 or r1 * r2 >= 2


def classify_conjecture(a: int, b: int, d: int, char: int = 0) -> Classification:
    conds = conjecture_conditions(a, b, d, char)
    return conds[0] if conds else Classification.BALANCED


def forced_summands(a: int, b: int, d: int) -> list:
    """Summands forced by comparing the tangent and normal bundle sequences."""
    p = GrassmannianParams.normalized(a, b, d)
    a, b = p.a, p.b
    q1, r1, q2, r2 = division_data(a, b, d)
    q = q1 + q2
    out = []
    if q - 1 < (a - r1) * (b - r2):
        out.append({"relation": "eq", "degree": q})
    if r1 * r2 != 0 and (q >= 1 or r1 * r2 >= 2):
        out.append({"relation": "ge", "degree": q + 2})
    return out


def satisfies_forced(t: SplittingType, forced: list) -> bool:
    for f in forced:
        if f["relation"] == "eq" and f["degree"] not in t.degrees:
            return False
        if f["relation"] == "ge" and t.top < f["degree"]:
            return False
    return True


@dataclass
class PredictionReport:
    params: GrassmannianParams
    mu: Fraction
    tangent_type: SplittingType
    classification: list
    predicted_type: SplittingType | None
    forced: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    theorem_guarantee: str = "2-balanced"

    @property
    def primary(self) -> Classification:
        return self.classification[0]

    @property
    def proven_unbalanced(self) -> bool:
        return self.primary is not Classification.BALANCED

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "mu": frac_str(self.mu),
            "tangent_type": self.tangent_type.to_list(),
            "classification": [c.value for c in self.classification],
            "predicted_type": None if self.predicted_type is None else self.predicted_type.to_list(),
            "forced_summands": self.forced,
            "proven_unbalanced": self.proven_unbalanced,
            "theorem_guarantee": self.theorem_guarantee,
            "notes": self.notes,
        }


def predict_report(a: int, b: int, d: int, char: int = 0) -> PredictionReport:
    p = GrassmannianParams.normalized(a, b, d, char)
    if p.b < 2:
        raise DegenerateGrassmannian(f"Gr({a}, {a + b}) has no normal bundle to speak of")
    rank, degree = normal_rank_degree(p.a, p.b, d)
    conds = conjecture_conditions(p.a, p.b, d, char) or [Classification.BALANCED]
    primary = conds[0]
    notes = []
    forced = []
    if primary is Classification.BALANCED:
        predicted = balanced_type(rank, degree)
        notes.append("conjectured balanced")
    elif primary is Classification.DEGENERACY:
        predicted = degeneracy_decomposition(p.a, p.b, d)
        notes.append("inner normal bundle assumed balanced")
    elif primary is Classification.CHAR2:
        predicted = char2_projective_type(p.b, d)
    else:
        predicted = None
        forced = forced_summands(p.a, p.b, d)
    if Classification.TANGENT_EXCEPTION in conds and not forced:
        forced = forced_summands(p.a, p.b, d)
    if char == 2 and p.a == 1 and primary is not Classification.CHAR2:
        # same numbers as the parity formula whenever both apply
        notes.append("characteristic 2: every summand has the parity of d")
    return PredictionReport(
        params=p,
        mu=normal_slope(p.a, p.b, d),
        tangent_type=tangent_restriction_type(p.a, p.b, d),
        classification=conds,
        predicted_type=predicted,
        forced=forced,
        notes=notes,
    )
