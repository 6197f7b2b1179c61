"""Splitting types of bundles on the projective line.

A splitting type is a non-increasing tuple of summand degrees.  Everything here
is pure integer arithmetic; slopes are ``fractions.Fraction``.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class NoSuchType(ValueError):
    pass


class InconsistentWindow(ValueError):
    pass


class RankDegreeMismatch(ValueError):
    pass


@dataclass(frozen=True, order=False)
class SplittingType:
    degrees: tuple

    def __post_init__(self):
        degs = tuple(sorted((int(x) for x in self.degrees), reverse=True))
        if not degs:
            raise ValueError("a splitting type needs rank >= 1")
        object.__setattr__(self, "degrees", degs)

    @classmethod
    def of(cls, *degrees: int) -> SplittingType:
        return cls(tuple(degrees))

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def degree(self) -> int:
        return sum(self.degrees)

    @property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    @property
    def top(self) -> int:
        return self.degrees[0]

    @property
    def bottom(self) -> int:
        return self.degrees[-1]

    @property
    def spread(self) -> int:
        return self.top - self.bottom

    def is_balanced(self, j: int = 1) -> bool:
        return self.spread <= j

    def counts(self) -> dict:
        return dict(Counter(self.degrees))

    def to_list(self) -> list:
        return list(self.degrees)

    def __iter__(self):
        return iter(self.degrees)

    def __len__(self):
        return self.rank

    def __repr__(self):
        return f"SplittingType{self.degrees}"


@dataclass(frozen=True)
class DegreeInterval:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def of_type(cls, t: SplittingType) -> DegreeInterval:
        return cls(t.bottom, t.top)

    @property
    def length(self) -> int:
        return self.hi - self.lo

    def contains(self, t: SplittingType | int) -> bool:
        if isinstance(t, SplittingType):
            return self.lo <= t.bottom and t.top <= self.hi
        return self.lo <= t <= self.hi

    def to_list(self) -> list:
        return [self.lo, self.hi]


def as_type(x) -> SplittingType:
    return x if isinstance(x, SplittingType) else SplittingType(tuple(x))


# -- arithmetic -------------------------------------------------------------

def twist(t: SplittingType, m: int) -> SplittingType:
    return SplittingType(tuple(x + m for x in t))


def dual(t: SplittingType) -> SplittingType:
    return SplittingType(tuple(-x for x in t))


def direct_sum(*types: SplittingType) -> SplittingType:
    return SplittingType(tuple(x for t in types for x in t))


def tensor(t1: SplittingType, t2: SplittingType) -> SplittingType:
    return SplittingType(tuple(x + y for x in t1 for y in t2))


def type_arithmetic(kind: str, *operands, m: int | None = None) -> SplittingType:
    ops = [as_type(o) for o in operands]
    if kind == "twist":
        if m is None:
            raise ValueError("twist needs m")
        return twist(ops[0], m)
    if kind == "dual":
        return dual(ops[0])
    if kind == "direct_sum":
        return direct_sum(*ops)
    if kind == "tensor":
        out = ops[0]
        for o in ops[1:]:
            out = tensor(out, o)
        return out
    raise ValueError(f"unknown type operation {kind!r}")


def balanced_type(rank: int, degree: int) -> SplittingType:
    if rank < 1:
        raise ValueError("rank must be >= 1")
    q, r = divmod(degree, rank)
    return SplittingType((q + 1,) * r + (q,) * (rank - r))


def parity_two_balanced_type(rank: int, degree: int, parity: int) -> SplittingType:
    """The 2-balanced type whose entries all have the given parity.

    Entries are ``k`` and ``k + 2`` with ``k = parity (mod 2)``.
    """
    if rank < 1:
        raise ValueError("rank must be >= 1")
    parity %= 2
    if (degree - rank * parity) % 2:
        raise NoSuchType(f"no rank-{rank} type of degree {degree} with all entries = {parity} mod 2")
    # halve: entries (x - parity)/2 form a balanced type of rank `rank`
    half = balanced_type(rank, (degree - rank * parity) // 2)
    return SplittingType(tuple(2 * x + parity for x in half))


# -- Hilbert functions --------------------------------------------------------

def hilbert_function(t: SplittingType, m: int) -> int:
    return sum(max(0, x + m + 1) for x in t)


def hilbert_window(t: SplittingType, m_lo: int, m_hi: int) -> list:
    return [(m, hilbert_function(t, m)) for m in range(m_lo, m_hi + 1)]


def type_from_hilbert(window: Sequence, rank: int | None = None) -> SplittingType:
    """Recover a splitting type from samples ``(m, h0(E(m)))``.

    The window must start at a twist with no sections, use consecutive twists,
    and end with two equal first differences (the rank).
    """
    window = [(int(m), int(h)) for m, h in window]
    if len(window) < 3:
        raise InconsistentWindow("need at least three samples")
    ms = [m for m, _ in window]
    if ms != list(range(ms[0], ms[0] + len(ms))):
        raise InconsistentWindow("twists must be consecutive")
    hs = [h for _, h in window]
    if hs[0] != 0:
        raise InconsistentWindow("window must start where there are no sections")
    diffs = [0] + [hs[i] - hs[i - 1] for i in range(1, len(hs))]
    if any(b < a for a, b in zip(diffs, diffs[1:])):
        raise InconsistentWindow(f"first differences are not monotone: {diffs}")
    if diffs[-1] != diffs[-2] or diffs[-1] == 0:
        raise InconsistentWindow(f"first differences never stabilise: {diffs}")
    if rank is not None and diffs[-1] != rank:
        raise InconsistentWindow(f"stable difference {diffs[-1]} != rank {rank}")
    degrees = []
    for i in range(1, len(hs)):
        # second difference at m counts the summands of degree -m
        degrees += [-ms[i]] * (diffs[i] - diffs[i - 1])
    return SplittingType(tuple(degrees))


# -- modifications and intervals --------------------------------------------

@dataclass(frozen=True)
class ModUpResult:
    result: SplittingType | DegreeInterval
    heuristic: bool


def generic_mod_up(t: SplittingType, k: int = 1, general: bool = True) -> ModUpResult:
    """Positive modification of rank ``k`` at one point.

    With ``general`` and ``k == 1`` the smallest summand goes up by one.  For
    ``k > 1`` the result iterates that step and is flagged heuristic.  Without
    ``general`` only the guaranteed envelope is returned.
    """
    if not 1 <= k <= t.rank:
        raise ValueError(f"modification rank {k} outside [1, {t.rank}]")
    if not general:
        return ModUpResult(DegreeInterval(t.bottom, t.top + k), heuristic=False)
    degs = list(t.degrees)
    for _ in range(k):
        degs[-1] += 1
        degs.sort(reverse=True)
    return ModUpResult(SplittingType(tuple(degs)), heuristic=k > 1)


def interval_combine(e, g: DegreeInterval) -> DegreeInterval:
    """Envelope for the middle term of an extension of ``g`` by ``e``."""
    if isinstance(e, SplittingType):
        e = DegreeInterval.of_type(e)
    if isinstance(g, SplittingType):
        g = DegreeInterval.of_type(g)
    return DegreeInterval(min(e.lo, g.lo), max(e.hi, g.hi))


class Dominance(enum.Enum):
    MORE_BALANCED = "MoreBalanced"
    LESS_BALANCED = "LessBalanced"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def _prefix_sums(t: SplittingType):
    out, acc = [], 0
    for x in t:
        acc += x
        out.append(acc)
    return out


def dominance_compare(t1: SplittingType, t2: SplittingType) -> Dominance:
    if t1.rank != t2.rank or t1.degree != t2.degree:
        raise RankDegreeMismatch(f"{t1} and {t2} differ in rank or degree")
    p1, p2 = _prefix_sums(t1), _prefix_sums(t2)
    le = all(x <= y for x, y in zip(p1, p2))
    ge = all(x >= y for x, y in zip(p1, p2))
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.MORE_BALANCED
    if ge:
        return Dominance.LESS_BALANCED
    return Dominance.INCOMPARABLE


def most_balanced(types: Iterable[SplittingType]) -> list:
    """Maximal elements (most balanced) of a collection under dominance, deduplicated."""
    uniq = sorted(set(types), key=lambda t: t.degrees)
    out = []
    for t in uniq:
        beaten = any(
            u.rank == t.rank and u.degree == t.degree and dominance_compare(u, t) is Dominance.MORE_BALANCED
            for u in uniq
        )
        if not beaten:
            out.append(t)
    return out
