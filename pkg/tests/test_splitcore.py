from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grnormal.splitcore import (
    DegreeInterval,
    Dominance,
    InconsistentWindow,
    NoSuchType,
    RankDegreeMismatch,
    SplittingType,
    balanced_type,
    dominance_compare,
    dual,
    generic_mod_up,
    hilbert_function,
    hilbert_window,
    interval_combine,
    most_balanced,
    parity_two_balanced_type,
    tensor,
    twist,
    type_arithmetic,
    type_from_hilbert,
)

types = st.lists(st.integers(-10, 10), min_size=1, max_size=12).map(lambda xs: SplittingType(tuple(xs)))


def T(*xs):
    return SplittingType(xs)


def test_normal_form_and_basic_invariants():
    t = T(0, 1, 1)
    assert t.degrees == (1, 1, 0)
    assert (t.rank, t.degree, t.slope) == (3, 2, Fraction(2, 3))
    assert t.is_balanced() and t.is_balanced(2)
    assert not T(3, 1).is_balanced() and T(3, 1).is_balanced(2)
    with pytest.raises(ValueError):
        SplittingType(())


@pytest.mark.parametrize("kind,ops,m,expected", [
    ("twist", [(3, 2, 2)], 1, (4, 3, 3)),
    ("tensor", [(1, 0), (1, 0)], None, (2, 1, 1, 0)),
    ("dual", [(1, 1, 0)], None, (0, -1, -1)),
    ("direct_sum", [(1,), (3, 0)], None, (3, 1, 0)),
])
def test_type_arithmetic_examples(kind, ops, m, expected):
    assert type_arithmetic(kind, *ops, m=m).degrees == expected


def test_type_arithmetic_rejects_unknown():
    with pytest.raises(ValueError):
        type_arithmetic("wedge", (1,))


@pytest.mark.parametrize("rank,degree,expected", [(3, 10, (4, 3, 3)), (2, 14, (7, 7)), (5, 13, (3, 3, 3, 2, 2)),
                                                  (3, -1, (0, 0, -1))])
def test_balanced_type(rank, degree, expected):
    assert balanced_type(rank, degree).degrees == expected


def test_parity_two_balanced_type():
    assert parity_two_balanced_type(2, 14, 0).degrees == (8, 6)
    assert parity_two_balanced_type(2, 14, 1).degrees == (7, 7)
    with pytest.raises(NoSuchType):
        parity_two_balanced_type(3, 10, 1)


def test_parity_no_such_type_agrees_with_enumeration():
    # three odd entries always sum to an odd number
    import itertools
    odd = range(-3, 12, 2)
    found = [c for c in itertools.combinations_with_replacement(odd, 3) if sum(c) == 10 and max(c) - min(c) <= 2]
    assert found == []


def test_hilbert_examples():
    t = T(1, 1, 0)
    assert [h for _, h in hilbert_window(t, -2, 1)] == [0, 2, 5, 8]
    assert type_from_hilbert([(-2, 0), (-1, 2), (0, 5), (1, 8)]) == t
    assert [hilbert_function(T(7), m) for m in (-9, -8, -7, -6)] == [0, 0, 1, 2]


@pytest.mark.parametrize("window", [
    [(0, 0), (1, 1)],                          # too short
    [(0, 0), (2, 1), (3, 2)],                  # gap in twists
    [(0, 1), (1, 2), (2, 3)],                  # sections at the start
    [(0, 0), (1, 2), (2, 3), (3, 4)],          # differences decrease
    [(0, 0), (1, 1), (2, 3)],                  # not yet stable
])
def test_type_from_hilbert_rejects(window):
    with pytest.raises(InconsistentWindow):
        type_from_hilbert(window)


def test_type_from_hilbert_rank_check():
    with pytest.raises(InconsistentWindow):
        type_from_hilbert(hilbert_window(T(1, 0), -2, 2), rank=3)


@settings(max_examples=200, deadline=None)
@given(types)
def test_hilbert_round_trip(t):
    window = hilbert_window(t, -t.top - 1, -t.bottom + 1)
    assert type_from_hilbert(window) == t


@settings(max_examples=100, deadline=None)
@given(types, st.integers(-15, 15))
def test_hilbert_first_difference_counts_summands(t, m):
    assert hilbert_function(t, m) - hilbert_function(t, m - 1) == sum(1 for x in t if x >= -m)


@settings(max_examples=100, deadline=None)
@given(types, st.integers(-5, 5))
def test_dual_and_twist_are_involutive(t, m):
    assert dual(dual(t)) == t
    assert twist(twist(t, m), -m) == t


def test_tensor_of_balanced_rank_degree():
    for a in range(1, 31, 3):
        for b in range(1, 31, 4):
            for d in (0, 1, 7, 50, 100):
                t = tensor(balanced_type(a, d), balanced_type(b, d))
                assert (t.rank, t.degree) == (a * b, (a + b) * d)


def test_generic_mod_up_examples():
    assert generic_mod_up(T(2, 0)).result == T(2, 1)
    assert generic_mod_up(T(7, 7)).result == T(8, 7)
    env = generic_mod_up(T(2, 1), general=False)
    assert env.result == DegreeInterval(1, 3) and not env.heuristic
    assert generic_mod_up(T(3, 3, 3), k=2).heuristic
    with pytest.raises(ValueError):
        generic_mod_up(T(1,), k=2)


@settings(max_examples=150, deadline=None)
@given(types)
def test_generic_mod_up_rank_one_properties(t):
    out = generic_mod_up(t).result
    assert out.degree == t.degree + 1
    assert out.spread <= max(1, t.spread)


def test_interval_combine():
    assert interval_combine(DegreeInterval(2, 3), DegreeInterval(2, 4)) == DegreeInterval(2, 4)
    assert interval_combine(T(3, 3), DegreeInterval(3, 3)) == DegreeInterval(3, 3)
    assert interval_combine(DegreeInterval(1, 2), DegreeInterval(4, 5)) == DegreeInterval(1, 5)
    with pytest.raises(ValueError):
        DegreeInterval(3, 2)


def test_dominance_examples():
    assert dominance_compare(T(4, 3, 3), T(4, 4, 2)) is Dominance.MORE_BALANCED
    assert dominance_compare(T(3, 3), T(3, 3)) is Dominance.EQUAL
    assert dominance_compare(T(5, 3, 2), T(4, 4, 2)) is Dominance.LESS_BALANCED
    assert dominance_compare(T(4, 4, 0, 0), T(5, 1, 1, 1)) is Dominance.INCOMPARABLE
    with pytest.raises(RankDegreeMismatch):
        dominance_compare(T(1, 1), T(2, 1))


def _random_same_shape(rng, rank, degree):
    while True:
        xs = [rng.randint(-4, 6) for _ in range(rank - 1)]
        last = degree - sum(xs)
        if -4 <= last <= 6:
            return SplittingType(tuple(xs + [last]))


def test_dominance_is_a_partial_order():
    rng = random.Random(3)
    le = (Dominance.MORE_BALANCED, Dominance.EQUAL)
    for _ in range(2000):
        rank = rng.randint(2, 5)
        degree = rng.randint(-3, 10)
        x, y, z = (_random_same_shape(rng, rank, degree) for _ in range(3))
        if dominance_compare(x, y) in le and dominance_compare(y, x) in le:
            assert x == y
        if dominance_compare(x, y) in le and dominance_compare(y, z) in le:
            assert dominance_compare(x, z) in le


def test_most_balanced():
    assert most_balanced([T(4, 2), T(3, 3), T(5, 1), T(3, 3)]) == [T(3, 3)]
    maxima = most_balanced([T(4, 4, 0, 0), T(5, 1, 1, 1)])
    assert set(maxima) == {T(4, 4, 0, 0), T(5, 1, 1, 1)}
