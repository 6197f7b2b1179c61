from __future__ import annotations

import json
from fractions import Fraction

import pytest
import sympy as sp

from grnormal.induction import (
    Certificate,
    InstanceParams,
    LEMMA_IDS,
    Regime,
    certify,
    check_inequalities,
    classify_regime,
    dm1_checks,
    dpos_coefficient,
    dpos_lhs,
    dpos_lhs_as_printed,
    exception_census,
    is_e1,
    is_e2,
    revalidate,
    single_ineq_lhs,
    sweep_lemmas,
)


def test_instance_validation():
    with pytest.raises(ValueError):
        InstanceParams(2, 1, 3, 0)
    with pytest.raises(ValueError):
        InstanceParams(2, 2, 0, 0)
    inst = InstanceParams(2, 2, 3, 0)
    assert (inst.mu, inst.rank, inst.degree) == (Fraction(10, 3), 3, 10)


@pytest.mark.parametrize("inst,regime,value", [
    ((2, 2, 2, 5), Regime.CASE1, None),
    ((2, 2, 3, 0), Regime.CASE2, Fraction(11, 6)),
    ((3, 2, 7, 0), Regime.CASE3, Fraction(31, 10)),
    ((4, 3, 1, 0), Regime.BASE_LINE, None),
    ((1, 4, 5, 2), Regime.BASE_PROJECTIVE, None),
])
def test_classify_regime_examples(inst, regime, value):
    assert classify_regime(InstanceParams(*inst)) == (regime, value)


def test_dm1_example():
    checks = dm1_checks(2, 2, 1, 1)
    assert [c.passed for c in checks] == [True, True]
    assert checks[0].lhs == Fraction(-1, 6)


def test_single_ineq_example_is_e1_exception():
    assert single_ineq_lhs(3, 3, 2, 0) == 4 < 6
    assert is_e1(3, 3, 2, 0) and not is_e2(3, 3, 2, 0)
    names = [c.name for c in check_inequalities(InstanceParams(3, 3, 2, 0))]
    assert "e1_delta_below_one" in names and "single_ineq" not in names


def test_dpos_example():
    assert dpos_coefficient(3, 2) == 5
    assert dpos_lhs(3, 2, 7, 0) == 35 >= 4
    assert dpos_lhs_as_printed(3, 2, 7, 0) == 28 >= 4


def test_dpos_is_the_cleared_case3_inequality():
    a, b, d, n = sp.symbols("a b d n")
    mu = ((a + b) * d - 2 + a * n) / (a * b - 1)
    eps = mu - (d + n) / b
    lhs = (d + (a - 2) * eps) / (a - 1) + n
    rhs = ((a + b - 1) * d + (a - 1) * n - b * eps - 2) / ((a - 1) * b - 1)
    cleared = sp.expand(dpos_lhs(a, b, d, n) - 2 * b)
    assert sp.simplify((rhs - lhs) * b * (a - 1) * (a * b - 1) - cleared) == 0
    # the other Case3 inequality clears to the same polynomial
    assert sp.simplify(((d + n) / b - (d - eps) / (a - 1) - n) * b * (a - 1) * (a * b - 1) - cleared) == 0
    # the variant with ab - a - 1 is weaker by (a - b)^2 d
    printed = sp.expand(dpos_lhs_as_printed(a, b, d, n) - 2 * b)
    assert sp.expand(cleared - printed - (a - b) ** 2 * d) == 0


def test_single_ineq_rearrangements():
    a, b, d, n = sp.symbols("a b d n")
    mu = ((a + b) * d - 2 + a * n) / (a * b - 1)
    delta = mu - d / a - n
    lhs = (d + (b - 2) * delta) / (b - 1)
    rhs = ((a + b - 1) * d - a * delta - 2) / (a * (b - 1) - 1)
    cleared = sp.expand(single_ineq_lhs(a, b, d, n) - 2 * a)
    ratio = sp.simplify((rhs - lhs) / cleared)
    assert sp.simplify(ratio - 1 / (a * (b - 1) * (a * b - 1))) == 0


def test_dm1_rearrangements():
    a, b, d, n = sp.symbols("a b d n")
    mu = ((a + b) * d - 2 + a * n) / (a * b - 1)
    first = (a ** 2 * (b - 2) + (a + 1) * (a - 2) + 1) * (d + n - 2) + n + a ** 2 * (b - 2) + (a - 2)
    assert sp.simplify((d - 1 - (mu - d / a - n)) * a * (a * b - 1) - first) == 0
    second = (b ** 2 + 1) * (d - 1) + (b - 1) ** 2 + n
    assert sp.simplify(mu - (d + n) / b - second / (b * (a * b - 1))) == 0


def test_certify_2_2_3():
    cert = certify(2, 2, 3, 0)
    assert cert.regime is Regime.CASE2 and cert.delta == Fraction(11, 6)
    assert cert.conclusion.interval.to_list() == [2, 4]
    assert [c.instance.as_tuple() for c in cert.children] == [(1, 2, 2, 1), (1, 2, 1, 2)]
    assert revalidate(cert)


def test_certify_lines_and_projective_base():
    for a in range(1, 6):
        for b in range(2, 6):
            cert = certify(a, b, 1, 0)
            assert cert.regime is Regime.BASE_LINE
            assert cert.conclusion.interval.to_list() == ([1, 1] if a == 1 else [0, 1])
    for b in range(2, 6):
        for d in range(1, 8):
            for n in range(0, 4):
                assert certify(1, b, d, n).two_balanced


def test_first_e2_instance():
    cert = certify(9, 3, 3, 1)
    assert cert.regime is Regime.CASE2 and cert.exception == "e2" and cert.delta == Fraction(25, 78)


def test_certificate_properties_small_box():
    for a in range(2, 6):
        for b in range(2, 6):
            for d in range(1, 12):
                for n in range(0, 5):
                    cert = certify(a, b, d, n)
                    if n == 0:
                        assert cert.two_balanced
                    if cert.two_balanced:
                        iv = cert.conclusion.interval
                        assert iv.length <= 2
                        mu = cert.instance.mu
                        assert iv.lo <= mu <= iv.hi
                    else:
                        assert cert.regime is Regime.CASE1
                    assert cert.depth() <= a + b
                    assert revalidate(cert)


def test_certificate_json_roundtrip():
    tree = certify(3, 2, 7, 0).to_dict()
    back = json.loads(json.dumps(tree))
    assert back["regime"] == "Case3" and back["epsilon"] == "31/10"
    assert all(c["pass"] for c in back["checks"])


def test_tampered_certificate_fails_revalidation():
    cert = certify(2, 2, 3, 0)
    bad_checks = tuple(c if c.name != "single_ineq" else type(c)(c.name, c.lhs, c.rhs, c.relation, False)
                       for c in cert.checks)
    tampered = Certificate(cert.instance, cert.regime, cert.conclusion, bad_checks, cert.children, cert.delta)
    assert not revalidate(tampered)


def test_sweep_small_box_is_clean():
    reports = sweep_lemmas((2, 10), (2, 10), (1, 40), (0, 20))
    assert [r.lemma for r in reports] == list(LEMMA_IDS)
    assert all(r.passed and r.checked > 0 for r in reports)


def test_printed_dpos_variant_has_counterexamples():
    reports = {r.lemma: r for r in sweep_lemmas((2, 6), (2, 6), (1, 20), (0, 8), diagnostics=True)}
    assert reports["dpos"].passed
    bad = reports["dpos_as_printed"].violations
    assert (4, 2, 5, 2) in [tuple(map(int, v)) for v in bad]
    assert dpos_lhs_as_printed(4, 2, 5, 2) < 4 <= dpos_lhs(4, 2, 5, 2)


def test_exception_census():
    census = exception_census((2, 10), (2, 10), (1, 40), (0, 3))
    assert all(a == b and n == 0 and d <= a - 1 for a, b, d, n in census["e1"])
    assert all(single_ineq_lhs(*t) < 2 * t[0] for t in census["e1"])
    assert census["e2"] == [(9, 3, 3, 1)]
    # (a - b) must divide a (b - 1): none for these pairs
    for a, b in [(8, 3), (5, 2), (7, 2)]:
        assert not any(is_e2(a, b, d, 1) for d in range(1, 60))


def test_sweep_overflow_guard():
    with pytest.raises(OverflowError):
        sweep_lemmas((2, 10**6), (2, 10**6), (1, 10**6), (0, 10**6))
