"""Exact replay of the inductive 2-balancedness argument.

``certify(a, b, d, n)`` follows the induction on ``a + b`` for the bundle
obtained from the normal bundle of a general degree-``d`` curve in
Gr(a, a+b) by ``n`` general positive modifications towards pointing bundles.
Every numerical step is checked with ``Fraction`` arithmetic and recorded.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .predictor import char2_projective_type, frac_str
from .splitcore import DegreeInterval, SplittingType, balanced_type, generic_mod_up


class ProofStepFailed(RuntimeError):
    def __init__(self, name, inst):
        super().__init__(f"inequality {name!r} fails at {inst}")
        self.name = name
        self.inst = inst


class RecursionInvariantBroken(RuntimeError):
    pass


class Regime(str, enum.Enum):
    BASE_LINE = "BaseLine"
    BASE_PROJECTIVE = "BaseProjective"
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


@dataclass(frozen=True)
class InstanceParams:
    a: int
    b: int
    d: int
    n: int = 0

    def __post_init__(self):
        if self.a < 1 or self.b < 2 or self.d < 1 or self.n < 0:
            raise ValueError(f"invalid instance {self.as_tuple()}: need a>=1, b>=2, d>=1, n>=0")

    def as_tuple(self):
        return (self.a, self.b, self.d, self.n)

    @property
    def mu(self) -> Fraction:
        a, b, d, n = self.as_tuple()
        return Fraction((a + b) * d - 2 + a * n, a * b - 1)

    @property
    def sub_slope(self) -> Fraction:
        """Slope of the twisted tautological dual ``S^vee(n)``."""
        return Fraction(self.d, self.a) + self.n

    @property
    def quot_slope(self) -> Fraction:
        """Slope of ``Q`` twisted down the modification points."""
        return Fraction(self.d + self.n, self.b)

    @property
    def rank(self) -> int:
        return self.a * self.b - 1

    @property
    def degree(self) -> int:
        return (self.a + self.b) * self.d - 2 + self.a * self.n

    def to_dict(self):
        return {"a": self.a, "b": self.b, "d": self.d, "n": self.n}


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str
    passed: bool

    def to_dict(self):
        return {"name": self.name, "lhs": frac_str(Fraction(self.lhs)), "relation": self.relation,
                "rhs": frac_str(Fraction(self.rhs)), "pass": self.passed}


_RELATIONS = {
    "<=": lambda x, y: x <= y,
    "<": lambda x, y: x < y,
    ">=": lambda x, y: x >= y,
    ">": lambda x, y: x > y,
    "==": lambda x, y: x == y,
}


def _check(name, lhs, rel, rhs) -> Check:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    return Check(name, lhs, rhs, rel, _RELATIONS[rel](lhs, rhs))


@dataclass(frozen=True)
class Conclusion:
    kind: str  # "TwoBalanced" or "BoundedAbove"
    interval: DegreeInterval | None = None
    cap: int | None = None
    # True when the interval only bounds the summands on the branch where neither
    # specialization is 2-balanced outright; 2-balancedness itself is unconditional.
    conditional: bool = False

    def to_dict(self):
        if self.kind == "TwoBalanced":
            return {"kind": self.kind, "interval": self.interval.to_list(), "conditional": self.conditional}
        return {"kind": self.kind, "cap": self.cap}


@dataclass(frozen=True)
class Certificate:
    instance: InstanceParams
    regime: Regime
    conclusion: Conclusion
    checks: tuple = ()
    children: tuple = ()
    delta: Fraction | None = None
    epsilon: Fraction | None = None
    exception: str | None = None
    base_type: SplittingType | None = None

    @property
    def two_balanced(self) -> bool:
        return self.conclusion.kind == "TwoBalanced"

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def unique_nodes(self) -> list:
        """Distinct nodes of the certificate DAG (shared sub-certificates appear once)."""
        seen, out, stack = set(), [], [self]
        while stack:
            node = stack.pop()
            key = node.instance.as_tuple()
            if key in seen:
                continue
            seen.add(key)
            out.append(node)
            stack.extend(node.children)
        return out

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def to_dict(self) -> dict:
        out = {
            "instance": self.instance.to_dict(),
            "regime": self.regime.value,
            "mu": frac_str(self.instance.mu),
        }
        if self.delta is not None:
            out["delta"] = frac_str(self.delta)
        if self.epsilon is not None:
            out["epsilon"] = frac_str(self.epsilon)
        if self.exception:
            out["exception"] = self.exception
        if self.base_type is not None:
            out["base_type"] = self.base_type.to_list()
        out["checks"] = [c.to_dict() for c in self.checks]
        out["children"] = [c.to_dict() for c in self.children]
        out["conclusion"] = self.conclusion.to_dict()
        return out


def _floor(x: Fraction) -> int:
    return math.floor(x)


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


# -- regime ------------------------------------------------------------------

def classify_regime(inst: InstanceParams):
    """Return ``(regime, delta_or_epsilon)``; the second entry is None outside Case2/Case3."""
    a, b, d, n = inst.as_tuple()
    if (d, n) == (1, 0):
        return Regime.BASE_LINE, None
    if a == 1:
        return Regime.BASE_PROJECTIVE, None
    mu, x, y = inst.mu, inst.sub_slope, inst.quot_slope
    if x > mu:
        return Regime.CASE1, None
    if y <= x:
        return Regime.CASE2, mu - x
    return Regime.CASE3, mu - y


# -- named inequalities -----------------------------------------------------

def is_e1(a, b, d, n) -> bool:
    return n == 0 and b == a and d <= a - 1


def is_e2(a, b, d, n) -> bool:
    return n == 1 and 3 * b <= a + 1 and d * (a - b) == a * (b - 1)


def dm1_checks(a, b, d, n) -> list:
    inst = InstanceParams(a, b, d, n)
    mu = inst.mu
    return [
        _check("dm1_delta_le_d_minus_1", mu - inst.sub_slope, "<=", d - 1),
        _check("dm1_quot_slope_lt_mu", inst.quot_slope, "<", mu),
    ]


def single_ineq_lhs(a, b, d, n) -> int:
    return ((b - a) * (a * b - a - 1) + 2) * d + (a * a * (b - 1) ** 2 - a * b + 2 * a) * n


def dpos_coefficient(a, b) -> int:
    return (a - b) * (a * b - b - 1) + 2


def dpos_lhs(a, b, d, n) -> int:
    """Both Case3 inequalities cleared of denominators; mirror image of ``single_ineq_lhs``."""
    return dpos_coefficient(a, b) * d - (a * a * b * b - a * a * b - a * b * b + a + b - 2) * n


def dpos_lhs_as_printed(a, b, d, n) -> int:
    """Variant with ``ab - a - 1`` in the d-coefficient; weaker than the true rearrangement by ``(a-b)^2 d``."""
    return ((a - b) * (a * b - a - 1) + 2) * d - (a * a * b * b - a * a * b - a * b * b + a + b - 2) * n


def case2_checks(inst: InstanceParams, delta: Fraction) -> tuple:
    a, b, d, n = inst.as_tuple()
    x = inst.sub_slope
    fd, cd = _floor(delta), _ceil(delta)
    checks = [_check("case2_assumption_quot_le_sub", inst.quot_slope, "<=", x),
              _check("case2_assumption_sub_le_mu", x, "<=", inst.mu),
              _check("delta_nonnegative", delta, ">=", 0)]
    checks += dm1_checks(a, b, d, n)
    exception = None
    lhs = single_ineq_lhs(a, b, d, n)
    if lhs >= 2 * a:
        checks.append(_check("single_ineq", lhs, ">=", 2 * a))
        # the two stronger forms, both equivalent to the single inequality
        checks.append(_check("delta1_nfc_floor", Fraction(d + (b - 2) * delta, b - 1), "<=",
                             Fraction((a + b - 1) * d - a * delta - 2, a * (b - 1) - 1)))
        checks.append(_check("delta1_nfc_ceil", Fraction(d - delta, b - 1), "<=", x))
    else:
        exception = "e1" if is_e1(a, b, d, n) else "e2" if is_e2(a, b, d, n) else None
        if exception is None:
            checks.append(_check("single_ineq", lhs, ">=", 2 * a))
        else:
            checks.append(_check(f"{exception}_delta_positive", delta, ">", 0))
            checks.append(_check(f"{exception}_delta_below_one", delta, "<", 1))
            checks.append(_check(f"{exception}_final_floor",
                                 (b * b - 2 * b + 2) * (d - 1) + (b - 2) ** 2, ">=", 0))
            checks.append(_check(f"{exception}_final_ceil",
                                 (b - a - 1) * d + (a * b - a) * n + a, ">=", 0))
    checks.append(_check("delta1_floor", Fraction(d + (b - 2) * fd, b - 1), "<=",
                         Fraction((a + b - 1) * d - a * fd - 2, a * (b - 1) - 1)))
    checks.append(_check("delta1_ceil", Fraction(d - cd, b - 1), "<=", x))
    # the child inequalities themselves
    checks.append(_check("ineq_floor", Fraction(d - fd, b - 1) + fd, "<=",
                         Fraction((a + b - 1) * (d - fd) - 2 + (b - 1) * fd, a * (b - 1) - 1)))
    checks.append(_check("ineq_ceil", _ceil(Fraction(d - cd, b - 1) + cd), "<=", _ceil(x) + cd))
    checks.append(_check("sub_slope_floor_le_mu", x + fd, "<=", inst.mu))
    checks.append(_check("sub_slope_ceil_ge_mu", x + cd, ">=", inst.mu))
    return tuple(checks), exception


def case3_checks(inst: InstanceParams, eps: Fraction) -> tuple:
    a, b, d, n = inst.as_tuple()
    y = inst.quot_slope
    fe, ce = _floor(eps), _ceil(eps)
    checks = [_check("case3_assumption_sub_lt_quot", inst.sub_slope, "<", y),
              _check("case3_forces_a_gt_b", a, ">", b),
              _check("epsilon_positive", eps, ">", 0)]
    checks += dm1_checks(a, b, d, n)
    checks.append(_check("epsilon_le_d_minus_1", eps, "<=", d - 1))
    checks.append(_check("dpos_coefficient_positive", dpos_coefficient(a, b), ">", 0))
    checks.append(_check("dpos", dpos_lhs(a, b, d, n), ">=", 2 * b))
    checks.append(_check("epsilon2_nfc_floor", Fraction(d + (a - 2) * eps, a - 1) + n, "<=",
                         Fraction((a + b - 1) * d + (a - 1) * n - b * eps - 2, (a - 1) * b - 1)))
    checks.append(_check("epsilon2_nfc_ceil", Fraction(d - eps, a - 1) + n, "<=", y))
    checks.append(_check("epsilon2_floor", Fraction(d + (a - 2) * fe, a - 1) + n, "<=",
                         Fraction((a + b - 1) * d + (a - 1) * n - b * fe - 2, (a - 1) * b - 1)))
    checks.append(_check("epsilon2_ceil", Fraction(d - ce, a - 1) + n, "<=", y))
    checks.append(_check("ineq_floor", Fraction(d - fe, a - 1) + n + fe, "<=",
                         Fraction((a + b - 1) * (d - fe) - 2 + (a - 1) * (n + fe), (a - 1) * b - 1)))
    checks.append(_check("ineq_ceil", _ceil(Fraction(d - ce, a - 1) + n + ce), "<=", _ceil(y) + ce))
    checks.append(_check("quot_slope_floor_le_mu", y + fe, "<=", inst.mu))
    checks.append(_check("quot_slope_ceil_ge_mu", y + ce, ">=", inst.mu))
    return tuple(checks), None


def check_inequalities(inst: InstanceParams, context: Regime | None = None) -> list:
    """Evaluate every named inequality relevant to the instance's regime."""
    regime, value = classify_regime(inst)
    if context is not None and context is not regime:
        raise ValueError(f"{inst.as_tuple()} is in {regime.value}, not {context.value}")
    if regime is Regime.CASE1:
        out = [_check("case1_sub_gt_mu", inst.sub_slope, ">", inst.mu)]
        out += dm1_checks(*inst.as_tuple())
        return out
    if regime is Regime.CASE2:
        return list(case2_checks(inst, value)[0])
    if regime is Regime.CASE3:
        return list(case3_checks(inst, value)[0])
    return []


# -- certificates ------------------------------------------------------------

def line_type(a: int, b: int) -> SplittingType:
    return SplittingType((1,) * (a + b - 2) + (0,) * ((a - 1) * (b - 1)))


def projective_base_type(b: int, d: int, n: int) -> SplittingType:
    """Characteristic-2 normal type in P^b after ``n`` general rank-1 modifications.

    Its span contains the balanced type of the same degree, so the interval it
    spans is valid in every characteristic.
    """
    t = char2_projective_type(b, d)
    for _ in range(n):
        t = generic_mod_up(t, 1).result
    return t


def _require(checks, inst):
    for c in checks:
        if not c.passed:
            raise ProofStepFailed(c.name, inst.as_tuple())


def _child(parent: InstanceParams, a, b, d, n) -> Certificate:
    if d < 1:
        raise RecursionInvariantBroken(f"child degree {d} < 1 below {parent.as_tuple()}")
    if a + b >= parent.a + parent.b:
        raise RecursionInvariantBroken(f"a + b does not decrease below {parent.as_tuple()}")
    return certify(a, b, d, n)


@lru_cache(maxsize=None)
def certify(a: int, b: int, d: int, n: int = 0) -> Certificate:
    inst = InstanceParams(a, b, d, n)
    regime, value = classify_regime(inst)

    if regime is Regime.BASE_LINE:
        t = line_type(a, b)
        return Certificate(inst, regime, Conclusion("TwoBalanced", DegreeInterval.of_type(t)), base_type=t)

    if regime is Regime.BASE_PROJECTIVE:
        t = projective_base_type(b, d, n)
        checks = (_check("base_type_two_balanced", t.spread, "<=", 2),
                  _check("base_type_degree", t.degree, "==", inst.degree),
                  _check("balanced_type_inside",
                         int(DegreeInterval.of_type(t).contains(balanced_type(inst.rank, inst.degree))), "==", 1))
        _require(checks, inst)
        return Certificate(inst, regime, Conclusion("TwoBalanced", DegreeInterval.of_type(t)), checks=checks,
                           base_type=t)

    if regime is Regime.CASE1:
        checks = tuple(check_inequalities(inst, Regime.CASE1))
        _require(checks, inst)
        child = _child(inst, b - 1, a, d, 0)
        checks += (_check("child_two_balanced", int(child.two_balanced), "==", 1),)
        _require(checks, inst)
        return Certificate(inst, regime, Conclusion("BoundedAbove", cap=_ceil(inst.sub_slope)),
                           checks=checks, children=(child,))

    if regime is Regime.CASE2:
        delta = value
        checks, exception = case2_checks(inst, delta)
        _require(checks, inst)
        fd, cd = _floor(delta), _ceil(delta)
        kids = [_child(inst, b - 1, a, d - fd, fd)]
        if cd != fd:
            kids.append(_child(inst, b - 1, a, d - cd, cd))
        checks += (_check("floor_child_two_balanced", int(kids[0].two_balanced), "==", 1),)
        x = inst.sub_slope
        interval = DegreeInterval(_floor(x) + fd, _ceil(x) + cd)
        checks += (_check("interval_length", interval.length, "<=", 2),)
        _require(checks, inst)
        return Certificate(inst, regime, Conclusion("TwoBalanced", interval, conditional=True), checks=checks,
                           children=tuple(kids), delta=delta, exception=exception)

    eps = value
    checks, _ = case3_checks(inst, eps)
    _require(checks, inst)
    fe, ce = _floor(eps), _ceil(eps)
    kids = [_child(inst, a - 1, b, d - fe, n + fe)]
    if ce != fe:
        kids.append(_child(inst, a - 1, b, d - ce, n + ce))
    checks += (_check("floor_child_two_balanced", int(kids[0].two_balanced), "==", 1),)
    y = inst.quot_slope
    interval = DegreeInterval(_floor(y) + fe, _ceil(y) + ce)
    checks += (_check("interval_length", interval.length, "<=", 2),)
    _require(checks, inst)
    return Certificate(inst, regime, Conclusion("TwoBalanced", interval, conditional=True), checks=checks,
                       children=tuple(kids), epsilon=eps)


def revalidate(cert: Certificate) -> bool:
    """Recompute every node's inequality checks and compare with the stored ones."""
    for node in cert.unique_nodes():
        if node.regime in (Regime.BASE_LINE, Regime.BASE_PROJECTIVE):
            continue
        fresh = check_inequalities(node.instance, node.regime)
        stored = [c for c in node.checks if not c.name.endswith("two_balanced") and c.name != "interval_length"]
        if [c.to_dict() for c in fresh] != [c.to_dict() for c in stored]:
            return False
        if not all(c.passed for c in node.checks):
            return False
    return True


# -- exhaustive sweeps ---------------------------------------------------------

@dataclass
class LemmaReport:
    lemma: str
    box: dict
    checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"lemma": self.lemma, "box": self.box, "checked": self.checked,
                "violations": len(self.violations), "pass": self.passed}


LEMMA_IDS = ("dm1", "single_ineq", "exceptions", "dpos", "case2_children", "case3_children")
DIAGNOSTIC_IDS = ("dpos_as_printed",)


def _overflow_guard(*bounds):
    big = max(abs(int(x)) for x in bounds) + 2
    # every polynomial evaluated below has total degree <= 5 with modest coefficients
    if 64 * big**5 >= 2**62:
        raise OverflowError(f"box bound {big} too large for exact int64 evaluation")


def _cdiv(num, den):
    return -((-num) // den)


def sweep_lemmas(a_range, b_range, d_range, n_range, max_violations: int = 1000, diagnostics: bool = False) -> list:
    """Evaluate the numbered inequalities on every tuple of a finite box.

    Ranges are inclusive ``(lo, hi)`` pairs.  Arithmetic is exact int64 after
    clearing denominators, guarded against overflow.
    """
    import numpy as np

    (a0, a1), (b0, b1), (d0, d1), (n0, n1) = a_range, b_range, d_range, n_range
    a0, b0 = max(a0, 2), max(b0, 2)
    d0, n0 = max(d0, 1), max(n0, 0)
    _overflow_guard(a1, b1, d1, n1)
    box = {"a": [a0, a1], "b": [b0, b1], "d": [d0, d1], "n": [n0, n1]}
    reports = {k: LemmaReport(k, box, 0) for k in LEMMA_IDS + DIAGNOSTIC_IDS}

    B, D, N = np.meshgrid(np.arange(b0, b1 + 1, dtype=np.int64),
                          np.arange(d0, d1 + 1, dtype=np.int64),
                          np.arange(n0, n1 + 1, dtype=np.int64), indexing="ij")
    valid = ~((D == 1) & (N == 0))

    def record(lemma, mask, a):
        rep = reports[lemma]
        idx = np.argwhere(mask)
        for i in idx[: max(0, max_violations - len(rep.violations))]:
            rep.violations.append((a, int(B[tuple(i)]), int(D[tuple(i)]), int(N[tuple(i)])))
        if len(idx) and len(rep.violations) >= max_violations:
            rep.violations.append(("truncated", int(len(idx))))

    for a in range(a0, a1 + 1):
        M = a * B - 1
        num_mu = (a + B) * D - 2 + a * N
        sub_num = D + a * N  # x = sub_num / a
        # dm1
        dm1_a = a * num_mu - M * sub_num <= (D - 1) * a * M
        dm1_b = (D + N) * M < B * num_mu
        reports["dm1"].checked += int(valid.sum())
        record("dm1", valid & ~(dm1_a & dm1_b), a)

        case1 = M * sub_num > a * num_mu
        case2 = valid & (a * (D + N) <= B * sub_num) & ~case1
        case3 = valid & (B * sub_num < a * (D + N)) & ~case1 & dm1_b

        e1 = (N == 0) & (B == a) & (D <= a - 1)
        e2 = (N == 1) & (3 * B <= a + 1) & (D * (a - B) == a * (B - 1))
        single = single_ineq_lhs(a, B, D, N) >= 2 * a
        reports["single_ineq"].checked += int((case2 & ~e1 & ~e2).sum())
        record("single_ineq", case2 & ~e1 & ~e2 & ~single, a)

        exc = valid & (e1 | e2)
        n_delta = a * num_mu - M * sub_num
        den_delta = a * M
        ok = (n_delta > 0) & (n_delta < den_delta) & case2
        ok &= (B * B - 2 * B + 2) * (D - 1) + (B - 2) ** 2 >= 0
        ok &= (B - a - 1) * D + (a * B - a) * N + a >= 0
        reports["exceptions"].checked += int(exc.sum())
        record("exceptions", exc & ~ok, a)

        reports["dpos"].checked += int(case3.sum())
        record("dpos", case3 & ~((a > B) & (dpos_lhs(a, B, D, N) >= 2 * B)), a)
        reports["dpos_as_printed"].checked += int(case3.sum())
        record("dpos_as_printed", case3 & ~(dpos_lhs_as_printed(a, B, D, N) >= 2 * B), a)

        # Case2 child inequalities, with fd = floor(delta), cd = ceil(delta)
        fd = n_delta // den_delta
        cd = _cdiv(n_delta, den_delta)
        den2 = a * (B - 1) - 1
        floor_ok = ((D - fd) + (B - 1) * fd) * den2 <= (B - 1) * ((a + B - 1) * (D - fd) - 2 + (B - 1) * fd)
        ceil_ok = _cdiv((D - cd) + (B - 1) * cd, B - 1) <= _cdiv(sub_num, a) + cd
        kid_ok = floor_ok & ceil_ok & (D - cd >= 1)
        reports["case2_children"].checked += int(case2.sum())
        record("case2_children", case2 & ~kid_ok, a)

        # Case3 child inequalities, with fe = floor(eps), ce = ceil(eps)
        n_eps = B * num_mu - M * (D + N)
        den_eps = B * M
        fe = n_eps // den_eps
        ce = _cdiv(n_eps, den_eps)
        den3 = (a - 1) * B - 1
        floor3 = ((D - fe) + (a - 1) * (N + fe)) * den3 <= (a - 1) * ((a + B - 1) * (D - fe) - 2 + (a - 1) * (N + fe))
        ceil3 = _cdiv((D - ce) + (a - 1) * (N + ce), a - 1) <= _cdiv(D + N, B) + ce
        kid3 = floor3 & ceil3 & (D - ce >= 1)
        reports["case3_children"].checked += int(case3.sum())
        record("case3_children", case3 & ~kid3, a)

    out = [reports[k] for k in LEMMA_IDS]
    if diagnostics:
        out += [reports[k] for k in DIAGNOSTIC_IDS]
    return out


def exception_census(a_range, b_range, d_range, n_range) -> dict:
    """Tuples of the box falling under the two exceptional families."""
    out = {"e1": [], "e2": []}
    for a in range(max(a_range[0], 2), a_range[1] + 1):
        for b in range(max(b_range[0], 2), b_range[1] + 1):
            for d in range(max(d_range[0], 1), d_range[1] + 1):
                for n in range(max(n_range[0], 0), n_range[1] + 1):
                    if (d, n) == (1, 0):
                        continue
                    if is_e1(a, b, d, n):
                        out["e1"].append((a, b, d, n))
                    if is_e2(a, b, d, n):
                        out["e2"].append((a, b, d, n))
    return out
