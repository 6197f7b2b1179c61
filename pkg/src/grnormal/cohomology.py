"""Splitting types of normal bundles of random rational curves in Gr(a, a+b).

A curve is given by an ``(a+b) x a`` matrix ``phi`` of binary forms whose
column ``i`` has degree ``e_i``; its columns span the fibre of the
tautological subbundle ``S = O(-e_1) + ... + O(-e_a)``.

Sections of the twisted conormal bundle ``N^vee(m)`` are ``a x (a+b)`` matrices
``psi`` with row ``i`` of degree ``m - e_i`` such that

* ``psi . phi = 0``                 (``psi`` is a map ``Q -> S(m)``),
* ``trace(psi . d_s phi) = 0``      (``psi`` kills the tangent line of the curve).

The companion condition with ``d_t`` follows from the Euler relation, because
``s tr(psi d_s phi) + t tr(psi d_t phi) = tr(psi phi diag(e)) = 0``.
A modification towards a pointing bundle at ``x`` adds the linear conditions
``psi(x) p = 0`` (lower, towards a point ``p``) or ``(h phi(x)) psi(x) = 0``
(upper, towards a hyperplane ``h``).  Counting solutions over a window of
twists gives the Hilbert function of the dual and hence the splitting type.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exactlinalg import BinaryForm, PolyMatrix, PrimeField, matrix_rank, minors_gcd, AllMinorsZero
from .splitcore import SplittingType, balanced_type, dual, type_from_hilbert

DEFAULT_PRIME = 1009


class SamplingExhausted(RuntimeError):
    pass


class InvalidModification(ValueError):
    pass


class InvalidProjection(ValueError):
    pass


class Ramified(RuntimeError):
    """The sampled map is not an immersion (or is otherwise special): degree check failed."""


class WindowOverrun(RuntimeError):
    pass


def balanced_partition(d: int, a: int) -> tuple:
    return balanced_type(a, d).degrees


@dataclass
class CurveChart:
    a: int
    b: int
    d: int
    p: int
    phi: PolyMatrix
    seed: int | None = None

    @property
    def col_degrees(self) -> tuple:
        return tuple(self.phi.column_degrees())

    @property
    def n_amb(self) -> int:
        return self.a + self.b

    def fiber(self, point) -> np.ndarray:
        return self.phi.eval(point)

    def is_valid(self) -> bool:
        try:
            return minors_gcd(self.phi, self.a).is_constant()
        except AllMinorsZero:
            return False

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.d, "p": self.p, "seed": self.seed,
                "col_degrees": list(self.col_degrees), "phi": self.phi.to_lists()}

    @classmethod
    def from_dict(cls, data: dict) -> CurveChart:
        return cls(data["a"], data["b"], data["d"], data["p"], PolyMatrix.from_lists(data["phi"], data["p"]),
                   data.get("seed"))


def random_form(rng: np.random.Generator, degree: int, p: int) -> BinaryForm:
    return BinaryForm(tuple(int(x) for x in rng.integers(0, p, size=degree + 1)), p)


def sample_chart(a: int, b: int, d: int, p: int = DEFAULT_PRIME, seed=None, col_degrees=None,
                 max_tries: int = 200) -> CurveChart:
    """Random curve of degree ``d`` with balanced column degrees, resampled until fibrewise injective."""
    if a < 1 or b < 1 or d < 1:
        raise ValueError(f"need a, b, d >= 1, got {(a, b, d)}")
    PrimeField(p)
    e = tuple(col_degrees) if col_degrees is not None else balanced_partition(d, a)
    if len(e) != a or sum(e) != d:
        raise ValueError(f"column degrees {e} do not partition {d} into {a} parts")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        phi = PolyMatrix([[random_form(rng, e[j], p) for j in range(a)] for _ in range(a + b)], p)
        chart = CurveChart(a, b, d, p, phi, seed)
        if chart.is_valid():
            return chart
    raise SamplingExhausted(f"no valid chart for (a,b,d)=({a},{b},{d}) over F_{p} in {max_tries} tries")


def project_chart(chart: CurveChart, coordinate_index: int) -> CurveChart:
    """Projection from a coordinate point: drop one ambient coordinate."""
    if chart.b < 2 and chart.a < 2:
        raise InvalidProjection("projection would leave an empty Grassmannian")
    if not 0 <= coordinate_index < chart.n_amb:
        raise InvalidProjection(f"coordinate {coordinate_index} out of range")
    out = CurveChart(chart.a, chart.b - 1, chart.d, chart.p, chart.phi.delete_row(coordinate_index), chart.seed)
    if out.b < 1 or not out.is_valid():
        raise InvalidProjection(f"dropping coordinate {coordinate_index} makes the chart degenerate")
    return out


# -- modifications -----------------------------------------------------------

@dataclass(frozen=True)
class ModificationSpec:
    kind: str  # "lower" or "upper"
    vector: tuple
    point: tuple = (0, 1)

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise ValueError(f"modification kind must be lower or upper, not {self.kind!r}")

    def to_dict(self):
        return {"kind": self.kind, "vector": list(self.vector), "point": list(self.point)}


def _fiber_rank(mat: np.ndarray, p: int) -> int:
    return matrix_rank(mat, p)


def validate_modification(chart: CurveChart, spec: ModificationSpec) -> None:
    p = chart.p
    vec = np.array(spec.vector, dtype=np.int64) % p
    if vec.shape != (chart.n_amb,):
        raise InvalidModification(f"vector has length {vec.shape}, expected {chart.n_amb}")
    F = chart.fiber(spec.point)
    if spec.kind == "lower":
        if _fiber_rank(np.column_stack([F, vec]), p) != chart.a + 1:
            raise InvalidModification("the point lies on the plane of the curve at x")
    else:
        if not np.any((vec @ F) % p):
            raise InvalidModification("the plane of the curve at x lies in the hyperplane")


def sample_modifications(chart: CurveChart, kinds, rng: np.random.Generator, max_tries: int = 100) -> list:
    """Fresh general vectors at distinct points; the first point is ``(0:1)``."""
    p = chart.p
    if len(kinds) > p + 1:
        raise InvalidModification(f"F_{p} has only {p + 1} points")
    points = [(0, 1)]
    pool = [(1, c) for c in range(p)]
    extra = rng.permutation(len(pool))[: max(0, len(kinds) - 1)]
    points += [pool[i] for i in sorted(int(i) for i in extra)]
    specs = []
    for kind, pt in zip(kinds, points):
        for _ in range(max_tries):
            vec = tuple(int(x) for x in rng.integers(0, p, size=chart.n_amb))
            spec = ModificationSpec(kind, vec, pt)
            try:
                validate_modification(chart, spec)
            except InvalidModification:
                continue
            specs.append(spec)
            break
        else:
            raise SamplingExhausted(f"no valid {kind} modification at {pt}")
    return specs


# -- the linear system -------------------------------------------------------

class _Unknowns:
    """Index of the coefficients of ``psi``: row ``i`` has degree ``m - e_i``."""

    def __init__(self, e, n_amb, m):
        self.deg = [m - ei for ei in e]
        self.offset = {}
        k = 0
        for i, di in enumerate(self.deg):
            if di < 0:
                continue
            for j in range(n_amb):
                self.offset[i, j] = k
                k += di + 1
        self.count = k


def _coeff_array(f: BinaryForm) -> np.ndarray:
    return np.array(f.coeffs, dtype=np.int64)


def _powers(point, deg, p):
    s, t = point
    return np.array([pow(s, deg - k, p) * pow(t, k, p) % p for k in range(deg + 1)], dtype=np.int64)


def conormal_system(chart: CurveChart, mods, m: int) -> tuple:
    """Coefficient matrix whose kernel is ``H^0(N'^vee(m))``; returns ``(matrix, n_unknowns)``."""
    a, n_amb, p = chart.a, chart.n_amb, chart.p
    e = chart.col_degrees
    U = _Unknowns(e, n_amb, m)
    if U.count == 0:
        return np.zeros((0, 0), dtype=np.int64), 0
    rows = []
    phi = chart.phi

    # psi . phi = 0: entry (i, l) has degree (m - e_i) + e_l
    for i in range(a):
        di = U.deg[i]
        if di < 0:
            continue
        for l in range(a):
            block = np.zeros((di + e[l] + 1, U.count), dtype=np.int64)
            for j in range(n_amb):
                c = _coeff_array(phi[j, l])
                off = U.offset[i, j]
                for u in range(di + 1):
                    block[u : u + len(c), off + u] += c
            rows.append(block % p)

    # trace(psi . d_s phi) = 0, a form of degree m - 1
    if m >= 1:
        block = np.zeros((m, U.count), dtype=np.int64)
        for i in range(a):
            di = U.deg[i]
            if di < 0 or e[i] == 0:
                continue
            for j in range(n_amb):
                c = _coeff_array(phi[j, i].derivative_s())
                off = U.offset[i, j]
                for u in range(di + 1):
                    block[u : u + len(c), off + u] += c
        rows.append(block % p)

    for spec in mods:
        F = chart.fiber(spec.point)
        vec = np.array(spec.vector, dtype=np.int64) % p
        if spec.kind == "lower":
            # psi(x) p = 0: one equation per row of psi
            for i in range(a):
                di = U.deg[i]
                if di < 0:
                    continue
                row = np.zeros(U.count, dtype=np.int64)
                pw = _powers(spec.point, di, p)
                for j in range(n_amb):
                    off = U.offset[i, j]
                    row[off : off + di + 1] = (pw * vec[j]) % p
                rows.append(row[None, :])
        else:
            w = (vec @ F) % p  # the hyperplane restricted to the plane at x
            for j in range(n_amb):
                row = np.zeros(U.count, dtype=np.int64)
                for i in range(a):
                    di = U.deg[i]
                    if di < 0:
                        continue
                    off = U.offset[i, j]
                    row[off : off + di + 1] = (_powers(spec.point, di, p) * w[i]) % p
                rows.append(row[None, :])

    if not rows:
        return np.zeros((0, U.count), dtype=np.int64), U.count
    return np.vstack(rows) % p, U.count


def normal_sections_dim(chart: CurveChart, mods=(), m: int = 0) -> int:
    """``h^0`` of the m-th twist of the dual of the (modified) normal bundle."""
    for spec in mods:
        validate_modification(chart, spec)
    _check_distinct(mods, chart.p)
    M, count = conormal_system(chart, mods, m)
    if count == 0:
        return 0
    return count - matrix_rank(M, chart.p)


def _check_distinct(mods, p: int):
    pts = [_normalize_point(s.point, p) for s in mods]
    if len(set(pts)) != len(pts):
        raise InvalidModification("modifications must sit at pairwise distinct points")


def _normalize_point(pt, p: int) -> tuple:
    s, t = pt[0] % p, pt[1] % p
    if s:
        return (1, t * pow(s, -1, p) % p)
    if t:
        return (0, 1)
    raise InvalidModification("(0:0) is not a point of the line")


def expected_rank_degree(chart: CurveChart, mods=()) -> tuple:
    a, b, d = chart.a, chart.b, chart.d
    lower = sum(1 for s in mods if s.kind == "lower")
    upper = sum(1 for s in mods if s.kind == "upper")
    return a * b - 1, (a + b) * d - 2 + a * lower + b * upper


@dataclass
class ComputedBundle:
    type: SplittingType
    a: int
    b: int
    d: int
    p: int
    seed: int | None
    window: list
    rank_ok: bool
    degree_ok: bool
    rr_ok: bool
    mods: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.rank_ok and self.degree_ok and self.rr_ok

    def to_dict(self) -> dict:
        return {
            "params": {"a": self.a, "b": self.b, "d": self.d, "p": self.p},
            "seed": self.seed,
            "type": self.type.to_list(),
            "mods": [m.to_dict() for m in self.mods],
            "diagnostics": {
                "rank_ok": self.rank_ok,
                "degree_ok": self.degree_ok,
                "rr_ok": self.rr_ok,
                "window": [self.window[0][0], self.window[-1][0]],
            },
        }


def _scan_window(h, rank: int, m_start: int, max_twists: int) -> list:
    """Sample ``h`` upward from ``m_start`` until two consecutive first differences equal ``rank``."""
    window = []
    prev = None
    stable = 0
    for m in range(m_start, m_start + max_twists):
        val = h(m)
        if not window and val != 0:
            raise WindowOverrun(f"sections already present at the window start m={m}")
        window.append((m, val))
        if prev is not None:
            if val - prev > rank:
                # more sections than a rank-`rank` bundle can carry: the differential degenerates
                raise Ramified(f"first difference {val - prev} exceeds the rank {rank} at m={m}")
            stable = stable + 1 if val - prev == rank else 0
            if stable >= 2:
                return window
        prev = val
    raise WindowOverrun(f"no stabilisation within {max_twists} twists")


def normal_splitting(chart: CurveChart, mods=(), max_twists: int | None = None) -> ComputedBundle:
    """Splitting type of the (modified) normal bundle, read off from ``h^0(N'^vee(m))``."""
    mods = list(mods)
    for spec in mods:
        validate_modification(chart, spec)
    _check_distinct(mods, chart.p)
    rank, degree = expected_rank_degree(chart, mods)
    if rank < 1:
        raise ValueError("the normal bundle has rank 0")
    m_start = min(chart.col_degrees) - 1
    if max_twists is None:
        max_twists = 2 * degree + 4 * rank + 8
    p = chart.p

    def h(m):
        M, count = conormal_system(chart, mods, m)
        return 0 if count == 0 else count - matrix_rank(M, p)

    window = _scan_window(h, rank, m_start, max_twists)
    dual_type = type_from_hilbert(window)
    t = dual(dual_type)
    rank_ok = t.rank == rank
    degree_ok = t.degree == degree
    # above the top summand of N, h^1(N^vee(m)) = 0 and Riemann-Roch is exact
    rr_ok = all(hv == rank * (m + 1) - degree for m, hv in window[-2:])
    out = ComputedBundle(t, chart.a, chart.b, chart.d, p, chart.seed, window, rank_ok, degree_ok, rr_ok, mods)
    if not degree_ok or not rank_ok:
        raise Ramified(f"recovered {t} (rank {t.rank}, degree {t.degree}); expected rank {rank}, degree {degree}")
    return out


def restricted_bundle_splitting(chart: CurveChart, which: str = "Q", max_twists: int = 200) -> SplittingType:
    """Type of ``Q|_C`` from covector rows ``r`` with ``r phi = 0``; ``SdualCheck`` re-derives ``S^vee|_C``."""
    p, a, n_amb = chart.p, chart.a, chart.n_amb
    e = chart.col_degrees
    if which == "Q":
        def h(m):
            if m < 0:
                return 0
            count = n_amb * (m + 1)
            blocks = []
            for l in range(a):
                block = np.zeros((m + e[l] + 1, count), dtype=np.int64)
                for j in range(n_amb):
                    c = _coeff_array(chart.phi[j, l])
                    for u in range(m + 1):
                        block[u : u + len(c), j * (m + 1) + u] += c
                blocks.append(block % p)
            return count - matrix_rank(np.vstack(blocks), p)

        window = _scan_window(h, chart.b, -1, max_twists)
        return dual(type_from_hilbert(window, rank=chart.b))
    if which == "SdualCheck":
        # h^0(S(m)) as the rank of c -> phi c on coefficient vectors, c_i of degree m - e_i
        def h(m):
            degs = [m - ei for ei in e]
            cols = []
            for i, di in enumerate(degs):
                if di < 0:
                    continue
                for u in range(di + 1):
                    vec = np.zeros((n_amb, m + 1), dtype=np.int64)
                    for j in range(n_amb):
                        c = _coeff_array(chart.phi[j, i])
                        vec[j, u : u + len(c)] = c
                    cols.append(vec.ravel() % p)
            if not cols:
                return 0
            return matrix_rank(np.array(cols), p)

        window = _scan_window(h, a, min(-ei for ei in e) - 1, max_twists)
        s_type = type_from_hilbert(window, rank=a)
        out = dual(s_type)
        if out.degrees != tuple(sorted(e, reverse=True)) or not chart.is_valid():
            raise ValueError(f"chart does not present S^vee as {e}: got {out}")
        return out
    raise ValueError(f"unknown bundle {which!r}")


# -- sampling driver ---------------------------------------------------------

@dataclass
class SampleOutcome:
    bundles: list
    rejected: int
    seeds: list


def sample_normal_types(a, b, d, p=DEFAULT_PRIME, samples=5, seed=0, mod_kinds=(), max_rejects=None,
                        stop_when=None) -> SampleOutcome:
    """Compute ``samples`` validated normal bundle types; ramified draws are resampled.

    Each sample ``k`` uses the seed sequence ``(seed, a, b, d, p, k)`` so runs are
    reproducible cell by cell.  ``stop_when(bundle)`` may end the loop early.
    """
    if max_rejects is None:
        max_rejects = 20 * samples + 20
    bundles, seeds = [], []
    rejected = 0
    k = 0
    while len(bundles) < samples:
        ss = np.random.SeedSequence([int(seed), a, b, d, p, k])
        sub = int(ss.generate_state(1)[0])
        k += 1
        rng = np.random.default_rng(ss)
        try:
            chart = sample_chart(a, b, d, p, seed=rng)
            chart.seed = sub
            mods = sample_modifications(chart, list(mod_kinds), rng) if mod_kinds else []
            bundle = normal_splitting(chart, mods)
        except (Ramified, SamplingExhausted):
            rejected += 1
            if rejected > max_rejects:
                break
            continue
        bundle.seed = sub
        bundles.append(bundle)
        seeds.append(sub)
        if stop_when is not None and stop_when(bundle):
            break
    return SampleOutcome(bundles, rejected, seeds)
