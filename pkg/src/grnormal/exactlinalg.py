"""Prime-field arithmetic, binary forms and exact elimination.

Forms are stored as coefficient tuples ``(c_0, ..., c_e)`` where ``c_k`` is the
coefficient of ``s^(e-k) t^k``.  Matrices handed to the elimination routines
are dense ``int64`` arrays of canonical residues; the modulus is capped below
``2**31`` so that a product of two residues fits in a signed 64-bit word.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

MAX_MODULUS = 2**31 - 1


class AllMinorsZero(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p > MAX_MODULUS:
            raise ValueError(f"modulus {self.p} exceeds {MAX_MODULUS}")

    def __call__(self, x: int) -> int:
        return int(x) % self.p

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.p

    def neg(self, x: int) -> int:
        return (-x) % self.p

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(x, -1, self.p)


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form in ``s, t`` over F_p.

    The zero form keeps a formal degree so that sums stay homogeneous.
    """

    coeffs: tuple
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) % self.p for c in self.coeffs))

    @classmethod
    def zero(cls, degree: int, p: int) -> BinaryForm:
        return cls((0,) * (degree + 1), p)

    @classmethod
    def monomial(cls, i: int, j: int, p: int, c: int = 1) -> BinaryForm:
        """``c * s^i t^j``."""
        coeffs = [0] * (i + j + 1)
        coeffs[j] = c
        return cls(tuple(coeffs), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_constant(self) -> bool:
        return self.degree == 0 and self.coeffs[0] != 0

    def __add__(self, other: BinaryForm) -> BinaryForm:
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")
        return BinaryForm(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)), self.p)

    def __neg__(self) -> BinaryForm:
        return BinaryForm(tuple(-c for c in self.coeffs), self.p)

    def __sub__(self, other: BinaryForm) -> BinaryForm:
        return self + (-other)

    def __mul__(self, other) -> BinaryForm:
        if isinstance(other, int):
            return BinaryForm(tuple(c * other for c in self.coeffs), self.p)
        out = [0] * (self.degree + other.degree + 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return BinaryForm(tuple(out), self.p)

    __rmul__ = __mul__

    def derivative_s(self) -> BinaryForm:
        e = self.degree
        if e == 0:
            return BinaryForm.zero(-1, self.p)
        return BinaryForm(tuple((e - k) * self.coeffs[k] for k in range(e)), self.p)

    def derivative_t(self) -> BinaryForm:
        e = self.degree
        if e == 0:
            return BinaryForm.zero(-1, self.p)
        return BinaryForm(tuple(k * self.coeffs[k] for k in range(1, e + 1)), self.p)

    def eval(self, point) -> int:
        s, t = point
        e = self.degree
        return sum(c * pow(s, e - k, self.p) * pow(t, k, self.p) for k, c in enumerate(self.coeffs)) % self.p

    def monic(self) -> BinaryForm:
        lead = next((c for c in self.coeffs if c), None)
        if lead is None:
            return self
        inv = pow(lead, -1, self.p)
        return BinaryForm(tuple(c * inv for c in self.coeffs), self.p)

    def exact_quotient(self, other: BinaryForm):
        """``q`` with ``q * other == self``, or None when ``other`` does not divide ``self``."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero form")
        qdeg = self.degree - other.degree
        if qdeg < 0:
            return None if not self.is_zero() else BinaryForm.zero(0, self.p)
        # at s = 1 the coefficient list is ascending in t; that map is injective in fixed degree
        q = _poly_divmod_exact(list(self.coeffs), list(other.coeffs), self.p)
        if q is None:
            return None
        q = _strip_trailing(q)
        if len(q) - 1 > qdeg:
            return None
        return BinaryForm(tuple(q + [0] * (qdeg + 1 - len(q))), self.p)

    def divides(self, other: BinaryForm) -> bool:
        if self.is_zero():
            return other.is_zero()
        return other.exact_quotient(self) is not None

    def __repr__(self):
        terms = []
        e = self.degree
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*s^{e - k}*t^{k}")
        return f"BinaryForm({' + '.join(terms) or '0'}; deg {e}, p={self.p})"


def _strip_trailing(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _strip_leading(c: list) -> list:
    i = 0
    while i < len(c) - 1 and c[i] == 0:
        i += 1
    return c[i:]


def _poly_divmod_exact(num: list, den: list, p: int):
    """Quotient of ``num / den`` as ascending-power lists in one variable, or None if inexact."""
    num = list(num)
    den = _strip_trailing(list(den))
    dd = len(den) - 1
    inv = pow(den[-1], -1, p)
    num = _strip_trailing(num)
    if len(num) - 1 < dd:
        return [0] if not any(num) else None
    q = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k] % p
        if c:
            f = c * inv % p
            q[k - dd] = f
            for j in range(dd + 1):
                num[k - dd + j] = (num[k - dd + j] - f * den[j]) % p
    if any(x % p for x in num[:dd]):
        return None
    return q


def _uni_gcd(f: list, g: list, p: int) -> list:
    """Monic gcd of univariate polynomials given in descending powers."""
    f = _strip_leading([x % p for x in f])
    g = _strip_leading([x % p for x in g])
    while any(g):
        f, g = g, _uni_rem(f, g, p)
    if not any(f):
        return f
    inv = pow(f[0], -1, p)
    return [x * inv % p for x in f]


def _uni_rem(f: list, g: list, p: int) -> list:
    f = list(f)
    inv = pow(g[0], -1, p)
    while len(f) >= len(g) and any(f):
        c = f[0] * inv % p
        for j in range(len(g)):
            f[j] = (f[j] - c * g[j]) % p
        f = _strip_leading(f)
        if f == [0]:
            break
    return _strip_leading(f)


def _monomial_content(f: BinaryForm):
    """Split ``f = s^i t^j g`` with ``s, t`` not dividing ``g``."""
    c = f.coeffs
    j = next(k for k, x in enumerate(c) if x)
    last = max(k for k, x in enumerate(c) if x)
    i = f.degree - last
    return i, j, list(c[j : last + 1])


def form_gcd(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Monic gcd of two binary forms (zero iff both are zero)."""
    if f.p != g.p:
        raise ValueError("forms over different fields")
    p = f.p
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    i1, j1, c1 = _monomial_content(f)
    i2, j2, c2 = _monomial_content(g)
    # c lists the coefficients of s^(deg-k) t^k: in the dehomogenization t=1
    # they are the descending coefficients of a polynomial in s
    h = _uni_gcd(c1, c2, p)
    core = BinaryForm(tuple(h), p)
    out = core * BinaryForm.monomial(min(i1, i2), min(j1, j2), p)
    return out.monic()


def form_ops(kind: str, *operands, point=None):
    """Dispatch on ``kind`` in {mul, add, derivative_s, derivative_t, eval, gcd}."""
    if kind == "mul":
        f, g = operands
        return f * g
    if kind == "add":
        f, g = operands
        return f + g
    if kind == "derivative_s":
        return operands[0].derivative_s()
    if kind == "derivative_t":
        return operands[0].derivative_t()
    if kind == "eval":
        return operands[0].eval(point)
    if kind == "gcd":
        out = operands[0]
        for g in operands[1:]:
            out = form_gcd(out, g)
        return out
    raise ValueError(f"unknown form operation {kind!r}")


class PolyMatrix:
    """Matrix of binary forms; entries in a column share a degree."""

    def __init__(self, entries, p: int):
        self.entries = [list(row) for row in entries]
        self.p = p
        if not self.entries or not self.entries[0]:
            raise ValueError("empty PolyMatrix")
        ncols = len(self.entries[0])
        if any(len(r) != ncols for r in self.entries):
            raise ValueError("ragged PolyMatrix")

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def column_degrees(self):
        return [self.entries[0][j].degree for j in range(self.shape[1])]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def eval(self, point) -> np.ndarray:
        rows, cols = self.shape
        return np.array(
            [[self.entries[i][j].eval(point) for j in range(cols)] for i in range(rows)], dtype=np.int64
        )

    def delete_row(self, k: int) -> PolyMatrix:
        return PolyMatrix([r for i, r in enumerate(self.entries) if i != k], self.p)

    def to_lists(self):
        return [[list(f.coeffs) for f in row] for row in self.entries]

    @classmethod
    def from_lists(cls, data, p: int) -> PolyMatrix:
        return cls([[BinaryForm(tuple(c), p) for c in row] for row in data], p)


def poly_det(block) -> BinaryForm:
    """Determinant of a square list-of-lists of binary forms (Leibniz expansion)."""
    k = len(block)
    p = block[0][0].p
    total = None
    for perm in itertools.permutations(range(k)):
        term = block[0][perm[0]]
        for i in range(1, k):
            term = term * block[i][perm[i]]
        if _perm_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def minors_gcd(M: PolyMatrix, k: int) -> BinaryForm:
    """Gcd of all k x k minors; stops as soon as the running gcd is constant."""
    rows, cols = M.shape
    if not 1 <= k <= min(rows, cols):
        raise ValueError(f"minor size {k} out of range for {rows}x{cols}")
    g = None
    for rsel in itertools.combinations(range(rows), k):
        for csel in itertools.combinations(range(cols), k):
            det = poly_det([[M[i, j] for j in csel] for i in rsel])
            if det.is_zero():
                continue
            g = det.monic() if g is None else form_gcd(g, det)
            if g.is_constant():
                return g
    if g is None:
        raise AllMinorsZero(f"all {k}x{k} minors vanish")
    return g


def row_reduce(M, p: int):
    """Reduced row echelon form of ``M`` over F_p.  Returns (R, pivot_columns)."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def matrix_rank(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(row_reduce(M, p)[1])


def matrix_kernel(M, p: int):
    """Exact right kernel over F_p.  Returns ``(dimension, basis)`` with basis rows."""
    M = np.asarray(M, dtype=np.int64)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return ncols, np.eye(ncols, dtype=np.int64)
    R, pivots = row_reduce(M, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, c in enumerate(pivots):
            basis[k, c] = (-R[r, f]) % p
    return len(free), basis
