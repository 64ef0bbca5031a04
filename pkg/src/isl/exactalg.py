"""Exact scalar, univariate-polynomial, matrix and integer-lattice algebra.

Everything here works over :class:`fractions.Fraction`; the row reduction
helpers (:func:`rref`, :func:`nullspace`) are field-generic and are also used
with :class:`GaussianRational` entries by the classification code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import zip_longest
from typing import Iterable, Sequence

from .errors import InputError

__all__ = [
    "GaussianRational", "UniPoly", "QMatrix", "IntLattice",
    "as_fraction", "to_real", "rref", "nullspace", "solve", "rank", "kernel_basis",
    "minimal_polynomial", "characteristic_polynomial", "poly_of_matrix",
    "is_squarefree", "poly_gcd", "squarefree_part", "sturm_sequence", "sturm_real_root_count",
    "hermite_normal_form", "integer_kernel", "integerize_rowspace",
]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, GaussianRational):
        if x.im:
            raise InputError(f"expected a rational, got {x}")
        return x.re
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussianRational:
    """Element a + b*i of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        return GaussianRational((self.re * other.re + self.im * other.im) / n,
                                (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        result = GaussianRational(1)
        base = self
        if n < 0:
            base, n = 1 / base, -n
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


def conj(x):
    return x.conjugate() if isinstance(x, GaussianRational) else x


def to_real(x) -> Fraction:
    """Demote a field element to a Fraction, failing on a nonzero imaginary part."""
    if isinstance(x, GaussianRational):
        if x.im:
            raise ValueError(f"value {x} is not real")
        return x.re
    return as_fraction(x)


# ---------------------------------------------------------------------------
# univariate polynomials


class UniPoly:
    """Dense univariate polynomial over Q, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots) -> "UniPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-as_fraction(r), 1])
        return p

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "UniPoly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` as the sentinel for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = _as_unipoly(other)
        return UniPoly(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_unipoly(other))

    def __rsub__(self, other):
        return _as_unipoly(other) - self

    def __mul__(self, other):
        other = _as_unipoly(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = UniPoly([1])
        for _ in range(n):
            result = result * self
        return result

    def __divmod__(self, other):
        other = _as_unipoly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lc
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead = self.lc
        return UniPoly(c / lead for c in self.coeffs)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return self.render("t")

    def render(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                power = var if k == 1 else f"{var}^{k}"
                body = power if mag == 1 else f"{mag}*{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)


def _as_unipoly(x) -> UniPoly:
    if isinstance(x, UniPoly):
        return x
    return UniPoly([x])


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(a: UniPoly, b: UniPoly) -> UniPoly:
    if a.is_zero() or b.is_zero():
        return UniPoly()
    return (a * b // poly_gcd(a, b)).monic()


def is_squarefree(p: UniPoly) -> bool:
    if p.is_zero():
        raise InputError("is_squarefree: zero polynomial")
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_part(p: UniPoly) -> UniPoly:
    if p.is_zero():
        raise InputError("squarefree_part: zero polynomial")
    return (p // poly_gcd(p, p.derivative())).monic()


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _sign_changes(signs) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_real_root_count(p: UniPoly) -> int:
    """Number of distinct real roots of a squarefree polynomial."""
    if p.is_zero() or not is_squarefree(p):
        raise InputError("sturm_real_root_count needs a nonzero squarefree polynomial")
    seq = sturm_sequence(p)
    at_pos = [1 if q.lc > 0 else -1 for q in seq]
    at_neg = [(1 if q.lc > 0 else -1) * (-1) ** q.degree for q in seq]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


# ---------------------------------------------------------------------------
# field-generic row reduction


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over any exact field; returns (rows, pivots)."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c] if not isinstance(a[r][c], int) else Fraction(1, a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Canonical right-nullspace basis: one vector per free column, ascending."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence):
    """Unique solution of a consistent full-column-rank system, else None."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots or len(pivots) < ncols:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return x


def _bareiss_rank(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == nrows:
            break
    return r


def _integer_rows(rows) -> list[list[int]]:
    out = []
    for row in rows:
        row = [as_fraction(x) for x in row]
        den = reduce(math.lcm, (x.denominator for x in row), 1)
        out.append([int(x * den) for x in row])
    return out


# ---------------------------------------------------------------------------
# rational matrices


def _scaled_rows(data) -> tuple[list[list[int]], int]:
    den = 1
    for r in data:
        for x in r:
            if x.denominator != 1:
                den = math.lcm(den, x.denominator)
    return [[x.numerator * (den // x.denominator) for x in r] for r in data], den


class QMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data, cols: int | None = None):
        data = [tuple(as_fraction(x) for x in row) for row in data]
        if data:
            cols = len(data[0])
        elif cols is None:
            cols = 0
        if any(len(r) != cols for r in data):
            raise InputError("ragged matrix rows")
        self.rows = len(data)
        self.cols = cols
        self._data = tuple(data)

    @classmethod
    def _trusted(cls, rows: list[tuple], cols: int) -> "QMatrix":
        # rows already hold Fractions of equal length
        obj = cls.__new__(cls)
        obj.rows = len(rows)
        obj.cols = cols
        obj._data = tuple(rows)
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, values) -> "QMatrix":
        values = list(values)
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def flatten(self) -> list[Fraction]:
        return [x for r in self._data for x in r]

    @property
    def T(self) -> "QMatrix":
        return QMatrix([self.column(j) for j in range(self.cols)], self.rows)

    def __add__(self, other):
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        rows = [tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)]
        return QMatrix._trusted(rows, self.cols)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        rows = [tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)]
        return QMatrix._trusted(rows, self.cols)

    def __neg__(self):
        return QMatrix([[-a for a in r] for r in self._data], self.cols)

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            return self @ other
        c = as_fraction(other)
        return QMatrix([[a * c for a in r] for r in self._data], self.cols)

    def __rmul__(self, other):
        c = as_fraction(other)
        return QMatrix([[a * c for a in r] for r in self._data], self.cols)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise InputError(f"cannot multiply {self.shape} by {other.shape}")
            # integer products over a common denominator; far cheaper than Fraction sums
            a_rows, da = _scaled_rows(self._data)
            b_rows, db = _scaled_rows(other._data)
            cols = list(zip(*b_rows)) if b_rows else [()] * other.cols
            den = da * db
            return QMatrix._trusted([tuple(Fraction(sum(x * y for x, y in zip(r, c)), den) for c in cols)
                                     for r in a_rows], other.cols)
        return self.apply(other)

    def apply(self, v: Sequence) -> list:
        """Matrix-vector product; ``v`` may hold any field elements."""
        if len(v) != self.cols:
            raise InputError("vector length mismatch")
        return [sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self._data]

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, self._data))

    def is_zero(self) -> bool:
        return not any(x for r in self._data for x in r)

    def trace(self) -> Fraction:
        return sum((self._data[i][i] for i in range(min(self.shape))), Fraction(0))

    def det(self) -> Fraction:
        if not self.is_square:
            raise InputError("determinant of a non-square matrix")
        a = self.to_lists()
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c]), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                d = -d
            d *= a[c][c]
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] / a[c][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return d

    def inverse(self) -> "QMatrix":
        if not self.is_square:
            raise InputError("inverse of a non-square matrix")
        n = self.rows
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._data)]
        red, pivots = rref(aug)
        if pivots[:n] != list(range(n)):
            raise InputError("matrix is singular")
        return QMatrix([row[n:] for row in red], n)

    def commutator(self, other: "QMatrix") -> "QMatrix":
        return self @ other - other @ self

    def __repr__(self):
        return f"QMatrix({[[str(x) for x in r] for r in self._data]})"

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._data) + "]"


def _as_rows(A) -> list[list]:
    if isinstance(A, QMatrix):
        return A.to_lists()
    return [[as_fraction(x) for x in r] for r in A]


def rank(A) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    return _bareiss_rank(_integer_rows(_as_rows(A)))


def kernel_basis(A) -> list[list[Fraction]]:
    """Right null space basis in canonical reduced-echelon order."""
    rows = _as_rows(A)
    ncols = A.cols if isinstance(A, QMatrix) else (len(rows[0]) if rows else 0)
    return nullspace(rows, ncols)


def poly_of_matrix(p: UniPoly, A: QMatrix) -> QMatrix:
    n = A.rows
    acc = QMatrix.zeros(n, n)
    ident = QMatrix.identity(n)
    for c in reversed(p.coeffs):
        acc = acc @ A + ident * c
    return acc


def _poly_apply_vector(p: UniPoly, A: QMatrix, v: list) -> list:
    acc = [Fraction(0)] * len(v)
    for c in reversed(p.coeffs):
        acc = [x + c * y for x, y in zip(A.apply(acc), v)]
    return acc


def _krylov_local_minpoly(A: QMatrix, v: list) -> UniPoly:
    """Monic generator of the annihilator ideal of ``v`` under ``A``."""
    n = A.rows
    # echelon rows paired with their expression in the Krylov powers
    echelon: list[tuple[int, list, list]] = []
    w = list(v)
    k = 0
    while True:
        combo = [Fraction(0)] * (n + 1)
        combo[k] = Fraction(1)
        r = list(w)
        for pc, erow, ecombo in echelon:
            if r[pc]:
                f = r[pc]
                r = [a - f * b for a, b in zip(r, erow)]
                combo = [a - f * b for a, b in zip(combo, ecombo)]
        pc = next((i for i, x in enumerate(r) if x), None)
        if pc is None:
            return UniPoly(combo[:k + 1]).monic()
        inv = 1 / r[pc]
        echelon.append((pc, [x * inv for x in r], [x * inv for x in combo]))
        w = A.apply(w)
        k += 1


def minimal_polynomial(A: QMatrix) -> UniPoly:
    """Monic minimal polynomial from the Krylov spaces of the unit vectors."""
    if not A.is_square:
        raise InputError("minimal_polynomial needs a square matrix")
    n = A.rows
    result = UniPoly([1])
    for i in range(n):
        if result.degree == n:
            break
        e = [Fraction(int(j == i)) for j in range(n)]
        if not any(_poly_apply_vector(result, A, e)):
            continue
        result = poly_lcm(result, _krylov_local_minpoly(A, e))
    return result


def characteristic_polynomial(A: QMatrix) -> UniPoly:
    """det(t*I - A) via the Faddeev-LeVerrier recursion."""
    if not A.is_square:
        raise InputError("characteristic_polynomial needs a square matrix")
    n = A.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = QMatrix.zeros(n, n)
    ident = QMatrix.identity(n)
    for k in range(1, n + 1):
        M = A @ M + ident * coeffs[n - k + 1]
        coeffs[n - k] = -(A @ M).trace() / k
    return UniPoly(coeffs)


# ---------------------------------------------------------------------------
# integer lattices


def hermite_normal_form(B) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """Row-style Hermite normal form: returns (H, U) with H = U*B, det U = +-1.

    Pivots are positive, entries above a pivot lie in [0, pivot), and zero
    rows collect at the bottom.
    """
    A = [[int(x) for x in row] for row in B]
    r = len(A)
    c = len(A[0]) if A else 0
    U = [[int(i == j) for j in range(r)] for i in range(r)]

    def sub(i, k, q):
        A[i] = [a - q * b for a, b in zip(A[i], A[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]

    prow = 0
    for col in range(c):
        if prow == r:
            break
        while True:
            nz = [i for i in range(prow, r) if A[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][col]))
            A[prow], A[i0] = A[i0], A[prow]
            U[prow], U[i0] = U[i0], U[prow]
            clean = True
            for i in range(prow + 1, r):
                if A[i][col]:
                    sub(i, prow, A[i][col] // A[prow][col])
                    clean = clean and not A[i][col]
            if clean:
                break
        if not A[prow][col]:
            continue
        if A[prow][col] < 0:
            A[prow] = [-a for a in A[prow]]
            U[prow] = [-a for a in U[prow]]
        for i in range(prow):
            sub(i, prow, A[i][col] // A[prow][col])
        prow += 1
    return tuple(map(tuple, A)), tuple(map(tuple, U))


def integer_kernel(C) -> list[tuple[int, ...]]:
    """Basis of the lattice {v in Z^m : C v = 0}, C an integer matrix."""
    rows = [[int(x) for x in r] for r in _as_rows(C)]
    m = len(rows[0]) if rows else 0
    if not rows:
        return [tuple(int(i == j) for i in range(m)) for j in range(m)]
    transposed = [[rows[i][j] for i in range(len(rows))] for j in range(m)]
    H, U = hermite_normal_form(transposed)
    basis = [U[i] for i in range(m) if not any(H[i])]
    return list(IntLattice.from_generators(basis, m).basis)


@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^m stored by its Hermite-normal-form basis."""

    dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, vectors, dim: int) -> "IntLattice":
        vectors = [tuple(int(x) for x in v) for v in vectors]
        if not vectors:
            return cls(dim, ())
        H, _ = hermite_normal_form(vectors)
        return cls(dim, tuple(row for row in H if any(row)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        v = [int(x) for x in v]
        for row in self.basis:
            pc = next(j for j, x in enumerate(row) if x)
            if v[pc] % row[pc]:
                return False
            q = v[pc] // row[pc]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)


def integerize_rowspace(C) -> tuple[QMatrix, QMatrix]:
    """Diagonal invertible A with A*C integral and primitive rows.

    Each row is scaled by the lcm of its denominators over the gcd of its
    numerators; zero rows keep the factor 1.
    """
    rows = _as_rows(C)
    cols = C.cols if isinstance(C, QMatrix) else (len(rows[0]) if rows else 0)
    factors = []
    for row in rows:
        den = reduce(math.lcm, (x.denominator for x in row), 1)
        g = reduce(math.gcd, (x.numerator * (den // x.denominator) for x in row), 0)
        factors.append(Fraction(den, g) if g else Fraction(1))
    A = QMatrix.diag(factors) if factors else QMatrix.zeros(0, 0)
    Ct = QMatrix([[x * f for x in row] for row, f in zip(rows, factors)], cols)
    return A, Ct
