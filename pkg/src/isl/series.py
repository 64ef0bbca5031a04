"""Truncated multivariate power series and polynomial vector fields.

An :class:`MPoly` is a sparse map from exponent tuples to exact coefficients
(``Fraction``, or ``GaussianRational`` inside the normal-form machinery) with
an optional truncation order ``N``: every stored term has total degree <= N
and products discard the rest.  ``order=None`` means an exact polynomial.

Vector fields are tuples of component polynomials, component ``j`` being the
coefficient of ``d/dx_j``.  Lie brackets follow the derivation convention
``[X, Y]^k = X(Y^k) - Y(X^k)``.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, NotAFixedPoint, SingularLinearPart
from .exactalg import GaussianRational, QMatrix, as_fraction, rank

DEFAULT_ORDER = 6

Monomial = tuple


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _coerce_coeff(c):
    if isinstance(c, (Fraction, GaussianRational)):
        return c
    return as_fraction(c)


def grlex_key(exps: Monomial):
    """Ascending total degree, then x1 before x2 (lexicographic) within a degree."""
    return (sum(exps), tuple(-e for e in exps))


def default_names(nvars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(nvars)]


def _fmt_coeff(c) -> str:
    if isinstance(c, GaussianRational):
        return str(c)
    return str(c)


def render_monomial(exps: Monomial, names: Sequence[str]) -> str:
    parts = []
    for e, n in zip(exps, names):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def _render_terms(items, names, suffixes=None) -> str:
    """Render ``(coeff, monomial, suffix)`` items as a signed sum."""
    out = []
    for coeff, exps, suffix in items:
        mono = render_monomial(exps, names)
        if isinstance(coeff, GaussianRational) and not coeff.is_real:
            neg, mag = False, coeff
        else:
            c = coeff.re if isinstance(coeff, GaussianRational) else coeff
            neg, mag = c < 0, abs(c)
        factors = [f for f in (mono, suffix) if f]
        if mag == 1 and factors:
            body = "*".join(factors)
        else:
            body = "*".join([_fmt_coeff(mag)] + factors)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out) if out else "0"


class MPoly:
    """Sparse multivariate polynomial / truncated power series."""

    __slots__ = ("nvars", "order", "terms")

    def __init__(self, nvars: int, terms=None, order: int | None = None):
        self.nvars = nvars
        self.order = order
        clean = {}
        if terms:
            for exps, c in dict(terms).items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise InputError(f"monomial {exps} has wrong length for {nvars} variables")
                if any(e < 0 for e in exps):
                    raise InputError("negative exponent")
                if order is not None and sum(exps) > order:
                    continue
                c = _coerce_coeff(c)
                if c:
                    clean[exps] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars, terms, order):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.order = order
        p.terms = terms
        return p

    @classmethod
    def zero(cls, nvars: int, order: int | None = None) -> "MPoly":
        return cls._raw(nvars, {}, order)

    @classmethod
    def constant(cls, c, nvars: int, order: int | None = None) -> "MPoly":
        c = _coerce_coeff(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {}, order)

    @classmethod
    def variable(cls, i: int, nvars: int, order: int | None = None) -> "MPoly":
        if not 0 <= i < nvars:
            raise InputError(f"variable index {i} out of range")
        exps = tuple(int(j == i) for j in range(nvars))
        terms = {exps: Fraction(1)} if order is None or order >= 1 else {}
        return cls._raw(nvars, terms, order)

    @classmethod
    def monomial(cls, exps, coeff=1, order: int | None = None) -> "MPoly":
        return cls(len(exps), {tuple(exps): coeff}, order)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    @property
    def low_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def coeff(self, exps) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(other, self.nvars)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MPoly({self.render()!r}, order={self.order})"

    def __str__(self):
        return self.render()

    def render(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.nvars)
        return _render_terms([(c, e, "") for e, c in self.sorted_terms()], names)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars:
            raise InputError(f"dimension mismatch: {self.nvars} vs {other.nvars} variables")

    def _lift(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(other, self.nvars)

    def __add__(self, other):
        if not isinstance(other, (MPoly, int, Fraction, GaussianRational)):
            return NotImplemented
        other = self._lift(other)
        order = _min_order(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            v = c if v is None else v + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        if order is not None and (self.order != order or other.order != order):
            out = {e: c for e, c in out.items() if sum(e) <= order}
        return MPoly._raw(self.nvars, out, order)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        if not isinstance(other, (MPoly, int, Fraction, GaussianRational)):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "MPoly":
        c = _coerce_coeff(c)
        if not c:
            return MPoly._raw(self.nvars, {}, self.order)
        return MPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        order = _min_order(self.order, other.order)
        return MPoly._raw(self.nvars, _mul_terms(self.terms, other.terms, order), order)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(1 / _coerce_coeff(other))
        return NotImplemented

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise InputError("negative power of a polynomial")
        result = MPoly.constant(1, self.nvars, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, order: int | None) -> "MPoly":
        """Drop terms above ``order`` (None keeps everything)."""
        if order is None:
            return MPoly._raw(self.nvars, dict(self.terms), self.order)
        new_order = _min_order(self.order, order)
        return MPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= order}, new_order)

    def with_order(self, order: int | None) -> "MPoly":
        """Re-tag with a truncation order, discarding terms above it."""
        terms = self.terms if order is None else {e: c for e, c in self.terms.items() if sum(e) <= order}
        return MPoly._raw(self.nvars, dict(terms), order)

    def homogeneous(self, d: int) -> "MPoly":
        return MPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d}, self.order)

    def homogeneous_part(self) -> "MPoly":
        """Terms of the lowest non-constant total degree."""
        degs = [sum(e) for e in self.terms if sum(e) > 0]
        if not degs:
            raise InputError("homogeneous_part of a constant")
        return self.homogeneous(min(degs))

    def diff(self, j: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            k = e[j]
            if k:
                ne = e[:j] + (k - 1,) + e[j + 1:]
                out[ne] = c * k
        return MPoly._raw(self.nvars, out, None if self.order is None else self.order - 1)

    def gradient(self) -> list["MPoly"]:
        return [self.diff(j) for j in range(self.nvars)]

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise InputError("point has wrong dimension")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def map_coeffs(self, f) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            v = f(c)
            if v:
                out[e] = v
        return MPoly._raw(self.nvars, out, self.order)

    def depends_on(self, j: int) -> bool:
        return any(e[j] for e in self.terms)

    def select_vars(self, keep: Sequence[int]) -> "MPoly":
        """Restrict to the variables ``keep`` (terms in other variables must be absent)."""
        keep = list(keep)
        drop = [j for j in range(self.nvars) if j not in keep]
        out = {}
        for e, c in self.terms.items():
            if any(e[j] for j in drop):
                raise InputError("polynomial depends on a dropped variable")
            out[tuple(e[j] for j in keep)] = c
        return MPoly._raw(len(keep), out, self.order)

    def embed(self, nvars: int, positions: Sequence[int]) -> "MPoly":
        """Re-index into ``nvars`` variables, old variable i becoming ``positions[i]``."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in zip(positions, e):
                ne[i] = k
            out[tuple(ne)] = c
        return MPoly._raw(nvars, out, self.order)

    def substitute(self, images: Sequence["MPoly"], order: int | None = "auto") -> "MPoly":
        """Composition ``F(images)``; images share a variable set of their own.

        With ``order="auto"`` the result is truncated at the smaller of this
        polynomial's order and the images' order.  Skipping high monomials is
        only valid when the images vanish at the origin; otherwise the stored
        terms are treated as an exact polynomial.
        """
        if len(images) != self.nvars:
            raise InputError("substitute: wrong number of images")
        if not images:
            return MPoly.constant(self.constant_term(), 0, self.order)
        nv = images[0].nvars
        if order == "auto":
            order = self.order
            for img in images:
                order = _min_order(order, img.order)
        vanish = all(not img.constant_term() for img in images)
        result: dict = {}
        cache: dict = {(0,) * self.nvars: {(0,) * nv: Fraction(1)}}

        def product(exps):
            got = cache.get(exps)
            if got is not None:
                return got
            j = max(i for i, k in enumerate(exps) if k)
            parent = exps[:j] + (exps[j] - 1,) + exps[j + 1:]
            got = _mul_terms(product(parent), images[j].terms, order)
            cache[exps] = got
            return got

        for exps, c in sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0])):
            if vanish and order is not None and sum(exps) > order:
                continue
            for e, v in product(exps).items():
                w = result.get(e)
                w = c * v if w is None else w + c * v
                if w:
                    result[e] = w
                else:
                    result.pop(e, None)
        if order is not None:
            result = {e: c for e, c in result.items() if sum(e) <= order}
        return MPoly._raw(nv, result, order)

    def shift(self, z: Sequence) -> "MPoly":
        """Exact translation ``F(x + z)`` of the stored polynomial, re-truncated."""
        z = [as_fraction(v) for v in z]
        if not any(z):
            return MPoly._raw(self.nvars, dict(self.terms), self.order)
        images = [MPoly.variable(i, self.nvars) + z[i] for i in range(self.nvars)]
        exact = MPoly._raw(self.nvars, self.terms, None).substitute(images, order=None)
        return exact.with_order(self.order)


def _mul_terms(a: dict, b: dict, order: int | None) -> dict:
    if not a or not b:
        return {}
    out: dict = {}
    if order is None:
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(e)
                v = ca * cb if v is None else v + ca * cb
                out[e] = v
    else:
        bl = sorted(((sum(e), e, c) for e, c in b.items()), key=lambda t: t[0])
        for ea, ca in a.items():
            da = sum(ea)
            room = order - da
            if room < 0:
                continue
            for db, eb, cb in bl:
                if db > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(e)
                v = ca * cb if v is None else v + ca * cb
                out[e] = v
    return {e: c for e, c in out.items() if c}


def variables(nvars: int, order: int | None = None) -> list[MPoly]:
    return [MPoly.variable(i, nvars, order) for i in range(nvars)]


def truncate(a: MPoly, order: int | None) -> MPoly:
    return a.truncate(order)


def homogeneous_part(F: MPoly) -> MPoly:
    return F.homogeneous_part()


# ---------------------------------------------------------------------------
# vector fields


class PolyVectorField:
    """Polynomial vector field; component j is the coefficient of d/dx_j."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[MPoly]):
        comps = tuple(components)
        if not comps:
            raise InputError("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, MPoly):
                raise InputError("field components must be MPoly values")
            if c.nvars != n:
                raise InputError(f"component has {c.nvars} variables, field has {n} components")
        if len({c.order for c in comps}) > 1:
            order = None
            for c in comps:
                order = _min_order(order, c.order)
            comps = tuple(c.with_order(order) for c in comps)
        self.components = comps

    @classmethod
    def zero(cls, nvars: int, order: int | None = None) -> "PolyVectorField":
        return cls([MPoly.zero(nvars, order)] * nvars)

    @classmethod
    def basis(cls, j: int, nvars: int, order: int | None = None) -> "PolyVectorField":
        """The constant field d/dx_j."""
        return cls([MPoly.constant(int(i == j), nvars, order) for i in range(nvars)])

    @classmethod
    def linear(cls, A: QMatrix, order: int | None = None) -> "PolyVectorField":
        """Linear field with matrix A (component j is sum_k A[j,k] x_k)."""
        n = A.rows
        comps = []
        for j in range(n):
            terms = {tuple(int(i == k) for i in range(n)): A[j, k] for k in range(n) if A[j, k]}
            comps.append(MPoly(n, terms, order))
        return cls(comps)

    @property
    def nvars(self) -> int:
        return len(self.components)

    @property
    def order(self):
        return self.components[0].order

    def __getitem__(self, j):
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def _check(self, other):
        if self.nvars != other.nvars:
            raise InputError(f"dimension mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        self._check(other)
        return PolyVectorField(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        self._check(other)
        return PolyVectorField(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return PolyVectorField(-c for c in self.components)

    def __mul__(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise InputError("dimension mismatch")
            return PolyVectorField(other * c for c in self.components)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return PolyVectorField(c.scale(other) for c in self.components)
        return NotImplemented

    __rmul__ = __mul__

    def truncate(self, order) -> "PolyVectorField":
        return PolyVectorField(c.truncate(order) for c in self.components)

    def with_order(self, order) -> "PolyVectorField":
        return PolyVectorField(c.with_order(order) for c in self.components)

    def homogeneous(self, d: int) -> "PolyVectorField":
        return PolyVectorField(c.homogeneous(d) for c in self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def map_coeffs(self, f) -> "PolyVectorField":
        return PolyVectorField(c.map_coeffs(f) for c in self.components)

    def evaluate(self, point):
        return [c.evaluate(point) for c in self.components]

    def __call__(self, F: MPoly) -> MPoly:
        return lie_derivative(self, F)

    def terms(self):
        """Iterate ``(monomial, j, coeff)`` over the monomial-field basis."""
        for j, c in enumerate(self.components):
            for e, v in c.terms.items():
                yield e, j, v

    def render(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.nvars)
        items = []
        for j, comp in enumerate(self.components):
            for e, c in comp.sorted_terms():
                items.append((c, e, f"d({names[j]})"))
        return _render_terms(items, names)

    def __repr__(self):
        return f"PolyVectorField({self.render()!r})"

    __str__ = render


def lie_derivative(X: PolyVectorField, F: MPoly) -> MPoly:
    """X(F) = sum_j X^j dF/dx_j, truncated at the smaller order."""
    if X.nvars != F.nvars:
        raise InputError(f"dimension mismatch: field on {X.nvars}, function on {F.nvars} variables")
    order = _min_order(X.order, F.order)
    acc: dict = {}
    for j, comp in enumerate(X.components):
        if comp.is_zero():
            continue
        dF = F.diff(j)
        if dF.is_zero():
            continue
        for e, c in _mul_terms(comp.terms, dF.terms, order).items():
            v = acc.get(e)
            v = c if v is None else v + c
            acc[e] = v
    return MPoly._raw(F.nvars, {e: c for e, c in acc.items() if c}, order)


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """Component k is X(Y^k) - Y(X^k)."""
    if X.nvars != Y.nvars:
        raise InputError(f"dimension mismatch: {X.nvars} vs {Y.nvars}")
    order = _min_order(X.order, Y.order)
    comps = []
    for yk, xk in zip(Y.components, X.components):
        comps.append((lie_derivative(X, yk) - lie_derivative(Y, xk)).with_order(order))
    return PolyVectorField(comps)


def linear_part(X: PolyVectorField) -> QMatrix:
    """Matrix of degree-one coefficients; the field must vanish at the origin."""
    n = X.nvars
    zero = (0,) * n
    for j, c in enumerate(X.components):
        if c.terms.get(zero):
            raise NotAFixedPoint(f"component {j + 1} has a nonzero constant term: not a fixed point")
    rows = []
    for c in X.components:
        rows.append([c.terms.get(tuple(int(i == k) for i in range(n)), 0) for k in range(n)])
    return QMatrix(rows, n)


def lie_series_function(G: PolyVectorField, F: MPoly, sign: int = 1, order=None) -> MPoly:
    """sum_k sign^k/k! G^k(F); equals F composed with the time-``sign`` flow of G.

    G must vanish to second order at the origin (or the order must bound the
    series); the loop stops when a term vanishes.
    """
    order = _min_order(F.order, order) if order is not None else F.order
    # a truncated generator only determines the series up to its own order
    order = _min_order(order, G.order)
    F = F.with_order(order) if order is not None else F
    total = F
    term = F
    k = 0
    while True:
        k += 1
        term = lie_derivative(G, term).with_order(order)
        if term.is_zero():
            return total
        term = term.scale(Fraction(sign, k))
        total = total + term
        if k > 200:
            raise InputError("Lie series did not terminate; generator must be nonlinear")


def lie_series_field(G: PolyVectorField, X: PolyVectorField, sign: int = -1, order=None) -> PolyVectorField:
    """sum_k sign^k/k! ad_G^k X with ad_G X = [G, X].

    With ``sign=-1`` this is the pushforward of X by the time-one flow of G.
    """
    if order is None:
        order = X.order
    order = _min_order(order, G.order)
    total = X.with_order(order)
    term = total
    k = 0
    while True:
        k += 1
        term = lie_bracket(G, term).with_order(order)
        if term.is_zero():
            return total
        term = term * Fraction(sign, k)
        total = total + term
        if k > 200:
            raise InputError("Lie series did not terminate; generator must be nonlinear")


# ---------------------------------------------------------------------------
# coordinate changes


class CoordinateChange:
    """Truncated polynomial map y = phi(x - center), stored by its images y_k(s)."""

    __slots__ = ("images", "center")

    def __init__(self, images: Iterable[MPoly], center: Sequence | None = None):
        imgs = tuple(images)
        if not imgs:
            raise InputError("coordinate change needs at least one component")
        n = len(imgs)
        if any(i.nvars != n for i in imgs):
            raise InputError("coordinate change images must live in the same dimension")
        order = None
        for i in imgs:
            order = _min_order(order, i.order)
        self.images = tuple(i.with_order(order) for i in imgs)
        self.center = tuple(as_fraction(v) for v in center) if center is not None else (Fraction(0),) * n
        if len(self.center) != n:
            raise InputError("center has wrong dimension")

    @classmethod
    def identity(cls, nvars: int, order: int | None = DEFAULT_ORDER) -> "CoordinateChange":
        return cls(variables(nvars, order))

    @classmethod
    def linear(cls, A: QMatrix, order: int | None = DEFAULT_ORDER) -> "CoordinateChange":
        return cls(PolyVectorField.linear(A, order).components)

    @property
    def nvars(self) -> int:
        return len(self.images)

    @property
    def order(self):
        return self.images[0].order

    def linear_part(self) -> QMatrix:
        n = self.nvars
        return QMatrix([[img.coeff(tuple(int(i == k) for i in range(n))) for k in range(n)]
                        for img in self.images], n)

    def is_identity(self) -> bool:
        xs = variables(self.nvars, self.order)
        return not any(self.center) and all(a == b for a, b in zip(self.images, xs))

    def __eq__(self, other):
        if not isinstance(other, CoordinateChange):
            return NotImplemented
        return self.images == other.images and self.center == other.center

    def __hash__(self):
        return hash((self.images, self.center))

    def inverse(self) -> "CoordinateChange":
        return invert_jet(self)

    def then(self, other: "CoordinateChange") -> "CoordinateChange":
        """The composite map ``other o self`` (apply self first)."""
        if other.nvars != self.nvars:
            raise InputError("dimension mismatch")
        return CoordinateChange([img.substitute(self.images) for img in other.images], self.center)

    def render(self, names: Sequence[str] | None = None, new_names: Sequence[str] | None = None) -> list[str]:
        names = names or default_names(self.nvars)
        new_names = new_names or [f"y{i + 1}" for i in range(self.nvars)]
        return [f"{n} = {img.render(names)}" for n, img in zip(new_names, self.images)]

    def __repr__(self):
        return f"CoordinateChange({self.render()})"


def invert_jet(phi: CoordinateChange) -> CoordinateChange:
    """Compositional inverse psi with phi(psi(y)) = y up to the jet order.

    Requires phi(0) = 0 (in local coordinates) and an invertible linear part.
    The returned change is centered at the origin of the y coordinates.
    """
    n = phi.nvars
    order = phi.order
    if order is None:
        raise InputError("invert_jet needs a truncation order")
    if any(img.constant_term() for img in phi.images):
        raise InputError("invert_jet needs phi(0) = 0")
    L = phi.linear_part()
    if L.det() == 0:
        raise SingularLinearPart("coordinate change has a singular linear part")
    Linv = L.inverse()
    nonlinear = [img - img.homogeneous(1) for img in phi.images]
    lin = _apply_matrix(Linv, variables(n, order))
    psi = lin
    # each pass fixes one more degree of psi = Linv (y - nonlinear(psi))
    for _ in range(order - 1):
        corr = _apply_matrix(Linv, [q.substitute(psi) for q in nonlinear])
        psi = [a - b for a, b in zip(lin, corr)]
    return CoordinateChange(psi)


def _apply_matrix(M: QMatrix, vec: Sequence[MPoly]) -> list[MPoly]:
    """Matrix times a vector of polynomials."""
    zero = MPoly.zero(vec[0].nvars, vec[0].order)
    return [sum((vec[k].scale(M[j, k]) for k in range(M.cols) if M[j, k]), zero)
            for j in range(M.rows)]


def compose(obj, phi: CoordinateChange, phi_inverse: CoordinateChange | None = None):
    """Act with a coordinate change.

    For a function F (of the new coordinates) returns ``F o phi`` as a
    function of the old local coordinates.  For a field X (in the old
    coordinates) returns the pushforward ``(Dphi X) o phi^-1``.  A nonzero
    center first translates the field to local coordinates.  Pushing a field
    that does not vanish at the center loses one order of accuracy unless phi
    is known one order beyond the field.
    """
    if isinstance(obj, MPoly):
        if obj.nvars != phi.nvars:
            raise InputError("dimension mismatch")
        return obj.substitute(phi.images)
    if isinstance(obj, PolyVectorField):
        if obj.nvars != phi.nvars:
            raise InputError("dimension mismatch")
        if phi.linear_part().det() == 0:
            raise SingularLinearPart("coordinate change has a singular linear part")
        X = obj
        if any(phi.center):
            X = PolyVectorField(c.shift(phi.center) for c in X.components)
        order = _min_order(X.order, phi.order)
        X = X.with_order(order)
        psi = phi_inverse if phi_inverse is not None else invert_jet(phi)
        pushed = [lie_derivative(X, img.with_order(order)) for img in phi.images]
        return PolyVectorField(p.substitute(psi.images, order=order) for p in pushed)
    raise TypeError(f"cannot compose {type(obj).__name__}")


# ---------------------------------------------------------------------------
# generic rank


def poly_det(M: Sequence[Sequence[MPoly]]) -> MPoly:
    """Exact determinant by Laplace expansion with memoized column subsets."""
    n = len(M)
    if n == 0:
        raise InputError("empty determinant")
    nv = M[0][0].nvars
    memo: dict = {}

    def det(row: int, cols: tuple) -> MPoly:
        if row == n:
            return MPoly.constant(1, nv)
        got = memo.get(cols)
        if got is not None:
            return got
        acc = MPoly.zero(nv)
        for idx, c in enumerate(cols):
            entry = M[row][c]
            if entry.is_zero():
                continue
            minor = det(row + 1, cols[:idx] + cols[idx + 1:])
            if minor.is_zero():
                continue
            term = entry.with_order(None) * minor
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return det(0, tuple(range(n)))


def symbolic_rank(M: Sequence[Sequence[MPoly]]) -> int:
    """Rank over the rational function field by exhaustive minor expansion."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    for r in range(min(rows, cols), 0, -1):
        for rs in itertools.combinations(range(rows), r):
            for cs in itertools.combinations(range(cols), r):
                sub = [[M[i][j] for j in cs] for i in rs]
                if not poly_det(sub).is_zero():
                    return r
    return 0


_RANK_SAMPLES = 3
_RANK_VALUES = [v for v in range(-7, 8) if v]


def generic_rank(M: Sequence[Sequence[MPoly]], seed: int = 20130601) -> int:
    """Rank of a polynomial matrix at a generic point.

    Evaluates at three points with coordinates drawn from {-7..7}\\{0};
    disagreement escalates to exact minor expansion.
    """
    rows = [list(r) for r in M]
    if not rows or not rows[0]:
        return 0
    nv = rows[0][0].nvars
    rng = random.Random(seed)
    ranks = []
    for _ in range(_RANK_SAMPLES):
        point = [Fraction(rng.choice(_RANK_VALUES)) for _ in range(nv)]
        ranks.append(rank([[e.evaluate(point) for e in r] for r in rows]))
    if len(set(ranks)) == 1:
        return ranks[0]
    return symbolic_rank(rows)


def jacobian(funcs: Sequence[MPoly]) -> list[list[MPoly]]:
    return [f.gradient() for f in funcs]


def field_matrix(fields: Sequence[PolyVectorField]) -> list[list[MPoly]]:
    return [list(X.components) for X in fields]
