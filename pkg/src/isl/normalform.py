"""Truncated Poincare-Dulac normalization, the division lemma and geometric
linearization of integrable systems at nondegenerate points.

The homological equation is solved in joint-eigenvector coordinates (over
Q(i) when elbolic components are present) where every linear generator is
diagonal.  Each degree is removed by the time-one flow of a homogeneous
generator G_d; the results are mapped back to the original real coordinates,
where every coefficient must come out rational.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .classify import (
    JointEigenbasis, LinearPartFamily, cartan_type, is_nondegenerate,
    joint_eigenbasis, linear_parts_of,
)
from .errors import (
    DegenerateError, DivisionError, GenericityError, InputError, VerificationError,
)
from .exactalg import GaussianRational, QMatrix, integerize_rowspace, rref, to_real
from .resonance import pairing
from .series import (
    CoordinateChange, MPoly, PolyVectorField, lie_series_field,
    lie_series_function, linear_part, variables,
)
from .sysmodel import IntegrableSystem, Reduction, reduce_at_singular_point

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# moving between real and eigen coordinates


def _demote(x):
    if isinstance(x, GaussianRational) and not x.im:
        return x.re
    return x


def _linear_images(M: Sequence[Sequence], nvars: int, order) -> list[MPoly]:
    """Images x_k = sum_j M[k][j] y_j."""
    out = []
    for row in M:
        terms = {}
        for j, c in enumerate(row):
            c = _demote(c)
            if c:
                terms[tuple(int(i == j) for i in range(nvars))] = c
        out.append(MPoly(nvars, terms, order))
    return out


def _transform_field(X: PolyVectorField, M: Sequence[Sequence], Minv: Sequence[Sequence]) -> PolyVectorField:
    """The field in coordinates w with x = M w: Minv * X(M w)."""
    n = X.nvars
    images = _linear_images(M, n, X.order)
    comps = [c.substitute(images) for c in X.components]
    out = []
    for row in Minv:
        acc = MPoly.zero(n, X.order)
        for c, comp in zip(row, comps):
            c = _demote(c)
            if c:
                acc = acc + comp.scale(c)
        out.append(acc)
    return PolyVectorField(out)


def _transform_function(F: MPoly, M: Sequence[Sequence]) -> MPoly:
    return F.substitute(_linear_images(M, F.nvars, F.order))


def _realify(F: MPoly, what: str) -> MPoly:
    try:
        return F.map_coeffs(to_real)
    except ValueError:
        raise VerificationError(f"{what} has non-real coefficients after returning to real coordinates") from None


def _realify_field(X: PolyVectorField, what: str) -> PolyVectorField:
    return PolyVectorField(_realify(c, what) for c in X.components)


def _eigen_matrices(eb: JointEigenbasis):
    """T and T^-1 with entries demoted to Fractions when everything is real."""
    T = [[_demote(x) for x in row] for row in eb.T]
    Tinv = [[_demote(x) for x in row] for row in eb.Tinv]
    return T, Tinv


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalizationResult:
    """Outcome of a truncated normalization.

    ``change`` expresses the original (local) coordinates as functions of
    the normalizing ones, ``inverse_change`` the normalizing coordinates as
    functions of the original ones.  ``f`` is the p x p matrix of first
    integrals with ``fields[i] = sum_k f[i][k] * Ytilde_k`` once division has
    run; ``Ytilde`` are the linear parts rescaled by ``scaling``.
    """

    change: CoordinateChange
    inverse_change: CoordinateChange
    fields: list
    integrals: list
    degree: int
    family: LinearPartFamily
    eigenbasis: JointEigenbasis
    generators: list = field(default_factory=list)
    f: list | None = None
    scaling: QMatrix | None = None
    eigen_fields: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def is_identity(self) -> bool:
        return self.inverse_change.is_identity()

    @property
    def linear_fields(self) -> list[PolyVectorField]:
        return self.family.fields(self.degree)

    @property
    def system(self) -> IntegrableSystem:
        return IntegrableSystem(fields=self.fields, integrals=self.integrals, order=self.degree)


def _homological_generator(fields: list[PolyVectorField], c, d: int, order: int) -> PolyVectorField | None:
    """Degree-d generator removing every non-resonant term of degree d."""
    n = fields[0].nvars
    coeffs: dict[tuple, object] = {}
    seen = set()
    for X in fields:
        for j, comp in enumerate(X.components):
            for e in comp.terms:
                if sum(e) == d:
                    seen.add((e, j))
    for e, j in seen:
        for r, row in enumerate(c):
            delta = pairing(e, row) - row[j]
            if delta:
                coef = fields[r][j].terms.get(e)
                if coef:
                    coeffs[(e, j)] = _demote(-coef / delta)
                break
    if not coeffs:
        return None
    comps = [dict() for _ in range(n)]
    for (e, j), v in coeffs.items():
        comps[j][e] = v
    return PolyVectorField(MPoly(n, t, order) for t in comps)


def nonresonant_terms(X: PolyVectorField, c, low: int = 2) -> list[tuple]:
    out = []
    for j, comp in enumerate(X.components):
        for e, v in comp.terms.items():
            if sum(e) >= low and any(pairing(e, row) - row[j] for row in c):
                out.append((e, j, v))
    return out


def poincare_dulac(S: IntegrableSystem, N: int | None = None) -> NormalizationResult:
    """Remove every non-resonant term of degree 2..N from all fields at once."""
    N = S.order if N is None else N
    if N < 1:
        raise InputError("normalization degree must be at least 1")
    if N > S.order:
        raise InputError(f"requested degree {N} exceeds the system truncation {S.order}")
    verdict = is_nondegenerate(S)
    if not verdict.nondegenerate:
        raise DegenerateError(verdict.summary(), verdict)
    family, _ = linear_parts_of(S)
    eb = joint_eigenbasis(family)
    c = eb.c
    T, Tinv = _eigen_matrices(eb)
    m = S.nvars
    fields = [_transform_field(X.with_order(N), T, Tinv) for X in S.fields]
    integrals = [_transform_function(F.with_order(N), T) for F in S.integrals]
    gens: list[tuple[int, PolyVectorField]] = []
    for d in range(2, N + 1):
        G = _homological_generator(fields, c, d, N)
        if G is None:
            continue
        gens.append((d, G))
        fields = [lie_series_field(G, X, sign=-1, order=N) for X in fields]
        integrals = [lie_series_function(G, F, sign=-1, order=N) for F in integrals]
        for i, X in enumerate(fields):
            bad = [t for t in nonresonant_terms(X, c) if sum(t[0]) == d]
            if bad:
                e, j, v = bad[0]
                raise VerificationError(
                    f"non-resonant term survives in {S.field_names[i]} at degree {d}: "
                    f"exponent {e}, component {j + 1}, coefficient {v}; the fields may not commute")
    for i, X in enumerate(fields):
        if nonresonant_terms(X, c):
            raise VerificationError(f"non-resonant terms remain in {S.field_names[i]}")
    for k, F in enumerate(integrals):
        for e in F.terms:
            if any(pairing(e, row) for row in c):
                raise VerificationError(
                    f"normalized integral {S.integral_names[k]} has a non-resonant monomial {e}")
    # coordinate changes in eigen coordinates: forward new(old), backward old(new)
    ys = variables(m, N)
    forward = list(ys)
    for _, G in reversed(gens):
        forward = [lie_series_function(G, f, sign=1, order=N) for f in forward]
    backward = list(ys)
    for _, G in gens:
        backward = [lie_series_function(G, f, sign=-1, order=N) for f in backward]
    # conjugate back to real coordinates: u = T y
    eigen_fields = fields
    real_fields = [_realify_field(_transform_field(X, Tinv, T), "normalized field") for X in fields]
    real_integrals = [_realify(_transform_function(F, Tinv), "normalized integral") for F in integrals]

    def to_real_map(images):
        inner = _linear_images(Tinv, m, N)
        subbed = [img.substitute(inner) for img in images]
        out = []
        for row in T:
            acc = MPoly.zero(m, N)
            for coef, s in zip(row, subbed):
                if coef:
                    acc = acc + s.scale(coef)
            out.append(_realify(acc, "coordinate change"))
        return out

    inverse_change = CoordinateChange(to_real_map(forward))
    change = CoordinateChange(to_real_map(backward))
    result = NormalizationResult(
        change=change, inverse_change=inverse_change, fields=real_fields, integrals=real_integrals,
        degree=N, family=family, eigenbasis=eb, generators=gens, eigen_fields=eigen_fields,
        notes=list(verdict.notes))
    return result


# ---------------------------------------------------------------------------
# division


def _field_inverse(M: list[list]) -> list[list]:
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise InputError("linear family is not independent")
    return [[_demote(x) for x in row[n:]] for row in red]


def _divide_diagonal(X: PolyVectorField, c, N: int, solve_order: str) -> list[MPoly]:
    """f with X = sum_i f_i Y_i for diagonal Y_i = sum_j c_ij y_j d/dy_j."""
    m = X.nvars
    p = len(c)
    for j, comp in enumerate(X.components):
        for e in comp.terms:
            if e[j] == 0:
                raise DivisionError(
                    f"component {j + 1} has a term {e} not divisible by its coordinate; "
                    "X is not in the span of the generators (wedge condition fails)")
    cols = [[c[i][j] for i in range(p)] for j in range(m)]
    red, pivots = rref(cols)
    if len(pivots) != p:
        raise InputError("linear family is not independent")
    f_terms = [dict() for _ in range(p)]
    if solve_order == "monomial":
        alphas = set()
        for j, comp in enumerate(X.components):
            for e in comp.terms:
                alphas.add(e[:j] + (e[j] - 1,) + e[j + 1:])
        for a in sorted(alphas):
            rhs = []
            for j in range(m):
                beta = a[:j] + (a[j] + 1,) + a[j + 1:]
                rhs.append(X.components[j].terms.get(beta, Fraction(0)))
            aug = [list(r) + [b] for r, b in zip(cols, rhs)]
            red_a, piv_a = rref(aug)
            if p in piv_a:
                raise DivisionError(f"no solution at monomial {a}: X is not in the span of the generators")
            for k, pc in enumerate(piv_a):
                v = _demote(red_a[k][p])
                if v:
                    f_terms[pc][a] = v
    elif solve_order == "field":
        # invert the square block on a set of independent coordinates, one field at a time
        J = []
        basis = []
        for j in range(m):
            red_j, piv_j = rref(basis + [cols[j]])
            if len(piv_j) > len(J):
                J.append(j)
                basis = [list(r) for r in red_j[:len(piv_j)]]
            if len(J) == p:
                break
        Minv = _field_inverse([cols[j] for j in J])
        quotients = []
        for j in J:
            q = {}
            for e, v in X.components[j].terms.items():
                q[e[:j] + (e[j] - 1,) + e[j + 1:]] = v
            quotients.append(q)
        for i in range(p):
            acc: dict = {}
            for k in range(p):
                w = Minv[i][k]
                if not w:
                    continue
                for a, v in quotients[k].items():
                    acc[a] = acc.get(a, 0) + w * v
            f_terms[i] = {a: _demote(v) for a, v in acc.items() if v}
    else:
        raise InputError(f"unknown solve order {solve_order!r}")
    fs = [MPoly(m, t, N) for t in f_terms]
    # residual and annihilation checks
    for j in range(m):
        acc = X.components[j].with_order(N)
        yj = MPoly.variable(j, m, N)
        for i in range(p):
            if c[i][j]:
                acc = acc - (fs[i] * yj).scale(c[i][j])
        if not acc.is_zero():
            raise DivisionError(f"residual in component {j + 1}: X is not in the span of the generators")
    for i, fi in enumerate(fs):
        for e in fi.terms:
            if any(pairing(e, row) for row in c):
                raise DivisionError(
                    f"quotient f{i + 1} has a non-resonant monomial {e}; the field does not commute with the family")
    return fs


def _as_family(F) -> LinearPartFamily:
    if isinstance(F, LinearPartFamily):
        return F
    mats = []
    for Y in F:
        if isinstance(Y, QMatrix):
            mats.append(Y)
        else:
            if Y.degree > 1:
                raise InputError("division family must consist of linear fields")
            mats.append(linear_part(Y))
    return LinearPartFamily(tuple(mats))


def divide_by_cartan(X: PolyVectorField, F, N: int | None = None,
                     solve_order: str = "monomial") -> list[MPoly]:
    """Unique first integrals f_i with X = sum f_i Y_i modulo degree N + 1."""
    family = _as_family(F)
    if X.nvars != family.m:
        raise InputError("field and family live in different dimensions")
    if N is None:
        N = X.order
    if N is None:
        raise InputError("a truncation degree is required")
    X = X.with_order(N)
    diagonal = all(A[i, j] == 0 for A in family.matrices for i in range(family.m)
                   for j in range(family.m) if i != j)
    if diagonal:
        c = [[A[j, j] for j in range(family.m)] for A in family.matrices]
        return _divide_diagonal(X, c, N, solve_order)
    eb = joint_eigenbasis(family)
    T, Tinv = _eigen_matrices(eb)
    Xy = _transform_field(X, T, Tinv)
    fs = _divide_diagonal(Xy, eb.c, N, solve_order)
    return [_realify(_transform_function(f, Tinv), "quotient") for f in fs]


def _constant_det(rows: list[list]) -> Fraction:
    return QMatrix([[e.constant_term() for e in row] for row in rows], len(rows)).det()


def geometric_linearize(S: IntegrableSystem, N: int | None = None) -> NormalizationResult:
    """Normalize, then write each normalized field over the rescaled linear parts."""
    res = poincare_dulac(S, N)
    N = res.degree
    family = res.family
    A, _ = integerize_rowspace(QMatrix([M.flatten() for M in family.matrices], family.m ** 2))
    scale = [A[i, i] for i in range(family.p)]
    ctilde = [[x * s for x in row] for row, s in zip(res.eigenbasis.c, scale)]
    T, Tinv = _eigen_matrices(res.eigenbasis)
    f = []
    for X in res.eigen_fields:
        fs = _divide_diagonal(X, ctilde, N, "monomial")
        f.append([_realify(_transform_function(q, Tinv), "first-integral matrix") for q in fs])
    d0 = _constant_det(f)
    if d0 == 0:
        raise VerificationError("first-integral matrix is singular at the origin")
    if d0 * A.det() != 1:
        raise VerificationError(f"det f(0) = {d0} does not match the generator rescaling")
    res.f = f
    res.scaling = A
    return res


# ---------------------------------------------------------------------------
# product structure at non-fixed points


@dataclass
class ProductDecomposition:
    reduction: Reduction
    normalization: NormalizationResult | None
    cartan: object
    regular_rank: int
    corank: int
    notes: list = field(default_factory=list)

    @property
    def regular_generators(self) -> list[int]:
        """Coordinate slots on which the rectified fields act as d/dy_k."""
        return list(self.reduction.slots)


def product_decomposition(S: IntegrableSystem, z: Sequence | None = None, N: int | None = None) -> ProductDecomposition:
    if z is None:
        z = [0] * S.nvars
    red = reduce_at_singular_point(S, z)
    R = red.system
    k = len(red.rectified)
    notes = list(red.notes)
    if R.p == 0:
        return ProductDecomposition(red, None, None, k, S.nvars - k, notes)
    norm = geometric_linearize(R, N)
    family, _ = linear_parts_of(R)
    try:
        ct = cartan_type(family)
    except GenericityError as exc:
        notes.append(f"Cartan type undefined: {exc}")
        ct = None
    return ProductDecomposition(red, norm, ct, k, S.nvars - k, notes)
