"""Nondegeneracy, joint eigenbases, (h, e) Cartan types and canonical forms
of commuting linear parts."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath
import numpy as np

from .errors import (
    DegenerateError, GenericityError, InputError, NotAFixedPoint,
    UnsupportedEigenvalues, VerificationError,
)
from .exactalg import (
    GaussianRational, QMatrix, UniPoly, characteristic_polynomial, is_squarefree,
    minimal_polynomial, nullspace, rank, rref, sturm_real_root_count,
)
from .series import MPoly, PolyVectorField, generic_rank, jacobian, linear_part
from .sysmodel import IntegrableSystem, Reduction, reduce_at_singular_point

log = logging.getLogger(__name__)

MAX_GENERICITY_ATTEMPTS = 32


def _primes():
    n = 2
    while True:
        if all(n % d for d in range(2, int(n ** 0.5) + 1)):
            yield n
        n += 1


def genericity_weights(p: int, attempts: int = MAX_GENERICITY_ATTEMPTS):
    """Deterministic coefficient vectors (1, t, t^2, ...) for t = 2, 3, 5, 7, ..."""
    primes = _primes()
    for _ in range(attempts):
        t = next(primes)
        yield [Fraction(t) ** i for i in range(p)]


@dataclass(frozen=True, eq=False)
class LinearPartFamily:
    matrices: tuple
    provenance: str = "given"
    names: tuple | None = None

    def __post_init__(self):
        mats = tuple(self.matrices)
        if not mats:
            raise InputError("a linear family needs at least one matrix")
        n = mats[0].rows
        for A in mats:
            if A.shape != (n, n):
                raise InputError("linear parts must be square and of equal size")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if not mats[i].commutator(mats[j]).is_zero():
                    raise InputError(f"linear parts {i + 1} and {j + 1} do not commute")
        object.__setattr__(self, "matrices", mats)
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"Y{i + 1}" for i in range(len(mats))))

    @property
    def p(self) -> int:
        return len(self.matrices)

    @property
    def m(self) -> int:
        return self.matrices[0].rows

    @property
    def rank(self) -> int:
        return rank([A.flatten() for A in self.matrices])

    def combination(self, weights: Sequence) -> QMatrix:
        acc = QMatrix.zeros(self.m, self.m)
        for w, A in zip(weights, self.matrices):
            acc = acc + A * w
        return acc

    def fields(self, order=None) -> list[PolyVectorField]:
        return [PolyVectorField.linear(A, order) for A in self.matrices]


def linear_parts_of(S: IntegrableSystem) -> tuple[LinearPartFamily, list[MPoly]]:
    """Linear parts of the fields and lowest homogeneous parts of the integrals at 0."""
    mats = []
    for name, X in zip(S.field_names, S.fields):
        try:
            mats.append(linear_part(X))
        except NotAFixedPoint:
            raise NotAFixedPoint(f"field {name} does not vanish at the origin") from None
    family = LinearPartFamily(tuple(mats), provenance="system", names=S.field_names)
    homs = []
    for name, F in zip(S.integral_names, S.integrals):
        nonconst = F - F.constant_term()
        if nonconst.is_zero():
            raise InputError(f"integral {name} is constant up to the truncation")
        homs.append(nonconst.homogeneous_part().with_order(None))
    for Y in family.fields():
        for name, G in zip(S.integral_names, homs):
            d = Y(G)
            if not d.is_zero():
                raise InputError(
                    f"homogeneous part of {name} is not invariant under the linear part: {d.render(S.var_names)}")
    return family, homs


@dataclass
class NondegeneracyVerdict:
    verdict: str
    semisimple: list
    minimal_polynomials: list
    family_rank_ok: bool
    integrals_independent: bool
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def nondegenerate(self) -> bool:
        return self.verdict == "nondegenerate"

    def summary(self) -> str:
        if self.nondegenerate:
            return "nondegenerate"
        return f"{self.verdict}: " + "; ".join(self.witnesses)


def is_nondegenerate(S: IntegrableSystem) -> NondegeneracyVerdict:
    family, homs = linear_parts_of(S)
    flags, polys, witnesses, notes = [], [], [], []
    for name, A in zip(family.names, family.matrices):
        mu = minimal_polynomial(A)
        ok = is_squarefree(mu)
        flags.append(ok)
        polys.append(mu)
        if not ok:
            witnesses.append(f"{name} minimal polynomial {mu.render('t')} not squarefree")
    r = family.rank
    rank_ok = r == family.p
    if not rank_ok:
        witnesses.append(f"linear parts span dimension {r}, expected {family.p}")
    g_ok = True
    if homs:
        gr = generic_rank(jacobian(homs))
        g_ok = gr == len(homs)
        if not g_ok:
            notes.append(f"homogeneous parts of the integrals have generic rank {gr}, expected {len(homs)}; "
                         "a different choice of integrals is needed")
    if not all(flags) or not rank_ok:
        verdict = "degenerate"
    elif not g_ok:
        verdict = "not-applicable"
        witnesses.append(notes[-1])
    else:
        verdict = "nondegenerate"
    return NondegeneracyVerdict(verdict=verdict, semisimple=flags, minimal_polynomials=polys,
                                family_rank_ok=rank_ok, integrals_independent=g_ok,
                                witnesses=witnesses, notes=notes)


@dataclass(frozen=True)
class CartanType:
    """(h, e) counts; ``null`` counts joint eigen-directions where every generator vanishes."""

    h: int
    e: int
    null: int = 0

    @property
    def dimension(self) -> int:
        return self.h + 2 * self.e

    def as_tuple(self) -> tuple[int, int]:
        return self.h, self.e


def generic_element(F: LinearPartFamily) -> tuple[QMatrix, list]:
    """First Z = sum t_i Y_i from the weight sequence with squarefree characteristic polynomial."""
    for w in genericity_weights(F.p):
        Z = F.combination(w)
        if is_squarefree(characteristic_polynomial(Z)):
            return Z, w
    raise GenericityError(
        f"no element with simple spectrum among {MAX_GENERICITY_ATTEMPTS} generic combinations; "
        "the family is degenerate or does not have full rank")


def cartan_type(F: LinearPartFamily) -> CartanType:
    Z, _ = generic_element(F)
    chi = characteristic_polynomial(Z)
    h = sturm_real_root_count(chi)
    if (F.m - h) % 2:
        raise VerificationError("odd number of non-real eigenvalues")
    null = int(chi(0) == 0)
    return CartanType(h=h, e=(F.m - h) // 2, null=null)


# ---------------------------------------------------------------------------
# exact eigen-data over Q(i)


def _integer_monic(mu: UniPoly) -> tuple[list[int], int]:
    """Monic integer q with q(s) = D^n mu(s/D); returns (ascending coeffs, D)."""
    n = mu.degree
    D = reduce(math.lcm, (c.denominator for c in mu.coeffs), 1)
    coeffs = [int(c * D ** (n - k)) for k, c in enumerate(mu.coeffs)]
    return coeffs, D


def gaussian_roots(mu: UniPoly) -> list[GaussianRational]:
    """All roots of a squarefree rational polynomial, if they lie in Q(i).

    Candidates come from a high-precision numeric solve and are accepted only
    after an exact check.
    """
    mu = mu.monic()
    n = mu.degree
    if n <= 0:
        return []
    q, D = _integer_monic(mu)
    if n == 1:
        cands = [complex(-q[0])]
    else:
        try:
            with mpmath.workdps(60):
                cands = mpmath.polyroots(list(reversed(q)), maxsteps=400, extraprec=200)
        except mpmath.NoConvergence as exc:
            raise UnsupportedEigenvalues(f"could not isolate the roots of {mu.render('t')}") from exc
    roots = []
    for z in cands:
        r = GaussianRational(int(mpmath.nint(mpmath.re(z))), int(mpmath.nint(mpmath.im(z))))
        val = GaussianRational(0)
        for c in reversed(q):
            val = val * r + c
        if val:
            raise UnsupportedEigenvalues(f"eigenvalues of {mu.render('t')} are not Gaussian rationals")
        roots.append(r / D)
    if len(set(roots)) != n:
        raise UnsupportedEigenvalues(f"could not separate the roots of {mu.render('t')}")
    return roots


def _root_key(r: GaussianRational):
    # real roots first, then conjugate pairs with the positive imaginary part leading
    return (r.im != 0, r.re, -abs(r.im) if r.im else 0, r.im < 0)


def _as_gauss(x) -> GaussianRational:
    return x if isinstance(x, GaussianRational) else GaussianRational(x)


def _gmat_vec(A: QMatrix, v: Sequence) -> list:
    return [sum((A[i, j] * v[j] for j in range(A.cols) if A[i, j]), GaussianRational(0))
            for i in range(A.rows)]


def _normalize(v: list) -> list:
    lead = next(x for x in v if x)
    return [x / lead for x in v]


def gaussian_inverse(T: list[list]) -> list[list]:
    n = len(T)
    one, zero = GaussianRational(1), GaussianRational(0)
    aug = [[_as_gauss(x) for x in row] + [one if i == j else zero for j in range(n)] for i, row in enumerate(T)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise InputError("eigenvector matrix is singular")
    return [row[n:] for row in red]


@dataclass(frozen=True)
class JointEigenbasis:
    """Columns of ``T`` are joint eigenvectors; ``c[i][j]`` is the eigenvalue of
    generator i on column j.  Conjugate eigenvalues get conjugate columns."""

    T: tuple
    Tinv: tuple
    c: tuple
    weights: tuple

    @property
    def is_real(self) -> bool:
        return all(not (isinstance(x, GaussianRational) and x.im) for row in self.c for x in row)


def _require_semisimple(F: LinearPartFamily):
    for A, name in zip(F.matrices, F.names):
        mu = minimal_polynomial(A)
        if not is_squarefree(mu):
            raise DegenerateError(f"degenerate: {name} minimal polynomial {mu.render('t')} not squarefree")


def joint_eigenbasis(F: LinearPartFamily) -> JointEigenbasis:
    """Simultaneous diagonalization over Q(i) of a commuting semisimple family."""
    m = F.m
    _require_semisimple(F)
    last_reason = "no weights tried"
    for w in genericity_weights(F.p):
        Z = F.combination(w)
        mu = minimal_polynomial(Z)
        roots = sorted(gaussian_roots(mu), key=_root_key)
        columns, cols_c = [], []
        seen = {}
        ok = True
        for lam in roots:
            if lam.im < 0 and lam.conjugate() in seen:
                vecs = [[x.conjugate() for x in v] for v in seen[lam.conjugate()]]
            else:
                M = [[GaussianRational(Z[i, j] - (lam.re if i == j else 0), -lam.im if i == j else 0)
                      for j in range(m)] for i in range(m)]
                vecs = [_normalize([_as_gauss(x) for x in v]) for v in nullspace(M, m)]
                seen[lam] = vecs
            for v in vecs:
                pivot = next(k for k, x in enumerate(v) if x)
                vals = []
                for A in F.matrices:
                    Av = _gmat_vec(A, v)
                    val = Av[pivot] / v[pivot]
                    if any(a != val * b for a, b in zip(Av, v)):
                        ok = False
                        break
                    vals.append(val)
                if not ok:
                    break
                columns.append(v)
                cols_c.append(vals)
            if not ok:
                break
        if not ok:
            last_reason = "joint eigenspaces not separated"
            continue
        if len(columns) != m:
            raise InputError("family is not diagonalizable")
        T = [[columns[j][i] for j in range(m)] for i in range(m)]
        Tinv = gaussian_inverse(T)
        c = [[cols_c[j][i] for j in range(m)] for i in range(F.p)]
        return JointEigenbasis(T=tuple(map(tuple, T)), Tinv=tuple(map(tuple, Tinv)),
                               c=tuple(map(tuple, c)), weights=tuple(w))
    raise GenericityError(f"joint eigenbasis not found: {last_reason}")


# ---------------------------------------------------------------------------
# canonical forms


def canonical_blocks(h: int, e: int) -> list[QMatrix]:
    """The hyperbolic generators, then (radial, rotational) per elbolic pair."""
    n = h + 2 * e
    out = []
    for j in range(h):
        E = [[Fraction(0)] * n for _ in range(n)]
        E[j][j] = Fraction(1)
        out.append(QMatrix(E, n))
    for k in range(e):
        a = h + 2 * k
        R = [[Fraction(0)] * n for _ in range(n)]
        J = [[Fraction(0)] * n for _ in range(n)]
        R[a][a] = R[a + 1][a + 1] = Fraction(1)
        J[a][a + 1] = Fraction(-1)
        J[a + 1][a] = Fraction(1)
        out.append(QMatrix(R, n))
        out.append(QMatrix(J, n))
    return out


@dataclass
class CanonicalForm:
    cartan: CartanType
    exact: bool
    V: object  # rows are the action-side coefficient vectors v_i
    P: object  # new basis vectors as columns: x_old = P x_new
    generators: list
    residual: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def blocks(self) -> list[QMatrix]:
        return canonical_blocks(self.cartan.h, self.cartan.e)


def canonical_linear_form(F: LinearPartFamily, allow_numeric: bool = True,
                          tolerance: float = 1e-9) -> CanonicalForm:
    if F.rank != F.p or F.p != F.m:
        raise InputError(f"canonical form needs {F.m} independent generators, got rank {F.rank} of {F.p}")
    _require_semisimple(F)
    ct = cartan_type(F)
    try:
        return _canonical_exact(F, ct)
    except UnsupportedEigenvalues as exc:
        if not allow_numeric:
            raise
        log.info("falling back to numeric canonical form: %s", exc)
        return _canonical_numeric(F, ct, tolerance, str(exc))


def _canonical_exact(F: LinearPartFamily, ct: CartanType) -> CanonicalForm:
    eb = joint_eigenbasis(F)
    n = F.m
    hyp, pairs = [], []
    for j in range(n):
        lam_col = [eb.c[i][j] for i in range(F.p)]
        if all(not x.im for x in lam_col):
            hyp.append(j)
        elif next(x for x in lam_col if x.im).im > 0:
            pairs.append(j)
    if len(hyp) != ct.h or len(pairs) != ct.e:
        raise VerificationError("eigenvector split disagrees with the Cartan type")
    cols, rrows = [], [[] for _ in range(F.p)]
    for j in hyp:
        cols.append([x.re for x in (eb.T[i][j] for i in range(n))])
        for i in range(F.p):
            rrows[i].append(eb.c[i][j].re)
    for j in pairs:
        v = [eb.T[i][j] for i in range(n)]
        cols.append([x.re for x in v])
        cols.append([-x.im for x in v])
        for i in range(F.p):
            rrows[i].append(eb.c[i][j].re)
            rrows[i].append(eb.c[i][j].im)
    P = QMatrix([[cols[j][i] for j in range(n)] for i in range(n)], n)
    R = QMatrix(rrows, n)
    V = R.inverse()
    Pinv = P.inverse()
    blocks = canonical_blocks(ct.h, ct.e)
    gens = []
    for i in range(n):
        G = Pinv @ F.combination(V.row(i)) @ P
        if G != blocks[i]:
            raise VerificationError(f"canonical generator {i + 1} does not match its block")
        gens.append(PolyVectorField.linear(blocks[i]))
    return CanonicalForm(cartan=ct, exact=True, V=V, P=P, generators=gens)


def _canonical_numeric(F: LinearPartFamily, ct: CartanType, tol: float, reason: str) -> CanonicalForm:
    n = F.m
    mats = [np.array([[float(x) for x in A.row(i)] for i in range(n)]) for A in F.matrices]
    Z, _ = generic_element(F)
    Zf = np.array([[float(x) for x in Z.row(i)] for i in range(n)])
    vals, vecs = np.linalg.eig(Zf)
    scale = max(1.0, float(np.max(np.abs(vals))))
    real_idx = sorted((k for k in range(n) if abs(vals[k].imag) <= 1e-9 * scale), key=lambda k: vals[k].real)
    pos_idx = sorted((k for k in range(n) if vals[k].imag > 1e-9 * scale),
                     key=lambda k: (vals[k].real, vals[k].imag))
    if len(real_idx) != ct.h or len(pos_idx) != ct.e:
        raise VerificationError("numeric eigenvalue split disagrees with the exact Cartan type")
    cols, rrows = [], [[] for _ in range(F.p)]
    for k in real_idx:
        v = vecs[:, k].real
        cols.append(v / np.linalg.norm(v))
        for i, A in enumerate(mats):
            rrows[i].append(float(v @ A @ v / (v @ v)))
    for k in pos_idx:
        v = vecs[:, k]
        cols.append(v.real)
        cols.append(-v.imag)
        for i, A in enumerate(mats):
            lam = complex(np.vdot(v, A @ v) / np.vdot(v, v))
            rrows[i].append(lam.real)
            rrows[i].append(lam.imag)
    P = np.column_stack(cols)
    V = np.linalg.inv(np.array(rrows))
    Pinv = np.linalg.inv(P)
    blocks = canonical_blocks(ct.h, ct.e)
    residual = 0.0
    for i in range(n):
        G = Pinv @ sum(V[i, k] * mats[k] for k in range(F.p)) @ P
        B = np.array([[float(x) for x in blocks[i].row(r)] for r in range(n)])
        residual = max(residual, float(np.max(np.abs(G - B))))
    if residual > tol:
        raise VerificationError(f"numeric canonical form residual {residual:.3g} exceeds {tol:.3g}")
    return CanonicalForm(cartan=ct, exact=False, V=V, P=P,
                         generators=[PolyVectorField.linear(b) for b in blocks],
                         residual=residual, notes=[f"numeric path: {reason}"])


# ---------------------------------------------------------------------------
# singular points


@dataclass
class Classification:
    cartan: CartanType | None
    corank: int
    regular_rank: int
    verdict: NondegeneracyVerdict | None
    reduction: Reduction
    notes: list = field(default_factory=list)


def classify_singular_point(S: IntegrableSystem, z: Sequence | None = None) -> Classification:
    if z is None:
        z = [0] * S.nvars
    red = reduce_at_singular_point(S, z)
    R = red.system
    k = len(red.rectified)
    corank = S.nvars - k
    notes = list(red.notes)
    if corank == 0:
        return Classification(CartanType(0, 0), 0, k, None, red, notes)
    if R.p == 0:
        notes.append("no fields remain after reduction")
        return Classification(None, corank, k, None, red, notes)
    verdict = is_nondegenerate(R)
    if verdict.verdict == "degenerate":
        raise DegenerateError(verdict.summary(), verdict)
    family, _ = linear_parts_of(R)
    try:
        ct = cartan_type(family)
    except GenericityError as exc:
        notes.append(f"Cartan type undefined: {exc}")
        ct = None
    if ct is not None and ct.dimension != corank:
        raise VerificationError(f"h + 2e = {ct.dimension} differs from corank {corank}")
    return Classification(ct, corank, k, verdict, red, notes)
