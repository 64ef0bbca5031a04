"""Integrable systems of type (p, q): verification, recombination, reduction,
and the parameter suspension used for rigidity arguments."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError, VerificationError
from .exactalg import QMatrix, as_fraction, rref
from .series import (
    DEFAULT_ORDER, CoordinateChange, MPoly, PolyVectorField, _min_order,
    compose, default_names, field_matrix, generic_rank, invert_jet, jacobian,
    lie_bracket, lie_derivative, poly_det, variables,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IntegrableSystem:
    """p commuting polynomial fields and q first integrals on m variables.

    ``p = 0`` is allowed only for the output of a full reduction at a regular
    point; user-facing constructors require at least one field.
    """

    fields: tuple
    integrals: tuple = ()
    order: int = DEFAULT_ORDER
    nvars: int | None = None
    var_names: tuple | None = None
    field_names: tuple | None = None
    integral_names: tuple | None = None
    points: dict = field(default_factory=dict)

    def __post_init__(self):
        fields = tuple(self.fields)
        integrals = tuple(self.integrals)
        m = self.nvars
        if m is None:
            if not fields:
                raise InputError("nvars is required for a system without fields")
            m = fields[0].nvars
        for X in fields:
            if X.nvars != m:
                raise InputError(f"field has {X.nvars} components, system has {m} variables")
        for F in integrals:
            if F.nvars != m:
                raise InputError(f"integral has {F.nvars} variables, system has {m}")
        N = self.order
        object.__setattr__(self, "nvars", m)
        object.__setattr__(self, "fields", tuple(X.with_order(N) for X in fields))
        object.__setattr__(self, "integrals", tuple(F.with_order(N) for F in integrals))
        names = tuple(self.var_names) if self.var_names else tuple(default_names(m))
        if len(names) != m:
            raise InputError("wrong number of variable names")
        object.__setattr__(self, "var_names", names)
        fn = tuple(self.field_names) if self.field_names else tuple(f"X{i + 1}" for i in range(len(fields)))
        gn = tuple(self.integral_names) if self.integral_names else tuple(f"F{i + 1}" for i in range(len(integrals)))
        if len(fn) != len(fields) or len(gn) != len(integrals):
            raise InputError("wrong number of field or integral names")
        object.__setattr__(self, "field_names", fn)
        object.__setattr__(self, "integral_names", gn)

    @property
    def m(self) -> int:
        return self.nvars

    @property
    def p(self) -> int:
        return len(self.fields)

    @property
    def q(self) -> int:
        return len(self.integrals)

    @property
    def type(self) -> tuple[int, int]:
        return self.p, self.q

    def __eq__(self, other):
        if not isinstance(other, IntegrableSystem):
            return NotImplemented
        return (self.nvars == other.nvars and self.fields == other.fields
                and self.integrals == other.integrals and self.order == other.order)

    def __hash__(self):
        return hash((self.nvars, self.fields, self.integrals, self.order))

    def replace(self, **changes) -> "IntegrableSystem":
        data = dict(fields=self.fields, integrals=self.integrals, order=self.order, nvars=self.nvars,
                    var_names=self.var_names, field_names=self.field_names,
                    integral_names=self.integral_names, points=self.points)
        data.update(changes)
        return IntegrableSystem(**data)

    def translated(self, z: Sequence) -> "IntegrableSystem":
        """The same system in coordinates centered at z (exact shift, re-truncated)."""
        z = [as_fraction(v) for v in z]
        if len(z) != self.nvars:
            raise InputError("point has wrong dimension")
        if not any(z):
            return self
        return self.replace(
            fields=[PolyVectorField(c.shift(z) for c in X) for X in self.fields],
            integrals=[F.shift(z) for F in self.integrals])

    def render(self) -> list[str]:
        lines = [f"{n} = {X.render(self.var_names)}" for n, X in zip(self.field_names, self.fields)]
        lines += [f"{n} = {F.render(self.var_names)}" for n, F in zip(self.integral_names, self.integrals)]
        return lines


@dataclass
class SystemReport:
    commutation_ok: bool
    integrals_ok: bool
    independence_fields_ok: bool
    independence_integrals_ok: bool
    witnesses: dict
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.commutation_ok and self.integrals_ok
                and self.independence_fields_ok and self.independence_integrals_ok)


def verify(S: IntegrableSystem) -> SystemReport:
    """Check brackets, first integrals and generic independence; never raises."""
    names = S.var_names
    wit = {"commutation": [], "integrals": [], "independence_fields": [], "independence_integrals": []}
    notes = []
    for i in range(S.p):
        for j in range(i + 1, S.p):
            br = lie_bracket(S.fields[i], S.fields[j])
            if not br.is_zero():
                wit["commutation"].append(
                    f"[{S.field_names[i]}, {S.field_names[j]}] = {br.render(names)}")
                moving = any(c.constant_term() != 0 for X in (S.fields[i], S.fields[j]) for c in X)
                if moving and S.order is not None and br.truncate(S.order - 1).is_zero():
                    notes.append(
                        f"[{S.field_names[i]}, {S.field_names[j]}] fails only in degree {S.order}, which "
                        f"depends on degree {S.order + 1} terms of a field not vanishing at the origin")
    for i, X in enumerate(S.fields):
        for j, F in enumerate(S.integrals):
            d = lie_derivative(X, F)
            if not d.is_zero():
                wit["integrals"].append(f"{S.field_names[i]}({S.integral_names[j]}) = {d.render(names)}")
    if S.p:
        r = generic_rank(field_matrix(S.fields))
        if r != S.p:
            wit["independence_fields"].append(f"generic rank of field matrix is {r}, expected {S.p}")
    if S.q:
        r = generic_rank(jacobian(S.integrals))
        if r != S.q:
            wit["independence_integrals"].append(f"generic rank of integral Jacobian is {r}, expected {S.q}")
    if S.p + S.q != S.m:
        notes.append(f"p + q = {S.p + S.q} differs from m = {S.m}")
        log.warning("system of type (%d,%d) on %d variables: p + q != m", S.p, S.q, S.m)
    return SystemReport(
        commutation_ok=not wit["commutation"],
        integrals_ok=not wit["integrals"],
        independence_fields_ok=not wit["independence_fields"],
        independence_integrals_ok=not wit["independence_integrals"],
        witnesses=wit, notes=notes)


@dataclass(frozen=True)
class SingularPointInfo:
    point: tuple
    rank: int
    independent: tuple
    corank: int


def _independent_rows(rows) -> list[int]:
    chosen: list[int] = []
    basis: list = []
    for i, r in enumerate(rows):
        red, piv = rref(basis + [list(r)])
        if len(piv) > len(chosen):
            chosen.append(i)
            basis = [list(x) for x in red[:len(piv)]]
    return chosen


def singular_rank_at(S: IntegrableSystem, z: Sequence) -> SingularPointInfo:
    """Rank k of the field values at z and the greedy-by-index independent subset."""
    z = tuple(as_fraction(v) for v in z)
    if len(z) != S.nvars:
        raise InputError("point has wrong dimension")
    values = [X.evaluate(z) for X in S.fields]
    chosen = _independent_rows(values)
    return SingularPointInfo(point=z, rank=len(chosen), independent=tuple(chosen),
                             corank=S.nvars - len(chosen))


def geometric_recombine(S: IntegrableSystem, f: Sequence[Sequence[MPoly]]) -> IntegrableSystem:
    """New fields X'_i = sum_j f_ij X_j for a matrix of first integrals."""
    f = [list(row) for row in f]
    if len(f) != S.p or any(len(row) != S.p for row in f):
        raise InputError(f"recombination matrix must be {S.p}x{S.p}")
    N = S.order
    for i, row in enumerate(f):
        for j, entry in enumerate(row):
            if entry.nvars != S.nvars:
                raise InputError("recombination entry has the wrong number of variables")
            for k, X in enumerate(S.fields):
                if not lie_derivative(X, entry.with_order(N)).is_zero():
                    raise InputError(
                        f"entry ({i + 1},{j + 1}) = {entry.render(S.var_names)} is not a first integral "
                        f"of {S.field_names[k]}")
    const = QMatrix([[e.constant_term() for e in row] for row in f], S.p)
    if const.det() == 0:
        raise InputError("recombination matrix is singular at the origin")
    new = []
    for row in f:
        acc = PolyVectorField.zero(S.nvars, N)
        for entry, X in zip(row, S.fields):
            acc = acc + entry.with_order(N) * X
        new.append(acc)
    return S.replace(fields=new)


# ---------------------------------------------------------------------------
# reduction at a non-fixed singular point


@dataclass
class Reduction:
    """Outcome of rectifying the independent fields at a point.

    ``change`` maps the original coordinates (centered at ``point``) to the
    rectified ones, ``inverse`` goes back.  Rectified field ``rectified[l]``
    becomes ``d/dy_{slots[l]}``; ``kept`` lists the retained coordinate slots
    and ``drift`` holds, for each kept field, its (dropped) components along
    the rectified directions.
    """

    system: IntegrableSystem
    change: CoordinateChange
    inverse: CoordinateChange
    point: tuple
    rectified: tuple
    slots: tuple
    kept: tuple
    kept_fields: tuple
    drift: tuple
    notes: list = field(default_factory=list)

    def __iter__(self):
        yield self.system
        yield self.change


def _flow_jet(X: PolyVectorField, start: Sequence[MPoly], time: MPoly, order: int) -> list[MPoly]:
    """Formal flow of X for time ``time`` from the point ``start`` (both jets in new variables)."""
    m = X.nvars
    Xw = X.with_order(order)
    current = variables(m, order)
    out = [MPoly.zero(time.nvars, order) for _ in range(m)]
    tpow = MPoly.constant(1, time.nvars, order)
    fact = 1
    n = 0
    while n <= order:
        if n:
            fact *= n
            tpow = tpow * time
            current = [lie_derivative(Xw, c) for c in current]
        if tpow.is_zero() or all(c.is_zero() for c in current):
            break
        for k in range(m):
            if current[k].is_zero():
                continue
            out[k] = out[k] + (current[k].substitute(start, order=order) * tpow).scale(Fraction(1, fact))
        n += 1
    return out


def reduce_at_singular_point(S: IntegrableSystem, z: Sequence) -> Reduction:
    """Rectify the fields independent at z and forget the rectified directions."""
    info = singular_rank_at(S, z)
    k = info.rank
    N = S.order
    m = S.nvars
    point = info.point
    local = S.translated(point)
    if k == 0:
        ident = CoordinateChange.identity(m, N)
        return Reduction(system=local, change=CoordinateChange(ident.images, point), inverse=ident,
                         point=point, rectified=(), slots=(), kept=tuple(range(m)),
                         kept_fields=tuple(range(S.p)), drift=tuple(() for _ in range(S.p)))
    W = N + 1
    rect = list(info.independent)
    values = [local.fields[i].evaluate([0] * m) for i in rect]
    _, pivots = rref(values)
    slots = list(pivots)
    kept = [c for c in range(m) if c not in slots]
    # inverse map psi: flows of the rectified fields from the transverse slice
    ys = variables(m, W)
    P = [ys[c] if c in kept else MPoly.zero(m, W) for c in range(m)]
    for l in range(k - 1, -1, -1):
        X = local.fields[rect[l]].with_order(W)
        P = _flow_jet(X, P, ys[slots[l]], W)
    psi = CoordinateChange(P)
    phi = invert_jet(psi)
    pushed = [compose(X.with_order(W), phi, psi).with_order(N) for X in local.fields]
    for l, i in enumerate(rect):
        target = PolyVectorField.basis(slots[l], m, N)
        if pushed[i] != target:
            raise VerificationError(
                f"field {S.field_names[i]} did not rectify to d/dy{slots[l] + 1}: {pushed[i].render()}")
    integrals = [F.with_order(W).substitute(P).with_order(N) for F in local.integrals]
    others = [i for i in range(S.p) if i not in rect]
    notes = []

    def independent_of_slots(F: MPoly, what: str):
        for s in slots:
            d = F.diff(s).with_order(N - 1)
            if not d.is_zero():
                raise VerificationError(
                    f"{what} still depends on rectified coordinate y{s + 1}; "
                    "input may not commute or the truncation is too low")

    new_fields, drift = [], []
    for i in others:
        Xi = pushed[i]
        for c in range(m):
            independent_of_slots(Xi[c], f"field {S.field_names[i]}")
        new_fields.append(PolyVectorField(_drop(Xi[c], kept, N) for c in kept))
        drift.append(tuple(_drop(Xi[s], kept, N) for s in slots))
    new_integrals = []
    for j, F in enumerate(integrals):
        independent_of_slots(F, f"integral {S.integral_names[j]}")
        new_integrals.append(_drop(F, kept, N))
    for X in new_fields:
        if any(c.constant_term() for c in X):
            raise VerificationError("reduced field does not vanish at the point")
    if N < 2:
        notes.append("truncation below 2: independence of dropped coordinates is not checkable")
    notes.append("dependence on dropped coordinates above the truncation order is undetectable")
    reduced = IntegrableSystem(
        fields=new_fields, integrals=new_integrals, order=N, nvars=len(kept),
        var_names=tuple(f"y{c + 1}" for c in kept),
        field_names=tuple(S.field_names[i] for i in others),
        integral_names=S.integral_names)
    change = CoordinateChange([img.with_order(N) for img in phi.images], point)
    inverse = CoordinateChange([img.with_order(N) for img in psi.images])
    return Reduction(system=reduced, change=change, inverse=inverse, point=point,
                     rectified=tuple(rect), slots=tuple(slots), kept=tuple(kept),
                     kept_fields=tuple(others), drift=tuple(drift), notes=notes)


def _drop(F: MPoly, kept: Sequence[int], N: int) -> MPoly:
    """Restrict to the kept variables, discarding terms in dropped ones.

    Callers check beforehand that such terms vanish up to the truncation.
    """
    terms = {}
    drop = [j for j in range(F.nvars) if j not in kept]
    for e, c in F.terms.items():
        if any(e[j] for j in drop):
            continue
        terms[tuple(e[j] for j in kept)] = c
    return MPoly(len(kept), terms, N)


# ---------------------------------------------------------------------------
# parameter families and their suspension


@dataclass(frozen=True, eq=False)
class SystemFamily:
    """A family of type (p, q) systems on m variables with s polynomial parameters.

    Everything lives on m + s variables, the parameters being the last s;
    each field has only the m state components.
    """

    nstate: int
    nparams: int
    fields: tuple
    integrals: tuple = ()
    order: int = DEFAULT_ORDER
    var_names: tuple | None = None
    field_names: tuple | None = None
    integral_names: tuple | None = None

    def __post_init__(self):
        total = self.nstate + self.nparams
        for comps in self.fields:
            if len(comps) != self.nstate:
                raise InputError(f"family field has {len(comps)} components, expected {self.nstate}")
            if any(c.nvars != total for c in comps):
                raise InputError("family field coefficients must use state + parameter variables")
        for F in self.integrals:
            if F.nvars != total:
                raise InputError("family integrals must use state + parameter variables")

    @property
    def nvars(self) -> int:
        return self.nstate + self.nparams

    def names(self) -> tuple:
        if self.var_names:
            return tuple(self.var_names)
        return tuple(default_names(self.nstate)) + tuple(f"theta{i + 1}" for i in range(self.nparams))

    def member(self, theta: Sequence) -> IntegrableSystem:
        """The system at a fixed rational parameter value."""
        theta = [as_fraction(t) for t in theta]
        if len(theta) != self.nparams:
            raise InputError("wrong number of parameter values")
        m = self.nstate
        images = variables(m) + [MPoly.constant(t, m) for t in theta]

        def specialize(F):
            return F.with_order(None).substitute(images, order=None).with_order(self.order)

        return IntegrableSystem(
            fields=[PolyVectorField(specialize(c) for c in comps) for comps in self.fields],
            integrals=[specialize(F) for F in self.integrals], order=self.order, nvars=m,
            var_names=self.names()[:m], field_names=self.field_names,
            integral_names=self.integral_names)

    @classmethod
    def from_system(cls, S: IntegrableSystem, nparams: int) -> "SystemFamily":
        """Read the last ``nparams`` variables of S as parameters.

        The fields must have no components along the parameter directions.
        """
        m = S.nvars - nparams
        if m < 1 or nparams < 0:
            raise InputError("need at least one state variable")
        for name, X in zip(S.field_names, S.fields):
            if any(not X[c].is_zero() for c in range(m, S.nvars)):
                raise InputError(f"field {name} has a component along a parameter direction")
        return cls(nstate=m, nparams=nparams, fields=tuple(tuple(X[c] for c in range(m)) for X in S.fields),
                   integrals=tuple(S.integrals), order=S.order, var_names=S.var_names,
                   field_names=S.field_names, integral_names=S.integral_names)


def suspend_family(family: SystemFamily) -> IntegrableSystem:
    """One system of type (p, q + s): parameters become extra coordinates
    and extra first integrals."""
    if not isinstance(family, SystemFamily):
        raise InputError("suspend_family expects a SystemFamily")
    total = family.nvars
    N = family.order
    fields = []
    for comps in family.fields:
        fields.append(PolyVectorField(list(comps) + [MPoly.zero(total, N)] * family.nparams))
    names = family.names()
    params = [MPoly.variable(family.nstate + i, total, N) for i in range(family.nparams)]
    integral_names = tuple(family.integral_names or (f"F{i + 1}" for i in range(len(family.integrals))))
    integral_names += tuple(names[family.nstate:])
    return IntegrableSystem(fields=fields, integrals=list(family.integrals) + params, order=N,
                            nvars=total, var_names=names, field_names=family.field_names,
                            integral_names=integral_names)
