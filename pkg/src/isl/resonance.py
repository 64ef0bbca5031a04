"""Resonance analysis for diagonal linear parts.

Rows of the coefficient matrix ``C`` are fields, columns are variables:
``Y_i = sum_j c_ij x_j d/dx_j``.  A monomial ``x^a`` is a common first
integral iff ``C a = 0``; a field term ``x^a d/dx_j`` is jointly resonant iff
``<a, c_i> = c_ij`` for every row ``i``.

Entries may be Gaussian rationals (elbolic eigenvalues); such rows are split
into real and imaginary parts before any integer computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegreeCapExceeded, InputError
from .exactalg import (
    GaussianRational, IntLattice, QMatrix, as_fraction, integer_kernel,
    integerize_rowspace, kernel_basis, rank,
)
from .series import grlex_key

DEFAULT_DEGREE_CAP = 40


def _rows(C) -> list[list]:
    if isinstance(C, QMatrix):
        return C.to_lists()
    rows = [list(r) for r in C]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise InputError("ragged coefficient matrix")
    return rows


def real_rows(C) -> list[list[Fraction]]:
    """Rational rows spanning the same resonance conditions as C."""
    out = []
    for row in _rows(C):
        if any(isinstance(x, GaussianRational) and x.im for x in row):
            out.append([x.re if isinstance(x, GaussianRational) else as_fraction(x) for x in row])
            out.append([x.im if isinstance(x, GaussianRational) else Fraction(0) for x in row])
        else:
            out.append([x.re if isinstance(x, GaussianRational) else as_fraction(x) for x in row])
    return out


def _ncols(C) -> int:
    if isinstance(C, QMatrix):
        return C.cols
    rows = _rows(C)
    if not rows:
        raise InputError("empty coefficient matrix")
    return len(rows[0])


def resonance_space(C) -> list[list[Fraction]]:
    """Rational basis of S = {a : C a = 0}."""
    rows = real_rows(C)
    m = _ncols(C)
    if not rows:
        return [[Fraction(int(i == j)) for i in range(m)] for j in range(m)]
    return kernel_basis(QMatrix(rows, m))


@dataclass(frozen=True)
class ResonanceLattice:
    space: tuple
    lattice: IntLattice
    hilbert_basis: tuple
    monoid_dimension: int

    @property
    def dimension(self) -> int:
        return len(self.space)

    @property
    def full_dimension(self) -> bool:
        """True when the monoid spans S (the 'dimension q over Z' condition)."""
        return self.monoid_dimension == len(self.space)


def _integer_matrix(C) -> list[list[int]]:
    rows = real_rows(C)
    if not rows:
        return []
    m = len(rows[0])
    _, Ct = integerize_rowspace(QMatrix(rows, m))
    out = []
    for row in Ct.to_lists():
        if any(x.denominator != 1 for x in row):
            raise InputError("integerization failed")
        out.append([int(x) for x in row])
    return out


def _dominates(x, y) -> bool:
    return all(a >= b for a, b in zip(x, y))


def _contejean_devie(A: list[list[int]], m: int, cap: int) -> list[tuple[int, ...]]:
    """Minimal nonzero nonnegative solutions of A x = 0 by completion."""
    cols = [tuple(A[i][j] for i in range(len(A))) for j in range(m)]
    basis: list[tuple[int, ...]] = []
    frontier = {tuple(int(i == j) for i in range(m)): cols[j] for j in range(m)}
    level = 1
    while frontier:
        if level > cap:
            raise DegreeCapExceeded(cap, len(frontier))
        solved = sorted(x for x, ax in frontier.items() if not any(ax))
        basis.extend(solved)
        nxt = {}
        for x, ax in frontier.items():
            if not any(ax):
                continue
            for j in range(m):
                if sum(a * b for a, b in zip(ax, cols[j])) >= 0:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt or any(_dominates(y, b) for b in basis):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(ax, cols[j]))
        frontier = nxt
        level += 1
    return basis


def monoid_hilbert_basis(C, degree_cap: int = DEFAULT_DEGREE_CAP) -> ResonanceLattice:
    """Hilbert basis of the monoid of nonnegative integer solutions of C a = 0."""
    if degree_cap < 1:
        raise InputError("degree_cap must be at least 1")
    m = _ncols(C)
    A = _integer_matrix(C)
    space = resonance_space(C)
    if A:
        lattice = IntLattice.from_generators(integer_kernel(A), m)
    else:
        lattice = IntLattice.from_generators([[int(i == j) for i in range(m)] for j in range(m)], m)
    if A:
        hb = _contejean_devie(A, m, degree_cap)
    else:
        hb = [tuple(int(i == j) for i in range(m)) for j in range(m)]
    hb = tuple(sorted(hb, key=grlex_key))
    dim = rank(QMatrix([list(v) for v in hb], m)) if hb else 0
    return ResonanceLattice(space=tuple(tuple(v) for v in space), lattice=lattice,
                            hilbert_basis=hb, monoid_dimension=dim)


def pairing(alpha: Sequence[int], row: Sequence):
    total = Fraction(0)
    for a, c in zip(alpha, row):
        if a:
            total = c * a + total
    return total


def resonance_defect(C, alpha: Sequence[int], j: int) -> list:
    """The divisors <alpha, c_i> - c_ij, one per row."""
    return [pairing(alpha, row) - row[j] for row in _rows(C)]


def is_jointly_resonant(C, alpha: Sequence[int], j: int) -> bool:
    """Whether x^alpha d/dx_j (j zero-based) commutes with every diagonal Y_i."""
    m = _ncols(C)
    if not 0 <= j < m:
        raise InputError(f"variable index {j} out of range for {m} variables")
    if len(alpha) != m or any(a < 0 for a in alpha):
        raise InputError("exponent must be a nonnegative vector of the right length")
    return not any(resonance_defect(C, alpha, j))


def _exponents_of_degree(m: int, d: int):
    for combo in itertools.combinations_with_replacement(range(m), d):
        e = [0] * m
        for k in combo:
            e[k] += 1
        yield tuple(e)


def resonant_monomials_up_to_degree(C, D: int) -> list[tuple[int, ...]]:
    """Nonconstant exponents of degree <= D with C a = 0, graded-lex ordered."""
    if D < 0:
        raise InputError("degree must be nonnegative")
    rows = _rows(C)
    m = _ncols(C)
    out = []
    for d in range(1, D + 1):
        for e in _exponents_of_degree(m, d):
            if all(pairing(e, row) == 0 for row in rows):
                out.append(e)
    return sorted(out, key=grlex_key)


def resonant_field_terms(C, degree: int) -> list[tuple[tuple[int, ...], int]]:
    """All jointly resonant (alpha, j) with |alpha| = degree."""
    m = _ncols(C)
    return [(e, j) for e in sorted(_exponents_of_degree(m, degree), key=grlex_key)
            for j in range(m) if is_jointly_resonant(C, e, j)]
