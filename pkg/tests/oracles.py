"""Independent reference implementations used to check the library.

Nothing here imports the routines under test; each oracle takes a different
route (brute force, interval arithmetic, sympy) to the same answer.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath
import sympy


# ---------------------------------------------------------------------------
# linear algebra by brute force


def leibniz_det(M):
    n = len(M)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= M[i][perm[i]]
            if not prod:
                break
        total += -prod if inv % 2 else prod
    return total


def minor_rank(M):
    """Largest k with a nonzero k x k minor."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    for k in range(min(rows, cols), 0, -1):
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                if leibniz_det([[M[i][j] for j in cs] for i in rs]):
                    return k
    return 0


def matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def _gauss_dependency(vectors):
    """Coefficients of a nontrivial dependency with last coefficient 1, or None."""
    n = len(vectors)
    dim = len(vectors[0])
    # solve sum_{k<n-1} a_k v_k = -v_{n-1} by naive elimination on the transposed system
    rows = [[vectors[k][r] for k in range(n - 1)] + [-vectors[n - 1][r]] for r in range(dim)]
    piv_cols = []
    r = 0
    for c in range(n - 1):
        p = next((i for i in range(r, dim) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][n - 1] for i in range(r, dim)):
        return None
    coeffs = [Fraction(0)] * (n - 1)
    for i, c in enumerate(piv_cols):
        coeffs[c] = rows[i][n - 1]
    return coeffs + [Fraction(1)]


def brute_minimal_polynomial(A):
    """Monic coefficients (ascending) of the first power of A dependent on lower powers."""
    n = len(A)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    powers = [ident]
    while True:
        powers.append(matmul(powers[-1], A))
        flat = [[x for row in P for x in row] for P in powers]
        dep = _gauss_dependency(flat)
        if dep is not None:
            return dep


def poly_at_matrix(coeffs, A):
    n = len(A)
    acc = [[Fraction(0)] * n for _ in range(n)]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in coeffs:
        acc = [[a + c * p for a, p in zip(ra, rp)] for ra, rp in zip(acc, P)]
        P = matmul(P, A)
    return acc


# ---------------------------------------------------------------------------
# real roots by certified interval bisection


def _horner_exact(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _enclose(coeffs, a, b):
    iv = mpmath.iv
    lo = iv.mpf(a.numerator) / a.denominator
    hi = iv.mpf(b.numerator) / b.denominator
    x = iv.mpf([lo.a, hi.b])
    acc = iv.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + iv.mpf(c.numerator) / c.denominator
    return acc


def interval_real_root_count(coeffs, prec: int = 256, max_depth: int = 400) -> int:
    """Distinct real roots of a squarefree rational polynomial (ascending coefficients).

    Bisects a Cauchy-bound interval; a piece with an interval enclosure of p
    excluding 0 has no root, a piece on which p' excludes 0 has one root iff
    the (exactly evaluated) endpoint signs differ.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return 0
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    lead = coeffs[-1]
    bound = 1 + max(abs(c / lead) for c in coeffs[:-1])
    bound = Fraction(int(bound) + 1)
    split = Fraction(1, 2) + Fraction(1, 1000003)
    count = 0
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        stack = [(-bound, bound, 0)]
        while stack:
            a, b, depth = stack.pop()
            if depth > max_depth:
                raise RuntimeError("root isolation did not converge")
            pa, pb = _horner_exact(coeffs, a), _horner_exact(coeffs, b)
            if pa == 0 or pb == 0:
                raise RuntimeError("bisection endpoint hit a root")
            enc = _enclose(coeffs, a, b)
            if enc.a > 0 or enc.b < 0:
                continue
            denc = _enclose(deriv, a, b)
            if denc.a > 0 or denc.b < 0:
                if (pa > 0) != (pb > 0):
                    count += 1
                continue
            c = a + (b - a) * split
            k = 2
            while _horner_exact(coeffs, c) == 0:
                c = a + (b - a) * (Fraction(1, 2) + Fraction(1, 1000003 * k))
                k += 1
            stack.append((a, c, depth + 1))
            stack.append((c, b, depth + 1))
    finally:
        mpmath.iv.prec = old
    return count


def sympy_is_squarefree(coeffs) -> bool:
    t = sympy.Symbol("t")
    p = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], t)
    return p.degree() > 0 and p.is_sqf


# ---------------------------------------------------------------------------
# resonance by enumeration


def exponents_up_to(m: int, D: int):
    for d in range(D + 1):
        for combo in itertools.combinations_with_replacement(range(m), d):
            e = [0] * m
            for i in combo:
                e[i] += 1
            yield tuple(e)


def is_resonant(C, alpha) -> bool:
    return all(sum(Fraction(c) * a for c, a in zip(row, alpha)) == 0 for row in C)


def resonant_exponents(C, m: int, D: int):
    return [a for a in exponents_up_to(m, D) if any(a) and is_resonant(C, a)]


def combination_closure(basis, m: int, D: int) -> set:
    """All sums of basis vectors with total degree <= D (0 included)."""
    reach = {tuple([0] * m)}
    frontier = list(reach)
    while frontier:
        new = []
        for v in frontier:
            for g in basis:
                w = tuple(a + b for a, b in zip(v, g))
                if sum(w) <= D and w not in reach:
                    reach.add(w)
                    new.append(w)
        frontier = new
    return reach


def is_decomposable(C, g) -> bool:
    """True if g = a + b with a, b nonzero resonant vectors."""
    for a in itertools.product(*(range(x + 1) for x in g)):
        if any(a) and tuple(a) != tuple(g) and is_resonant(C, a):
            return True
    return False


# ---------------------------------------------------------------------------
# one-variable series


def geometric_inverse_coeffs(N: int) -> list[Fraction]:
    """Coefficients of x/(1+x) up to x^N by long division (index = degree)."""
    num = [Fraction(0), Fraction(1)] + [Fraction(0)] * (N - 1)
    den = [Fraction(1), Fraction(1)]
    out = [Fraction(0)] * (N + 1)
    rem = num[:]
    for k in range(N + 1):
        q = rem[k] / den[0]
        out[k] = q
        for j, d in enumerate(den):
            if k + j <= N:
                rem[k + j] -= q * d
    return out


def log1p_coeffs(N: int) -> list[Fraction]:
    """log(1+x) up to x^N, by integrating the geometric series of 1/(1+x)."""
    inv = [Fraction((-1) ** k) for k in range(N)]
    return [Fraction(0)] + [inv[k] / (k + 1) for k in range(N)]


# ---------------------------------------------------------------------------
# sympy round trips for polynomials and fields


def to_sympy(P, syms):
    """Expression from an MPoly-like object exposing ``terms``."""
    acc = sympy.Integer(0)
    for e, c in P.terms.items():
        mono = sympy.Integer(1)
        for s, k in zip(syms, e):
            mono *= s ** k
        acc += sympy.Rational(c.numerator, c.denominator) * mono
    return sympy.expand(acc)


def truncate_sympy(expr, syms, N):
    poly = sympy.Poly(sympy.expand(expr), *syms)
    acc = sympy.Integer(0)
    for mon, c in poly.terms():
        if sum(mon) <= N:
            term = c
            for s, k in zip(syms, mon):
                term *= s ** k
            acc += term
    return sympy.expand(acc)


def sympy_bracket(X, Y, syms):
    """Components X(Y^k) - Y(X^k)."""
    n = len(syms)
    return [sympy.expand(sum(X[j] * sympy.diff(Y[k], syms[j]) - Y[j] * sympy.diff(X[k], syms[j])
                             for j in range(n))) for k in range(n)]


def sympy_lie_derivative(X, F, syms):
    return sympy.expand(sum(X[j] * sympy.diff(F, syms[j]) for j in range(len(syms))))
