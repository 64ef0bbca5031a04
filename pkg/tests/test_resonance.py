import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from isl.errors import DegreeCapExceeded, InputError
from isl.exactalg import GaussianRational, QMatrix, integerize_rowspace
from isl.resonance import (
    is_jointly_resonant, monoid_hilbert_basis, resonance_defect, resonance_space,
    resonant_field_terms, resonant_monomials_up_to_degree,
)

from oracles import combination_closure, is_decomposable, is_resonant, resonant_exponents


def test_resonance_space_examples():
    assert len(resonance_space([[1, 1, -1, -1]])) == 3
    assert resonance_space(QMatrix.identity(3)) == []


def test_hilbert_basis_four_variable_example():
    L = monoid_hilbert_basis([[1, 1, -1, -1]])
    assert set(L.hilbert_basis) == {(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)}
    assert L.monoid_dimension == 3 and L.dimension == 3 and L.full_dimension
    # four generators for a three dimensional space
    assert len(L.hilbert_basis) == 4


def test_hilbert_basis_small_examples():
    L = monoid_hilbert_basis([[1]])
    assert L.hilbert_basis == () and L.monoid_dimension == 0
    L = monoid_hilbert_basis([[1, -1]])
    assert L.hilbert_basis == ((1, 1),)
    assert resonant_exponents([[1, -1]], 2, 6) == [(k, k) for k in (1, 2, 3)]


def test_hilbert_basis_of_definite_row_is_empty():
    L = monoid_hilbert_basis([[1, 2, 3]])
    assert L.hilbert_basis == () and L.dimension == 2 and not L.full_dimension


def test_hilbert_basis_elbolic_row():
    # eigenvalues 1+i, 1-i, -1 on three coordinates: real part gives x1 x3, x2 x3, imaginary
    # part forces equal exponents on the pair
    C = [[GaussianRational(1, 1), GaussianRational(1, -1), GaussianRational(-2, 0)]]
    L = monoid_hilbert_basis(C)
    assert L.hilbert_basis == ((1, 1, 1),)


def test_degree_cap():
    with pytest.raises(InputError):
        monoid_hilbert_basis([[1, -1]], degree_cap=0)
    with pytest.raises(DegreeCapExceeded):
        monoid_hilbert_basis([[1, -7]], degree_cap=5)
    assert monoid_hilbert_basis([[1, -7]], degree_cap=8).hilbert_basis == ((7, 1),)


def test_default_cap_exceeded_by_wide_random_matrix():
    C = [[1, 4, -1, -2, 0, -2], [0, 2, -4, 3, -1, -4]]
    with pytest.raises(DegreeCapExceeded):
        monoid_hilbert_basis(C)


def _random_matrix(rng, p, m, lo=-3, hi=3):
    while True:
        C = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(p)]
        if any(x > 0 for r in C for x in r) and any(x < 0 for r in C for x in r):
            return C


def test_hilbert_basis_properties_on_random_matrices():
    rng = random.Random(3)
    for _ in range(25):
        m = rng.randint(2, 4)
        C = _random_matrix(rng, rng.randint(1, 2), m, -2, 2)
        L = monoid_hilbert_basis(C, degree_cap=200)
        for g in L.hilbert_basis:
            assert is_resonant(C, g)
            assert not is_decomposable(C, g)
        # completeness up to a small degree
        D = 6
        reach = combination_closure(L.hilbert_basis, m, D)
        for a in resonant_exponents(C, m, D):
            assert a in reach
        assert L.monoid_dimension <= L.dimension


def test_integerization_does_not_change_basis():
    rng = random.Random(9)
    for _ in range(20):
        C = _random_matrix(rng, 2, 4)
        scaled = [[Fraction(x, k + 2) for x in row] for k, row in enumerate(C)]
        _, Ct = integerize_rowspace(QMatrix(scaled))
        a = monoid_hilbert_basis(C, degree_cap=200)
        assert monoid_hilbert_basis(scaled, degree_cap=200).hilbert_basis == a.hilbert_basis
        assert monoid_hilbert_basis(Ct, degree_cap=200).hilbert_basis == a.hilbert_basis
        assert resonance_space(Ct) == resonance_space(C)


def test_jointly_resonant_examples():
    C = [[1, -1]]
    assert not is_jointly_resonant(C, (1, 1), 0)
    assert resonance_defect(C, (1, 1), 0) == [-1]
    assert is_jointly_resonant(C, (2, 1), 0)
    for j in range(2):
        e = tuple(int(k == j) for k in range(2))
        assert is_jointly_resonant(C, e, j)
    with pytest.raises(InputError):
        is_jointly_resonant(C, (1, 1), 2)
    with pytest.raises(InputError):
        is_jointly_resonant(C, (-1, 1), 0)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=2),
       st.integers(0, 2))
def test_linear_terms_always_resonant(C, j):
    e = tuple(int(k == j) for k in range(3))
    assert is_jointly_resonant(C, e, j)


def test_resonant_monomials_examples():
    C = [[1, 1, -1, -1]]
    assert resonant_monomials_up_to_degree(C, 2) == [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    assert resonant_monomials_up_to_degree(C, 0) == []
    with pytest.raises(InputError):
        resonant_monomials_up_to_degree(C, -1)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=2),
       st.integers(0, 5))
def test_resonant_monomials_match_enumeration(C, D):
    got = resonant_monomials_up_to_degree(C, D)
    assert sorted(got) == sorted(resonant_exponents(C, 3, D))


def test_resonant_field_terms():
    terms = resonant_field_terms([[1, -1]], 3)
    assert terms == [((2, 1), 0), ((1, 2), 1)]
    for alpha, j in resonant_field_terms([[2, 1, -1]], 3):
        assert sum(alpha) == 3 and is_jointly_resonant([[2, 1, -1]], alpha, j)
