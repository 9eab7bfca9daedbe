import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nwlearn.designs import (
    DesignMatrix, assemble, check_seed, complement, eval_poly, is_prime, make_design, restrict,
    smallest_prime_at_least,
)
from nwlearn.errors import ParameterError, StructuralError


def test_primes():
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert smallest_prime_at_least(9) == 11
    assert smallest_prime_at_least(1) == 2


def test_poly_eval():
    assert eval_poly((1, 2, 3), 2, 7) == (1 + 4 + 12) % 7


def test_frozen_small_design():
    A = make_design(3, 3, 1)
    assert A.field_prime == 3 and A.universe == 9
    assert A.rows == ((0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8),
                      (1, 5, 6), (2, 3, 7), (0, 5, 7), (1, 3, 8))
    assert A.max_intersection() == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 6), st.integers(1, 9), st.integers(0, 3))
def test_design_pairwise_bound(b, l, deg):
    try:
        A = make_design(b, l, deg)
    except ParameterError:
        assert smallest_prime_at_least(l) ** (deg + 1) < 1 << b
        return
    assert A.num_rows == 1 << b
    for J in A.rows:
        assert len(set(J)) == l and all(0 <= j < A.universe for j in J)
    for J, K in itertools.combinations(A.rows, 2):
        assert len(set(J) & set(K)) <= deg
    assert A.max_intersection() <= deg


def test_too_many_rows_rejected():
    with pytest.raises(ParameterError):
        make_design(4, 3, 1)   # only 9 polynomials of degree <= 1 over GF(3)


def test_text_round_trip():
    A = make_design(3, 5, 1)
    assert DesignMatrix.from_text(A.to_text()) == A


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 63))
def test_assemble_restrict_complement(x, u, v):
    A = make_design(3, 3, 1)
    w = assemble(x, u, v, A)
    assert restrict(w, A.row(x)) == u
    assert complement(w, x, A) == v
    check_seed(w, A)


def test_seed_errors():
    A = make_design(3, 3, 1)
    with pytest.raises(StructuralError):
        check_seed(1 << A.universe, A)
    with pytest.raises(StructuralError):
        assemble(0, 8, 0, A)
    with pytest.raises(StructuralError):
        A.row(8)
