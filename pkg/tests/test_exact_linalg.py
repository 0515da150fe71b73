# tests/test_exact_linalg.py

import random

import numpy as np
import pytest

from modules.errors import FieldMismatch, NotPrime, ParseError
from modules.exact_linalg import (FieldSpec, QuotientSpace, contains_subspace, kernel_basis,
                                  rank, rref, solve_linear, span_membership, sum_dimension)

F2 = FieldSpec.prime(2)
F5 = FieldSpec.prime(5)
Q = FieldSpec.rational()


def test_field_construction_rejects_composites():
    with pytest.raises(NotPrime):
        FieldSpec.prime(4)
    with pytest.raises(FieldMismatch):
        FieldSpec("rational", 3)


def test_parse_and_format_fractions():
    assert F5.format(F5.parse("3/2")) == "4"
    assert Q.format(Q.parse("3/2")) == "3/2"
    assert Q.format(Q.parse("-4")) == "-4"
    with pytest.raises(ParseError):
        F5.parse("1/5")
    with pytest.raises(ParseError):
        Q.parse("abc")


def test_check_rejects_foreign_arrays():
    with pytest.raises(FieldMismatch):
        F2.check(np.array([0.5, 1.0]))
    with pytest.raises(FieldMismatch):
        F2.check(np.array([0, 3], dtype=np.int64))


def test_rank_and_kernel_over_f2():
    m = F2.array([[1, 1], [1, 1]])
    assert rank(F2, m) == 1
    kernel = kernel_basis(F2, m)
    assert F2.equal(kernel, F2.array([[1, 1]]))
    assert F2.is_zero(F2.matmul(m, kernel.T.copy()))


def test_kernel_over_rationals():
    kernel = kernel_basis(Q, Q.array([[1, 2]]))
    assert [Q.format(c) for c in kernel[0]] == ["-2", "1"]


def test_rref_is_reduced():
    reduced, pivots = rref(F5, F5.array([[2, 4, 1], [1, 2, 4]]))
    assert pivots == [0, 2]
    assert F5.format(reduced[0, 0]) == "1"
    assert F5.format(reduced[1, 2]) == "1"


def test_solve_linear_consistent_and_inconsistent():
    m = Q.array([[1, 1], [1, -1]])
    x = solve_linear(Q, m, Q.array([3, 1]))
    assert [Q.format(c) for c in x] == ["2", "1"]
    assert solve_linear(F2, F2.array([[1, 0], [1, 0]]), F2.array([0, 1])) is None


def test_span_membership():
    vectors = F5.array([[1, 0, 1], [0, 1, 1]])
    coeffs = span_membership(F5, vectors, F5.array([2, 3, 0]))
    assert [int(c) for c in coeffs] == [2, 3]
    assert span_membership(F5, vectors, F5.array([0, 0, 1])) is None


def test_subspace_helpers():
    big = F2.eye(3)[:2]
    assert contains_subspace(F2, big, F2.array([[1, 1, 0]]))
    assert not contains_subspace(F2, big, F2.array([[0, 0, 1]]))
    assert sum_dimension(F2, big, F2.array([[0, 0, 1]])) == 3


def test_quotient_space_identifies_related_vectors():
    space = QuotientSpace(F2, 3, F2.array([[1, 1, 0]]))
    assert space.dim == 2
    assert space.basis_coordinates == [1, 2]
    e0, e1 = F2.unit_vector(3, 0), F2.unit_vector(3, 1)
    assert F2.equal(space.project(e0), space.project(e1))
    assert F2.is_zero(F2.matmul(space.projection, space.relations.T.copy()))


WIDE = FieldSpec.prime(2 ** 31 - 1)


def _random_matrix(field, rng, rows, cols):
    return field.array([[field.random_scalar(rng) for _ in range(cols)] for _ in range(rows)])


@pytest.mark.parametrize("field", [F2, F5, WIDE, Q], ids=str)
@pytest.mark.parametrize("shape", [(3, 5), (6, 4), (5, 5), (20, 3)])
def test_rref_is_idempotent_and_rank_plus_nullity_is_the_width(field, shape):
    rng = random.Random(sum(shape) * 31 + (field.p or 0) % 97)
    for _ in range(4):
        m = _random_matrix(field, rng, *shape)
        reduced, pivots = rref(field, m)
        again, pivots_again = rref(field, reduced)
        assert field.equal(again, reduced) and pivots_again == pivots
        kernel = kernel_basis(field, m)
        assert rank(field, m) + kernel.shape[0] == shape[1]
        if kernel.shape[0]:
            assert field.is_zero(field.matmul(m, kernel.T.copy()))


def test_wide_primes_use_exact_python_integers():
    p = WIDE.p
    assert WIDE.dtype is object
    m = WIDE.array([[1, 2], [2, 4], [p - 1, p - 2]])
    assert m.dtype == object
    assert rank(WIDE, m) == 1
    assert WIDE.equal(kernel_basis(WIDE, m), WIDE.array([[p - 2, 1]]))
    big = WIDE.array([[p - 1, p - 1], [p - 1, p - 1]])
    assert WIDE.equal(WIDE.matmul(big, big), WIDE.array([[2, 2], [2, 2]]))
    assert WIDE.scalar(WIDE.inv(3) * 3) == 1
    assert WIDE.parse("1/2") == (p + 1) // 2


def test_rational_products_match_plain_object_arithmetic():
    rng = random.Random(11)
    a = _random_matrix(Q, rng, 3, 4)
    b = _random_matrix(Q, rng, 4, 2)
    assert Q.equal(Q.matmul(a, b), np.dot(a, b))
    v = _random_matrix(Q, rng, 1, 4)[0]
    assert Q.equal(Q.matmul(a, v), np.dot(a, v))
    assert Q.equal(Q.matmul(v, b), np.dot(v, b))
    cube = np.stack([_random_matrix(Q, rng, 4, 3) for _ in range(2)])
    for axes in [([2], [1]), ([1], [0]), (1, 0)]:
        other = b if axes != ([2], [1]) else _random_matrix(Q, rng, 2, 3)
        assert Q.equal(Q.tensordot(cube, other, axes=axes), np.tensordot(cube, other, axes=axes))
    assert Q.matmul(Q.zeros((2, 0)), Q.zeros((0, 3))).shape == (2, 3)
