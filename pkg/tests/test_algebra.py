# tests/test_algebra.py

import pytest

from modules.algebra import (Algebra, Extension, SubalgebraEmbedding, fixed_subalgebra,
                             ground_field_algebra, group_algebra, is_algebra_automorphism,
                             matrix_algebra, opposite_algebra, subalgebra_closure,
                             tensor_product_algebra, truncated_poly_algebra, validate_algebra)
from modules.catalog import build
from modules.errors import (AssociativityViolation, FieldMismatch, NotAGroup, UnitViolation,
                            ValidationError)
from modules.exact_linalg import FieldSpec

F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)


def test_truncated_powers_wrap_to_zero():
    A = truncated_poly_algebra(F3, 6)
    t = A.basis_vector(1)
    assert F3.equal(A.power(t, 3), A.basis_vector(3))
    assert F3.is_zero(A.power(t, 6))
    assert F3.equal(A.power(t, 0), A.unit)
    assert A.is_commutative


def test_element_operators():
    A = truncated_poly_algebra(F2, 4)
    t = A.element([0, 1, 0, 0])
    assert t ** 2 == A.element([0, 0, 1, 0])
    assert t * t * t == A.element([0, 0, 0, 1])
    assert (t + t) == A.element([0, 0, 0, 0])


def test_matrix_algebra_is_central_simple():
    M = matrix_algebra(ground_field_algebra(F3), 2)
    assert M.dim == 4
    assert not M.is_commutative
    assert M.center.shape[0] == 1
    assert opposite_algebra(M).dim == 4


def test_tensor_product_multiplies_factorwise(m2diag, trunc2):
    f, A, C = m2diag.field, m2diag.A, trunc2.A
    P = tensor_product_algebra(A, C)
    assert P.dim == A.dim * C.dim
    assert validate_algebra(P) is P
    assert not P.is_commutative
    x, y = A.basis_vector(1), C.basis_vector(1)
    pure = f.outer(x, y).reshape(-1)
    assert f.equal(P.mul(P.unit, pure), pure)
    assert f.equal(P.mul(pure, pure), f.outer(A.mul(x, x), C.mul(y, y)).reshape(-1))
    with pytest.raises(FieldMismatch):
        tensor_product_algebra(A, matrix_algebra(ground_field_algebra(F3), 2))


def test_group_algebra_rejects_non_groups():
    with pytest.raises(NotAGroup):
        group_algebra([[0, 1], [0, 1]], F2)
    C2 = group_algebra([[0, 1], [1, 0]], F2)
    assert C2.is_commutative


def test_validation_names_the_failing_triple():
    T = F2.zeros((3, 3, 3))
    for j in range(3):
        T[0, j, j] = 1
        T[j, 0, j] = 1
    T[1, 1, 2] = 1
    T[1, 2, 1] = 1
    with pytest.raises(AssociativityViolation):
        Algebra(F2, T, F2.unit_vector(3, 0))
    with pytest.raises(UnitViolation):
        Algebra(F2, F2.zeros((2, 2, 2)), F2.unit_vector(2, 0))


def test_subalgebra_must_be_closed_and_unital():
    A = truncated_poly_algebra(F2, 4)
    with pytest.raises(ValidationError):
        SubalgebraEmbedding(A, [A.unit, A.basis_vector(1)])
    with pytest.raises(ValidationError):
        SubalgebraEmbedding(A, [A.basis_vector(2)])
    closure = subalgebra_closure(A, [A.basis_vector(2)])
    assert closure.dim == 2
    assert closure.contains(A.basis_vector(2))
    assert not closure.contains(A.basis_vector(1))


def test_centralizer_and_center_of_diagonal_extension(m2diag):
    assert m2diag.V.shape[0] == 2
    assert m2diag.C.shape[0] == 1


def test_swap_automorphism_fixes_the_diagonal():
    ext = build("split-f3")
    swap = F3.array([[0, 1], [1, 0]])
    assert is_algebra_automorphism(ext.A, swap, fixing=ext.B)
    assert fixed_subalgebra(ext.A, [swap]).dim == 1
    assert not is_algebra_automorphism(ext.A, F3.array([[1, 1], [0, 1]]))


def test_identity_and_ground_field_extensions():
    A = matrix_algebra(ground_field_algebra(F3), 2)
    assert Extension.identity(A).B.dim == 4
    assert Extension.over_ground_field(A).B.dim == 1


def test_trivial_extension_algebra(trivial_f2):
    assert trivial_f2.A.dim == 2
    assert trivial_f2.B.dim == 1
    assert trivial_f2.A.is_commutative
