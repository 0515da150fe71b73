# modules/algebra.py
# Finite-dimensional unital associative algebras given by structure constants

import logging
from functools import cached_property
from typing import Iterable, List, Optional, Sequence

import numpy as np

from modules.errors import (AssociativityViolation, DimensionMismatch, FieldMismatch,
                            NotAGroup, ParentMismatch, UnitViolation, ValidationError)
from modules.exact_linalg import (FieldSpec, coordinates_in, kernel_basis, rank,
                                  row_basis, stack)

logger = logging.getLogger(__name__)


class Algebra:
    """Unital associative algebra on a fixed basis e_0..e_{d-1}

    mul_table[i, j] holds the coordinates of e_i e_j. Linear maps are stored
    as matrices acting on column vectors.
    """

    def __init__(self, field: FieldSpec, mul_table, unit, name: Optional[str] = None,
                 validate: bool = True):
        self.field = field
        self.mul_table = field.check(mul_table)
        self.unit = field.check(unit)
        self.name = name
        if self.mul_table.ndim != 3 or len(set(self.mul_table.shape)) != 1:
            raise DimensionMismatch(f"multiplication table must be d x d x d, got {self.mul_table.shape}")
        self.dim = self.mul_table.shape[0]
        if self.unit.shape != (self.dim,):
            raise DimensionMismatch(f"unit has shape {self.unit.shape}, expected ({self.dim},)")
        if validate:
            validate_algebra(self)

    def __repr__(self):
        label = self.name or "algebra"
        return f"<{label} dim={self.dim} over {self.field}>"

    # --- elements ------------------------------------------------------

    def element(self, coords) -> "Element":
        return Element(self, self.field.array(coords))

    def basis_vector(self, i: int) -> np.ndarray:
        return self.field.unit_vector(self.dim, i)

    def one(self) -> "Element":
        return Element(self, self.unit.copy())

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two coordinate vectors"""
        partial = self.field.tensordot(x, self.mul_table, axes=(0, 0))
        return self.field.tensordot(y, partial, axes=(0, 0))

    def products(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """All products xs[p] * ys[q] as a (p, q, d) array"""
        partial = self.field.tensordot(xs, self.mul_table, axes=(1, 0))
        out = self.field.tensordot(partial, ys, axes=([1], [1]))
        return out.transpose(0, 2, 1)

    def power(self, x: np.ndarray, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("negative powers are not defined")
        result = self.unit.copy()
        base = x.copy()
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> x y"""
        return self.field.tensordot(x, self.mul_table, axes=(0, 0)).T.copy()

    def right_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of y -> y x"""
        return self.field.tensordot(x, self.mul_table, axes=(0, 1)).T.copy()

    @cached_property
    def left_mats(self) -> np.ndarray:
        return self.mul_table.transpose(0, 2, 1).copy()

    @cached_property
    def right_mats(self) -> np.ndarray:
        return self.mul_table.transpose(1, 2, 0).copy()

    @cached_property
    def is_commutative(self) -> bool:
        return self.field.equal(self.mul_table, self.mul_table.transpose(1, 0, 2))

    @cached_property
    def generating_indices(self) -> List[int]:
        """Basis indices whose elements generate the algebra (greedy, in order)"""
        chosen: List[int] = []
        span, pivots = row_basis(self.field, self.unit.reshape(1, -1))
        for i in range(self.dim):
            if len(pivots) == self.dim:
                break
            if coordinates_in(self.field, span, pivots, self.basis_vector(i)) is not None:
                continue
            chosen.append(i)
            closure = subalgebra_closure(self, [self.basis_vector(k) for k in chosen])
            span, pivots = closure.basis, closure.pivots
        logger.debug("%r generated by basis vectors %s", self, chosen)
        return chosen

    @cached_property
    def generator_vectors(self) -> np.ndarray:
        return stack(self.field, [self.basis_vector(i) for i in self.generating_indices], self.dim)

    @cached_property
    def center(self) -> np.ndarray:
        return centralizer(self, self.generator_vectors)


class Element:
    """Coordinate vector tied to its parent algebra"""

    __slots__ = ("parent", "coords")

    def __init__(self, parent: Algebra, coords: np.ndarray):
        if coords.shape != (parent.dim,):
            raise DimensionMismatch(f"element of length {coords.shape} in a {parent.dim}-dimensional algebra")
        self.parent = parent
        self.coords = coords

    def _same(self, other: "Element"):
        if not isinstance(other, Element) or other.parent is not self.parent:
            raise ParentMismatch("elements belong to different algebras")

    def __add__(self, other):
        self._same(other)
        return Element(self.parent, self.parent.field.add(self.coords, other.coords))

    def __sub__(self, other):
        self._same(other)
        return Element(self.parent, self.parent.field.sub(self.coords, other.coords))

    def __neg__(self):
        return Element(self.parent, self.parent.field.neg(self.coords))

    def __mul__(self, other):
        if isinstance(other, Element):
            self._same(other)
            return Element(self.parent, self.parent.mul(self.coords, other.coords))
        return Element(self.parent, self.parent.field.scale(other, self.coords))

    def __rmul__(self, scalar):
        return Element(self.parent, self.parent.field.scale(scalar, self.coords))

    def __pow__(self, n: int):
        return Element(self.parent, self.parent.power(self.coords, n))

    def __eq__(self, other):
        return (isinstance(other, Element) and other.parent is self.parent
                and self.parent.field.equal(self.coords, other.coords))

    def __hash__(self):
        return hash(tuple(self.parent.field.format(c) for c in self.coords))

    def __repr__(self):
        return f"Element({[self.parent.field.format(c) for c in self.coords]})"


def multiply(x: Element, y: Element) -> Element:
    return x * y


def power(x: Element, n: int) -> Element:
    return x ** n


def validate_algebra(algebra: Algebra) -> Algebra:
    """Check the d^3 associativity and 2d unit identities"""
    f, T = algebra.field, algebra.mul_table
    left = f.tensordot(T, T, axes=([2], [0]))
    right = f.tensordot(T, T, axes=([2], [1])).transpose(2, 0, 1, 3)
    bad = np.argwhere(left != right)
    if bad.size:
        i, j, k = (int(v) for v in bad[0][:3])
        raise AssociativityViolation(i, j, k)
    ident = f.eye(algebra.dim)
    for side in (f.tensordot(algebra.unit, T, axes=(0, 0)), f.tensordot(algebra.unit, T, axes=(0, 1))):
        rows = np.argwhere(side != ident)
        if rows.size:
            raise UnitViolation(int(rows[0][0]))
    return algebra


# --- constructors ------------------------------------------------------

def ground_field_algebra(field: FieldSpec) -> Algebra:
    return Algebra(field, field.array([[[1]]]), field.array([1]), name=field.label)


def matrix_algebra(base: Algebra, n: int) -> Algebra:
    """M_n(base) on the basis E_st (x) r_i, index (s*n + t)*d + i"""
    if n < 1:
        raise DimensionMismatch("matrix size must be at least 1")
    f, d = base.field, base.dim
    T = f.zeros((n, n, d, n, n, d, n, n, d))
    for s in range(n):
        for t in range(n):
            for v in range(n):
                T[s, t, :, t, v, :, s, v, :] = base.mul_table
    size = n * n * d
    unit = f.zeros((n, n, d))
    for s in range(n):
        unit[s, s] = base.unit
    name = f"M_{n}({base.name})" if base.name else None
    return Algebra(f, T.reshape(size, size, size), unit.reshape(size), name=name)


def truncated_poly_algebra(field: FieldSpec, m: int) -> Algebra:
    """k[t]/(t^m) on the basis 1, t, ..., t^(m-1)"""
    if m < 1:
        raise DimensionMismatch("truncation degree must be at least 1")
    T = field.zeros((m, m, m))
    for i in range(m):
        for j in range(m - i):
            T[i, j, i + j] = field.one
    return Algebra(field, T, field.unit_vector(m, 0), name=f"{field.label}[t]/(t^{m})")


def group_algebra(cayley_table: Sequence[Sequence[int]], field: FieldSpec) -> Algebra:
    """Group algebra on the group elements, products read from the Cayley table"""
    table = np.asarray(cayley_table, dtype=np.int64)
    n = table.shape[0] if table.ndim == 2 else 0
    if n == 0 or table.shape != (n, n) or table.min() < 0 or table.max() >= n:
        raise NotAGroup("Cayley table must be a square table of element indices")
    identities = [e for e in range(n) if (table[e] == np.arange(n)).all() and (table[:, e] == np.arange(n)).all()]
    if not identities:
        raise NotAGroup("no identity element")
    e = identities[0]
    for a in range(n):
        for b in range(n):
            if not (table[table[a, b]] == table[a][table[b]]).all():
                raise NotAGroup(f"associativity fails at ({a}, {b})")
        if e not in table[a]:
            raise NotAGroup(f"element {a} has no inverse")
    T = field.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            T[a, b, table[a, b]] = field.one
    return Algebra(field, T, field.unit_vector(n, e), name=f"{field.label}[G{n}]")


def direct_product_algebra(first: Algebra, second: Algebra) -> Algebra:
    if first.field != second.field:
        raise FieldMismatch("direct product of algebras over different fields")
    f, d1, d2 = first.field, first.dim, second.dim
    d = d1 + d2
    T = f.zeros((d, d, d))
    T[:d1, :d1, :d1] = first.mul_table
    T[d1:, d1:, d1:] = second.mul_table
    unit = np.concatenate([first.unit, second.unit])
    name = f"{first.name} x {second.name}" if first.name and second.name else None
    return Algebra(f, T, unit, name=name)


def opposite_algebra(algebra: Algebra) -> Algebra:
    name = f"{algebra.name}^op" if algebra.name else None
    return Algebra(algebra.field, algebra.mul_table.transpose(1, 0, 2).copy(), algebra.unit.copy(),
                   name=name, validate=False)


def tensor_product_algebra(first: Algebra, second: Algebra) -> Algebra:
    """first (x) second over the ground field, index i*d2 + j"""
    if first.field != second.field:
        raise FieldMismatch("tensor product of algebras over different fields")
    f, d1, d2 = first.field, first.dim, second.dim
    T = f.outer(first.mul_table, second.mul_table).transpose(0, 3, 1, 4, 2, 5)
    size = d1 * d2
    unit = f.outer(first.unit, second.unit).reshape(size)
    return Algebra(f, T.reshape(size, size, size).copy(), unit, validate=False)


# --- subalgebras -------------------------------------------------------

class SubalgebraEmbedding:
    """Unital subalgebra of an ambient algebra, basis kept in RREF"""

    def __init__(self, ambient: Algebra, basis):
        self.ambient = ambient
        f = ambient.field
        vectors = basis if isinstance(basis, np.ndarray) else stack(f, list(basis), ambient.dim)
        if vectors.ndim != 2 or vectors.shape[1] != ambient.dim:
            raise DimensionMismatch("subalgebra basis vectors must have the ambient length")
        self.basis, self.pivots = row_basis(f, vectors) if vectors.shape[0] else (f.zeros((0, ambient.dim)), [])
        self.dim = len(self.pivots)
        if self.coordinates(ambient.unit) is None:
            raise ValidationError("subalgebra does not contain the unit")
        prods = ambient.products(self.basis, self.basis)
        coords = prods[:, :, self.pivots]
        rebuilt = f.tensordot(coords, self.basis, axes=([2], [0]))
        if not f.equal(rebuilt, prods):
            raise ValidationError("subalgebra span is not closed under multiplication")
        self.induced = Algebra(f, coords.copy(), self.coordinates(ambient.unit), validate=False)

    def coordinates(self, v: np.ndarray) -> Optional[np.ndarray]:
        return coordinates_in(self.ambient.field, self.basis, self.pivots, v)

    def contains(self, v: np.ndarray) -> bool:
        return self.coordinates(v) is not None

    def include(self, coords: np.ndarray) -> np.ndarray:
        """Ambient vector of an element given in subalgebra coordinates"""
        return self.ambient.field.matmul(coords.reshape(1, -1), self.basis)[0]

    @cached_property
    def generator_vectors(self) -> np.ndarray:
        """Ambient vectors of a generating set of the subalgebra"""
        return self.basis[self.induced.generating_indices]


def subalgebra_closure(algebra: Algebra, generators: Iterable) -> SubalgebraEmbedding:
    """Smallest unital subalgebra containing the generators"""
    f = algebra.field
    vectors = [algebra.unit] + [g.coords if isinstance(g, Element) else np.asarray(g) for g in generators]
    span, pivots = row_basis(f, stack(f, vectors, algebra.dim))
    for _ in range(algebra.dim + 1):
        prods = algebra.products(span, span).reshape(-1, algebra.dim)
        grown, grown_pivots = row_basis(f, np.vstack([span, prods]))
        if len(grown_pivots) == len(pivots):
            return SubalgebraEmbedding(algebra, span)
        span, pivots = grown, grown_pivots
    raise ValidationError("subalgebra closure did not stabilize")


def centralizer(algebra: Algebra, subspace) -> np.ndarray:
    """Basis (rows) of the elements commuting with every vector of subspace"""
    f = algebra.field
    vectors = subspace if isinstance(subspace, np.ndarray) else stack(f, list(subspace), algebra.dim)
    if vectors.shape[0] == 0:
        return f.eye(algebra.dim)
    blocks = [f.sub(algebra.left_matrix(x), algebra.right_matrix(x)) for x in vectors]
    return kernel_basis(f, np.vstack(blocks))


def fixed_subalgebra(algebra: Algebra, automorphisms: Sequence[np.ndarray]) -> SubalgebraEmbedding:
    """Elements fixed by every given automorphism"""
    f = algebra.field
    if not automorphisms:
        return SubalgebraEmbedding(algebra, f.eye(algebra.dim))
    ident = f.eye(algebra.dim)
    fixed = kernel_basis(f, np.vstack([f.sub(eta, ident) for eta in automorphisms]))
    return SubalgebraEmbedding(algebra, fixed)


def is_algebra_homomorphism(source: Algebra, target: Algebra, M: np.ndarray) -> bool:
    """M (target.dim x source.dim) is unital and multiplicative"""
    f = source.field
    if M.shape != (target.dim, source.dim):
        return False
    if not f.equal(f.matmul(M, source.unit), target.unit):
        return False
    images = M.T.copy()
    lhs = f.tensordot(source.mul_table, M, axes=([2], [1]))
    return f.equal(lhs, target.products(images, images))


def is_algebra_isomorphism(source: Algebra, target: Algebra, M: np.ndarray) -> bool:
    return (source.dim == target.dim and rank(source.field, M) == source.dim
            and is_algebra_homomorphism(source, target, M))


def is_algebra_automorphism(algebra: Algebra, eta: np.ndarray,
                            fixing: Optional[SubalgebraEmbedding] = None) -> bool:
    f = algebra.field
    if not is_algebra_isomorphism(algebra, algebra, eta):
        return False
    if fixing is not None:
        return f.equal(f.matmul(fixing.basis, eta.T.copy()), fixing.basis)
    return True


# --- extensions --------------------------------------------------------

class Extension:
    """Ring extension A/B: an algebra with a designated unital subalgebra"""

    def __init__(self, A: Algebra, B: SubalgebraEmbedding, name: Optional[str] = None):
        if B.ambient is not A:
            raise ParentMismatch("subalgebra is embedded in a different algebra")
        self.A = A
        self.B = B
        self.field = A.field
        self.name = name

    def __repr__(self):
        return f"<Extension {self.name or ''} dA={self.A.dim} dB={self.B.dim} over {self.field}>"

    @classmethod
    def identity(cls, A: Algebra, name: Optional[str] = None) -> "Extension":
        return cls(A, SubalgebraEmbedding(A, A.field.eye(A.dim)), name=name)

    @classmethod
    def over_ground_field(cls, A: Algebra, name: Optional[str] = None) -> "Extension":
        return cls(A, SubalgebraEmbedding(A, A.unit.reshape(1, -1)), name=name)

    @classmethod
    def from_basis(cls, A: Algebra, vectors, name: Optional[str] = None) -> "Extension":
        return cls(A, SubalgebraEmbedding(A, vectors), name=name)

    @cached_property
    def V(self) -> np.ndarray:
        """Basis of the centralizer of B in A"""
        return centralizer(self.A, self.B.generator_vectors)

    @cached_property
    def C(self) -> np.ndarray:
        """Basis of the center of A"""
        return self.A.center

    @cached_property
    def T(self):
        """The tensor square of A over B"""
        from modules.bimodule import tensor_over_B
        return tensor_over_B(self)


def trivial_extension_algebra(base: Algebra, bimodule) -> Extension:
    """B (+) S with (b,s)(c,t) = (bc, bt + sc), as an extension of B"""
    f, dB, m = base.field, base.dim, bimodule.dim
    if bimodule.left.dim != dB or bimodule.right.dim != dB:
        raise DimensionMismatch("bimodule acting algebras do not match the base")
    d = dB + m
    T = f.zeros((d, d, d))
    T[:dB, :dB, :dB] = base.mul_table
    for i in range(dB):
        # b_i s_a and s_a b_i are the columns of the action matrices
        T[i, dB:, dB:] = bimodule.left_action[i].T
        T[dB:, i, dB:] = bimodule.right_action[i].T
    unit = np.concatenate([base.unit, f.zeros(m)])
    name = f"{base.name} x| S{m}" if base.name else None
    A = Algebra(f, T, unit, name=name)
    embedded = stack(f, [A.basis_vector(i) for i in range(dB)], d)
    return Extension(A, SubalgebraEmbedding(A, embedded), name=name)
