# modules/exact_linalg.py
# Exact scalar arithmetic and dense linear algebra over prime fields and Q

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import Rational, isprime
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from modules.errors import DimensionMismatch, FieldMismatch, NotPrime, ParseError

logger = logging.getLogger(__name__)

# primes at or above this bound are stored as Python ints in object arrays
WIDE_PRIME = 1 << 20
FLOAT_EXACT = 1 << 53


@dataclass(frozen=True)
class FieldSpec:
    """Ground field: a prime field F_p or the rationals"""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "prime":
            if self.p is None or not (2 <= self.p < (1 << 31)):
                raise NotPrime(f"prime modulus out of range: {self.p}")
            if not isprime(self.p):
                raise NotPrime(f"{self.p} is not prime")
        elif self.kind == "rational":
            if self.p is not None:
                raise FieldMismatch("the rational field carries no modulus")
        else:
            raise FieldMismatch(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", int(p))

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls("rational")

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    @property
    def label(self) -> str:
        return f"F_{self.p}" if self.is_prime else "Q"

    @property
    def dtype(self):
        if self.is_prime and self.p < WIDE_PRIME:
            return np.int64
        return object

    # --- scalars -------------------------------------------------------

    def scalar(self, value):
        """Canonical representative of an int, Rational or QQ element"""
        if isinstance(value, np.integer):
            value = int(value)
        if self.is_prime:
            if isinstance(value, int):
                return value % self.p
            q = QQ.convert(value) if not isinstance(value, Rational) else QQ.from_sympy(value)
            num, den = int(QQ.numer(q)), int(QQ.denom(q))
            if den % self.p == 0:
                raise FieldMismatch(f"denominator {den} vanishes in {self.label}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(value, Rational):
            return QQ.from_sympy(value)
        return QQ.convert(value)

    @property
    def zero(self):
        return self.scalar(0)

    @property
    def one(self):
        return self.scalar(1)

    def inv(self, value):
        if value == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self.label}")
        if self.is_prime:
            return pow(int(value), -1, self.p)
        return QQ(1) / QQ.convert(value)

    def parse(self, text: str):
        """Exact coefficient from a string such as "3/2" or "4" """
        try:
            value = Rational(str(text).strip())
        except (TypeError, ValueError, SyntaxError) as exc:
            raise ParseError(f"not an exact coefficient: {text!r}") from exc
        try:
            return self.scalar(value)
        except FieldMismatch as exc:
            raise ParseError(str(exc)) from exc

    def format(self, value) -> str:
        if self.is_prime:
            return str(int(value) % self.p)
        q = QQ.convert(value)
        num, den = int(QQ.numer(q)), int(QQ.denom(q))
        return str(num) if den == 1 else f"{num}/{den}"

    def elements(self):
        """All field elements (prime fields only)"""
        if not self.is_prime:
            raise FieldMismatch("Q is infinite")
        return range(self.p)

    def random_scalar(self, rng):
        if self.is_prime:
            return rng.randrange(self.p)
        return QQ(rng.randint(-3, 3), rng.randint(1, 3))

    # --- arrays --------------------------------------------------------

    def array(self, values) -> np.ndarray:
        """Array of canonical scalars built from arbitrary exact input"""
        raw = np.asarray(values, dtype=object)
        if raw.size == 0:
            return np.zeros(raw.shape, dtype=self.dtype) if self.dtype is not object else self.zeros(raw.shape)
        converted = np.frompyfunc(self.scalar, 1, 1)(raw)
        if self.dtype is object:
            return np.asarray(converted, dtype=object)
        return np.asarray(converted, dtype=np.int64)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def unit_vector(self, n: int, i: int) -> np.ndarray:
        out = self.zeros(n)
        out[i] = self.one
        return out

    def check(self, arr) -> np.ndarray:
        """Reject arrays that do not belong to this field"""
        if not isinstance(arr, np.ndarray):
            return self.array(arr)
        if self.dtype is object:
            if arr.dtype != object:
                raise FieldMismatch(f"expected an object array for {self.label}, got {arr.dtype}")
            return arr
        if arr.dtype != np.int64:
            raise FieldMismatch(f"expected an int64 array for {self.label}, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.p):
            raise FieldMismatch(f"entries outside 0..{self.p - 1}")
        return arr

    def reduce(self, arr):
        if self.is_prime:
            return arr % self.p
        return arr

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def scale(self, c, a):
        return self.reduce(a * self.scalar(c))

    def multiply(self, a, b):
        return self.reduce(a * b)

    def outer(self, a, b) -> np.ndarray:
        return self.reduce(np.multiply.outer(a, b))

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Kronecker product, row-major block order"""
        prod = np.multiply.outer(a, b)
        if a.ndim == 1:
            return self.reduce(prod.reshape(-1))
        rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
        return self.reduce(prod.transpose(0, 2, 1, 3).reshape(rows, cols))

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact matrix product"""
        if a.shape[-1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        if not self.is_prime and a.ndim <= 2 and b.ndim <= 2:
            out = _rational_matmul(a.reshape(1, -1) if a.ndim == 1 else a,
                                   b.reshape(-1, 1) if b.ndim == 1 else b)
            if b.ndim == 1:
                out = out[:, 0]
            return out[0] if a.ndim == 1 else out
        if self.dtype is object:
            return self.reduce(np.dot(a, b))
        inner = max(a.shape[-1], 1)
        if (self.p - 1) ** 2 * inner < FLOAT_EXACT:
            prod = np.dot(a.astype(np.float64), b.astype(np.float64))
            return np.rint(prod).astype(np.int64) % self.p
        return np.dot(a, b) % self.p

    def tensordot(self, a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
        if self.is_prime:
            return self.reduce(np.tensordot(a, b, axes=axes))
        if isinstance(axes, int):
            a_axes, b_axes = list(range(a.ndim - axes, a.ndim)), list(range(axes))
        else:
            a_axes, b_axes = ([ax] if isinstance(ax, int) else list(ax) for ax in axes)
        a_axes = [ax % a.ndim for ax in a_axes]
        b_axes = [ax % b.ndim for ax in b_axes]
        free_a = [i for i in range(a.ndim) if i not in a_axes]
        free_b = [i for i in range(b.ndim) if i not in b_axes]
        inner = int(np.prod([a.shape[i] for i in a_axes], dtype=np.int64))
        left = a.transpose(free_a + a_axes).reshape(-1, inner) if a.size else self.zeros(
            (int(np.prod([a.shape[i] for i in free_a], dtype=np.int64)), inner))
        right = b.transpose(b_axes + free_b).reshape(inner, -1) if b.size else self.zeros(
            (inner, int(np.prod([b.shape[i] for i in free_b], dtype=np.int64))))
        out = _rational_matmul(left, right)
        return out.reshape([a.shape[i] for i in free_a] + [b.shape[i] for i in free_b])

    def is_zero(self, arr) -> bool:
        return not np.any(np.asarray(arr) != 0)

    def equal(self, a, b) -> bool:
        a, b = np.asarray(a), np.asarray(b)
        return a.shape == b.shape and not np.any(a != b)

    def __str__(self):
        return self.label


# --- rational kernels (sparse DomainMatrix over QQ) ----------------------

def _to_domain(m: np.ndarray) -> DomainMatrix:
    rows = [[QQ.convert(e) for e in row] for row in m.tolist()]
    return DomainMatrix(rows, m.shape, QQ).to_sparse()


def _qq_zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(QQ.zero)
    return out


def _from_domain(dm: DomainMatrix, rows: int, cols: int) -> np.ndarray:
    out = _qq_zeros(rows, cols)
    for i, row in enumerate(dm.to_list()[:rows]):
        out[i, :] = row
    return out


def _rational_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows, cols = a.shape[0], b.shape[1]
    if a.size == 0 or b.size == 0:
        return _qq_zeros(rows, cols)
    return _from_domain(_to_domain(a).matmul(_to_domain(b)), rows, cols)


def _rational_row_basis(m: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return _qq_zeros(0, cols), []
    reduced, pivots = _to_domain(m).rref()
    return _from_domain(reduced, len(pivots), cols), list(pivots)


# --- elimination kernels ------------------------------------------------

def _reduce_rows(field: FieldSpec, work: np.ndarray) -> List[int]:
    """In-place Gauss-Jordan elimination, returns the pivot columns"""
    rows, cols = work.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.flatnonzero(work[r:, c] != 0)
        if candidates.size == 0:
            continue
        pivot_row = r + int(candidates[0])
        if pivot_row != r:
            work[[r, pivot_row]] = work[[pivot_row, r]]
        lead = work[r, c]
        if lead != 1:
            work[r, c:] = field.reduce(work[r, c:] * field.inv(lead))
        column = work[:, c].copy()
        column[r] = 0
        targets = np.flatnonzero(column != 0)
        if targets.size:
            update = field.reduce(np.multiply.outer(column[targets], work[r, c:]))
            work[targets, c:] = field.reduce(work[targets, c:] - update)
        pivots.append(c)
        r += 1
    return pivots


def row_basis(field: FieldSpec, m) -> Tuple[np.ndarray, List[int]]:
    """Nonzero rows of the RREF of m together with their pivot columns"""
    m = field.check(m)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if not field.is_prime:
        return _rational_row_basis(m)
    rows, cols = m.shape
    if rows <= 2 * cols + 8:
        work = m.copy()
        pivots = _reduce_rows(field, work)
        return work[:len(pivots)], pivots
    # tall systems: fold row blocks into a running reduced basis
    chunk = max(cols, 16)
    basis = field.zeros((0, cols))
    pivots: List[int] = []
    for start in range(0, rows, chunk):
        block = m[start:start + chunk].copy()
        if pivots:
            block = field.sub(block, field.matmul(block[:, pivots], basis))
        stacked = np.vstack([basis, block])
        pivots = _reduce_rows(field, stacked)
        basis = stacked[:len(pivots)]
        if len(pivots) == cols:
            break
    return basis, pivots


def rref(field: FieldSpec, m) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form of m (same shape) and its pivot columns"""
    m = field.check(m)
    basis, pivots = row_basis(field, m)
    out = field.zeros(m.shape)
    out[:len(pivots)] = basis
    return out, pivots


def rank(field: FieldSpec, m) -> int:
    m = field.check(m)
    if m.size == 0:
        return 0
    return len(row_basis(field, m)[1])


def kernel_basis(field: FieldSpec, m) -> np.ndarray:
    """Basis of the right null space, one vector per row"""
    m = field.check(m)
    cols = m.shape[1]
    basis, pivots = row_basis(field, m)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    out = field.zeros((len(free), cols))
    for idx, f in enumerate(free):
        out[idx, f] = field.one
        if pivots:
            out[idx, pivots] = field.neg(basis[:, f])
    return out


def solve_linear(field: FieldSpec, m, b) -> Optional[np.ndarray]:
    """Some x with m x = b (free variables zero), or None when inconsistent"""
    m = field.check(m)
    b = field.check(b)
    if b.ndim != 1 or b.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"right-hand side of length {b.shape} for a {m.shape} system")
    rows, cols = m.shape
    augmented = np.hstack([m, b.reshape(rows, 1)]) if rows else field.zeros((0, cols + 1))
    basis, pivots = row_basis(field, augmented)
    if pivots and pivots[-1] == cols:
        return None
    x = field.zeros(cols)
    for i, c in enumerate(pivots):
        x[c] = basis[i, cols]
    return x


def span_membership(field: FieldSpec, vectors, target) -> Optional[np.ndarray]:
    """Coefficients expressing target in the span of vectors, or None"""
    target = field.check(target)
    vectors = field.check(vectors) if len(vectors) else field.zeros((0, target.shape[0]))
    if vectors.ndim != 2 or vectors.shape[1] != target.shape[0]:
        raise DimensionMismatch("vectors and target have different lengths")
    if vectors.shape[0] == 0:
        return field.zeros(0) if field.is_zero(target) else None
    return solve_linear(field, vectors.T.copy(), target)


def stack(field: FieldSpec, vectors: Sequence, length: int) -> np.ndarray:
    """Rows of vectors as one matrix (empty sequences give a 0 x length matrix)"""
    if len(vectors) == 0:
        return field.zeros((0, length))
    return np.vstack([np.asarray(v).reshape(1, -1) for v in vectors])


def coordinates_in(field: FieldSpec, basis: np.ndarray, pivots: Sequence[int], v) -> Optional[np.ndarray]:
    """Coordinates of v in an RREF row basis, None when v lies outside the span"""
    coords = np.asarray(v)[list(pivots)].copy()
    if basis.shape[0] == 0:
        return coords if field.is_zero(v) else None
    rebuilt = field.matmul(coords.reshape(1, -1), basis)[0]
    return coords if field.equal(rebuilt, v) else None


def contains_subspace(field: FieldSpec, big, small) -> bool:
    """span(small) is contained in span(big)"""
    big, small = field.check(big), field.check(small)
    if small.shape[0] == 0:
        return True
    if big.shape[0] == 0:
        return field.is_zero(small)
    return rank(field, np.vstack([big, small])) == rank(field, big)


def sum_dimension(field: FieldSpec, first, second) -> int:
    first, second = field.check(first), field.check(second)
    return rank(field, np.vstack([first, second]))


class QuotientSpace:
    """k^n modulo the span of relation vectors, with a canonical basis

    The quotient basis is the set of non-pivot coordinates of the RREF of the
    relation space; the section sends a quotient coordinate back to that
    ambient unit vector.
    """

    def __init__(self, field: FieldSpec, ambient_dim: int, relations):
        self.field = field
        self.ambient_dim = ambient_dim
        relations = stack(field, relations, ambient_dim) if not isinstance(relations, np.ndarray) else relations
        if relations.shape[0] == 0:
            self.relations, self.pivots = field.zeros((0, ambient_dim)), []
        else:
            self.relations, self.pivots = row_basis(field, relations)
        pivot_set = set(self.pivots)
        self.basis_coordinates = [c for c in range(ambient_dim) if c not in pivot_set]
        self.dim = len(self.basis_coordinates)
        logger.debug("quotient of dimension %d (ambient %d, relation rank %d)",
                     self.dim, ambient_dim, len(self.pivots))

    @cached_property
    def projection(self) -> np.ndarray:
        proj = self.field.zeros((self.dim, self.ambient_dim))
        proj[:, self.basis_coordinates] = self.field.eye(self.dim)
        if self.pivots:
            proj[:, self.pivots] = self.field.neg(self.relations[:, self.basis_coordinates].T)
        return proj

    @cached_property
    def section(self) -> np.ndarray:
        sec = self.field.zeros((self.ambient_dim, self.dim))
        for j, c in enumerate(self.basis_coordinates):
            sec[c, j] = self.field.one
        return sec

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Classes of ambient vectors (a single vector or one per row)"""
        if vectors.ndim == 1:
            return self.field.matmul(self.projection, vectors)
        return self.field.matmul(vectors, self.projection.T)

    def vanishes(self, linear_map: np.ndarray) -> bool:
        """linear_map (columns indexed by ambient coordinates) kills every relation"""
        if not self.pivots:
            return True
        return self.field.is_zero(self.field.matmul(linear_map, self.relations.T))

    def induced(self, linear_map: np.ndarray) -> np.ndarray:
        """Map on the quotient induced by an ambient map that kills the relations"""
        return self.field.matmul(linear_map, self.section)
