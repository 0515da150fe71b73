# modules/bimodule.py
# Bimodules, tensor squares over B, Hom spaces, summand witnesses and derivations

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import List, Optional, Union

import numpy as np

from modules.algebra import Algebra, Extension, SubalgebraEmbedding
from modules.errors import (BimoduleActionError, DimensionMismatch, NotInCentralizer,
                            ParentMismatch, ProductNotWellDefined)
from modules.exact_linalg import (FieldSpec, QuotientSpace, kernel_basis,
                                  row_basis, span_membership)

logger = logging.getLogger(__name__)


def _same_algebra(first: Algebra, second: Algebra) -> bool:
    if first is second:
        return True
    return (first.field == second.field and first.dim == second.dim
            and first.field.equal(first.mul_table, second.mul_table))


class LeftModule:
    """Left module given by one action matrix per basis vector of the algebra"""

    def __init__(self, algebra: Algebra, action, name: Optional[str] = None):
        self.algebra = algebra
        self.field = algebra.field
        self.action = self.field.check(action)
        self.name = name
        if self.action.ndim != 3 or self.action.shape[0] != algebra.dim or self.action.shape[1] != self.action.shape[2]:
            raise DimensionMismatch(f"action table of shape {self.action.shape} for a {algebra.dim}-dimensional algebra")
        self.dim = self.action.shape[1]

    def act(self, coords: np.ndarray) -> np.ndarray:
        return self.field.tensordot(coords, self.action, axes=(0, 0))


class Bimodule:
    """L-R bimodule: left_action[i] is s -> l_i s, right_action[i] is s -> s r_i"""

    def __init__(self, left: Algebra, right: Algebra, left_action, right_action,
                 name: Optional[str] = None, validate: bool = True):
        if left.field != right.field:
            raise ParentMismatch("acting algebras live over different fields")
        self.left = left
        self.right = right
        self.field = left.field
        self.left_action = self.field.check(left_action)
        self.right_action = self.field.check(right_action)
        self.name = name
        if self.left_action.shape[0] != left.dim or self.right_action.shape[0] != right.dim:
            raise DimensionMismatch("action tables do not match the acting algebras")
        self.dim = self.left_action.shape[1]
        if self.right_action.shape[1:] != (self.dim, self.dim):
            raise DimensionMismatch("left and right actions act on different spaces")
        if validate:
            self.validate()

    def validate(self) -> "Bimodule":
        f, L, R = self.field, self.left_action, self.right_action
        lhs = f.tensordot(self.left.mul_table, L, axes=([2], [0]))
        rhs = f.tensordot(L, L, axes=([2], [1])).transpose(0, 2, 1, 3)
        if not f.equal(lhs, rhs):
            raise BimoduleActionError("left action is not associative")
        lhs = f.tensordot(self.right.mul_table, R, axes=([2], [0]))
        rhs = f.tensordot(R, R, axes=([2], [1])).transpose(2, 0, 1, 3)
        if not f.equal(lhs, rhs):
            raise BimoduleActionError("right action is not associative")
        ident = f.eye(self.dim)
        if not f.equal(f.tensordot(self.left.unit, L, axes=(0, 0)), ident):
            raise BimoduleActionError("unit of the left algebra does not act as identity")
        if not f.equal(f.tensordot(self.right.unit, R, axes=(0, 0)), ident):
            raise BimoduleActionError("unit of the right algebra does not act as identity")
        lr = f.tensordot(L, R, axes=([2], [1]))
        rl = f.tensordot(R, L, axes=([2], [1])).transpose(2, 1, 0, 3)
        if not f.equal(lr, rl):
            raise BimoduleActionError("left and right actions do not commute")
        return self

    def act_left(self, coords: np.ndarray) -> np.ndarray:
        return self.field.tensordot(coords, self.left_action, axes=(0, 0))

    def act_right(self, coords: np.ndarray) -> np.ndarray:
        return self.field.tensordot(coords, self.right_action, axes=(0, 0))

    def restrict(self, left: Optional[SubalgebraEmbedding] = None,
                 right: Optional[SubalgebraEmbedding] = None) -> "Bimodule":
        """Restriction of scalars along subalgebra embeddings"""
        f = self.field
        left_alg, left_act = self.left, self.left_action
        right_alg, right_act = self.right, self.right_action
        if left is not None:
            left_alg, left_act = left.induced, f.tensordot(left.basis, self.left_action, axes=(1, 0))
        if right is not None:
            right_alg, right_act = right.induced, f.tensordot(right.basis, self.right_action, axes=(1, 0))
        return Bimodule(left_alg, right_alg, left_act, right_act, name=self.name, validate=False)

    def centralized(self, vectors: np.ndarray) -> np.ndarray:
        """Elements s with l s = s l for the given left-algebra vectors"""
        f = self.field
        if vectors.shape[0] == 0:
            return f.eye(self.dim)
        blocks = [f.sub(self.act_left(v), self.act_right(v)) for v in vectors]
        return kernel_basis(f, np.vstack(blocks))


def regular_bimodule(algebra: Algebra) -> Bimodule:
    return Bimodule(algebra, algebra, algebra.left_mats, algebra.right_mats,
                    name=algebra.name, validate=False)


def ext_bimodule(ext: Extension) -> Bimodule:
    """A as a B-B bimodule"""
    return regular_bimodule(ext.A).restrict(ext.B, ext.B)


def base_bimodule(ext: Extension) -> Bimodule:
    """B as a B-B bimodule"""
    return regular_bimodule(ext.B.induced)


def ext_left_module(ext: Extension) -> LeftModule:
    """A as a left B-module"""
    f = ext.field
    return LeftModule(ext.B.induced, f.tensordot(ext.B.basis, ext.A.left_mats, axes=(1, 0)))


def base_left_module(ext: Extension) -> LeftModule:
    return LeftModule(ext.B.induced, ext.B.induced.left_mats)


# --- A (x)_B A -----------------------------------------------------------

@dataclass
class TensorElement:
    parent: "TensorOverB"
    coords: np.ndarray


class TensorOverB:
    """Quotient of A (x)_k A by x b (x) y - x (x) b y, with induced A-actions

    Ambient index of e_x (x) e_y is x*d + y. Relations are imposed for the
    generators of B only.
    """

    def __init__(self, ext: Extension):
        self.ext = ext
        self.A = ext.A
        self.field = f = ext.field
        d = self.A.dim
        self.d = d
        ident = f.eye(d)
        blocks = []
        for b in ext.B.generator_vectors:
            blocks.append(f.sub(f.kron(self.A.right_matrix(b).T, ident), f.kron(ident, self.A.left_matrix(b).T)))
        relations = np.vstack(blocks) if blocks else f.zeros((0, d * d))
        self.quotient = QuotientSpace(f, d * d, relations)
        self.dim = self.quotient.dim
        coords = np.asarray(self.quotient.basis_coordinates, dtype=np.int64)
        self.xs, self.ys = coords // d, coords % d
        logger.debug("A (x)_B A has dimension %d (ambient %d)", self.dim, d * d)

    @property
    def projection(self) -> np.ndarray:
        return self.quotient.projection

    @property
    def section(self) -> np.ndarray:
        return self.quotient.section

    @cached_property
    def _projection3(self) -> np.ndarray:
        return self.projection.reshape(self.dim, self.d, self.d)

    def class_of(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.quotient.project(self.field.kron(x, y))

    def element(self, coords) -> TensorElement:
        return TensorElement(self, self.field.check(coords))

    @cached_property
    def left_action(self) -> np.ndarray:
        """left_action[a] is the matrix of e -> e_a . e"""
        f = self.field
        full = f.tensordot(self.A.mul_table, self._projection3, axes=([2], [1]))
        return full[:, self.xs, :, self.ys].transpose(1, 2, 0).copy()

    @cached_property
    def right_action(self) -> np.ndarray:
        """right_action[a] is the matrix of e -> e . e_a"""
        f = self.field
        full = f.tensordot(self.A.mul_table, self._projection3, axes=([2], [2]))
        return full[self.ys, :, :, self.xs].transpose(1, 2, 0).copy()

    def act_left(self, a: np.ndarray, e: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.field.tensordot(a, self.left_action, axes=(0, 0)), e)

    def act_right(self, e: np.ndarray, a: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.field.tensordot(a, self.right_action, axes=(0, 0)), e)

    @cached_property
    def mu(self) -> np.ndarray:
        """Multiplication map x (x) y -> xy as a d x q matrix"""
        return self.A.mul_table[self.xs, self.ys].T.copy()

    def mu_u_matrix(self, u: np.ndarray) -> np.ndarray:
        """Matrix of x (x) y -> x u y (u must centralize B)"""
        f, A = self.field, self.A
        for b in self.ext.B.generator_vectors:
            if not f.equal(A.mul(b, u), A.mul(u, b)):
                raise NotInCentralizer("x (x) y -> x u y needs u to commute with B")
        xu = f.tensordot(A.mul_table, u, axes=([1], [0]))
        xuy = f.tensordot(xu, A.mul_table, axes=([1], [0]))
        return xuy[self.xs, self.ys].T.copy()

    def mu_u(self, e: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.mu_u_matrix(u), e)

    def commutant(self, vectors: np.ndarray) -> np.ndarray:
        """Basis of the tensors e with a e = e a for the given elements a"""
        f = self.field
        if vectors.shape[0] == 0:
            return f.eye(self.dim)
        blocks = [f.sub(f.tensordot(a, self.left_action, axes=(0, 0)),
                        f.tensordot(a, self.right_action, axes=(0, 0))) for a in vectors]
        return kernel_basis(f, np.vstack(blocks))

    @cached_property
    def casimir_A(self) -> np.ndarray:
        return self.commutant(self.A.generator_vectors)

    @cached_property
    def casimir_B(self) -> np.ndarray:
        return self.commutant(self.ext.B.generator_vectors)

    def is_casimir(self, e: np.ndarray, over: str = "A") -> bool:
        f = self.field
        vectors = self.A.generator_vectors if over == "A" else self.ext.B.generator_vectors
        return all(f.equal(self.act_left(a, e), self.act_right(e, a)) for a in vectors)

    def as_bimodule(self) -> Bimodule:
        return Bimodule(self.A, self.A, self.left_action, self.right_action, validate=False)


def tensor_over_B(ext: Extension) -> TensorOverB:
    return TensorOverB(ext)


def casimir_space(T: TensorOverB, commutant: str = "A") -> np.ndarray:
    """(A (x)_B A)^A or (A (x)_B A)^B, one tensor per row"""
    if commutant == "A":
        return T.casimir_A
    if commutant == "B":
        return T.casimir_B
    raise ValueError(f"commutant must be 'A' or 'B', got {commutant!r}")


def mu_u(T: TensorOverB, e: np.ndarray, u: np.ndarray) -> np.ndarray:
    return T.mu_u(e, u)


# --- Hom spaces and summands -----------------------------------------------

def _intertwiner_rows(f: FieldSpec, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Rows of vec(F src - dst F) for F of shape (dim dst, dim src), row-major"""
    n, m = dst.shape[0], src.shape[0]
    return f.sub(f.kron(f.eye(n), src.T), f.kron(dst, f.eye(m)))


def left_module_hom_space(M: LeftModule, N: LeftModule) -> np.ndarray:
    """Basis of Hom(M, N) as (k, dim N, dim M) matrices"""
    if not _same_algebra(M.algebra, N.algebra):
        raise ParentMismatch("modules over different algebras")
    f = M.field
    rows = [_intertwiner_rows(f, M.action[g], N.action[g]) for g in M.algebra.generating_indices]
    if not rows:
        rows = [f.zeros((0, N.dim * M.dim))]
    return kernel_basis(f, np.vstack(rows)).reshape(-1, N.dim, M.dim)


def bimodule_hom_space(M: Bimodule, N: Bimodule) -> np.ndarray:
    """Basis of the L-R bimodule maps M -> N as (k, dim N, dim M) matrices"""
    if not (_same_algebra(M.left, N.left) and _same_algebra(M.right, N.right)):
        raise ParentMismatch("bimodules over different acting algebras")
    f = M.field
    rows = [_intertwiner_rows(f, M.left_action[g], N.left_action[g]) for g in M.left.generating_indices]
    rows += [_intertwiner_rows(f, M.right_action[g], N.right_action[g]) for g in M.right.generating_indices]
    if not rows:
        rows = [f.zeros((0, N.dim * M.dim))]
    return kernel_basis(f, np.vstack(rows)).reshape(-1, N.dim, M.dim)


def is_bimodule_map(M: Bimodule, N: Bimodule, F: np.ndarray) -> bool:
    f = M.field
    for g in range(M.left.dim):
        if not f.equal(f.matmul(F, M.left_action[g]), f.matmul(N.left_action[g], F)):
            return False
    for g in range(M.right.dim):
        if not f.equal(f.matmul(F, M.right_action[g]), f.matmul(N.right_action[g], F)):
            return False
    return True


def _hom(X, Y) -> np.ndarray:
    if isinstance(X, Bimodule):
        return bimodule_hom_space(X, Y)
    return left_module_hom_space(X, Y)


@dataclass
class SummandWitness:
    """Maps f_i: X -> Y and g_i: Y -> X with sum g_i f_i = id_X"""

    maps_to: List[np.ndarray] = dc_field(default_factory=list)
    maps_back: List[np.ndarray] = dc_field(default_factory=list)

    def composite(self, f: FieldSpec, dim: int) -> np.ndarray:
        total = f.zeros((dim, dim))
        for to, back in zip(self.maps_to, self.maps_back):
            total = f.add(total, f.matmul(back, to))
        return total


def trace_ideal_witness(f: FieldSpec, dim_x: int, hom_xy: np.ndarray,
                        hom_yx: np.ndarray) -> Optional[SummandWitness]:
    """Identity of X inside span{g f}, from bases of Hom(X, Y) and Hom(Y, X)"""
    if dim_x == 0:
        return SummandWitness()
    if hom_xy.shape[0] == 0 or hom_yx.shape[0] == 0:
        return None
    pairs = [(a, b) for a in range(hom_xy.shape[0]) for b in range(hom_yx.shape[0])]
    composites = np.vstack([f.matmul(hom_yx[b], hom_xy[a]).reshape(1, -1) for a, b in pairs])
    coeffs = span_membership(f, composites, f.eye(dim_x).reshape(-1))
    if coeffs is None:
        return None
    witness = SummandWitness()
    for (a, b), c in zip(pairs, coeffs):
        if c != 0:
            witness.maps_to.append(f.scale(c, hom_xy[a]))
            witness.maps_back.append(hom_yx[b].copy())
    assert f.equal(witness.composite(f, dim_x), f.eye(dim_x))
    return witness


def summand_witness(X: Union[Bimodule, LeftModule], Y: Union[Bimodule, LeftModule],
                    hom_xy: Optional[np.ndarray] = None,
                    hom_yx: Optional[np.ndarray] = None) -> Optional[SummandWitness]:
    """Witness that X is a direct summand of a finite sum of copies of Y"""
    if X.dim == 0:
        return SummandWitness()
    hom_xy = _hom(X, Y) if hom_xy is None else hom_xy
    hom_yx = _hom(Y, X) if hom_yx is None else hom_yx
    return trace_ideal_witness(X.field, X.dim, hom_xy, hom_yx)


def bimodule_endomorphisms(ext: Extension) -> np.ndarray:
    """Basis of End(_B A_B) as (k, d, d) matrices"""
    M = ext_bimodule(ext)
    return bimodule_hom_space(M, M)


def hom_to_base_space(ext: Extension) -> np.ndarray:
    """Basis of Hom(_B A_B, _B B_B) as endomorphisms of A with image in B"""
    f = ext.field
    maps = bimodule_hom_space(ext_bimodule(ext), base_bimodule(ext))
    return np.stack([f.matmul(ext.B.basis.T.copy(), g) for g in maps]) if len(maps) else f.zeros((0, ext.A.dim, ext.A.dim))


# --- derivations -------------------------------------------------------

@dataclass
class DerivationSpace:
    """Basis of B-derivations A -> S, each a (dim S, dim A) matrix"""

    ext: Extension
    target: Bimodule
    vanish_on_B: bool
    central: bool
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, D: np.ndarray) -> bool:
        f = self.ext.field
        if self.dim == 0:
            return f.is_zero(D)
        return span_membership(f, self.basis.reshape(self.dim, -1), D.reshape(-1)) is not None


def _leibniz_rows(ext: Extension, S: Bimodule, g: int) -> np.ndarray:
    """vec rows of D(e_g y) - D(e_g) y - e_g D(y) over all y"""
    f, A = ext.field, ext.A
    m, d = S.dim, A.dim
    shifted = f.kron(f.eye(m), A.left_mats[g].T)
    acting = f.kron(S.left_action[g], f.eye(d))
    trailing = f.zeros((m, d, m, d))
    for y in range(d):
        trailing[:, y, :, g] = S.right_action[y]
    return f.sub(f.sub(shifted, trailing.reshape(m * d, m * d)), acting)


def is_derivation(ext: Extension, D: np.ndarray, S: Optional[Bimodule] = None) -> bool:
    """Leibniz rule on all basis pairs"""
    f, A = ext.field, ext.A
    S = S or regular_bimodule(A)
    lhs = f.tensordot(A.mul_table, D, axes=([2], [1]))
    first = f.tensordot(D.T.copy(), S.right_action, axes=([1], [2]))
    second = f.tensordot(S.left_action, D, axes=([2], [0])).transpose(0, 2, 1)
    return f.equal(lhs, f.add(first, second))


def derivation_space(ext: Extension, vanish_on_B: bool = True, central: bool = False,
                     target: Optional[Bimodule] = None) -> DerivationSpace:
    """Derivations A -> S (S = A by default), optionally vanishing on B or central"""
    f, A = ext.field, ext.A
    S = target or regular_bimodule(A)
    if not (_same_algebra(S.left, A) and _same_algebra(S.right, A)):
        raise ParentMismatch("derivation target must be an A-A bimodule")
    m, d = S.dim, A.dim
    rows = [_leibniz_rows(ext, S, g) for g in A.generating_indices]
    rows.append(f.kron(f.eye(m), A.unit.reshape(1, -1)))
    if vanish_on_B:
        rows.extend(f.kron(f.eye(m), b.reshape(1, -1)) for b in ext.B.generator_vectors)
    if central:
        rows.extend(f.kron(f.sub(S.left_action[g], S.right_action[g]), f.eye(d)) for g in A.generating_indices)
    basis = kernel_basis(f, np.vstack(rows)).reshape(-1, m, d)
    logger.debug("derivation space dim %d (vanish_on_B=%s, central=%s)", basis.shape[0], vanish_on_B, central)
    return DerivationSpace(ext, S, vanish_on_B, central, basis)


def inner_derivation(S: Bimodule, s: np.ndarray) -> np.ndarray:
    """ad_s: x -> s x - x s as a (dim S, dim A) matrix"""
    f = S.field
    right = f.tensordot(S.right_action, s, axes=([2], [0]))
    left = f.tensordot(S.left_action, s, axes=([2], [0]))
    return f.sub(right, left).T.copy()


def inner_derivation_space(ext: Extension, target: Optional[Bimodule] = None) -> np.ndarray:
    """Basis of {ad_s : s in S^B} as (k, dim S, dim A) matrices"""
    f = ext.field
    S = target or regular_bimodule(ext.A)
    fixed = ext.V if target is None else S.centralized(ext.B.basis)
    images = [inner_derivation(S, s).reshape(-1) for s in fixed]
    if not images:
        return f.zeros((0, S.dim, ext.A.dim))
    basis, _ = row_basis(f, np.vstack(images))
    return basis.reshape(-1, S.dim, ext.A.dim)


# --- balanced triple tensors ---------------------------------------------

class BalancedTriple:
    """N* (x)_B S (x)_B N as a quotient of the ambient triple tensor

    Ambient index of (a, x, c) is (a*s + x)*m + c. The quotient basis is a
    set of pure basis tensors.
    """

    def __init__(self, field: FieldSpec, base: Algebra, dual_action: np.ndarray,
                 middle: Bimodule, module_action: np.ndarray):
        self.field = f = field
        self.n_dual = dual_action.shape[1]
        self.s = middle.dim
        self.m = module_action.shape[1]
        n, s, m = self.n_dual, self.s, self.m
        i_n, i_s, i_m = f.eye(n), f.eye(s), f.eye(m)
        blocks = []
        for g in base.generating_indices:
            blocks.append(f.sub(f.kron(f.kron(dual_action[g].T, i_s), i_m),
                                f.kron(f.kron(i_n, middle.left_action[g].T), i_m)))
            blocks.append(f.sub(f.kron(i_n, f.kron(middle.right_action[g].T, i_m)),
                                f.kron(i_n, f.kron(i_s, module_action[g].T))))
        self.ambient_dim = n * s * m
        relations = np.vstack(blocks) if blocks else f.zeros((0, self.ambient_dim))
        self.quotient = QuotientSpace(f, self.ambient_dim, relations)
        self.dim = self.quotient.dim
        coords = np.asarray(self.quotient.basis_coordinates, dtype=np.int64)
        self.a_idx, self.x_idx, self.c_idx = coords // (s * m), (coords // m) % s, coords % m
        logger.debug("balanced triple of dimension %d (ambient %d)", self.dim, self.ambient_dim)

    @property
    def relations(self) -> np.ndarray:
        return self.quotient.relations

    @cached_property
    def projection4(self) -> np.ndarray:
        return self.quotient.projection.reshape(self.dim, self.n_dual, self.s, self.m)

    def class_of(self, dual: np.ndarray, middle: np.ndarray, module: np.ndarray) -> np.ndarray:
        f = self.field
        return self.quotient.project(f.kron(f.kron(dual, middle), module))

    def apply_middle(self, linear_map: np.ndarray, out: "BalancedTriple") -> np.ndarray:
        """Matrix of 1 (x) h (x) 1 from this carrier to out on quotient bases"""
        f = self.field
        cols = [f.matmul(out.projection4[:, a, :, c], linear_map[:, x])
                for a, x, c in zip(self.a_idx, self.x_idx, self.c_idx)]
        if not cols:
            return f.zeros((out.dim, 0))
        return np.stack(cols, axis=1)


def balanced_products(left: BalancedTriple, right: BalancedTriple, out: BalancedTriple,
                      middle: np.ndarray) -> np.ndarray:
    """(a, x, c) * (a', y, c') -> (a, mid[c, a', x, y], c') on quotient bases

    middle has shape (m, n*, s_left, s_right, s_out). Raises when a relation
    of either factor is not sent to zero.
    """
    f = out.field
    full = f.tensordot(out.projection4, middle, axes=([2], [4]))
    full = full.transpose(1, 5, 3, 4, 6, 2, 0).reshape(left.ambient_dim, right.ambient_dim, out.dim)
    if left.relations.shape[0] and not f.is_zero(f.tensordot(left.relations, full, axes=([1], [0]))):
        raise ProductNotWellDefined("a relation of the left factor does not map to zero")
    if right.relations.shape[0] and not f.is_zero(f.tensordot(right.relations, full, axes=([1], [1]))):
        raise ProductNotWellDefined("a relation of the right factor does not map to zero")
    left_coords = np.asarray(left.quotient.basis_coordinates, dtype=np.int64)
    right_coords = np.asarray(right.quotient.basis_coordinates, dtype=np.int64)
    return full[left_coords][:, right_coords].copy()
