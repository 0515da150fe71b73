# modules/morita.py
# Progenerators, the Morita-equivalent extension A'/B' and transport of structure along it

import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from modules.algebra import (Algebra, Extension, SubalgebraEmbedding, fixed_subalgebra,
                             is_algebra_automorphism, is_algebra_isomorphism, matrix_algebra)
from modules.bimodule import (BalancedTriple, Bimodule, LeftModule, balanced_products,
                              base_left_module, bimodule_endomorphisms, derivation_space,
                              ext_bimodule, ext_left_module, hom_to_base_space,
                              inner_derivation, is_bimodule_map, is_derivation,
                              left_module_hom_space, regular_bimodule, summand_witness)
from modules.errors import (DimensionMismatch, LeibnizViolation, NotBimoduleMap,
                            NotBPrimeCentral, NotIdempotent, ParentMismatch,
                            UnsupportedClass, ValidationError)
from modules.exact_linalg import (FieldSpec, QuotientSpace, contains_subspace,
                                  coordinates_in, kernel_basis, rank, row_basis,
                                  span_membership)
from modules.extension_classifier import (Certificate, DepthTwoCertificate, ExtensionClassifier,
                                          FAILS, HOLDS, LiberalCertificate, SeparableCertificate,
                                          StronglySeparableCertificate, TrivialCertificate, UNKNOWN,
                                          WeaklySeparableCertificate, check_power_property,
                                          verify_certificate)
from modules.settings import WorkbenchSettings

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, np.ndarray]

TRANSPORTABLE = ("liberal", "separable", "strongly_separable", "depth_two_left",
                 "depth_two_right", "weakly_separable", "trivial")
RECOMPUTED = ("hirata", "weakly_quasi_separable")


# --- progenerators -------------------------------------------------------

@dataclass
class Progenerator:
    """Left B-module N with a dual basis (f_j, m_j) and a generator system (g_k, n_k)

    action[i] is the matrix of n -> e_i n. Functionals are (dim B, dim N)
    matrices, so f(n) = F @ n.
    """

    base: Algebra
    action: np.ndarray
    dual_pairs: List[Pair] = dc_field(default_factory=list)
    gen_pairs: List[Pair] = dc_field(default_factory=list)
    name: Optional[str] = None
    free_rank: Optional[int] = None

    @property
    def field(self) -> FieldSpec:
        return self.base.field

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    def as_left_module(self) -> LeftModule:
        return LeftModule(self.base, self.action, name=self.name)

    def act(self, b: np.ndarray, n: np.ndarray) -> np.ndarray:
        f = self.field
        return f.matmul(f.tensordot(b, self.action, axes=(0, 0)), n)


def progenerator_free(B: Algebra, n: int) -> Progenerator:
    """N = B^n with coordinate functionals and the single generator pair (f_1, m_1)"""
    if n < 1:
        raise ValueError("free rank must be at least 1")
    f, b = B.field, B.dim
    action = np.stack([f.kron(f.eye(n), B.left_mats[i]) for i in range(b)])
    pairs = []
    for j in range(n):
        functional = f.kron(f.unit_vector(n, j).reshape(1, -1), f.eye(b))
        pairs.append((functional, f.kron(f.unit_vector(n, j), B.unit)))
    return Progenerator(B, action, pairs, [pairs[0]], name=f"B^{n}", free_rank=n)


def _matrix_square(B: Algebra, E: np.ndarray) -> np.ndarray:
    f = B.field
    scaled = f.tensordot(E, B.mul_table, axes=([2], [0]))
    return f.tensordot(scaled, E, axes=([1, 2], [0, 2])).transpose(0, 2, 1)


def progenerator_from_idempotent(B: Algebra, k: int, E) -> Optional[Progenerator]:
    """N = B^{1 x k} E for an idempotent E in M_k(B); None when N generates no unit"""
    f, b = B.field, B.dim
    E = f.check(E)
    if E.size != k * k * b:
        raise DimensionMismatch(f"idempotent must have {k}x{k} entries in a {b}-dimensional algebra")
    E = E.reshape(k, k, b)
    if not f.equal(_matrix_square(B, E), E):
        raise NotIdempotent("E * E != E")
    # row s of E scaled on the left by e_i, ambient index t*b + z
    spanning = f.tensordot(B.mul_table, E, axes=([1], [2])).transpose(2, 0, 3, 1).reshape(k * b, k * b)
    Nb, pivots = row_basis(f, spanning)
    m = len(pivots)
    if m == 0:
        logger.info("❌ idempotent is zero, no progenerator")
        return None
    action = np.stack([f.matmul(f.kron(f.eye(k), B.left_mats[i]), Nb.T.copy())[pivots, :]
                       for i in range(b)])
    dual_pairs = []
    for t in range(k):
        functional = Nb[:, t * b:(t + 1) * b].T.copy()
        generator = coordinates_in(f, Nb, pivots, E[t].reshape(-1))
        dual_pairs.append((functional, generator))
    # sum lambda (f_t(u_c) e_i) = 1 over the right-scaled coordinate functionals
    index = [(t, i, c) for t in range(k) for i in range(b) for c in range(m)]
    values = np.vstack([B.mul(dual_pairs[t][0][:, c], B.basis_vector(i)).reshape(1, -1) for t, i, c in index])
    coeffs = span_membership(f, values, B.unit)
    if coeffs is None:
        logger.info("❌ idempotent is not full, generator system unsolvable")
        return None
    gen_pairs = []
    for (t, i, c), lam in zip(index, coeffs):
        if lam != 0:
            functional = f.scale(lam, f.matmul(B.right_mats[i], dual_pairs[t][0]))
            gen_pairs.append((functional, f.unit_vector(m, c)))
    prog = Progenerator(B, action, dual_pairs, gen_pairs, name=f"B^{k}E")
    if not verify_progenerator(prog):
        raise ValidationError("idempotent progenerator failed its dual-basis identities")
    return prog


def verify_progenerator(N: Progenerator) -> bool:
    """Dual-basis identity, generator identity and B-linearity of every functional"""
    f, B, m = N.field, N.base, N.dim
    if not N.dual_pairs or not N.gen_pairs:
        return False
    for functional, element in N.dual_pairs + N.gen_pairs:
        if functional.shape != (B.dim, m) or element.shape != (m,):
            return False
        for g in B.generating_indices:
            if not f.equal(f.matmul(functional, N.action[g]), f.matmul(B.left_mats[g], functional)):
                return False
    total = f.zeros((m, m))
    for functional, element in N.dual_pairs:
        acted = f.tensordot(N.action, element, axes=([2], [0]))
        total = f.add(total, f.matmul(acted.T.copy(), functional))
    if not f.equal(total, f.eye(m)):
        return False
    unit = f.zeros(B.dim)
    for functional, element in N.gen_pairs:
        unit = f.add(unit, f.matmul(functional, element))
    return f.equal(unit, B.unit)


class DualModule:
    """N* = Hom_B(N, B) as a right B-module on an RREF basis of functionals"""

    def __init__(self, prog: Progenerator):
        f, B = prog.field, prog.base
        self.field = f
        homs = left_module_hom_space(prog.as_left_module(), LeftModule(B, B.left_mats))
        flat = homs.reshape(homs.shape[0], -1)
        if flat.shape[0]:
            self.rows, self.pivots = row_basis(f, flat)
        else:
            self.rows, self.pivots = f.zeros((0, B.dim * prog.dim)), []
        self.dim = len(self.pivots)
        self.functionals = self.rows.reshape(self.dim, B.dim, prog.dim)
        # (rho . beta)(n) = rho(n) beta
        self.action = f.zeros((B.dim, self.dim, self.dim))
        for beta in range(B.dim):
            for a in range(self.dim):
                self.action[beta, :, a] = self.coordinates(f.matmul(B.right_mats[beta], self.functionals[a]))
        self.pairing = self.functionals.transpose(0, 2, 1).copy()
        logger.debug("dual module of dimension %d", self.dim)

    def coordinates(self, functional: np.ndarray) -> np.ndarray:
        coords = coordinates_in(self.field, self.rows, self.pivots, functional.reshape(-1))
        if coords is None:
            raise NotBimoduleMap("functional is not left B-linear")
        return coords


# --- the transported extension ---------------------------------------------

@dataclass
class TransportedBimodule:
    """S' = N* (x)_B S (x)_B N with its A'-A' or B'-B' actions"""

    source: Bimodule
    carrier: BalancedTriple
    bimodule: Bimodule


class TransportedExtension:
    """A'/B' = N* (x)_B A (x)_B N / N* (x)_B B (x)_B N on a canonical quotient basis"""

    def __init__(self, ext: Extension, prog: Progenerator, name: Optional[str] = None):
        base = ext.B.induced
        f = ext.field
        if prog.field != f or prog.base.dim != base.dim or not f.equal(prog.base.mul_table, base.mul_table):
            raise ParentMismatch("progenerator is not a module over the base of the extension")
        self.ext = ext
        self.prog = prog
        self.field = f
        self.base = base
        self.dual = DualModule(prog)
        # included_pairing[a, c] = rho_a(u_c) as an element of A
        self.included_pairing = f.tensordot(self.dual.pairing, ext.B.basis, axes=([2], [0]))
        self.carrier = self._carrier(ext_bimodule(ext))
        A = ext.A
        table = self._left_table(regular_bimodule(A), self.carrier)
        unit = f.zeros(self.carrier.dim)
        for functional, element in prog.dual_pairs:
            unit = f.add(unit, self.carrier.class_of(self.dual.coordinates(functional), A.unit, element))
        label = name or f"{ext.name or 'A/B'} via {prog.name or 'N'}"
        self.Aprime = Algebra(f, table, unit, name=f"{label} A'")
        rows = f.tensordot(self.carrier.projection4, ext.B.basis, axes=([2], [1]))
        rows = rows.transpose(1, 2, 3, 0).reshape(-1, self.carrier.dim)
        self.Bprime = SubalgebraEmbedding(self.Aprime, rows)
        self.ext_prime = Extension(self.Aprime, self.Bprime, name=label)
        weights = f.zeros((self.dual.dim, prog.dim))
        for functional, element in prog.dual_pairs:
            weights = f.add(weights, f.outer(self.dual.coordinates(functional), element))
        self.phi_matrix = self._pure_map(weights)
        dims = self.dimension_check = self.eta_xi_dimension_check()
        if not dims["holds"]:
            raise DimensionMismatch(f"N* (x)_B N, B' and End_B(N) have dimensions {dims['dual_tensor_module']}, "
                                    f"{dims['dim_Bprime']} and {dims['dim_End_N']}")
        logger.info("✅ transported %s: dim A' = %d, dim B' = %d", ext.name or "extension",
                    self.Aprime.dim, self.Bprime.dim)

    # --- construction helpers ------------------------------------------

    def _carrier(self, middle: Bimodule) -> BalancedTriple:
        return BalancedTriple(self.field, self.base, self.dual.action, middle, self.prog.action)

    def _pure_map(self, weights: np.ndarray, carrier: Optional[BalancedTriple] = None) -> np.ndarray:
        """Matrix of x -> sum_{a,c} weights[a, c] class(rho_a (x) x (x) u_c)"""
        carrier = carrier or self.carrier
        return self.field.tensordot(carrier.projection4, weights, axes=([1, 3], [0, 1]))

    def _acting(self, over_base: bool) -> Tuple[Algebra, np.ndarray, BalancedTriple]:
        if over_base:
            return self.base, self.dual.pairing, self.base_carrier
        return self.ext.A, self.included_pairing, self.carrier

    def _left_table(self, S: Bimodule, carrier_S: BalancedTriple, over_base: bool = False) -> np.ndarray:
        """[i, j, z]: A'-basis (or B'-basis) i times S'-basis j"""
        f = self.field
        algebra, pairing, carrier = self._acting(over_base)
        xp = f.tensordot(algebra.mul_table, pairing, axes=([1], [2]))
        mid = f.tensordot(xp, S.left_action, axes=([1], [0])).transpose(2, 1, 0, 4, 3)
        return balanced_products(carrier, carrier_S, carrier_S, mid)

    def _right_table(self, S: Bimodule, carrier_S: BalancedTriple, over_base: bool = False) -> np.ndarray:
        """[j, i, z]: S'-basis j times A'-basis (or B'-basis) i"""
        f = self.field
        algebra, pairing, carrier = self._acting(over_base)
        py = f.tensordot(pairing, algebra.mul_table, axes=([2], [0]))
        mid = f.tensordot(py, S.right_action, axes=([3], [0])).transpose(1, 0, 4, 2, 3)
        return balanced_products(carrier_S, carrier, carrier_S, mid)

    @cached_property
    def base_carrier(self) -> BalancedTriple:
        return self._carrier(regular_bimodule(self.base))

    @cached_property
    def base_algebra(self) -> Algebra:
        """N* (x)_B B (x)_B N on its own quotient basis"""
        f, carrier = self.field, self.base_carrier
        table = self._left_table(regular_bimodule(self.base), carrier, over_base=True)
        unit = f.zeros(carrier.dim)
        for functional, element in self.prog.dual_pairs:
            unit = f.add(unit, carrier.class_of(self.dual.coordinates(functional), self.base.unit, element))
        return Algebra(f, table, unit, name=f"{self.ext_prime.name} B'")

    @cached_property
    def base_inclusion(self) -> np.ndarray:
        """base_algebra -> A' induced by B -> A; an isomorphism onto B'"""
        return self.base_carrier.apply_middle(self.ext.B.basis.T.copy(), self.carrier)

    def _include_base(self, coords: np.ndarray) -> np.ndarray:
        return self.ext.B.include(coords)

    # --- phi and its relatives -----------------------------------------

    def phi(self, x: np.ndarray) -> np.ndarray:
        """sum_j f_j (x) x (x) m_j"""
        return self.field.matmul(self.phi_matrix, x)

    def phi_end(self, eta: np.ndarray) -> np.ndarray:
        """1 (x) eta (x) 1 for a B-B-linear endomorphism of A"""
        M = ext_bimodule(self.ext)
        if not is_bimodule_map(M, M, eta):
            raise NotBimoduleMap("endomorphism does not commute with the B-actions")
        return self.carrier.apply_middle(eta, self.carrier)

    def transport_automorphism(self, eta: np.ndarray) -> np.ndarray:
        if not is_algebra_automorphism(self.ext.A, eta, fixing=self.ext.B):
            raise ValidationError("map is not an automorphism of A fixing B")
        return self.phi_end(eta)

    @cached_property
    def regular(self) -> TransportedBimodule:
        return TransportedBimodule(regular_bimodule(self.ext.A), self.carrier,
                                   regular_bimodule(self.Aprime))

    def transport_bimodule(self, S: Optional[Bimodule] = None) -> TransportedBimodule:
        """N* (x)_B S (x)_B N for an A-A bimodule (A'-A') or a B-B bimodule (B'-B')"""
        if S is None:
            return self.regular
        if self._same_algebra(S.left, self.ext.A) and self._same_algebra(S.right, self.ext.A):
            over_base, acting = False, self.Aprime
            carrier_S = self._carrier(S.restrict(self.ext.B, self.ext.B))
        elif self._same_algebra(S.left, self.base) and self._same_algebra(S.right, self.base):
            over_base, acting = True, self.base_algebra
            carrier_S = self._carrier(S)
        else:
            raise ParentMismatch("bimodule must be an A-A or a B-B bimodule")
        left = self._left_table(S, carrier_S, over_base).transpose(0, 2, 1)
        right = self._right_table(S, carrier_S, over_base).transpose(1, 2, 0)
        transported = Bimodule(acting, acting, left, right, name=f"{S.name or 'S'}'")
        return TransportedBimodule(S, carrier_S, transported)

    def _same_algebra(self, first: Algebra, second: Algebra) -> bool:
        return first.dim == second.dim and self.field.equal(first.mul_table, second.mul_table)

    # --- psi -----------------------------------------------------------

    def _pair_maps(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """(x -> f_j (x) x (x) n_k, y -> g_k (x) y (x) m_j) over all j, k"""
        f, dual = self.field, self.dual
        maps = []
        for functional, element in self.prog.dual_pairs:
            fj = dual.coordinates(functional)
            for gen_functional, gen_element in self.prog.gen_pairs:
                gk = dual.coordinates(gen_functional)
                maps.append((self._pure_map(f.outer(fj, gen_element)),
                             self._pure_map(f.outer(gk, element))))
        return maps

    @cached_property
    def _psi(self) -> Tuple[np.ndarray, bool]:
        f = self.field
        T, Tp = self.ext.T, self.ext_prime.T
        ambient = f.zeros((self.Aprime.dim ** 2, self.ext.A.dim ** 2))
        for X, Y in self._pair_maps():
            ambient = f.add(ambient, f.kron(X, Y))
        full = f.matmul(Tp.projection, ambient)
        well_defined = T.quotient.vanishes(full)
        if not well_defined:
            logger.warning("❌ psi does not respect the relations of A (x)_B A")
        return f.matmul(full, T.section), well_defined

    @property
    def psi_matrix(self) -> np.ndarray:
        return self._psi[0]

    @property
    def psi_well_defined(self) -> bool:
        return self._psi[1]

    def psi(self, w: np.ndarray) -> np.ndarray:
        """sum_{j,k} (f_j (x) x (x) n_k) (x) (g_k (x) y (x) m_j)"""
        return self.field.matmul(self.psi_matrix, w)

    @cached_property
    def psi_inverse_matrix(self) -> np.ndarray:
        """Contraction rho(n_l) x sigma(u) (x) y g_l(v) on the basis of A' (x)_B' A'"""
        f, A, T, Tp = self.field, self.ext.A, self.ext.T, self.ext_prime.T
        car, P = self.carrier, self.included_pairing
        out = f.zeros((T.dim, Tp.dim))
        for r in range(Tp.dim):
            i, j = Tp.xs[r], Tp.ys[r]
            a, x, c = car.a_idx[i], car.x_idx[i], car.c_idx[i]
            a2, y, c2 = car.a_idx[j], car.x_idx[j], car.c_idx[j]
            middle = A.mul(A.basis_vector(x), P[a2, c])
            col = f.zeros(T.dim)
            for functional, element in self.prog.gen_pairs:
                left = A.mul(self._include_base(f.matmul(self.dual.functionals[a], element)), middle)
                right = A.mul(A.basis_vector(y), self._include_base(functional[:, c2]))
                col = f.add(col, T.class_of(left, right))
            out[:, r] = col
        return out

    def psi_inverse(self, w: np.ndarray) -> np.ndarray:
        if not self.ext_prime.T.is_casimir(w, over="B"):
            raise NotBPrimeCentral("element does not commute with B'")
        return self.field.matmul(self.psi_inverse_matrix, w)

    # --- derivations ---------------------------------------------------

    def _check_derivation(self, ext: Extension, D: np.ndarray, S: Bimodule):
        f = self.field
        if D.shape != (S.dim, ext.A.dim):
            raise DimensionMismatch(f"derivation of shape {D.shape}, expected {(S.dim, ext.A.dim)}")
        if not is_derivation(ext, D, S):
            raise LeibnizViolation("map violates the Leibniz rule")
        if not f.is_zero(f.matmul(D, ext.B.basis.T.copy())):
            raise LeibnizViolation("derivation does not vanish on the subalgebra")

    def transport_derivation(self, D: np.ndarray, S: Optional[Bimodule] = None) -> np.ndarray:
        """1 (x) D (x) 1 from A' to S'"""
        target = self.transport_bimodule(S)
        self._check_derivation(self.ext, D, target.source)
        return self.carrier.apply_middle(D, target.carrier)

    def _contraction(self, target: TransportedBimodule, element: np.ndarray, functional: np.ndarray) -> np.ndarray:
        """rho (x) s (x) u -> rho(element) s functional(u) from S' to S"""
        f, S, car = self.field, target.source, target.carrier
        out = f.zeros((S.dim, car.dim))
        for r in range(car.dim):
            a, x, c = car.a_idx[r], car.x_idx[r], car.c_idx[r]
            left = self._include_base(f.matmul(self.dual.functionals[a], element))
            right = self._include_base(functional[:, c])
            out[:, r] = f.matmul(S.act_left(left), f.matmul(S.act_right(right), f.unit_vector(S.dim, x)))
        return out

    def pullback_derivation(self, D_prime: np.ndarray, S: Optional[Bimodule] = None) -> np.ndarray:
        """sum_{k,l} kappa_{kl}(D'(g_k (x) x (x) n_l))"""
        f = self.field
        target = self.transport_bimodule(S)
        self._check_derivation(self.ext_prime, D_prime, target.bimodule)
        result = f.zeros((target.source.dim, self.ext.A.dim))
        dual = self.dual
        for gk_functional, nk in self.prog.gen_pairs:
            gk = dual.coordinates(gk_functional)
            for gl_functional, nl in self.prog.gen_pairs:
                spread = self._pure_map(f.outer(gk, nl))
                kappa = self._contraction(target, nk, gl_functional)
                result = f.add(result, f.matmul(kappa, f.matmul(D_prime, spread)))
        return result

    # --- internal isomorphisms -----------------------------------------

    @cached_property
    def tensor_with_module(self) -> QuotientSpace:
        """A (x)_B N, ambient index x*m + c"""
        f, A, prog = self.field, self.ext.A, self.prog
        d, m = A.dim, prog.dim
        blocks = [f.sub(f.kron(A.right_matrix(self.ext.B.basis[g]).T, f.eye(m)),
                        f.kron(f.eye(d), prog.action[g].T))
                  for g in self.base.generating_indices]
        relations = np.vstack(blocks) if blocks else f.zeros((0, d * m))
        return QuotientSpace(f, d * m, relations)

    def alpha_matrices(self) -> np.ndarray:
        """alpha(rho (x) x (x) u): y (x) v -> y rho(v) x (x) u on A (x)_B N"""
        f, A, m = self.field, self.ext.A, self.prog.dim
        Q, car = self.tensor_with_module, self.carrier
        coords = np.asarray(Q.basis_coordinates, dtype=np.int64)
        ys, vs = coords // m, coords % m
        yp = f.tensordot(A.mul_table, self.included_pairing, axes=([1], [2]))
        ypx = f.tensordot(yp, A.mul_table, axes=([1], [0]))
        mats = []
        for i in range(car.dim):
            a, x, c = car.a_idx[i], car.x_idx[i], car.c_idx[i]
            ambient = f.zeros((Q.dim, A.dim, m))
            ambient[:, :, c] = ypx[ys, a, vs, x, :]
            mats.append(Q.project(ambient.reshape(Q.dim, -1)).T.copy())
        return np.stack(mats) if mats else f.zeros((0, Q.dim, Q.dim))

    def alpha_consistency_check(self) -> bool:
        """alpha is a ring isomorphism onto the endomorphisms of A (x)_B N over A (written on the right)"""
        f, A, Q = self.field, self.ext.A, self.tensor_with_module
        D = Q.dim
        mats = self.alpha_matrices()
        lefts = [Q.induced(f.matmul(Q.projection, f.kron(A.left_mats[g], f.eye(self.prog.dim))))
                 for g in A.generating_indices]
        for M in mats:
            if any(not f.equal(f.matmul(M, L), f.matmul(L, M)) for L in lefts):
                logger.warning("❌ alpha image is not A-linear")
                return False
        rows = [f.sub(f.kron(f.eye(D), L.T), f.kron(L, f.eye(D))) for L in lefts]
        end_dim = kernel_basis(f, np.vstack(rows)).shape[0] if rows else D * D
        if end_dim != self.Aprime.dim or rank(f, mats.reshape(mats.shape[0], -1)) != self.Aprime.dim:
            logger.warning("❌ alpha is not bijective (dim End = %d, dim A' = %d)", end_dim, self.Aprime.dim)
            return False
        unit = f.tensordot(self.Aprime.unit, mats, axes=(0, 0))
        lhs = f.tensordot(self.Aprime.mul_table, mats, axes=([2], [0]))
        rhs = f.tensordot(mats, mats, axes=([2], [1])).transpose(2, 0, 1, 3)
        return f.equal(unit, f.eye(D)) and f.equal(lhs, rhs)

    def eta_xi_dimension_check(self) -> Dict[str, Any]:
        """dim N* (x)_B N = dim B' = dim End_B(N)"""
        f, prog, dual = self.field, self.prog, self.dual
        n, m = dual.dim, prog.dim
        blocks = [f.sub(f.kron(dual.action[g].T, f.eye(m)), f.kron(f.eye(n), prog.action[g].T))
                  for g in self.base.generating_indices]
        relations = np.vstack(blocks) if blocks else f.zeros((0, n * m))
        dims = {
            "dual_tensor_module": QuotientSpace(f, n * m, relations).dim,
            "dim_Bprime": self.Bprime.dim,
            "dim_End_N": left_module_hom_space(prog.as_left_module(), prog.as_left_module()).shape[0],
        }
        dims["holds"] = len({dims["dual_tensor_module"], dims["dim_Bprime"], dims["dim_End_N"]}) == 1
        return dims

    def summand_transfer(self) -> Dict[str, Dict[str, bool]]:
        """_B A | _B B and _B B | _B A on both sides"""
        out = {}
        for label, ext in (("source", self.ext), ("target", self.ext_prime)):
            A_mod, B_mod = ext_left_module(ext), base_left_module(ext)
            out[label] = {"A_divides_B": summand_witness(A_mod, B_mod) is not None,
                          "B_divides_A": summand_witness(B_mod, A_mod) is not None}
        return out

    def matrix_alignment(self) -> np.ndarray:
        """E_st (x) x -> f_s (x) x (x) m_t from M_n(A) to A' (free progenerators only)"""
        n = self.prog.free_rank
        if n is None:
            raise UnsupportedClass("matrix alignment needs a free progenerator")
        f, A = self.field, self.ext.A
        d = A.dim
        out = f.zeros((self.Aprime.dim, n * n * d))
        for s in range(n):
            fs = self.dual.coordinates(self.prog.dual_pairs[s][0])
            for t in range(n):
                cols = self._pure_map(f.outer(fs, self.prog.dual_pairs[t][1]))
                out[:, (s * n + t) * d:(s * n + t + 1) * d] = cols
        return out

    def matrix_alignment_check(self) -> bool:
        """A' = M_n(A) carrying M_n(B) onto B' under the canonical basis alignment"""
        n = self.prog.free_rank
        f, A = self.field, self.ext.A
        M = self.matrix_alignment()
        if not is_algebra_isomorphism(matrix_algebra(A, n), self.Aprime, M):
            return False
        blocks = [f.kron(f.unit_vector(n * n, st), b) for st in range(n * n) for b in self.ext.B.basis]
        image = f.matmul(np.vstack(blocks), M.T.copy())
        return contains_subspace(f, self.Bprime.basis, image) and rank(f, image) == self.Bprime.dim

    # --- certificates --------------------------------------------------

    def transport_certificate(self, cert: Certificate) -> Certificate:
        """Image of a certificate of A/B as a certificate of A'/B'"""
        f = self.field
        if isinstance(cert, LiberalCertificate):
            return LiberalCertificate(elements=[self.phi(v) for v in cert.elements])
        if isinstance(cert, SeparableCertificate):
            return SeparableCertificate(element=self.psi(cert.element))
        if isinstance(cert, StronglySeparableCertificate):
            return StronglySeparableCertificate(elements=[self.phi(v) for v in cert.elements],
                                                casimirs=[self.psi(e) for e in cert.casimirs])
        if isinstance(cert, DepthTwoCertificate):
            return DepthTwoCertificate(side=cert.side,
                                       tensors=[self.psi(t) for t in cert.tensors],
                                       endomorphisms=[self.phi_end(b) for b in cert.endomorphisms])
        if isinstance(cert, WeaklySeparableCertificate):
            return self._transport_weakly_separable(cert)
        if isinstance(cert, TrivialCertificate):
            if cert.complement.shape[0] == 0:
                return TrivialCertificate(complement=f.zeros((0, self.Aprime.dim)))
            rows = f.tensordot(self.carrier.projection4, cert.complement, axes=([2], [1]))
            rows = rows.transpose(1, 2, 3, 0).reshape(-1, self.Aprime.dim)
            return TrivialCertificate(complement=row_basis(f, rows)[0])
        raise UnsupportedClass(f"no transport formula for {cert.kind or type(cert).__name__} certificates")

    def _transport_weakly_separable(self, cert: WeaklySeparableCertificate) -> WeaklySeparableCertificate:
        f = self.field
        target = derivation_space(self.ext_prime)
        out = WeaklySeparableCertificate()
        if target.dim == 0:
            return out
        known = np.stack([D.reshape(-1) for D in cert.derivations], axis=0) if cert.derivations else f.zeros((0, 1))
        for D_prime in target.basis:
            D = self.pullback_derivation(D_prime)
            coeffs = span_membership(f, known, D.reshape(-1))
            if coeffs is None:
                raise ValidationError("pulled-back derivation is not covered by the source certificate")
            v = f.zeros(self.ext.A.dim)
            for c, element in zip(coeffs, cert.elements):
                v = f.add(v, f.scale(c, element))
            out.derivations.append(D_prime.copy())
            out.elements.append(self.phi(v))
        return out


def transport_extension(ext: Extension, prog: Progenerator, name: Optional[str] = None) -> TransportedExtension:
    """Checked entry point: the dual basis and generator identities must hold first"""
    if not verify_progenerator(prog):
        raise ValidationError(f"{prog.name or 'module'} is not a progenerator over {ext.name or 'B'}")
    return TransportedExtension(ext, prog, name=name)


def free_transport(ext: Extension, n: int = 2) -> TransportedExtension:
    return TransportedExtension(ext, progenerator_free(ext.B.induced, n))


# --- the invariance suite ----------------------------------------------------

class InvarianceAnalyzer:
    """Runs every invariance property on one transported extension"""

    def __init__(self, te: TransportedExtension, settings: Optional[WorkbenchSettings] = None,
                 automorphisms: Sequence[np.ndarray] = ()):
        self.te = te
        self.settings = settings or WorkbenchSettings()
        self.automorphisms = list(automorphisms)
        self.rows: List[Dict[str, Any]] = []

    def _row(self, check: str, source, target, holds: Optional[bool]):
        """holds is None for rows that only report the observed values"""
        self.rows.append({"check": check, "source": source, "target": target,
                          "holds": None if holds is None else bool(holds)})
        mark = "·" if holds is None else ("✅" if holds else "❌")
        logger.info("%s %s (%s / %s)", mark, check, source, target)

    def check_progenerator(self):
        self._row("progenerator", self.te.prog.name, self.te.dual.dim, verify_progenerator(self.te.prog))

    def check_centralizers(self):
        te, f = self.te, self.te.field
        A, Ap = te.ext.A, te.Aprime
        base_center = f.matmul(te.base.center, te.ext.B.basis)
        base_center_p = f.matmul(te.Bprime.induced.center, te.Bprime.basis)
        for label, src, dst in (("centralizer", te.ext.V, te.ext_prime.V),
                                ("center", te.ext.C, te.ext_prime.C),
                                ("base_center", base_center, base_center_p)):
            image = f.matmul(src, te.phi_matrix.T.copy())
            holds = (src.shape[0] == dst.shape[0] and rank(f, image) == src.shape[0]
                     and contains_subspace(f, dst, image))
            if holds:
                products = f.tensordot(A.products(src, src), te.phi_matrix, axes=([2], [1]))
                holds = f.equal(products, Ap.products(image, image))
            self._row(label, src.shape[0], dst.shape[0], holds)

    def check_endomorphisms(self):
        te, f = self.te, self.te.field
        ends, ends_p = bimodule_endomorphisms(te.ext), bimodule_endomorphisms(te.ext_prime)
        images = [te.phi_end(e) for e in ends]
        M = ext_bimodule(te.ext_prime)
        holds = len(ends) == len(ends_p) and all(is_bimodule_map(M, M, e) for e in images)
        if holds and images:
            holds = rank(f, np.stack([e.reshape(-1) for e in images])) == len(ends)
        if holds:
            for i, eta in enumerate(ends):
                for j, zeta in enumerate(ends):
                    if not f.equal(te.phi_end(f.matmul(eta, zeta)), f.matmul(images[i], images[j])):
                        holds = False
                        break
                if not holds:
                    break
        self._row("endomorphism_ring", len(ends), len(ends_p), holds)
        to_base, to_base_p = hom_to_base_space(te.ext), hom_to_base_space(te.ext_prime)
        mapped = [te.phi_end(g).reshape(-1) for g in to_base]
        target_rows = to_base_p.reshape(to_base_p.shape[0], -1)
        holds = len(to_base) == len(to_base_p)
        if holds and mapped:
            holds = contains_subspace(f, target_rows, np.stack(mapped)) and rank(f, np.stack(mapped)) == len(mapped)
        self._row("hom_to_base", len(to_base), len(to_base_p), holds)

    def check_casimirs(self):
        te, f = self.te, self.te.field
        T, Tp = te.ext.T, te.ext_prime.T
        images = [te.psi(e) for e in T.casimir_A]
        holds = (T.casimir_A.shape[0] == Tp.casimir_A.shape[0]
                 and all(Tp.is_casimir(e, "A") for e in images)
                 and (not images or rank(f, np.stack(images)) == len(images)))
        self._row("casimir_A", T.casimir_A.shape[0], Tp.casimir_A.shape[0], holds)
        images = [te.psi(e) for e in T.casimir_B]
        holds = (T.casimir_B.shape[0] == Tp.casimir_B.shape[0]
                 and all(Tp.is_casimir(e, "B") for e in images)
                 and all(f.equal(te.psi_inverse(p), e) for p, e in zip(images, T.casimir_B)))
        self._row("casimir_B", T.casimir_B.shape[0], Tp.casimir_B.shape[0], holds)
        self._row("psi_well_defined", T.dim, Tp.dim, te.psi_well_defined)

    def check_derivations(self):
        te, f = self.te, self.te.field
        der, der_p = derivation_space(te.ext), derivation_space(te.ext_prime)
        holds = der.dim == der_p.dim
        for D in der.basis:
            forward = te.transport_derivation(D)
            holds = holds and der_p.contains(forward) and f.equal(te.pullback_derivation(forward), D)
        for D_prime in der_p.basis:
            holds = holds and f.equal(te.transport_derivation(te.pullback_derivation(D_prime)), D_prime)
        self._row("derivations", der.dim, der_p.dim, holds)
        S = regular_bimodule(te.ext.A)
        S_prime = regular_bimodule(te.Aprime)
        inner = all(f.equal(te.transport_derivation(inner_derivation(S, v)),
                            inner_derivation(S_prime, te.phi(v))) for v in te.ext.V)
        self._row("inner_derivations", te.ext.V.shape[0], te.ext_prime.V.shape[0], inner)

    def check_summands(self):
        transfer = self.te.summand_transfer()
        for key in ("A_divides_B", "B_divides_A"):
            src, dst = transfer["source"][key], transfer["target"][key]
            self._row(f"summand_{key}", src, dst, (not src) or dst)

    def check_internal_isomorphisms(self):
        dims = self.te.dimension_check
        self._row("eta_xi_dimensions", dims["dual_tensor_module"], dims["dim_End_N"], dims["holds"])
        self._row("alpha", self.te.Aprime.dim, self.te.tensor_with_module.dim, self.te.alpha_consistency_check())
        if self.te.prog.free_rank is not None:
            self._row("matrix_alignment", self.te.prog.free_rank, self.te.Aprime.dim,
                      self.te.matrix_alignment_check())

    def check_automorphisms(self):
        te, f = self.te, self.te.field
        for idx, eta in enumerate(self.automorphisms):
            eta_p = te.transport_automorphism(eta)
            holds = is_algebra_automorphism(te.Aprime, eta_p, fixing=te.Bprime)
            fixed = fixed_subalgebra(te.ext.A, [eta])
            if fixed.dim == te.ext.B.dim:
                fixed_p = fixed_subalgebra(te.Aprime, [eta_p])
                holds = holds and fixed_p.dim == te.Bprime.dim and contains_subspace(f, fixed_p.basis, te.Bprime.basis)
            self._row(f"automorphism_{idx}", fixed.dim, te.Bprime.dim, holds)

    def check_certificates(self):
        te = self.te
        source = ExtensionClassifier(te.ext, self.settings).classify(TRANSPORTABLE + RECOMPUTED)
        target = ExtensionClassifier(te.ext_prime, self.settings).classify(TRANSPORTABLE + RECOMPUTED)
        for name in TRANSPORTABLE + RECOMPUTED:
            src, dst = source.outcomes[name], target.outcomes[name]
            if name in TRANSPORTABLE and src == HOLDS:
                moved = te.transport_certificate(source.certificates[name])
                self._row(f"transport_{name}", src, dst, verify_certificate(te.ext_prime, moved) and dst != FAILS)
            elif name in RECOMPUTED:
                # observed only: weakly quasi-separable can change under M_n
                self._row(f"class_{name}", src, dst, None)
            else:
                self._row(f"class_{name}", src, dst, src == dst or UNKNOWN in (src, dst))

    def run_all(self, certificates: bool = True) -> List[Dict[str, Any]]:
        self.rows = []
        self.check_progenerator()
        self.check_centralizers()
        self.check_endomorphisms()
        self.check_casimirs()
        self.check_derivations()
        self.check_summands()
        self.check_internal_isomorphisms()
        self.check_automorphisms()
        if certificates:
            self.check_certificates()
        return self.rows

    @property
    def all_hold(self) -> bool:
        return all(row["holds"] is not False for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["check", "source", "target", "holds"])


# --- the power-property counterexample ---------------------------------------

def corner_witness(te: TransportedExtension, x: np.ndarray) -> np.ndarray:
    """[[1, x], [0, 0]] of M_n(A) carried into A'"""
    f, A = te.field, te.ext.A
    n, d = te.prog.free_rank, A.dim
    if n is None or n < 2:
        raise UnsupportedClass("corner witnesses need a free progenerator of rank at least 2")
    candidate = f.zeros(n * n * d)
    candidate[:d] = A.unit
    candidate[d:2 * d] = x
    return f.matmul(te.matrix_alignment(), candidate)


def witness_candidates(te: TransportedExtension) -> List[np.ndarray]:
    if te.prog.free_rank is None or te.prog.free_rank < 2:
        return []
    A = te.ext.A
    return [corner_witness(te, A.basis_vector(i)) for i in range(A.dim)]


def power_counterexample(ext: Extension, n: int, settings: Optional[WorkbenchSettings] = None,
                         max_power: int = 8) -> Dict[str, Any]:
    """x^n in B for all x of A, while w = [[1, t], [0, 0]] has w^k = w outside B' in M_2(A)"""
    settings = settings or WorkbenchSettings()
    te = free_transport(ext, 2)
    A = ext.A
    source = check_power_property(ext, n, settings.power_samples, settings.seed)
    witness = corner_witness(te, A.basis_vector(1) if A.dim > 1 else A.unit)
    target = check_power_property(te.ext_prime, n, settings.power_samples, settings.seed, candidates=[witness])
    Ap, Bp = te.Aprime, te.Bprime
    powers = {k: bool(te.field.equal(Ap.power(witness, k), witness) and not Bp.contains(witness))
              for k in range(1, max_power + 1)}
    return {"source": source, "target": target, "witness": witness, "witness_powers": powers,
            "transported": te}
