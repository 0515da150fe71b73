# modules/extension_classifier.py
# Decides every extension class of A/B and re-verifies the certificates

import itertools
import logging
import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from modules.algebra import Extension
from modules.bimodule import (Bimodule, SummandWitness, base_bimodule, bimodule_endomorphisms,
                              bimodule_hom_space, derivation_space, ext_bimodule,
                              inner_derivation, inner_derivation_space, is_bimodule_map,
                              is_derivation, regular_bimodule, summand_witness,
                              trace_ideal_witness)
from modules.errors import ImplicationViolation, UnsupportedClass
from modules.exact_linalg import (FieldSpec, kernel_basis, rank, row_basis,
                                  solve_linear, span_membership, stack)
from modules.settings import WorkbenchSettings

logger = logging.getLogger(__name__)

CLASS_NAMES = [
    "trivial", "liberal", "separable", "hirata", "strongly_separable",
    "depth_two_left", "depth_two_right", "weakly_separable",
    "weakly_quasi_separable", "power",
]

IMPLICATIONS = [
    ("hirata", "strongly_separable"),
    ("strongly_separable", "separable"),
    ("separable", "weakly_separable"),
    ("separable", "weakly_quasi_separable"),
    ("hirata", "depth_two_left"),
    ("hirata", "depth_two_right"),
]

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


def implication_graph() -> nx.DiGraph:
    """Known implications between classes, closed transitively"""
    return nx.transitive_closure(nx.DiGraph(IMPLICATIONS))


def _vec(f: FieldSpec, v) -> List[str]:
    return [f.format(c) for c in np.asarray(v).reshape(-1)]


def _mat(f: FieldSpec, m) -> List[List[str]]:
    return [_vec(f, row) for row in np.asarray(m)]


# --- certificates ------------------------------------------------------

@dataclass
class Certificate:
    kind: ClassVar[str] = ""

    def payload(self, f: FieldSpec) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass
class SeparableCertificate(Certificate):
    kind: ClassVar[str] = "separable"
    element: np.ndarray = None

    def payload(self, f):
        return {"e": _vec(f, self.element)}


@dataclass
class HirataCertificate(Certificate):
    kind: ClassVar[str] = "hirata"
    witness: SummandWitness = None

    def payload(self, f):
        return {"f": [_mat(f, m) for m in self.witness.maps_to],
                "g": [_mat(f, m) for m in self.witness.maps_back]}


@dataclass
class StronglySeparableCertificate(Certificate):
    kind: ClassVar[str] = "strongly_separable"
    elements: List[np.ndarray] = dc_field(default_factory=list)
    casimirs: List[np.ndarray] = dc_field(default_factory=list)

    def payload(self, f):
        return {"pairs": [{"v": _vec(f, v), "e": _vec(f, e)} for v, e in zip(self.elements, self.casimirs)]}


@dataclass
class DepthTwoCertificate(Certificate):
    kind: ClassVar[str] = "depth_two"
    side: str = "left"
    tensors: List[np.ndarray] = dc_field(default_factory=list)
    endomorphisms: List[np.ndarray] = dc_field(default_factory=list)

    def payload(self, f):
        return {"side": self.side,
                "pairs": [{"t": _vec(f, t), "beta": _mat(f, b)} for t, b in zip(self.tensors, self.endomorphisms)]}


@dataclass
class LiberalCertificate(Certificate):
    kind: ClassVar[str] = "liberal"
    elements: List[np.ndarray] = dc_field(default_factory=list)

    def payload(self, f):
        return {"v": [_vec(f, v) for v in self.elements]}


@dataclass
class WeaklySeparableCertificate(Certificate):
    kind: ClassVar[str] = "weakly_separable"
    derivations: List[np.ndarray] = dc_field(default_factory=list)
    elements: List[np.ndarray] = dc_field(default_factory=list)

    def payload(self, f):
        return {"table": [{"D": _mat(f, D), "v": _vec(f, v)} for D, v in zip(self.derivations, self.elements)]}


@dataclass
class WeaklyQuasiSeparableCertificate(Certificate):
    kind: ClassVar[str] = "weakly_quasi_separable"
    derivation_dim: int = 0
    central_dim: int = 0

    def payload(self, f):
        return {"der_dim": self.derivation_dim, "central_der_dim": self.central_dim}


@dataclass
class TrivialCertificate(Certificate):
    kind: ClassVar[str] = "trivial"
    complement: np.ndarray = None

    def payload(self, f):
        return {"S": _mat(f, self.complement)}


@dataclass
class PowerCertificate(Certificate):
    kind: ClassVar[str] = "power"
    n: int = 1
    status: str = UNKNOWN
    counterexample: Optional[np.ndarray] = None
    method: str = "search"
    refutations: Dict[int, np.ndarray] = dc_field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def payload(self, f):
        out = {"n": self.n, "status": self.status, "method": self.method}
        if self.counterexample is not None:
            out["counterexample"] = _vec(f, self.counterexample)
        if self.refutations:
            out["refutations"] = {str(k): _vec(f, v) for k, v in sorted(self.refutations.items())}
        return out


@dataclass
class TrivialSearch:
    status: str
    certificate: Optional[TrivialCertificate] = None
    points: int = 0


# --- checks ------------------------------------------------------------

def check_separable(ext: Extension) -> Optional[SeparableCertificate]:
    """Casimir element e with mu(e) = 1"""
    T, f = ext.T, ext.field
    cas = T.casimir_A
    if cas.shape[0] == 0:
        return None
    images = f.matmul(T.mu, cas.T.copy())
    coeffs = solve_linear(f, images, ext.A.unit)
    if coeffs is None:
        return None
    return SeparableCertificate(element=f.matmul(coeffs.reshape(1, -1), cas)[0])


def hirata_hom_spaces(ext: Extension):
    """Hom(A (x)_B A, A) = {x (x) y -> x v y} and Hom(A, A (x)_B A) = {a -> a e}"""
    T, f = ext.T, ext.field
    to_base = np.stack([T.mu_u_matrix(v) for v in ext.V])
    cas = T.casimir_A
    if cas.shape[0] == 0:
        return to_base, f.zeros((0, T.dim, ext.A.dim))
    back = np.stack([f.tensordot(T.left_action, e, axes=([2], [0])).T.copy() for e in cas])
    return to_base, back


def check_hirata(ext: Extension) -> Optional[HirataCertificate]:
    """A (x)_B A is a summand of a finite sum of copies of A as A-A bimodules"""
    to_base, back = hirata_hom_spaces(ext)
    witness = trace_ideal_witness(ext.field, ext.T.dim, to_base, back)
    return HirataCertificate(witness=witness) if witness is not None else None


def _strongly_separable_maps(ext: Extension, cas: np.ndarray):
    T, f, A = ext.T, ext.field, ext.A
    mu_mats = [T.mu_u_matrix(u) for u in ext.V]
    pairs, vectors = [], []
    for vi, v in enumerate(ext.V):
        left = A.left_matrix(v)
        for ei, e in enumerate(cas):
            images = [f.matmul(left, f.matmul(mu, e)) for mu in mu_mats]
            pairs.append((vi, ei))
            vectors.append(np.concatenate(images))
    return pairs, vectors


def check_strongly_separable(ext: Extension) -> Optional[StronglySeparableCertificate]:
    """Family (v_i, e_i) with u = sum v_i mu_u(e_i) for every u in V"""
    f = ext.field
    cas = ext.T.casimir_A
    if cas.shape[0] == 0:
        return None
    pairs, vectors = _strongly_separable_maps(ext, cas)
    target = ext.V.reshape(-1)
    coeffs = span_membership(f, np.vstack(vectors), target)
    if coeffs is None:
        return None
    folded: Dict[int, np.ndarray] = {}
    for (vi, ei), c in zip(pairs, coeffs):
        if c != 0:
            term = f.scale(c, ext.V[vi])
            folded[ei] = f.add(folded[ei], term) if ei in folded else term
    elements = [v for v in folded.values()]
    casimirs = [cas[ei].copy() for ei in folded]
    return StronglySeparableCertificate(elements=elements, casimirs=casimirs)


def _depth_two_target(ext: Extension, side: str) -> np.ndarray:
    T, f = ext.T, ext.field
    cube = T.projection.reshape(T.dim, T.d, T.d)
    if side == "left":
        return f.tensordot(cube, ext.A.unit, axes=([2], [0]))
    return f.tensordot(cube, ext.A.unit, axes=([1], [0]))


def _depth_two_candidate(ext: Extension, side: str, t: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """x -> t beta(x) (left) or x -> beta(x) t (right) as a q x d matrix"""
    T, f = ext.T, ext.field
    action = T.right_action if side == "left" else T.left_action
    acted = f.tensordot(action, t, axes=([2], [0]))
    return f.matmul(acted.T.copy(), beta)


def check_depth_two(ext: Extension, side: str = "left") -> Optional[DepthTwoCertificate]:
    """Quasibases (t_i, beta_i), reduced to the y = 1 identity"""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    f = ext.field
    cas = ext.T.casimir_B
    ends = bimodule_endomorphisms(ext)
    if cas.shape[0] == 0 or ends.shape[0] == 0:
        return None
    pairs = [(ti, bi) for ti in range(cas.shape[0]) for bi in range(ends.shape[0])]
    vectors = np.vstack([_depth_two_candidate(ext, side, cas[ti], ends[bi]).reshape(1, -1) for ti, bi in pairs])
    coeffs = span_membership(f, vectors, _depth_two_target(ext, side).reshape(-1))
    if coeffs is None:
        return None
    cert = DepthTwoCertificate(side=side)
    for (ti, bi), c in zip(pairs, coeffs):
        if c != 0:
            cert.tensors.append(f.scale(c, cas[ti]))
            cert.endomorphisms.append(ends[bi].copy())
    return cert


def depth_two_modules(ext: Extension, side: str = "left") -> Tuple[Bimodule, Bimodule]:
    """A (x)_B A and A restricted to B-A (left) or A-B (right) bimodules"""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    tensor = ext.T.as_bimodule()
    regular = regular_bimodule(ext.A)
    if side == "left":
        return tensor.restrict(left=ext.B), regular.restrict(left=ext.B)
    return tensor.restrict(right=ext.B), regular.restrict(right=ext.B)


def depth_two_by_summands(ext: Extension, side: str = "left") -> bool:
    """A (x)_B A divides a finite sum of copies of A on the given side"""
    return summand_witness(*depth_two_modules(ext, side)) is not None


def check_liberal(ext: Extension) -> Optional[LiberalCertificate]:
    """A = sum v_i B with v_i in V, greedy in basis order"""
    f, A = ext.field, ext.A
    products = A.products(ext.V, ext.B.basis)
    if rank(f, products.reshape(-1, A.dim)) < A.dim:
        return None
    chosen: List[np.ndarray] = []
    span = f.zeros((0, A.dim))
    for v, vB in zip(ext.V, products):
        grown = np.vstack([span, vB])
        if rank(f, grown) > (rank(f, span) if span.shape[0] else 0):
            chosen.append(v.copy())
            span = grown
            if rank(f, span) == A.dim:
                break
    return LiberalCertificate(elements=chosen)


def check_finite_normalizing_with(ext: Extension, elements: Sequence[np.ndarray]) -> bool:
    """A = sum a_i B with a_i B = B a_i for the given elements"""
    f, A, B = ext.field, ext.A, ext.B
    if not elements:
        return False
    spans = []
    for a in elements:
        right = A.products(a.reshape(1, -1), B.basis)[0]
        left = A.products(B.basis, a.reshape(1, -1))[:, 0]
        if rank(f, right) != rank(f, np.vstack([right, left])) or rank(f, left) != rank(f, right):
            return False
        spans.append(right)
    return rank(f, np.vstack(spans)) == A.dim


def check_weakly_separable(ext: Extension) -> Optional[WeaklySeparableCertificate]:
    """Every B-derivation A -> A is inner"""
    f = ext.field
    der = derivation_space(ext)
    inner = inner_derivation_space(ext)
    if inner.shape[0] != der.dim:
        return None
    cert = WeaklySeparableCertificate()
    if der.dim == 0:
        return cert
    S = regular_bimodule(ext.A)
    ads = np.stack([inner_derivation(S, v).reshape(-1) for v in ext.V], axis=1)
    for D in der.basis:
        coeffs = solve_linear(f, ads, D.reshape(-1))
        if coeffs is None:
            return None
        cert.derivations.append(D.copy())
        cert.elements.append(f.matmul(coeffs.reshape(1, -1), ext.V)[0])
    return cert


def check_weakly_quasi_separable(ext: Extension) -> Optional[WeaklyQuasiSeparableCertificate]:
    """Every central B-derivation A -> A vanishes"""
    central = derivation_space(ext, central=True)
    if central.dim:
        return None
    return WeaklyQuasiSeparableCertificate(derivation_dim=derivation_space(ext).dim, central_dim=0)


def check_trivial_with(ext: Extension, complement) -> Optional[TrivialCertificate]:
    """A = B + S with S a square-zero B-B subbimodule"""
    f, A, B = ext.field, ext.A, ext.B
    S = complement if isinstance(complement, np.ndarray) else stack(f, list(complement), A.dim)
    if S.shape[0] == 0:
        return TrivialCertificate(complement=S) if B.dim == A.dim else None
    S, _ = row_basis(f, S)
    if B.dim + S.shape[0] != A.dim or rank(f, np.vstack([B.basis, S])) != A.dim:
        return None
    s_rank = S.shape[0]
    for b in B.generator_vectors:
        moved = np.vstack([A.products(b.reshape(1, -1), S)[0], A.products(S, b.reshape(1, -1))[:, 0]])
        if rank(f, np.vstack([S, moved])) != s_rank:
            return None
    if not f.is_zero(A.products(S, S)):
        return None
    return TrivialCertificate(complement=S)


def search_trivial(ext: Extension, budget: int = 4096) -> TrivialSearch:
    """Enumerate the B-B projections A -> B fixing B and test their kernels"""
    f, A, B = ext.field, ext.A, ext.B
    if B.dim == A.dim:
        return TrivialSearch(HOLDS, TrivialCertificate(complement=f.zeros((0, A.dim))), 1)
    homs = bimodule_hom_space(ext_bimodule(ext), base_bimodule(ext))
    if homs.shape[0] == 0:
        return TrivialSearch(FAILS)
    restricted = np.stack([f.matmul(h, B.basis.T.copy()).reshape(-1) for h in homs], axis=1)
    particular = solve_linear(f, restricted, f.eye(B.dim).reshape(-1))
    if particular is None:
        return TrivialSearch(FAILS)
    free = kernel_basis(f, restricted)
    t = free.shape[0]
    if t and (not f.is_prime or f.p ** t > budget):
        logger.info("trivial-extension search skipped: %s^%d points exceed the budget", f.label, t)
        return TrivialSearch(UNKNOWN, points=(f.p ** t if f.is_prime else 0))
    points = 0
    for lam in itertools.product(f.elements() if t else [], repeat=t):
        coeffs = particular
        if t:
            coeffs = f.add(particular, f.matmul(f.array(lam).reshape(1, -1), free)[0])
        projection = f.tensordot(coeffs, homs, axes=(0, 0))
        points += 1
        cert = check_trivial_with(ext, kernel_basis(f, projection))
        if cert is not None:
            return TrivialSearch(HOLDS, cert, points)
    return TrivialSearch(FAILS, points=points)


def _is_prime_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def check_power_property(ext: Extension, n: int, samples: int = 64, seed: int = 20160401,
                         candidates: Sequence[np.ndarray] = (), budget: int = 4096) -> PowerCertificate:
    """Whether x^n lies in B for every x in A

    Over a prime field a full run through all p^dim elements decides the
    question when it fits the budget. Past it, sampling can only refute.
    """
    if n < 1:
        raise ValueError("exponent must be at least 1")
    f, A, B = ext.field, ext.A, ext.B
    if B.dim == A.dim:
        return PowerCertificate(n=n, status=HOLDS, method="exact")
    basis = [A.basis_vector(i) for i in range(A.dim)]
    if n == 1:
        witness = next(v for v in basis if not B.contains(v))
        return PowerCertificate(n=n, status=FAILS, counterexample=witness, method="exact")
    if A.is_commutative and f.is_prime and _is_prime_power(n, f.p):
        # x -> x^n is F_p-linear here, so basis vectors decide
        for v in basis:
            if not B.contains(A.power(v, n)):
                return PowerCertificate(n=n, status=FAILS, counterexample=v, method="frobenius")
        return PowerCertificate(n=n, status=HOLDS, method="frobenius")
    if f.is_prime and f.p ** A.dim <= budget:
        for coeffs in itertools.product(f.elements(), repeat=A.dim):
            x = f.array(coeffs)
            if not B.contains(A.power(x, n)):
                return PowerCertificate(n=n, status=FAILS, counterexample=x, method="exact")
        return PowerCertificate(n=n, status=HOLDS, method="exact")
    pool = itertools.chain(
        candidates,
        basis,
        (f.add(basis[i], basis[j]) for i in range(A.dim) for j in range(i + 1, A.dim)),
        _samples(f, A.dim, samples, seed),
    )
    for x in pool:
        if not B.contains(A.power(x, n)):
            return PowerCertificate(n=n, status=FAILS, counterexample=np.asarray(x).copy(), method="search")
    return PowerCertificate(n=n, status=UNKNOWN, method="search")


def _samples(f: FieldSpec, dim: int, count: int, seed: int):
    rng = random.Random(seed)
    for _ in range(count):
        yield f.array([f.random_scalar(rng) for _ in range(dim)])


def check_power_range(ext: Extension, max_n: int, samples: int = 64, seed: int = 20160401,
                      candidates: Sequence[np.ndarray] = (), budget: int = 4096) -> PowerCertificate:
    """Some n <= max_n with x^n in B for all x"""
    refutations: Dict[int, np.ndarray] = {}
    for n in range(1, max_n + 1):
        cert = check_power_property(ext, n, samples, seed, candidates, budget)
        if cert.status == HOLDS:
            return cert
        if cert.status == FAILS:
            refutations[n] = cert.counterexample
    status = FAILS if len(refutations) == max_n else UNKNOWN
    return PowerCertificate(n=max_n, status=status, method="range", refutations=refutations)


# --- verification ------------------------------------------------------

def _verify_depth_two(ext: Extension, cert: DepthTwoCertificate) -> bool:
    T, f, A = ext.T, ext.field, ext.A
    M = ext_bimodule(ext)
    for t, beta in zip(cert.tensors, cert.endomorphisms):
        if not T.is_casimir(t, over="B") or not is_bimodule_map(M, M, beta):
            return False
    d = A.dim
    total = f.zeros((d, d, T.dim))
    ident = f.eye(d)
    for t, beta in zip(cert.tensors, cert.endomorphisms):
        images = beta.T.copy()
        if cert.side == "left":
            # sum_i t_i beta_i(x) y
            factors = A.products(images, ident)
            acted = f.tensordot(T.right_action, t, axes=([2], [0]))
        else:
            # sum_i x beta_i(y) t_i
            factors = A.products(ident, images)
            acted = f.tensordot(T.left_action, t, axes=([2], [0]))
        total = f.add(total, f.tensordot(factors, acted, axes=([2], [0])))
    expected = T.projection.reshape(T.dim, d, d).transpose(1, 2, 0)
    return f.equal(total, expected)


def verify_certificate(ext: Extension, cert: Certificate) -> bool:
    """Re-derive the defining identity of the certified class"""
    f, A, T = ext.field, ext.A, None
    if isinstance(cert, SeparableCertificate):
        T = ext.T
        return T.is_casimir(cert.element, "A") and f.equal(f.matmul(T.mu, cert.element), A.unit)
    if isinstance(cert, HirataCertificate):
        T = ext.T
        X = T.as_bimodule()
        Y = regular_bimodule(A)
        for to, back in zip(cert.witness.maps_to, cert.witness.maps_back):
            if not (is_bimodule_map(X, Y, to) and is_bimodule_map(Y, X, back)):
                return False
        return f.equal(cert.witness.composite(f, T.dim), f.eye(T.dim))
    if isinstance(cert, StronglySeparableCertificate):
        T = ext.T
        V = ext.V
        if not all(T.is_casimir(e, "A") for e in cert.casimirs):
            return False
        if not all(span_membership(f, V, v) is not None for v in cert.elements):
            return False
        for u in V:
            total = f.zeros(A.dim)
            for v, e in zip(cert.elements, cert.casimirs):
                total = f.add(total, A.mul(v, T.mu_u(e, u)))
            if not f.equal(total, u):
                return False
        return True
    if isinstance(cert, DepthTwoCertificate):
        return _verify_depth_two(ext, cert)
    if isinstance(cert, LiberalCertificate):
        if not cert.elements:
            return False
        if not all(span_membership(f, ext.V, v) is not None for v in cert.elements):
            return False
        products = A.products(np.vstack(cert.elements), ext.B.basis).reshape(-1, A.dim)
        return rank(f, products) == A.dim
    if isinstance(cert, WeaklySeparableCertificate):
        der = derivation_space(ext)
        if len(cert.derivations) != der.dim:
            return False
        S = regular_bimodule(A)
        for D, v in zip(cert.derivations, cert.elements):
            if span_membership(f, ext.V, v) is None or not f.equal(D, inner_derivation(S, v)):
                return False
            if not (is_derivation(ext, D) and der.contains(D)):
                return False
        if der.dim == 0:
            return True
        return rank(f, np.stack([D.reshape(-1) for D in cert.derivations])) == der.dim
    if isinstance(cert, WeaklyQuasiSeparableCertificate):
        return derivation_space(ext, central=True).dim == 0 and cert.central_dim == 0
    if isinstance(cert, TrivialCertificate):
        return check_trivial_with(ext, cert.complement) is not None
    if isinstance(cert, PowerCertificate):
        return _verify_power(ext, cert)
    raise UnsupportedClass(f"no verifier for {type(cert).__name__}")


def _verify_power(ext: Extension, cert: PowerCertificate) -> bool:
    A, B = ext.A, ext.B
    if cert.refutations:
        return all(not B.contains(A.power(x, n)) for n, x in cert.refutations.items())
    if cert.status == FAILS:
        return cert.counterexample is not None and not B.contains(A.power(cert.counterexample, cert.n))
    if cert.status == HOLDS:
        return check_power_property(ext, cert.n).status == HOLDS
    return True


# --- classification report ---------------------------------------------

@dataclass
class ClassReport:
    """Outcome of every class check on one extension"""

    name: str
    field: FieldSpec
    outcomes: Dict[str, str] = dc_field(default_factory=dict)
    certificates: Dict[str, Certificate] = dc_field(default_factory=dict)
    verified: Dict[str, bool] = dc_field(default_factory=dict)
    dimensions: Dict[str, int] = dc_field(default_factory=dict)
    implications: Dict[str, bool] = dc_field(default_factory=dict)
    timing: Optional[Dict[str, float]] = None

    def holds(self, name: str) -> bool:
        return self.outcomes.get(name) == HOLDS

    def to_dict(self, include_certificates: bool = True) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "name": self.name,
            "field": self.field.label,
            "dimensions": dict(self.dimensions),
            "classes": {},
            "implications": dict(self.implications),
        }
        for cls in self.outcomes:
            row: Dict[str, Any] = {"outcome": self.outcomes[cls]}
            if cls in self.verified:
                row["verified"] = self.verified[cls]
            if include_certificates and cls in self.certificates:
                row["certificate"] = self.certificates[cls].payload(self.field)
            out["classes"][cls] = row
        if self.timing is not None:
            out["timing"] = {k: round(v, 4) for k, v in self.timing.items()}
        return out

    def to_frame(self) -> pd.DataFrame:
        rows = [{"extension": self.name, "class": cls, "outcome": outcome,
                 "verified": self.verified.get(cls)}
                for cls, outcome in self.outcomes.items()]
        return pd.DataFrame(rows, columns=["extension", "class", "outcome", "verified"])


class ExtensionClassifier:
    """Runs the class checks on one extension and assembles the report"""

    def __init__(self, ext: Extension, settings: Optional[WorkbenchSettings] = None,
                 power_candidates: Sequence[np.ndarray] = ()):
        self.ext = ext
        self.settings = settings or WorkbenchSettings()
        self.power_candidates = list(power_candidates)
        self.trivial_search: Optional[TrivialSearch] = None

    def run_check(self, name: str):
        """Certificate (or None) for one class; power and trivial carry their own status"""
        ext = self.ext
        if name == "trivial":
            self.trivial_search = search_trivial(ext, self.settings.trivial_budget)
            return self.trivial_search
        if name == "power":
            return check_power_range(ext, self.settings.power_max, self.settings.power_samples,
                                     self.settings.seed, self.power_candidates, self.settings.trivial_budget)
        checks = {
            "liberal": lambda: check_liberal(ext),
            "separable": lambda: check_separable(ext),
            "hirata": lambda: check_hirata(ext),
            "strongly_separable": lambda: check_strongly_separable(ext),
            "depth_two_left": lambda: check_depth_two(ext, "left"),
            "depth_two_right": lambda: check_depth_two(ext, "right"),
            "weakly_separable": lambda: check_weakly_separable(ext),
            "weakly_quasi_separable": lambda: check_weakly_quasi_separable(ext),
        }
        if name not in checks:
            raise UnsupportedClass(f"unknown class {name!r}")
        return checks[name]()

    def calculate_dimensions(self) -> Dict[str, int]:
        ext = self.ext
        T = ext.T
        return {
            "dim_A": ext.A.dim,
            "dim_B": ext.B.dim,
            "dim_V": ext.V.shape[0],
            "dim_C": ext.C.shape[0],
            "dim_Der": derivation_space(ext).dim,
            "dim_Inner": inner_derivation_space(ext).shape[0],
            "dim_central_Der": derivation_space(ext, central=True).dim,
            "dim_AxA": T.dim,
            "dim_casimir_A": T.casimir_A.shape[0],
            "dim_casimir_B": T.casimir_B.shape[0],
        }

    def classify(self, classes: Optional[Sequence[str]] = None, timing: bool = False) -> ClassReport:
        """Run the requested checks (all by default) and cross-check implications"""
        names = list(classes) if classes else list(CLASS_NAMES)
        unknown = [n for n in names if n not in CLASS_NAMES]
        if unknown:
            raise UnsupportedClass(f"unknown classes: {', '.join(unknown)}")
        report = ClassReport(name=self.ext.name or "extension", field=self.ext.field)
        clock: Dict[str, float] = {}
        for name in CLASS_NAMES:
            if name not in names:
                continue
            start = time.perf_counter()
            result = self.run_check(name)
            clock[name] = time.perf_counter() - start
            if isinstance(result, TrivialSearch):
                report.outcomes[name] = result.status
                cert = result.certificate
            elif isinstance(result, PowerCertificate):
                report.outcomes[name] = result.status
                cert = result
            else:
                report.outcomes[name] = HOLDS if result is not None else FAILS
                cert = result
            if cert is not None:
                report.certificates[name] = cert
                report.verified[name] = verify_certificate(self.ext, cert)
            logger.info("%s %s: %s", "✅" if report.outcomes[name] == HOLDS else "❌", name, report.outcomes[name])
        start = time.perf_counter()
        report.dimensions = self.calculate_dimensions()
        clock["dimensions"] = time.perf_counter() - start
        report.implications = implication_flags(report.outcomes)
        if timing:
            report.timing = clock
        broken = [k for k, ok in report.implications.items() if not ok]
        if broken:
            raise ImplicationViolation(f"{report.name}: report contradicts {', '.join(broken)}")
        return report


def implication_flags(outcomes: Dict[str, str]) -> Dict[str, bool]:
    """One flag per implication whose two ends were both decided"""
    flags = {}
    for src, dst in sorted(implication_graph().edges()):
        if src in outcomes and dst in outcomes and UNKNOWN not in (outcomes[src], outcomes[dst]):
            flags[f"{src}=>{dst}"] = not (outcomes[src] == HOLDS and outcomes[dst] == FAILS)
    return flags


def classify(ext: Extension, settings: Optional[WorkbenchSettings] = None,
             classes: Optional[Sequence[str]] = None) -> ClassReport:
    return ExtensionClassifier(ext, settings).classify(classes)
