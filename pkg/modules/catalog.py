# modules/catalog.py
# Built-in extensions chosen to exercise every class

import logging
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from modules.algebra import (Extension, direct_product_algebra, ground_field_algebra,
                             group_algebra, matrix_algebra, subalgebra_closure,
                             trivial_extension_algebra, truncated_poly_algebra)
from modules.bimodule import regular_bimodule
from modules.errors import UnknownCatalogEntry
from modules.exact_linalg import FieldSpec

logger = logging.getLogger(__name__)


@dataclass
class CatalogEntry:
    name: str
    description: str
    build: Callable[[], Extension]
    idempotent: Optional[Callable[[Extension], Tuple[int, np.ndarray]]] = None
    automorphisms: Optional[Callable[[Extension], List[np.ndarray]]] = None
    tags: List[str] = dc_field(default_factory=list)


def diagonal_matrix_extension(field: FieldSpec, name: str) -> Extension:
    """M_2(k) over its diagonal"""
    A = matrix_algebra(ground_field_algebra(field), 2)
    A.name = name
    return Extension.from_basis(A, [A.basis_vector(0), A.basis_vector(3)], name=name)


def truncated_extension(p: int) -> Extension:
    """F_p[t]/(t^{2p}) over span{1, t^p}"""
    field = FieldSpec.prime(p)
    name = f"trunc-p{p}"
    A = truncated_poly_algebra(field, 2 * p)
    A.name = name
    return Extension.from_basis(A, [A.basis_vector(0), A.basis_vector(p)], name=name)


def _identity_m2f3() -> Extension:
    A = matrix_algebra(ground_field_algebra(FieldSpec.prime(3)), 2)
    A.name = "identity-m2f3"
    return Extension.identity(A, name="identity-m2f3")


def _trivial_f2() -> Extension:
    base = ground_field_algebra(FieldSpec.prime(2))
    ext = trivial_extension_algebra(base, regular_bimodule(base))
    ext.name = ext.A.name = "trivial-f2"
    return ext


def _c2_f2() -> Extension:
    A = group_algebra([[0, 1], [1, 0]], FieldSpec.prime(2))
    A.name = "c2-f2"
    return Extension.over_ground_field(A, name="c2-f2")


def _split_f3() -> Extension:
    k = ground_field_algebra(FieldSpec.prime(3))
    A = direct_product_algebra(k, k)
    A.name = "split-f3"
    return Extension.over_ground_field(A, name="split-f3")


def corner_idempotent(ext: Extension) -> Tuple[int, np.ndarray]:
    """diag(1, 0) in M_2(B)"""
    f, B = ext.field, ext.B.induced
    E = f.zeros((2, 2, B.dim))
    E[0, 0] = B.unit
    return 2, E


def split_idempotent(ext: Extension) -> Tuple[int, np.ndarray]:
    """diag(e, 1) in M_2(B) with e the first basis idempotent of B"""
    f, B = ext.field, ext.B.induced
    E = f.zeros((2, 2, B.dim))
    E[0, 0] = B.basis_vector(0)
    E[1, 1] = B.unit
    return 2, E


def _swap(ext: Extension) -> List[np.ndarray]:
    f = ext.field
    return [f.array([[0, 1], [1, 0]])]


CATALOG: Dict[str, CatalogEntry] = {entry.name: entry for entry in [
    CatalogEntry("identity-m2f3", "M_2(F_3) over itself", _identity_m2f3, corner_idempotent),
    CatalogEntry("m2diag-f2", "M_2(F_2) over the diagonal", lambda: diagonal_matrix_extension(FieldSpec.prime(2), "m2diag-f2"),
                 split_idempotent, tags=["golden"]),
    CatalogEntry("trunc-p2", "F_2[t]/(t^4) over span{1, t^2}", lambda: truncated_extension(2), corner_idempotent,
                 tags=["golden", "counterexample"]),
    CatalogEntry("trunc-p3", "F_3[t]/(t^6) over span{1, t^3}", lambda: truncated_extension(3), corner_idempotent,
                 tags=["counterexample"]),
    CatalogEntry("trivial-f2", "F_2 x| F_2 over F_2", _trivial_f2, corner_idempotent),
    CatalogEntry("c2-f2", "F_2[C_2] over F_2", _c2_f2, corner_idempotent),
    CatalogEntry("m2diag-q", "M_2(Q) over the diagonal", lambda: diagonal_matrix_extension(FieldSpec.rational(), "m2diag-q"),
                 split_idempotent),
    CatalogEntry("split-f3", "F_3 x F_3 over F_3", _split_f3, corner_idempotent, _swap),
]}


def get_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None


def build(name: str) -> Extension:
    ext = get_entry(name).build()
    logger.debug("built catalog entry %s: dim A = %d, dim B = %d", name, ext.A.dim, ext.B.dim)
    return ext


def counterexample_entry(p: int) -> str:
    if p not in (2, 3):
        raise UnknownCatalogEntry(f"no truncated catalog entry for p = {p}")
    return f"trunc-p{p}"


def _random_ambients() -> List:
    F2 = FieldSpec.prime(2)
    k = ground_field_algebra(F2)
    return [
        matrix_algebra(k, 2),
        truncated_poly_algebra(F2, 5),
        group_algebra([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], F2),
        direct_product_algebra(k, truncated_poly_algebra(F2, 3)),
        direct_product_algebra(direct_product_algebra(k, k), direct_product_algebra(k, k)),
    ]


def random_extension(rng: random.Random, index: int = 0) -> Extension:
    """B inside A, both closures of random elements; A sits in a small F_2 algebra"""
    ambient = rng.choice(_random_ambients())
    f = ambient.field

    def draw(algebra):
        return f.array([f.random_scalar(rng) for _ in range(algebra.dim)])

    A = subalgebra_closure(ambient, [draw(ambient) for _ in range(rng.randint(1, 2))]).induced
    A.name = f"random-{index}"
    B = subalgebra_closure(A, [draw(A) for _ in range(rng.randint(0, 1))])
    return Extension(A, B, name=A.name)


def random_extensions(count: int, seed: int = 20160401) -> List[Extension]:
    rng = random.Random(seed)
    return [random_extension(rng, i) for i in range(count)]
