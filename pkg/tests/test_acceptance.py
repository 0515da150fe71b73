# tests/test_acceptance.py
# Catalog-wide regressions: golden behaviour, oracle agreement and Morita invariance

import itertools

import pytest

from modules.algebra import is_algebra_isomorphism
from modules.catalog import CATALOG, build, get_entry, random_extensions
from modules.exact_linalg import contains_subspace, rank
from modules.extension_classifier import (HOLDS, ExtensionClassifier, check_depth_two,
                                          check_power_property, depth_two_by_summands,
                                          verify_certificate)
from modules.morita import (InvarianceAnalyzer, TRANSPORTABLE, free_transport, power_counterexample,
                            progenerator_from_idempotent, transport_extension)
from modules.settings import WorkbenchSettings

SETTINGS = WorkbenchSettings(power_max=8, power_samples=16)


def _idempotent_transport(name):
    ext = build(name)
    k, E = get_entry(name).idempotent(ext)
    return transport_extension(ext, progenerator_from_idempotent(ext.B.induced, k, E))


@pytest.mark.parametrize("name", list(CATALOG))
@pytest.mark.parametrize("side", ["left", "right"])
def test_depth_two_agrees_with_the_summand_formulation(name, side):
    ext = build(name)
    assert (check_depth_two(ext, side) is not None) == depth_two_by_summands(ext, side)


@pytest.mark.parametrize("name, exponents", [
    ("trunc-p2", [2, 4]),
    ("trunc-p3", [3]),
    ("trivial-f2", [2]),
    ("c2-f2", [2]),
    ("split-f3", [3]),
])
def test_frobenius_branch_matches_enumeration(name, exponents):
    ext = build(name)
    f, A = ext.field, ext.A
    everything = [f.array(c) for c in itertools.product(f.elements(), repeat=A.dim)]
    for n in exponents:
        cert = check_power_property(ext, n)
        assert cert.method in ("frobenius", "exact")
        assert (cert.status == HOLDS) == all(ext.B.contains(A.power(x, n)) for x in everything)


@pytest.mark.parametrize("name", ["m2diag-f2", "trunc-p2", "trivial-f2"])
def test_rank_one_free_transport_is_an_isomorphic_copy(name):
    ext = build(name)
    te = free_transport(ext, 1)
    f = ext.field
    assert is_algebra_isomorphism(ext.A, te.Aprime, te.phi_matrix)
    image = f.matmul(ext.B.basis, te.phi_matrix.T.copy())
    assert rank(f, image) == te.Bprime.dim and contains_subspace(f, te.Bprime.basis, image)
    assert f.equal(te.matrix_alignment(), te.phi_matrix)
    assert te.psi_matrix.shape == (te.ext_prime.T.dim, ext.T.dim)
    assert rank(f, te.psi_matrix) == ext.T.dim
    report = ExtensionClassifier(ext, SETTINGS).classify(TRANSPORTABLE)
    for cls, cert in report.certificates.items():
        assert verify_certificate(te.ext_prime, te.transport_certificate(cert)), cls


@pytest.mark.parametrize("p", [2, 3])
def test_power_property_counterexample(p):
    result = power_counterexample(build(f"trunc-p{p}"), p, SETTINGS, max_power=8)
    assert result["source"].status == HOLDS
    assert result["source"].method == "frobenius"
    assert result["target"].status == "fails"
    assert list(result["witness_powers"]) == list(range(1, 9))
    assert all(result["witness_powers"].values())


@pytest.mark.parametrize("name", list(CATALOG))
def test_invariance_suite_for_the_free_square(name):
    entry = get_entry(name)
    ext = entry.build()
    automorphisms = entry.automorphisms(ext) if entry.automorphisms else []
    analyzer = InvarianceAnalyzer(free_transport(ext, 2), SETTINGS, automorphisms)
    failed = [row["check"] for row in analyzer.run_all() if row["holds"] is False]
    assert failed == []


@pytest.mark.parametrize("name", list(CATALOG))
def test_invariance_suite_for_the_idempotent_progenerator(name):
    analyzer = InvarianceAnalyzer(_idempotent_transport(name), SETTINGS)
    failed = [row["check"] for row in analyzer.run_all() if row["holds"] is False]
    assert failed == []


def test_random_extensions_respect_the_implications():
    settings = WorkbenchSettings(power_max=3, power_samples=8, trivial_budget=256)
    for ext in random_extensions(50, seed=7):
        assert ext.A.dim <= 5
        report = ExtensionClassifier(ext, settings).classify()
        assert all(report.implications.values()), ext.name
        assert all(report.verified.values()), ext.name
