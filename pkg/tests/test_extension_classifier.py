# tests/test_extension_classifier.py

import pytest

from modules.catalog import build
from modules.errors import UnsupportedClass
from modules.extension_classifier import (CLASS_NAMES, FAILS, HOLDS, UNKNOWN, ExtensionClassifier,
                                          PowerCertificate, SeparableCertificate, check_depth_two,
                                          check_finite_normalizing_with, check_liberal,
                                          check_power_property, check_power_range, check_separable,
                                          check_trivial_with, depth_two_modules, implication_flags,
                                          implication_graph, search_trivial, verify_certificate)
from modules.settings import WorkbenchSettings

M2DIAG_GOLDEN = {
    "trivial": FAILS,
    "liberal": FAILS,
    "separable": HOLDS,
    "hirata": HOLDS,
    "strongly_separable": HOLDS,
    "depth_two_left": HOLDS,
    "depth_two_right": HOLDS,
    "weakly_separable": HOLDS,
    "weakly_quasi_separable": HOLDS,
    "power": FAILS,
}

TRUNC2_GOLDEN = {
    "trivial": FAILS,
    "liberal": HOLDS,
    "separable": FAILS,
    "hirata": FAILS,
    "strongly_separable": FAILS,
    "depth_two_left": HOLDS,
    "depth_two_right": HOLDS,
    "weakly_separable": FAILS,
    "weakly_quasi_separable": FAILS,
    "power": HOLDS,
}


@pytest.fixture(scope="module")
def m2diag_report(m2diag):
    return ExtensionClassifier(m2diag, WorkbenchSettings()).classify()


@pytest.fixture(scope="module")
def trunc2_report(trunc2):
    return ExtensionClassifier(trunc2, WorkbenchSettings()).classify()


def test_diagonal_matrix_extension_outcomes(m2diag_report):
    assert m2diag_report.outcomes == M2DIAG_GOLDEN
    power = m2diag_report.certificates["power"]
    assert sorted(power.refutations) == list(range(1, WorkbenchSettings().power_max + 1))


def test_truncated_extension_outcomes(trunc2_report):
    assert trunc2_report.outcomes == TRUNC2_GOLDEN
    assert trunc2_report.certificates["power"].n == 2


def test_every_certificate_verifies(m2diag_report, trunc2_report):
    for report in (m2diag_report, trunc2_report):
        assert report.verified
        assert all(report.verified.values())
        assert all(report.implications.values())


def test_identity_extension_has_every_class(settings):
    report = ExtensionClassifier(build("identity-m2f3"), settings).classify()
    assert all(report.outcomes[name] == HOLDS for name in CLASS_NAMES)


def test_dimensions(m2diag_report, trunc2_report):
    dims = m2diag_report.dimensions
    assert (dims["dim_A"], dims["dim_B"], dims["dim_V"], dims["dim_C"], dims["dim_AxA"]) == (4, 2, 2, 1, 8)
    assert dims["dim_Der"] == dims["dim_Inner"] == 1
    assert trunc2_report.dimensions["dim_Der"] == 4
    assert trunc2_report.dimensions["dim_Inner"] == 0


def test_separable_element_multiplies_to_one(m2diag):
    cert = check_separable(m2diag)
    assert cert is not None
    f = m2diag.field
    assert f.equal(f.matmul(m2diag.T.mu, cert.element), m2diag.A.unit)
    assert m2diag.T.is_casimir(cert.element, "A")


def test_separable_certificate_off_the_casimir_space_is_rejected(m2diag):
    f, T = m2diag.field, m2diag.T
    cert = check_separable(m2diag)
    stray = next(f.unit_vector(T.dim, i) for i in range(T.dim)
                 if not T.is_casimir(f.unit_vector(T.dim, i), "A"))
    tampered = SeparableCertificate(element=f.add(cert.element, stray))
    assert verify_certificate(m2diag, cert)
    assert not verify_certificate(m2diag, tampered)


def test_liberal_certificate_spans(trunc2):
    cert = check_liberal(trunc2)
    assert len(cert.elements) == 2
    assert check_finite_normalizing_with(trunc2, cert.elements)
    assert not check_finite_normalizing_with(trunc2, [])


def test_depth_two_rejects_unknown_side(m2diag):
    with pytest.raises(ValueError):
        check_depth_two(m2diag, "middle")
    with pytest.raises(ValueError):
        depth_two_modules(m2diag, "middle")


@pytest.mark.parametrize("side, acting", [("left", (2, 4)), ("right", (4, 2))])
def test_depth_two_summand_sides(trunc2, side, acting):
    tensor, regular = depth_two_modules(trunc2, side)
    assert (tensor.left.dim, tensor.right.dim) == acting
    assert (regular.left.dim, regular.right.dim) == acting
    assert (tensor.dim, regular.dim) == (trunc2.T.dim, trunc2.A.dim)


def test_trivial_extension_search(trivial_f2, m2diag):
    search = search_trivial(trivial_f2)
    assert search.status == HOLDS
    assert verify_certificate(trivial_f2, search.certificate)
    assert check_trivial_with(trivial_f2, [trivial_f2.A.basis_vector(1)]) is not None
    off_diagonal = [m2diag.A.basis_vector(1), m2diag.A.basis_vector(2)]
    assert check_trivial_with(m2diag, off_diagonal) is None


def test_power_property_refutation_verifies(trunc2):
    cert = check_power_property(trunc2, 3)
    assert cert.status == FAILS
    assert not trunc2.B.contains(trunc2.A.power(cert.counterexample, 3))
    assert verify_certificate(trunc2, cert)
    with pytest.raises(ValueError):
        check_power_property(trunc2, 0)


def test_small_algebras_are_decided_by_enumeration(trunc2, m2diag):
    # x^2 already lies in span{1, t^2}, yet 6 is no power of 2
    holds = check_power_property(trunc2, 6)
    assert (holds.status, holds.method) == (HOLDS, "exact")
    assert verify_certificate(trunc2, holds)
    assert check_power_property(trunc2, 6, budget=0).status == UNKNOWN
    fails = check_power_property(m2diag, 3)
    assert (fails.status, fails.method) == (FAILS, "exact")
    assert not m2diag.B.contains(m2diag.A.power(fails.counterexample, 3))


def test_power_range_collects_refutations(m2diag):
    cert = check_power_range(m2diag, 3, samples=8)
    assert cert.status == FAILS
    assert sorted(cert.refutations) == [1, 2, 3]
    assert verify_certificate(m2diag, cert)


def test_tampered_power_certificate_is_rejected(trunc2):
    fake = PowerCertificate(n=2, status=FAILS, counterexample=trunc2.A.basis_vector(1))
    assert not verify_certificate(trunc2, fake)


def test_implication_flags_catch_contradictions():
    flags = implication_flags({"separable": HOLDS, "weakly_separable": FAILS})
    assert flags == {"separable=>weakly_separable": False}
    assert implication_graph().has_edge("hirata", "separable")


def test_subset_and_unknown_classes(m2diag, settings):
    report = ExtensionClassifier(m2diag, settings).classify(["separable", "liberal"], timing=True)
    assert list(report.outcomes) == ["liberal", "separable"]
    assert "dimensions" in report.timing
    with pytest.raises(UnsupportedClass):
        ExtensionClassifier(m2diag, settings).classify(["noetherian"])


def test_report_serialization(m2diag_report):
    doc = m2diag_report.to_dict()
    assert doc["field"] == "F_2"
    assert doc["classes"]["separable"]["verified"] is True
    assert "certificate" in doc["classes"]["separable"]
    assert "certificate" not in m2diag_report.to_dict(include_certificates=False)["classes"]["separable"]
    assert len(m2diag_report.to_frame()) == len(CLASS_NAMES)


def test_rational_diagonal_extension_matches_the_binary_one(settings):
    report = ExtensionClassifier(build("m2diag-q"), settings).classify()
    assert report.outcomes == M2DIAG_GOLDEN
    assert all(report.verified.values())
