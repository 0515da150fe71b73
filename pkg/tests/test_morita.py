# tests/test_morita.py

from dataclasses import replace

import pytest

from modules.bimodule import derivation_space, inner_derivation, is_derivation, regular_bimodule
from modules.catalog import build, get_entry
from modules.errors import (DimensionMismatch, LeibnizViolation, NotBimoduleMap, NotBPrimeCentral,
                            NotIdempotent, ParentMismatch, UnsupportedClass, ValidationError)
from modules.exact_linalg import contains_subspace, rank
from modules.extension_classifier import (FAILS, HOLDS, check_depth_two, check_liberal,
                                          check_separable, check_strongly_separable,
                                          check_weakly_separable, search_trivial,
                                          verify_certificate)
from modules.morita import (InvarianceAnalyzer, TransportedExtension, corner_witness,
                            free_transport, power_counterexample, progenerator_free,
                            progenerator_from_idempotent, transport_extension,
                            verify_progenerator, witness_candidates)


def test_free_progenerator(m2diag):
    B = m2diag.B.induced
    prog = progenerator_free(B, 3)
    assert prog.dim == 3 * B.dim
    assert len(prog.dual_pairs) == 3
    assert verify_progenerator(prog)
    with pytest.raises(ValueError):
        progenerator_free(B, 0)


def test_idempotent_progenerators(m2diag):
    B, f = m2diag.B.induced, m2diag.field
    k, E = get_entry("m2diag-f2").idempotent(m2diag)
    prog = progenerator_from_idempotent(B, k, E)
    assert prog.dim == 3
    assert verify_progenerator(prog)
    assert progenerator_from_idempotent(B, 2, f.zeros((2, 2, B.dim))) is None
    not_idempotent = f.zeros((2, 2, B.dim))
    not_idempotent[0, 1] = B.unit
    with pytest.raises(NotIdempotent):
        progenerator_from_idempotent(B, 2, not_idempotent)


def test_progenerator_over_another_base_is_rejected(trunc2, m2diag):
    with pytest.raises(ParentMismatch):
        TransportedExtension(trunc2, progenerator_free(m2diag.B.induced, 2))


def test_free_transport_is_the_matrix_extension(m2diag_free):
    te = m2diag_free
    assert te.dual.dim == 4
    assert te.Aprime.dim == 16
    assert te.Bprime.dim == 8
    assert te.matrix_alignment_check()
    assert te.alpha_consistency_check()
    assert te.dimension_check["holds"]
    assert te.dimension_check == te.eta_xi_dimension_check()


def test_transport_extension_checks_the_progenerator(m2diag):
    prog = progenerator_free(m2diag.B.induced, 2)
    with pytest.raises(ValidationError):
        transport_extension(m2diag, replace(prog, gen_pairs=[]))
    assert transport_extension(m2diag, prog, name="twice").ext_prime.name == "twice"


def test_construction_rejects_unequal_dimension_counts(m2diag, monkeypatch):
    counts = {"dual_tensor_module": 4, "dim_Bprime": 8, "dim_End_N": 4, "holds": False}
    monkeypatch.setattr(TransportedExtension, "eta_xi_dimension_check", lambda self: counts)
    with pytest.raises(DimensionMismatch):
        free_transport(m2diag, 2)


def test_rank_one_corner_reproduces_the_extension(trunc2):
    k, E = get_entry("trunc-p2").idempotent(trunc2)
    te = TransportedExtension(trunc2, progenerator_from_idempotent(trunc2.B.induced, k, E))
    assert (te.Aprime.dim, te.Bprime.dim) == (4, 2)
    assert te.ext_prime.A.is_commutative


def test_phi_is_unital_on_the_centralizer(m2diag_free):
    te, f = m2diag_free, m2diag_free.field
    A = te.ext.A
    assert f.equal(te.phi(A.unit), te.Aprime.unit)
    for v in te.ext.V:
        for w in te.ext.V:
            assert f.equal(te.phi(A.mul(v, w)), te.Aprime.mul(te.phi(v), te.phi(w)))


def test_psi_round_trip_on_base_casimirs(m2diag_free):
    te, f = m2diag_free, m2diag_free.field
    assert te.psi_well_defined
    for e in te.ext.T.casimir_B:
        image = te.psi(e)
        assert te.ext_prime.T.is_casimir(image, "B")
        assert f.equal(te.psi_inverse(image), e)


def test_psi_inverse_rejects_non_central_tensors(m2diag_free):
    Tp, f = m2diag_free.ext_prime.T, m2diag_free.field
    outside = next(f.unit_vector(Tp.dim, i) for i in range(Tp.dim)
                   if not Tp.is_casimir(f.unit_vector(Tp.dim, i), "B"))
    with pytest.raises(NotBPrimeCentral):
        m2diag_free.psi_inverse(outside)


def test_phi_end_needs_a_bimodule_map(m2diag_free):
    f = m2diag_free.field
    M = f.zeros((4, 4))
    M[1, 0] = 1
    with pytest.raises(NotBimoduleMap):
        m2diag_free.phi_end(M)


def test_derivations_transport_both_ways(trunc2_free):
    te, f = trunc2_free, trunc2_free.field
    target = derivation_space(te.ext_prime)
    for D in derivation_space(te.ext).basis:
        forward = te.transport_derivation(D)
        assert target.contains(forward)
        assert f.equal(te.pullback_derivation(forward), D)
    with pytest.raises(LeibnizViolation):
        te.transport_derivation(f.eye(te.ext.A.dim))


@pytest.mark.parametrize("check", [check_separable, check_strongly_separable, check_weakly_separable,
                                   lambda ext: check_depth_two(ext, "left"),
                                   lambda ext: check_depth_two(ext, "right")])
def test_certificates_of_the_diagonal_extension_transport(m2diag_free, check):
    cert = check(m2diag_free.ext)
    moved = m2diag_free.transport_certificate(cert)
    assert verify_certificate(m2diag_free.ext_prime, moved)


def test_liberal_and_trivial_certificates_transport(trunc2_free, trivial_f2):
    liberal = trunc2_free.transport_certificate(check_liberal(trunc2_free.ext))
    assert verify_certificate(trunc2_free.ext_prime, liberal)
    te = free_transport(trivial_f2, 2)
    trivial = te.transport_certificate(search_trivial(trivial_f2).certificate)
    assert verify_certificate(te.ext_prime, trivial)


def test_invariance_suite_on_free_transports(m2diag_free, trunc2_free, settings):
    for te in (m2diag_free, trunc2_free):
        analyzer = InvarianceAnalyzer(te, settings)
        rows = analyzer.run_all()
        failed = [row["check"] for row in rows if row["holds"] is False]
        assert failed == []
        assert analyzer.all_hold
        assert len(analyzer.to_frame()) == len(rows)


def test_recomputed_classes_are_reported_without_a_verdict(trunc2_free, settings):
    analyzer = InvarianceAnalyzer(trunc2_free, settings)
    analyzer.check_certificates()
    rows = {row["check"]: row for row in analyzer.rows}
    quasi = rows["class_weakly_quasi_separable"]
    assert (quasi["source"], quasi["target"], quasi["holds"]) == ("fails", "holds", None)
    assert rows["class_hirata"]["holds"] is None
    assert derivation_space(trunc2_free.ext, central=True).dim == 4
    assert derivation_space(trunc2_free.ext_prime, central=True).dim == 0
    assert analyzer.all_hold


def test_invariance_suite_on_an_idempotent_transport(m2diag_split, settings):
    rows = InvarianceAnalyzer(m2diag_split, settings).run_all(certificates=False)
    assert all(row["holds"] for row in rows)
    assert "matrix_alignment" not in {row["check"] for row in rows}


def test_automorphisms_transport(settings):
    ext = build("split-f3")
    swap = get_entry("split-f3").automorphisms(ext)
    analyzer = InvarianceAnalyzer(free_transport(ext, 2), settings, automorphisms=swap)
    analyzer.check_automorphisms()
    assert analyzer.rows and all(row["holds"] for row in analyzer.rows)


def test_power_property_does_not_survive_transport(trunc2, settings):
    result = power_counterexample(trunc2, 2, settings, max_power=6)
    assert result["source"].status == HOLDS
    assert result["target"].status == FAILS
    assert all(result["witness_powers"].values())
    assert sorted(result["witness_powers"]) == [1, 2, 3, 4, 5, 6]
    te = result["transported"]
    assert not te.Bprime.contains(result["witness"])


def test_corner_witnesses_need_a_free_progenerator(m2diag_split, m2diag_free):
    assert witness_candidates(m2diag_split) == []
    with pytest.raises(UnsupportedClass):
        corner_witness(m2diag_split, m2diag_split.ext.A.unit)
    assert len(witness_candidates(m2diag_free)) == 4


def test_derivations_into_the_tensor_square_transport(m2diag_free):
    te, f = m2diag_free, m2diag_free.field
    S = te.ext.T.as_bimodule()
    moved = te.transport_bimodule(S)
    assert moved.bimodule.validate() is moved.bimodule
    assert moved.bimodule.dim == 4 * S.dim
    for e in te.ext.T.casimir_B:
        D = inner_derivation(S, e)
        D_prime = te.transport_derivation(D, S)
        assert is_derivation(te.ext_prime, D_prime, moved.bimodule)
        assert f.equal(te.pullback_derivation(D_prime, S), D)


def test_regular_bimodule_transports_to_the_regular_bimodule(m2diag_free):
    te, f = m2diag_free, m2diag_free.field
    moved = te.transport_bimodule(regular_bimodule(te.ext.A))
    assert f.equal(moved.bimodule.left_action, te.Aprime.left_mats)
    assert f.equal(moved.bimodule.right_action, te.Aprime.right_mats)


@pytest.mark.parametrize("fixture", ["m2diag_free", "m2diag_split"])
def test_base_bimodule_transports_to_the_primed_base(fixture, request):
    te = request.getfixturevalue(fixture)
    f = te.field
    moved = te.transport_bimodule(regular_bimodule(te.base))
    assert moved.bimodule.left is te.base_algebra
    assert moved.bimodule.dim == te.base_algebra.dim == te.Bprime.dim
    incl = te.base_inclusion
    assert incl.shape == (te.Aprime.dim, te.Bprime.dim)
    assert rank(f, incl) == te.Bprime.dim
    assert contains_subspace(f, te.Bprime.basis, incl.T.copy())
    products = f.tensordot(te.base_algebra.mul_table, incl, axes=([2], [1]))
    assert f.equal(te.Aprime.products(incl.T.copy(), incl.T.copy()), products)


def test_transport_bimodule_rejects_foreign_bimodules(m2diag_free):
    with pytest.raises(ParentMismatch):
        m2diag_free.transport_bimodule(regular_bimodule(m2diag_free.Aprime))


def test_progenerator_verification_rejects_broken_dual_bases(m2diag):
    B, f = m2diag.B.induced, m2diag.field
    prog = progenerator_free(B, 2)
    assert not verify_progenerator(replace(prog, dual_pairs=prog.dual_pairs[:1]))
    functional, element = prog.dual_pairs[0]

    def unit_matrix(r, s):
        out = f.zeros(functional.shape)
        out[r, s] = f.one
        return out

    bump = next(M for M in (unit_matrix(r, s) for r in range(B.dim) for s in range(prog.dim))
                if any(not f.equal(f.matmul(M, prog.action[g]), f.matmul(B.left_mats[g], M))
                       for g in range(B.dim)))
    skewed = [(f.add(functional, bump), element)] + prog.dual_pairs[1:]
    assert not verify_progenerator(replace(prog, dual_pairs=skewed))
