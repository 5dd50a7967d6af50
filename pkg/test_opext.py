"""
Tests for extensions with abelian kernel and their classification
"""

import logging

import pytest

from cohomology import are_cohomologous, cocycle_group, is_coboundary, make_cochain, zero_cochain
from errors import ModuleMismatch, NotEquivariant
from fincat import Verdict, all_phi_triples, is_fibrewise_opfibration, torsor_certificate
from fingroup import (abelian_group, cyclic_group, identity_hom, inversion_action, make_hom, trivial_action,
                      trivial_group, zero_hom)
from opext import (baer_sum, classify, cocycle_of_ext, ext_of_cocycle, extensions_over, fibre_automorphisms,
                   fibre_iso, find_fibre_iso_brute, make_extension, opext_triangle, split_extension,
                   transport)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Z2, Z3, Z4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
TRIV = trivial_action(Z2, Z2)
ID2 = identity_hom(Z2)


def z4_extension():
    return make_extension(make_hom(Z2, Z4, [0, 2]), make_hom(Z4, Z2, [0, 1, 0, 1]), 'Z4')


def max_element_order(G):
    return max(G.element_order(x) for x in G.elements)


def test_ext_of_cocycle():
    logger.info("=" * 60)
    logger.info("TEST: extensions from cocycles")
    logger.info("=" * 60)

    split = ext_of_cocycle(TRIV, zero_cochain(TRIV, 2))
    assert split.E.is_abelian() and max_element_order(split.E) == 2

    eps = make_cochain(TRIV, 2, {(1, 1): 1})
    E = ext_of_cocycle(TRIV, eps)
    assert max_element_order(E.E) == 4
    assert cocycle_of_ext(E)[1] == eps
    logger.info("✅ zero cocycle gives Z2×Z2, the nonzero class gives Z4")


def test_cocycle_of_ext():
    action, eps = cocycle_of_ext(z4_extension())
    assert action == TRIV
    assert is_coboundary(eps) is None
    assert cocycle_of_ext(split_extension(TRIV))[1].is_zero()


@pytest.mark.parametrize("E", [z4_extension(), split_extension(inversion_action(Z2, Z3, ID2))]
                         + extensions_over(trivial_action(Z2, abelian_group([2, 2]))))
def test_section_choice_is_irrelevant(E):
    _, low = cocycle_of_ext(E, 'min')
    _, high = cocycle_of_ext(E, 'max')
    assert are_cohomologous(low, high)


def test_transport_along_identities():
    logger.info("=" * 60)
    logger.info("TEST: transport")
    logger.info("=" * 60)

    E = z4_extension()
    pushforward, pullback = transport(E, E, ID2, ID2)
    assert fibre_iso(pushforward, E) is not None
    assert fibre_iso(pullback, E) is not None
    assert find_fibre_iso_brute(pullback, E) is not None
    logger.info("✅ identities transport to isomorphic extensions")


def test_pushforward_along_doubling_splits():
    """2ε is the coboundary of t(1) = 1 in Z4"""
    E = z4_extension()
    target = split_extension(trivial_action(Z2, Z4))
    double = make_hom(Z2, Z4, [0, 2])
    pushforward, _ = transport(E, target, ID2, double)
    assert pushforward.E.order == 8
    assert fibre_iso(pushforward, target) is not None


def test_pullback_to_trivial_group():
    one = trivial_group()
    E = split_extension(trivial_action(one, Z2))
    _, pullback = transport(E, z4_extension(), zero_hom(one, Z2), ID2)
    assert pullback.E.order == 2 and pullback.C.order == 1


def test_transport_requires_equivariance():
    inv = split_extension(inversion_action(Z2, Z3, ID2))
    triv = split_extension(trivial_action(Z2, Z3))
    with pytest.raises(NotEquivariant):
        transport(inv, triv, ID2, identity_hom(Z3))


def test_baer_sum():
    logger.info("=" * 60)
    logger.info("TEST: Baer sum")
    logger.info("=" * 60)

    E, split = z4_extension(), split_extension(TRIV)
    assert fibre_iso(baer_sum(E, E), split) is not None
    assert fibre_iso(baer_sum(E, split), E) is not None
    assert fibre_iso(baer_sum(split, split), split) is not None
    with pytest.raises(ModuleMismatch):
        baer_sum(E, split_extension(trivial_action(Z2, Z3)))
    logger.info("✅ the Z4 class has order 2 and the split class is neutral")


def test_classify_examples():
    logger.info("=" * 60)
    logger.info("TEST: classification")
    logger.info("=" * 60)

    E, V = z4_extension(), split_extension(TRIV)
    mismatch = classify(E, V, ID2, ID2)
    assert mismatch.homset == [] and mismatch.fibre_iso is None and not mismatch.cocycle_criterion
    assert mismatch.verdict == Verdict.EMPTY

    same = classify(E, E, ID2, ID2)
    assert len(same.homset) == 2 == same.z1.order
    assert same.verdict == Verdict.TORSOR

    one = trivial_group()
    point = split_extension(trivial_action(one, one))
    single = classify(E, point, zero_hom(Z2, one), zero_hom(Z2, one))
    assert len(single.homset) == 1 and single.verdict == Verdict.TORSOR
    logger.info("✅ empty, Z¹-torsor of size 2 and the terminal case")


@pytest.mark.parametrize("E", [z4_extension(), split_extension(TRIV),
                               split_extension(inversion_action(Z2, Z4, ID2))])
def test_fibre_automorphisms_count(E):
    autos = fibre_automorphisms(E)
    assert len(autos) == cocycle_group(1, E.action()).order
    assert all(h.is_isomorphism() for h in autos)


def test_opext_triangle_matches_classify():
    logger.info("=" * 60)
    logger.info("TEST: finite-category encoding")
    logger.info("=" * 60)

    triangle = opext_triangle([TRIV])
    triple = triangle.triple
    assert is_fibrewise_opfibration(triple)
    for p, q, m in all_phi_triples(triple):
        phi0, phi1 = triangle.module_morphisms[m]
        certificate = torsor_certificate(triple, p, q, m)
        report = classify(triangle.extensions[p], triangle.extensions[q], phi0, phi1)
        assert certificate.verdict == report.verdict
        assert len(certificate.homset) == len(report.homset)
    logger.info("✅ torsor certificates agree with classify on (Z2, Z2, trivial)")


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("EXTENSION TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Extensions from Cocycles", test_ext_of_cocycle),
        ("Cocycles from Extensions", test_cocycle_of_ext),
        ("Section Choice", lambda: test_section_choice_is_irrelevant(z4_extension())),
        ("Transport along Identities", test_transport_along_identities),
        ("Push-forward along Doubling", test_pushforward_along_doubling_splits),
        ("Pull-back to the Trivial Group", test_pullback_to_trivial_group),
        ("Equivariance", test_transport_requires_equivariance),
        ("Baer Sum", test_baer_sum),
        ("Classification", test_classify_examples),
        ("Fibre Automorphisms", lambda: test_fibre_automorphisms_count(z4_extension())),
        ("Finite-category Encoding", test_opext_triangle_matches_classify),
    ]

    results = []
    for name, test_func in tests:
        try:
            test_func()
            results.append((name, True))
        except Exception as e:
            logger.error(f"Test '{name}' failed: {e}")
            results.append((name, False))

    passed = sum(1 for _, ok in results if ok)
    for name, ok in results:
        logger.info(f"{'✅ PASS' if ok else '❌ FAIL'}: {name}")
    logger.info(f"RESULTS: {passed}/{len(results)} tests passed")
    return passed == len(results)


if __name__ == "__main__":
    success = run_all_tests()
    exit(0 if success else 1)
