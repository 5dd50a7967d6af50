"""
Tests for crossed modules, crossed extensions and their 3-cocycles
"""

import logging

import pytest

from cohomology import are_cohomologous, is_coboundary
from errors import NotEquivariant, PeifferViolation, PrecrossedViolation
from fingroup import (cyclic_group, identity_hom, inversion_action, make_hom, symmetric_group, trivial_action,
                      trivial_group, zero_hom)
from xmod import (automorphism_crossed_extension, conjugation_crossed_module, identity_morphism,
                  is_internal_equivalence, make_crossed_extension, morphism_class, morphism_from_pair, pi,
                  three_cocycle_of, transport_xext, validate_xmod, zero_crossed_extension)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Z2, Z3, Z4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
S3 = symmetric_group(3)


def doubling_xext():
    """Z2 -> Z4 -2-> Z4 -> Z2 with everything acting trivially"""
    boundary = make_hom(Z4, Z4, [0, 2, 0, 2])
    xmod = validate_xmod(boundary, [list(Z4.elements)] * 4, 'double')
    return make_crossed_extension(xmod, 'double')


def test_validate_xmod():
    logger.info("=" * 60)
    logger.info("TEST: crossed module axioms")
    logger.info("=" * 60)

    rotations = make_hom(Z3, S3, [0, 3, 4])
    with pytest.raises(PrecrossedViolation):
        validate_xmod(rotations, [list(Z3.elements)] * 6)

    one = trivial_group()
    with pytest.raises(PeifferViolation):
        validate_xmod(zero_hom(S3, one), [list(S3.elements)])

    xmod = conjugation_crossed_module(S3, [0, 3, 4])
    X = make_crossed_extension(xmod)
    assert X.B.order == 1 and X.C.order == 2
    logger.info("✅ trivial action on A3 breaks the first axiom, S3 over a point breaks Peiffer")


def test_pi_of_automorphism_extension():
    X = automorphism_crossed_extension(Z3)
    module = pi(X)
    assert module.actor.order == 2 and module.module.order == 3
    assert module.act == ((0, 1, 2), (0, 2, 1))


def test_pi_of_zero_extension():
    action = inversion_action(Z2, Z3, identity_hom(Z2))
    assert pi(zero_crossed_extension(action)) == action


def test_three_cocycles():
    logger.info("=" * 60)
    logger.info("TEST: 3-cocycles")
    logger.info("=" * 60)

    zero = zero_crossed_extension(trivial_action(Z2, Z2))
    assert three_cocycle_of(zero).is_zero()

    for X in (doubling_xext(), automorphism_crossed_extension(Z3), automorphism_crossed_extension(S3)):
        low, high = three_cocycle_of(X, 'min'), three_cocycle_of(X, 'max')
        assert are_cohomologous(low, high)
    logger.info("✅ zero extension has ω = 0, classes do not depend on the section")


def test_transport_xext_along_identities():
    logger.info("=" * 60)
    logger.info("TEST: transport of crossed extensions")
    logger.info("=" * 60)

    X = doubling_xext()
    xi = pi(X)
    phi0, phi = identity_hom(X.C), identity_hom(X.B)
    pushforward, pullback = transport_xext(X, X, phi0, phi)
    assert pi(pushforward) == xi.pull_back(phi0)
    assert pi(pullback) == xi.pull_back(phi0)
    difference = three_cocycle_of(pushforward) - three_cocycle_of(pullback)
    assert is_coboundary(difference) is not None
    logger.info("✅ push-forward and pull-back carry the same class")


def test_transport_xext_requires_equivariance():
    inv = zero_crossed_extension(inversion_action(Z2, Z3, identity_hom(Z2)))
    triv = zero_crossed_extension(trivial_action(Z2, Z3))
    with pytest.raises(NotEquivariant):
        transport_xext(inv, triv, identity_hom(Z2), identity_hom(Z3))


def test_morphism_classes():
    logger.info("=" * 60)
    logger.info("TEST: morphism classes")
    logger.info("=" * 60)

    X = doubling_xext()
    ident = identity_morphism(X)
    flags = morphism_class(ident)
    assert flags.weak_equivalence and flags.final and flags.discrete_fibration
    assert is_internal_equivalence(ident)

    zero = zero_crossed_extension(trivial_action(Z2, Z2))
    inclusion = morphism_from_pair(zero, X, make_hom(Z2, Z4, [0, 2]), make_hom(Z2, Z4, [0, 2]))
    assert inclusion.beta.is_isomorphism() and inclusion.gamma.is_trivial()
    flags = morphism_class(inclusion)
    assert not flags.weak_equivalence and not flags.final and not flags.discrete_fibration
    assert not is_internal_equivalence(inclusion)
    logger.info("✅ identity is an internal equivalence, the inclusion of the zero extension is not")


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("CROSSED EXTENSION TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Crossed Module Axioms", test_validate_xmod),
        ("Π of Aut(Z3)", test_pi_of_automorphism_extension),
        ("Π of a Zero Extension", test_pi_of_zero_extension),
        ("3-cocycles", test_three_cocycles),
        ("Transport along Identities", test_transport_xext_along_identities),
        ("Equivariance", test_transport_xext_requires_equivariance),
        ("Morphism Classes", test_morphism_classes),
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
