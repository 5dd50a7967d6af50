"""
Tests for butterflies, their composition and the weak hom-sets they classify
"""

import logging

import pytest

from butterfly import (canonical_key, compose, find_two_cell, flip, from_morphism, identity_butterfly,
                       is_invertible_class, project, span_of, validate_butterfly, weak_hom_set)
from errors import ButterflyViolation, SourceTargetMismatch
from fincat import Verdict
from fingroup import (cyclic_group, identity_hom, inversion_action, make_hom, symmetric_group, trivial_action,
                      trivial_group, zero_hom)
from suites import crossed_extension_corpus, s3_butterfly, xext_morphisms
from xmod import (compose_morphisms, identity_morphism, morphism_class, validate_crossed_extension, validate_xmod,
                  zero_crossed_extension)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Z2, Z3 = cyclic_group(2), cyclic_group(3)
S3 = symmetric_group(3)
SIGN = make_hom(S3, Z2, [0, 1, 1, 0, 0, 1])
ROTATIONS = make_hom(Z3, S3, [0, 3, 4])


def point_over_z2():
    """1 -> 1 -> Z2 -> Z2"""
    one = trivial_group()
    xmod = validate_xmod(zero_hom(one, Z2), [[0], [0]], 'zeroZ2')
    return validate_crossed_extension(xmod, identity_hom(one), identity_hom(Z2), 'zeroZ2')


def inversion_on_z3():
    return zero_crossed_extension(inversion_action(Z2, Z3, identity_hom(Z2)), 'autZ3')


def diagonal(X, X2):
    """S3 as a butterfly from the point over Z2 to Z3 with Z2 acting by inversion"""
    return validate_butterfly(X, X2, S3, zero_hom(X.G2, S3), ROTATIONS, SIGN, SIGN, 'diag')


def test_validate_butterfly():
    logger.info("=" * 60)
    logger.info("TEST: butterfly axioms")
    logger.info("=" * 60)

    X, X2 = point_over_z2(), inversion_on_z3()
    b = diagonal(X, X2)
    assert b.representable and not b.flippable

    with pytest.raises(ButterflyViolation) as info:
        validate_butterfly(X, X2, S3, zero_hom(X.G2, S3), ROTATIONS, SIGN, zero_hom(S3, Z2))
    assert info.value.clause == 'iv'
    logger.info("✅ the sign butterfly validates, a zero right leg breaks clause iv")


def test_project():
    X, X2 = point_over_z2(), inversion_on_z3()
    phi0, phi = project(diagonal(X, X2))
    assert phi0.images == (0, 1)
    assert phi.images == (0,)


def test_from_morphism_projects_to_the_morphism():
    X = zero_crossed_extension(trivial_action(Z2, Z2), 'zeroZ2Z2')
    m = identity_morphism(X)
    b = from_morphism(m)
    assert b.representable and b.flippable
    phi0, phi = project(b)
    assert phi0.images == m.gamma.images and phi.images == m.beta.images


def test_identity_laws():
    logger.info("=" * 60)
    logger.info("TEST: composition")
    logger.info("=" * 60)

    X, X2 = point_over_z2(), inversion_on_z3()
    b = diagonal(X, X2)
    left = compose(identity_butterfly(X2), b)
    right = compose(b, identity_butterfly(X))
    assert find_two_cell(left, b) is not None
    assert find_two_cell(right, b) is not None
    assert canonical_key(left) == canonical_key(b) == canonical_key(right)

    with pytest.raises(SourceTargetMismatch):
        compose(b, b)
    logger.info("✅ identities compose up to a two-cell")


def test_flip_identity():
    X = inversion_on_z3()
    b = identity_butterfly(X)
    back = flip(b)
    assert back.source is b.target and back.target is b.source
    assert find_two_cell(compose(back, b), identity_butterfly(X)) is not None


def test_span_left_leg_is_weak_equivalence():
    X, X2 = point_over_z2(), inversion_on_z3()
    span = span_of(diagonal(X, X2))
    assert morphism_class(span.left).weak_equivalence


def test_weak_hom_set_between_zero_extensions():
    logger.info("=" * 60)
    logger.info("TEST: weak hom-sets")
    logger.info("=" * 60)

    X = zero_crossed_extension(trivial_action(Z2, Z2), 'zeroZ2Z2')
    ident = identity_hom(Z2)
    report = weak_hom_set(X, X, ident, ident)
    assert report.h2_order == 2
    assert len(report.classes) == 2
    assert report.cocycle_criterion
    assert report.verdict == Verdict.TORSOR
    keys = [c.key for c in report.classes]
    assert canonical_key(identity_butterfly(X)) in keys
    logger.info("✅ two weak maps, an H²(Z2, Z2)-torsor")


def test_weak_hom_set_contains_the_sign_butterfly():
    X, X2 = point_over_z2(), inversion_on_z3()
    report = weak_hom_set(X, X2, identity_hom(Z2), zero_hom(X.B, X2.B))
    assert len(report.classes) == 1 and report.h2_order == 1
    assert report.classes[0].key == canonical_key(diagonal(X, X2))


def endomorphism_cases():
    zero = zero_crossed_extension(trivial_action(Z2, Z2), 'zeroZ2Z2')
    return [zero, inversion_on_z3()] + crossed_extension_corpus(2)[:4]


@pytest.mark.parametrize("X", endomorphism_cases(), ids=lambda X: X.name)
def test_from_morphism_preserves_composition(X):
    """The butterfly of a composite is two-isomorphic to the composite of butterflies"""
    logger.info(f"TEST: composites of endomorphisms of {X.name}")
    ends = xext_morphisms(X, X)
    assert ends
    for m1 in ends:
        for m2 in ends:
            composite = compose(from_morphism(m2), from_morphism(m1))
            direct = from_morphism(compose_morphisms(m2, m1))
            assert find_two_cell(composite, direct) is not None


def test_flip_inverts_a_non_identity_class():
    X = zero_crossed_extension(trivial_action(Z2, Z2), 'zeroZ2Z2')
    ident = identity_hom(Z2)
    identity_key = canonical_key(identity_butterfly(X))
    others = [c.representative for c in weak_hom_set(X, X, ident, ident).classes if c.key != identity_key]
    assert len(others) == 1
    b = others[0]
    assert b.flippable
    back = flip(b)
    assert find_two_cell(compose(back, b), identity_butterfly(X)) is not None
    assert find_two_cell(compose(b, back), identity_butterfly(X)) is not None


def test_invertibility_matches_flippable():
    logger.info("=" * 60)
    logger.info("TEST: invertible classes")
    logger.info("=" * 60)

    X = zero_crossed_extension(trivial_action(Z2, Z2), 'zeroZ2Z2')
    assert is_invertible_class(identity_butterfly(X))
    ident = identity_hom(Z2)
    for weak_map in weak_hom_set(X, X, ident, ident).classes:
        b = weak_map.representative
        assert is_invertible_class(b) == b.flippable
        assert b.flippable

    P, X2 = point_over_z2(), inversion_on_z3()
    assert not is_invertible_class(diagonal(P, X2))
    assert not diagonal(P, X2).flippable

    source, target, E, kappa, iota, delta, gamma = s3_butterfly()
    b = validate_butterfly(source, target, E, kappa, iota, delta, gamma)
    assert is_invertible_class(b) == b.flippable
    logger.info("✅ inverses exist exactly for the flippable butterflies")


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("BUTTERFLY TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Butterfly Axioms", test_validate_butterfly),
        ("Projection", test_project),
        ("Representable Butterflies", test_from_morphism_projects_to_the_morphism),
        ("Identity Laws", test_identity_laws),
        ("Flip", test_flip_identity),
        ("Spans", test_span_left_leg_is_weak_equivalence),
        ("Weak Hom-set of Zero Extensions", test_weak_hom_set_between_zero_extensions),
        ("Sign Butterfly Class", test_weak_hom_set_contains_the_sign_butterfly),
        ("Flip Inverts", test_flip_inverts_a_non_identity_class),
        ("Invertible Classes", test_invertibility_matches_flippable),
    ]
    tests += [(f"Composites in {X.name}", lambda X=X: test_from_morphism_preserves_composition(X))
              for X in endomorphism_cases()]

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
