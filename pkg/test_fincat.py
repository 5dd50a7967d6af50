"""
Tests for finite categories, fibrations and the torsor certificate
"""

import logging

import numpy as np
import pytest

from errors import CompositionMismatch, FibresNotGroupoidal, NotACategory, NotAFunctor
from fincat import (Verdict, _FibreData, _FibredElements, all_phi_triples, certify_action, chain_category,
                    compose_functors, fibre_of, identity_functor, is_cartesian, is_fibration, is_fibrewise_opfibration,
                    is_opcartesian, make_category, make_fof_triple, make_functor, opposite, phi_bijection, random_fof_triple,
                    torsor_certificate)
from fingroup import cyclic_group

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def point():
    return make_category('pt', 1, [(0, 0)], [0], {(0, 0): 0})


def parallel_pair():
    """Two objects with two parallel arrows a -> b"""
    composition = {(0, 0): 0, (1, 1): 1, (2, 0): 2, (3, 0): 3, (1, 2): 2, (1, 3): 3}
    return make_category('pair', 2, [(0, 0), (1, 1), (0, 1), (0, 1)], [0, 1], composition)


def to_point(X, pt):
    return make_functor(X, pt, [0] * X.num_objects, [0] * X.num_morphisms, '!')


def test_category_validation():
    logger.info("=" * 60)
    logger.info("TEST: category validation")
    logger.info("=" * 60)

    assert parallel_pair().num_morphisms == 4
    with pytest.raises(NotACategory):
        make_category('broken', 1, [(0, 0), (0, 0)], [0], {(0, 0): 0, (0, 1): 0, (1, 0): 1, (1, 1): 1})
    with pytest.raises(NotACategory):
        make_category('missing', 2, [(0, 0), (1, 1), (0, 1)], [0, 1], {(0, 0): 0, (1, 1): 1, (2, 0): 2})
    logger.info("✅ unit law and missing composites are reported")


def test_functor_validation():
    X = chain_category(2)
    pt = point()
    to_point(X, pt)
    with pytest.raises(NotAFunctor):
        make_functor(pt, X, [0], [2])


def test_cartesian_examples():
    logger.info("=" * 60)
    logger.info("TEST: cartesian morphisms")
    logger.info("=" * 60)

    X = chain_category(3)
    P = identity_functor(X)
    assert all(is_cartesian(P, f) for f in X.morphisms)

    pt = point()
    Q = to_point(parallel_pair(), pt)
    assert is_cartesian(Q, 0)
    check = is_cartesian(Q, 2)
    assert not check
    assert check.witness[0] == 0 and check.witness[3] != 1
    assert not is_opcartesian(Q, 2)
    logger.info(f"✅ parallel arrow fails with witness {check.witness}")


def test_identity_triple_is_fibrewise_opfibration():
    X = chain_category(2)
    I = identity_functor(X)
    assert is_fibrewise_opfibration(make_fof_triple(I, I, I))


def test_triple_must_commute():
    X = chain_category(2)
    pt = point()
    bang = to_point(X, pt)
    with pytest.raises(CompositionMismatch):
        make_fof_triple(identity_functor(X), bang, identity_functor(pt))


def test_missing_opcartesian_lift():
    """Over a point, the fibre X -> [2] needs an arrow from 1; dropping it breaks the opfibration"""
    pt = point()
    X = make_category('two', 2, [(0, 0), (1, 1)], [0, 1], {(0, 0): 0, (1, 1): 1})
    M = chain_category(2)
    P = make_functor(X, M, [0, 1], [M.identities[0], M.identities[1]])
    F, G = to_point(X, pt), to_point(M, pt)
    triple = make_fof_triple(P, F, G)
    check = is_fibrewise_opfibration(triple)
    assert not check
    assert check.witness[0] == 'fibre'


def test_opposite():
    X = chain_category(3)
    Xop = opposite(X)
    assert Xop.src == X.dst and Xop.dst == X.src
    back = opposite(Xop)
    assert dict(back.composition) == dict(X.composition)
    assert is_fibration(identity_functor(Xop))


def test_fibre_of_projection():
    X = chain_category(2)
    bang = to_point(X, point())
    fibre = fibre_of(bang, 0)
    assert fibre.category.num_objects == 2
    assert fibre.category.num_morphisms == 3


def test_certify_action():
    Z3 = cyclic_group(3)
    regular = [[(g + p) % 3 for p in range(3)] for g in range(3)]
    assert certify_action(Z3, 3, regular)[0] == Verdict.TORSOR
    assert certify_action(Z3, 0, [])[0] == Verdict.EMPTY
    trivial = [list(range(3)) for _ in range(3)]
    assert certify_action(Z3, 3, trivial)[0] == Verdict.VIOLATION


def test_groupoidal_fibres_required():
    X = chain_category(2)
    pt = point()
    triple = make_fof_triple(to_point(X, pt), to_point(X, pt), identity_functor(pt))
    with pytest.raises(FibresNotGroupoidal):
        torsor_certificate(triple, 0, 1, 0)


@pytest.mark.parametrize("seed", range(12))
def test_random_instances_are_torsors(seed):
    logger.info(f"TEST: random instance {seed}")
    triple = random_fof_triple(np.random.default_rng(seed))
    assert is_fibrewise_opfibration(triple)
    for x, y, phi in all_phi_triples(triple):
        bij = phi_bijection(triple, x, y, phi)
        assert bij.bijective
        M = triple.M
        assert M.compose(bij.phi_k, bij.phi_v) == phi
        assert triple.G.is_vertical(bij.phi_v)
        report = torsor_certificate(triple, x, y, phi)
        assert report.verdict != Verdict.VIOLATION, report.details
        assert len(report.homset) in (0, report.acting_group.order)


def test_threshold_collapses_lower_fibres():
    """Z2 swapping two points, seen only as its orbit set below b = 1"""
    logger.info("=" * 60)
    logger.info("TEST: restriction along B")
    logger.info("=" * 60)

    elements = _FibredElements(2, [_FibreData(2, (1, 0))], [], threshold=1)
    triple = elements.triple(elements.records())
    X = triple.X
    assert X.num_morphisms == 10
    make_category('X', X.num_objects, list(zip(X.src, X.dst)), X.identities, X.composition)
    assert fibre_of(triple.F, 0).category.num_objects == 1
    assert fibre_of(triple.F, 1).category.num_objects == 2
    assert is_fibrewise_opfibration(triple)
    for x, y, phi in all_phi_triples(triple):
        assert phi_bijection(triple, x, y, phi).bijective
        assert torsor_certificate(triple, x, y, phi).verdict != Verdict.VIOLATION
    logger.info("✅ the lower level sees one orbit, the upper level both points")


def test_random_instances_vary_along_b():
    collapsed = 0
    for seed in range(200):
        triple = random_fof_triple(np.random.default_rng(seed))
        sizes = [fibre_of(triple.F, b).category.num_objects for b in triple.B.objects]
        collapsed += len(set(sizes)) > 1
    assert collapsed > 0


def test_compose_functors_identity():
    X = chain_category(3)
    I = identity_functor(X)
    assert compose_functors(I, I) == I


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("FINITE CATEGORY TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Category Validation", test_category_validation),
        ("Functor Validation", test_functor_validation),
        ("Cartesian Morphisms", test_cartesian_examples),
        ("Identity Triple", test_identity_triple_is_fibrewise_opfibration),
        ("Commuting Triple", test_triple_must_commute),
        ("Missing Opcartesian Lift", test_missing_opcartesian_lift),
        ("Opposite", test_opposite),
        ("Fibres", test_fibre_of_projection),
        ("certify_action", test_certify_action),
        ("Groupoidal Fibres", test_groupoidal_fibres_required),
        ("Restriction Along B", test_threshold_collapses_lower_fibres),
        ("Random Instances Vary Along B", test_random_instances_vary_along_b),
        ("Functor Composition", test_compose_functors_identity),
    ]
    tests += [(f"Random Instance {s}", lambda s=s: test_random_instances_are_torsors(s)) for s in range(12)]

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
