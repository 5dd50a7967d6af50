"""
Tests for cochains, differentials and cohomology groups
Exhaustive search is the oracle for the Smith form path
"""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohomology import (brute_force_coboundary, brute_force_order, cocycle_group, cohomology_group,
                        cyclic_decomposition, differential, is_coboundary, make_cochain, random_cochain,
                        search_space, zero_cochain)
from errors import BudgetExceeded, DegreeTooHigh, NotACocycle, NotNormalized
from fingroup import (abelian_group, cyclic_group, inversion_action, make_hom, symmetric_group,
                      trivial_action, trivial_group)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Z2, Z3, Z4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
S3 = symmetric_group(3)
SIGN = make_hom(S3, Z2, [0, 1, 1, 0, 0, 1])

TRIV_Z2_Z2 = trivial_action(Z2, Z2)
MODULES = [
    TRIV_Z2_Z2,
    trivial_action(Z3, Z3),
    inversion_action(Z2, Z3, make_hom(Z2, Z2, [0, 1])),
    inversion_action(Z2, Z4, make_hom(Z2, Z2, [0, 1])),
    trivial_action(Z2, abelian_group([2, 2])),
    inversion_action(S3, Z3, SIGN),
    trivial_action(S3, Z2),
]


def test_differential_examples():
    logger.info("=" * 60)
    logger.info("TEST: differential examples")
    logger.info("=" * 60)

    assert differential(zero_cochain(TRIV_Z2_Z2, 2)).is_zero()
    t = make_cochain(TRIV_Z2_Z2, 1, {(1,): 1})
    assert differential(t).is_zero()
    with pytest.raises(NotNormalized):
        make_cochain(TRIV_Z2_Z2, 1, {(0,): 1})
    logger.info("✅ d(0) = 0 and the identity Z2 -> Z2 is a crossed homomorphism")


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(MODULES), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_d_squared_is_zero(action, degree, seed):
    c = random_cochain(np.random.default_rng(seed), action, degree)
    assert differential(differential(c)).is_zero()


def test_cohomology_pinned_values():
    logger.info("=" * 60)
    logger.info("TEST: pinned cohomology groups")
    logger.info("=" * 60)

    assert cohomology_group(2, TRIV_Z2_Z2).invariant_factors == (2,)
    assert cocycle_group(1, TRIV_Z2_Z2).order == 2
    one = trivial_group()
    for n in (1, 2, 3):
        assert cohomology_group(n, trivial_action(one, Z3)).order == 1
    assert cohomology_group(2, trivial_action(Z3, Z3)).invariant_factors == (3,)
    logger.info("✅ H²(Z2,Z2) = Z2, |Z¹(Z2,Z2)| = 2, trivial group has no cohomology")


@pytest.mark.parametrize("action", MODULES)
@pytest.mark.parametrize("n", [1, 2])
def test_matches_brute_force(action, n):
    if search_space(action, n) > 10**5:
        pytest.skip("search space too large for the oracle")
    z_order, h_order = brute_force_order(n, action)
    assert cocycle_group(n, action).order == z_order
    assert cohomology_group(n, action).order == h_order


def test_degree_guard():
    with pytest.raises(DegreeTooHigh):
        cohomology_group(4, TRIV_Z2_Z2)


def test_z4_cocycle_is_not_a_coboundary():
    """ε(1,1) = 1 describes Z4 as an extension of Z2 by Z2"""
    logger.info("=" * 60)
    logger.info("TEST: coboundary solving")
    logger.info("=" * 60)

    eps = make_cochain(TRIV_Z2_Z2, 2, {(1, 1): 1})
    assert is_coboundary(eps) is None
    assert brute_force_coboundary(eps) is None
    assert is_coboundary(zero_cochain(TRIV_Z2_Z2, 2)).is_zero()

    with pytest.raises(NotACocycle):
        is_coboundary(make_cochain(trivial_action(Z3, Z3), 2, {(1, 1): 1}))
    logger.info("✅ the Z4 class is nonzero")


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(MODULES[:5]), st.integers(0, 2**32 - 1))
def test_coboundaries_are_recognised(action, seed):
    b = random_cochain(np.random.default_rng(seed), action, 1)
    c = differential(b)
    witness = is_coboundary(c)
    assert witness is not None
    assert differential(witness) == c


@pytest.mark.parametrize("action", MODULES)
def test_decompose_is_additive(action):
    H = cohomology_group(2, action)
    elements = H.elements()
    for i, a in enumerate(elements):
        assert H.decompose(a) == H.coordinate_tuples()[i]
        for b in elements:
            total = tuple((x + y) % d for x, y, d in zip(H.decompose(a), H.decompose(b), H.invariant_factors))
            assert H.decompose(a + b) == total


def test_pull_back_preserves_coboundaries():
    eps = make_cochain(TRIV_Z2_Z2, 2, {(1, 1): 1})
    mod2 = make_hom(Z4, Z2, [0, 1, 0, 1])
    pulled = eps.pull_back(mod2)
    assert differential(pulled).is_zero()
    assert is_coboundary(pulled) is not None
    coboundary = differential(make_cochain(TRIV_Z2_Z2, 1, {(1,): 1}))
    assert is_coboundary(coboundary.pull_back(mod2)) is not None


def test_cyclic_decomposition():
    dec = cyclic_decomposition(abelian_group([2, 4]))
    assert list(dec.moduli) == [2, 4]
    for b in range(8):
        assert dec.from_vector(dec.to_vector(b)) == b
    assert sorted(dec.prime_powers()) == [2, 4]


def test_cochains_compare_by_value():
    eps = make_cochain(TRIV_Z2_Z2, 2, {(1, 1): 1})
    again = make_cochain(TRIV_Z2_Z2, 2, {(1, 1): 1})
    assert eps == again and hash(eps) == hash(again)
    assert len({eps, again, zero_cochain(TRIV_Z2_Z2, 2)}) == 2
    assert eps != zero_cochain(TRIV_Z2_Z2, 2)


def test_matrix_budget_is_separate():
    with pytest.raises(BudgetExceeded):
        cohomology_group(2, TRIV_Z2_Z2, matrix_budget=1)
    assert cohomology_group(2, TRIV_Z2_Z2, matrix_budget=2).invariant_factors == (2,)


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("COHOMOLOGY TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Differential Examples", test_differential_examples),
        ("d∘d = 0", test_d_squared_is_zero),
        ("Pinned Values", test_cohomology_pinned_values),
        ("Degree Guard", test_degree_guard),
        ("Z4 Cocycle", test_z4_cocycle_is_not_a_coboundary),
        ("Coboundaries", test_coboundaries_are_recognised),
        ("Pull-back", test_pull_back_preserves_coboundaries),
        ("Cyclic Decomposition", test_cyclic_decomposition),
        ("Cochain Equality", test_cochains_compare_by_value),
        ("Matrix Budget", test_matrix_budget_is_separate),
    ]
    for action in MODULES:
        tests.append((f"Decompose {action.actor.name} on {action.module.name}",
                      lambda a=action: test_decompose_is_additive(a)))

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
