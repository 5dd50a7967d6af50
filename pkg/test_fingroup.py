"""
Tests for finite groups, homomorphisms, structure reports and actions
"""

import itertools
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import BudgetExceeded, NoIdentity, NotAbelian, NotAHomomorphism, NotAssociative, NotAutomorphism
from fingroup import (abelian_group, brute_force_homs, center, cyclic_group, direct_product, enumerate_homs,
                      find_section, inversion_action, make_action, make_hom, quotient, structure_of,
                      symmetric_group, trivial_action, trivial_group, validate_group,
                      validate_group_with_relabel)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

FIXTURE_GROUPS = [trivial_group(), cyclic_group(2), cyclic_group(3), cyclic_group(4),
                  abelian_group([2, 2]), symmetric_group(3)]

# a Latin square with identity and self-inverse elements; order 5 forces non-associativity
LOOP5 = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]


def test_validate_group():
    logger.info("=" * 60)
    logger.info("TEST: group validation")
    logger.info("=" * 60)

    Z2 = validate_group([[0, 1], [1, 0]], 'Z2')
    assert Z2.order == 2 and Z2.identity == 0 and Z2.inverse == (0, 1)

    with pytest.raises(NoIdentity):
        validate_group([[0, 1], [0, 1]])
    with pytest.raises(NotAssociative):
        validate_group(LOOP5)

    S3 = validate_group(symmetric_group(3).rows(), 'S3')
    assert S3.order == 6 and not S3.is_abelian()
    logger.info("✅ Z2 accepted, row-constant table and a non-associative loop rejected, S3 nonabelian")


def test_identity_is_reindexed():
    G, relabel = validate_group_with_relabel([[1, 0], [0, 1]], 'Z2')
    assert relabel == [1, 0]
    assert G == cyclic_group(2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIXTURE_GROUPS), st.data())
def test_associativity(G, data):
    x, y, z = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, G.inv(x)) == 0


def test_enumerate_homs():
    logger.info("=" * 60)
    logger.info("TEST: homomorphism enumeration")
    logger.info("=" * 60)

    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    homs = enumerate_homs(Z2, Z2)
    assert [h.images for h in homs] == [(0, 0), (0, 1)]
    assert len(enumerate_homs(Z3, Z2)) == 1
    assert len(enumerate_homs(symmetric_group(3), trivial_group())) == 1
    logger.info("✅ 2, 1 and 1 homomorphisms")


@pytest.mark.parametrize("G,H", [(a, b) for a in FIXTURE_GROUPS[1:5] for b in FIXTURE_GROUPS[1:5]]
                         + [(symmetric_group(3), cyclic_group(2)), (cyclic_group(2), symmetric_group(3))])
def test_enumerate_homs_matches_brute_force(G, H):
    fast = [h.images for h in enumerate_homs(G, H)]
    assert fast == [h.images for h in brute_force_homs(G, H)]
    assert fast == sorted(fast)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_homs(abelian_group([2, 2]), symmetric_group(3), budget=3)


def test_make_hom_rejects_non_homomorphism():
    with pytest.raises(NotAHomomorphism):
        make_hom(cyclic_group(2), cyclic_group(4), [0, 1])
    assert make_hom(cyclic_group(2), cyclic_group(4), [0, 2]).is_injective()


def test_structure_reports():
    logger.info("=" * 60)
    logger.info("TEST: centre, Aut, Inn, Out")
    logger.info("=" * 60)

    s3 = structure_of(symmetric_group(3))
    assert (len(s3.center), s3.automorphisms.order, len(s3.inner), s3.outer.order) == (1, 6, 6, 1)

    z4 = structure_of(cyclic_group(4))
    assert (len(z4.center), z4.automorphisms.order, len(z4.inner), z4.outer.order) == (4, 2, 1, 2)

    one = structure_of(trivial_group())
    assert (len(one.center), one.automorphisms.order, len(one.inner), one.outer.order) == (1, 1, 1, 1)
    logger.info("✅ S3, Z4 and the trivial group")


@pytest.mark.parametrize("G", FIXTURE_GROUPS)
def test_structure_invariants(G):
    report = structure_of(G)
    assert report.automorphisms.order == len(report.inner) * report.outer.order
    assert list(report.center) == center(G)
    assert report.conj.kernel() == list(report.center)
    assert report.conj.image() == list(report.inner)
    for g in G.elements:
        auto = report.evaluation[report.conj(g)]
        assert all(auto[x] == G.conj(g, x) for x in G.elements)


def test_quotient_and_section():
    Z4 = cyclic_group(4)
    Q, q = quotient(Z4, [0, 2])
    assert Q.order == 2 and q.images == (0, 1, 0, 1)
    assert find_section(q) is None
    V = abelian_group([2, 2])
    Q2, q2 = quotient(V, [0, 1])
    assert find_section(q2) is not None


def test_direct_product_order():
    P = direct_product(cyclic_group(2), cyclic_group(3))
    assert P.order == 6 and P.is_abelian()
    assert max(P.element_order(x) for x in P.elements) == 6


def test_make_action():
    logger.info("=" * 60)
    logger.info("TEST: module structures")
    logger.info("=" * 60)

    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    trivial_action(Z2, abelian_group([2, 2]))
    inv = make_action(Z2, Z3, [[0, 1, 2], [0, 2, 1]])
    assert inv(1, 1) == 2 and not inv.is_trivial()

    with pytest.raises(NotAutomorphism):
        make_action(Z2, Z3, [[0, 1, 2], [0, 0, 0]])
    with pytest.raises(NotAbelian):
        trivial_action(Z2, symmetric_group(3))
    logger.info("✅ trivial and inversion actions valid, non-injective act rejected")


def test_pull_back_composes():
    """Pulling back along ψ then ψ′ is pulling back along ψ∘ψ′"""
    Z2, Z3, Z4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
    sign = make_hom(Z2, Z2, [0, 1])
    action = inversion_action(Z2, Z3, sign)
    for psi, psi2 in itertools.product(enumerate_homs(Z4, Z2), enumerate_homs(Z4, Z4)):
        step = action.pull_back(psi).pull_back(psi2)
        assert step == action.pull_back(psi.compose(psi2))


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("FINITE GROUP TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Group Validation", test_validate_group),
        ("Identity Re-indexing", test_identity_is_reindexed),
        ("Associativity", test_associativity),
        ("Homomorphism Enumeration", test_enumerate_homs),
        ("Enumeration Budget", test_enumeration_budget),
        ("Homomorphism Validation", test_make_hom_rejects_non_homomorphism),
        ("Structure Reports", test_structure_reports),
        ("Quotients", test_quotient_and_section),
        ("Direct Products", test_direct_product_order),
        ("Actions", test_make_action),
        ("Pull-back Composition", test_pull_back_composes),
    ]
    tests += [(f"Brute Force {G.name}->{H.name}", lambda G=G, H=H: test_enumerate_homs_matches_brute_force(G, H))
              for G in FIXTURE_GROUPS[1:5] for H in FIXTURE_GROUPS[1:5]]
    tests += [(f"Structure {G.name}", lambda G=G: test_structure_invariants(G)) for G in FIXTURE_GROUPS]

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
