"""
Tests for fixture parsing and canonical serialization
"""

import logging
from pathlib import Path

import pytest

import config
from bundle import Bundle, parse_bundle, parse_text, serialize
from errors import NotAHomomorphism, ParseError
from fingroup import cyclic_group

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

FIXTURES = Path(config.FIXTURE_DIR)

SWAPPED_Z2 = """\
# identity listed second
group W
order 2
table
1 0
0 1
end

hom w W Z2
1 0
end
"""


def test_fixture_round_trip():
    logger.info("=" * 60)
    logger.info("TEST: fixture round trip")
    logger.info("=" * 60)

    bundle = parse_bundle([str(FIXTURES)])
    assert len(bundle.files) == len(list(FIXTURES.glob('*.txt')))
    for file in bundle.files:
        assert serialize(bundle, file) == Path(file).read_text(encoding='utf-8'), file
    logger.info(f"✅ {len(bundle)} objects serialize back to their files")


def test_fixture_objects():
    bundle = parse_bundle([str(FIXTURES)])
    assert bundle.group('V4').order == 4
    assert bundle.get('hom', 'sign').images == (0, 1, 1, 0, 0, 1)
    assert bundle.get('cochain', 'c2').values == (0, 0, 0, 1)
    assert bundle.get('akernel', 'invZ3').psi0.images == (0, 1)
    kind, _ = bundle.find('diag')
    assert kind == 'butterfly'


def test_builtins():
    bundle = Bundle()
    assert bundle.group('Z4') == cyclic_group(4)
    assert bundle.group('Z2xZ2').order == 4
    assert bundle.group('S3').order == 6
    assert bundle.action('triv-Z2-Z3').is_trivial()
    with pytest.raises(KeyError):
        bundle.group('Q8')
    with pytest.raises(KeyError):
        bundle.find('nothing')


def test_non_square_table():
    logger.info("=" * 60)
    logger.info("TEST: parse errors")
    logger.info("=" * 60)

    with pytest.raises(ParseError) as info:
        parse_text("group bad\norder 2\ntable\n0 1\n1\nend\n", 'bad.grp')
    assert info.value.line == 5 and info.value.file == 'bad.grp'
    assert 'not square' in info.value.reason
    logger.info(f"✅ {info.value}")


@pytest.mark.parametrize("text,line", [
    ("hom h Z2 Z3\n0 1\nend\n", None),
    ("group g\norder 1\ntable\n0\nend\ngroup g\norder 1\ntable\n0\nend\n", 6),
    ("widget w\nend\n", 1),
    ("hom h Z2 Q8\n0 1\nend\n", 2),
    ("hom h Z2 Z3\n0 1 2\nend\n", 2),
    ("group g\norder 1\ntable\n0\n", 4),
])
def test_malformed_blocks(text, line):
    if line is None:
        with pytest.raises(NotAHomomorphism):
            parse_text(text)
        return
    with pytest.raises(ParseError) as info:
        parse_text(text)
    assert info.value.line == line


def test_relabel_translates_references():
    bundle = parse_text(SWAPPED_Z2, 'swapped.txt')
    assert bundle.relabel('W') == [1, 0]
    assert bundle.group('W') == cyclic_group(2)
    assert bundle.get('hom', 'w').images == (0, 1)

    canonical = serialize(bundle, 'swapped.txt')
    again = parse_text(canonical, 'canonical.txt')
    assert again.relabel('W') is None
    assert again.get('hom', 'w').images == (0, 1)
    assert serialize(again, 'canonical.txt') == canonical


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("FIXTURE TEST SUITE")
    logger.info("=" * 60)

    tests = [
        ("Fixture Round Trip", test_fixture_round_trip),
        ("Fixture Objects", test_fixture_objects),
        ("Built-in Names", test_builtins),
        ("Non-square Table", test_non_square_table),
        ("Relabeling", test_relabel_translates_references),
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
