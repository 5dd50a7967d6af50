"""
Tests for the command-line surface: commands, exit codes and JSON reports
"""

import json
import logging
import os

import pytest

import config
from main import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, load_bundle, main, run_command

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@pytest.fixture(scope='module')
def bundle():
    return load_bundle([config.FIXTURE_DIR])


def fixture_bundle():
    return load_bundle([config.FIXTURE_DIR])


def test_cohomology_command(bundle):
    logger.info("=" * 60)
    logger.info("TEST: cohomology command")
    logger.info("=" * 60)

    text, code = run_command(bundle, ['cohomology', '2', 'triv-Z2-Z2'])
    assert code == EXIT_OK
    assert "invariant factors: [2]" in text

    text, code = run_command(bundle, ['cohomology', 'n=1', 'action=triv-Z2-Z2'])
    assert code == EXIT_OK
    assert "order: 2" in text
    logger.info("✅ H²(Z2, Z2) has invariant factors [2]")


def test_sml_command(bundle):
    text, code = run_command(bundle, ['sml', 'C=Z2', 'K=Z3', 'akernel=id'])
    assert code == EXIT_OK
    assert "1 extension class; H² order 1; torsor verified" in text

    text, code = run_command(bundle, ['sml', 'Z2', 'Z2', 'triv'])
    assert code == EXIT_OK
    assert "2 extension classes; H² order 2; torsor verified" in text


def test_fixture_commands(bundle):
    logger.info("=" * 60)
    logger.info("TEST: commands on fixture objects")
    logger.info("=" * 60)

    text, code = run_command(bundle, ['check', 'V4'])
    assert code == EXIT_OK and "order 4, abelian" in text

    text, code = run_command(bundle, ['classify-opext', 'z4', 'z4', 'id', 'id'])
    assert code == EXIT_OK
    assert "morphisms over (phi0, phi1): 2" in text and "verdict: torsor" in text

    text, code = run_command(bundle, ['classify-opext', 'z4', 'split2', 'id', 'id'])
    assert code == EXIT_OK and "verdict: empty" in text

    text, code = run_command(bundle, ['transport', 'autZ3', 'autZ3', 'id', 'id'])
    assert code == EXIT_OK and "3-cocycle classes agree: True" in text

    text, code = run_command(bundle, ['weak-homs', 'zeroZ2Z2', 'zeroZ2Z2', 'id', 'id'])
    assert code == EXIT_OK and "weak maps: 2" in text

    text, code = run_command(bundle, ['obstruction', 'invZ3'])
    assert code == EXIT_OK and "vanishes" in text
    logger.info("✅ check, classify-opext, transport, weak-homs and obstruction")


def test_check_file(bundle):
    path = os.path.join(config.FIXTURE_DIR, '04_extensions.txt')
    text, code = run_command(bundle, ['check', path])
    assert code == EXIT_OK
    assert "3 objects valid" in text


def test_input_errors(bundle):
    logger.info("=" * 60)
    logger.info("TEST: exit codes")
    logger.info("=" * 60)

    _, code = run_command(bundle, ['check', 'no-such-object'])
    assert code == EXIT_INPUT
    _, code = run_command(bundle, ['cohomology', '4', 'triv-Z2-Z2'])
    assert code == EXIT_INPUT
    _, code = run_command(bundle, ['classify-opext', 'z4', 's3', 'id', 'id'])
    assert code == EXIT_INPUT
    logger.info("✅ unknown names, unsupported degrees and mismatched groups exit 2")


def test_budget_exceeded(bundle):
    text, code = run_command(bundle, ['sml', 'Z3', 'Z3', 'triv', '--budget', '1'])
    assert code == EXIT_BUDGET
    assert text.startswith("error:")

    # cochain matrices have their own cap
    text, code = run_command(bundle, ['cohomology', '2', 'triv-Z2-Z2', '--budget', '1'])
    assert code == EXIT_OK
    assert "invariant factors: [2]" in text


def test_json_output(bundle):
    text, code = run_command(bundle, ['cohomology', '2', 'triv-Z2-Z2', '--json'])
    data = json.loads(text)
    assert code == EXIT_OK
    assert data['invariant_factors'] == [2] and data['exit_code'] == 0

    text, code = run_command(bundle, ['check', 'nothing', '--json'])
    data = json.loads(text)
    assert data['exit_code'] == EXIT_INPUT and 'nothing' in data['error']


def test_main_entry_point(capsys):
    assert main(['--bundle', config.FIXTURE_DIR, 'cohomology', '2', 'triv-Z2-Z2']) == EXIT_OK
    assert "invariant factors: [2]" in capsys.readouterr().out
    assert main(['--bundle', os.path.join(config.FIXTURE_DIR, 'missing.txt'), 'check', 'V4']) == EXIT_INPUT


def test_verify_io_suite(bundle):
    text, code = run_command(bundle, ['verify', '--suite', 'io'])
    assert code == EXIT_OK
    assert "io: 1 items" in text and "PASS" in text


def run_all_tests():
    """Run all tests"""
    logger.info("\n" + "=" * 60)
    logger.info("COMMAND LINE TEST SUITE")
    logger.info("=" * 60)

    shared = fixture_bundle()
    tests = [
        ("Cohomology Command", lambda: test_cohomology_command(shared)),
        ("SML Command", lambda: test_sml_command(shared)),
        ("Fixture Commands", lambda: test_fixture_commands(shared)),
        ("Check a File", lambda: test_check_file(shared)),
        ("Input Errors", lambda: test_input_errors(shared)),
        ("Budget", lambda: test_budget_exceeded(shared)),
        ("JSON Output", lambda: test_json_output(shared)),
        ("verify --suite io", lambda: test_verify_io_suite(shared)),
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
