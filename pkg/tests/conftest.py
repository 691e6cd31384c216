import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acdelay.source import MarkovSource, make_memoryless  # noqa: E402

SPECS = Path(__file__).resolve().parent.parent / "specs"

# acceptance lines collected by test_acceptance.report()
ACCEPTANCE_LINES = []


@pytest.fixture
def ternary():
    return make_memoryless([F(1, 3)] * 3)


@pytest.fixture
def half_quarter():
    return make_memoryless([F(1, 2), F(1, 4), F(1, 4)])


@pytest.fixture
def binary_uniform():
    return make_memoryless([F(1, 2), F(1, 2)])


@pytest.fixture
def sticky():
    return MarkovSource(((F(9, 10), F(1, 10)), (F(1, 2), F(1, 2))))


@pytest.fixture
def permutation():
    return MarkovSource(((F(0), F(1)), (F(1), F(0))))


@pytest.fixture
def specs_dir():
    return SPECS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
