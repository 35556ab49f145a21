from fractions import Fraction

import pytest

from jointchoice import AlternativeSet, SignedPairMeasure, induce_from_order_pairs
from jointchoice.corpus import fixture


@pytest.fixture(scope="session")
def example1():
    return fixture("example1").rule


@pytest.fixture(scope="session")
def reversal():
    """Half on (a>b>c, x>y), half on (c>b>a, y>x)."""
    xs, ys = AlternativeSet(("a", "b", "c")), AlternativeSet(("x", "y"))
    nu = SignedPairMeasure.from_labels(xs, ys, [("a b c", "x y", "1/2"), ("c b a", "y x", "1/2")])
    return nu, induce_from_order_pairs(nu)


def delta_pair(first="a b c d", second="w x y z"):
    xs = AlternativeSet(tuple(sorted(first.split())))
    ys = AlternativeSet(tuple(sorted(second.split())))
    return SignedPairMeasure.from_labels(xs, ys, [(first, second, 1)])


HALF = Fraction(1, 2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
