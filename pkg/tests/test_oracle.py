from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jointchoice import (
    AlternativeSet,
    JointChoiceRule,
    SignedOrderMeasure,
    brute_force_unique_rum,
    decompose_joint_rule,
    lp_separable_rum,
    lp_stochastic_separability,
    marginal_rules,
    mset_measure,
    verify_measure,
)
from jointchoice.core import ChoiceError, induce_from_orders
from jointchoice.corpus import GeneratorSpec, fixture, generate
from jointchoice.lp import ExactLP, feasible_point
from jointchoice.oracle import CapExceeded, MSetQuery, NotRationalizable

from conftest import HALF, delta_pair


def query(measure, x, y, a, b):
    xs, ys = measure.x_set, measure.y_set
    return mset_measure(measure, MSetQuery(xs.index(x), ys.index(y), xs.mask(a), ys.mask(b)))


def test_verify_example1_decomposition(example1):
    assert verify_measure(example1, decompose_joint_rule(example1)).passed


def test_verify_example1_against_delta(example1):
    report = verify_measure(example1, delta_pair())
    assert not report.passed
    first = report.witnesses[0]
    assert first.identity == "reproduction" and first.lhs != first.rhs


@pytest.mark.parametrize("seed", range(50))
def test_verify_generated_measures(seed):
    g = generate(GeneratorSpec(seed, 3, 2 + seed % 2, 1 + seed % 5, "probability"))
    assert verify_measure(g.rule, g.measure).passed


def test_verify_ground_mismatch(example1, reversal):
    with pytest.raises(ChoiceError):
        verify_measure(example1, reversal[0])


def test_mset_measure_examples(example1):
    delta = delta_pair()
    assert query(delta, "b", "x", "b c d", "x y z") == 1
    assert query(delta, "a", "w", "a b", "w x") == 0
    assert query(decompose_joint_rule(example1), "c", "z", "c d", "y z") == HALF


def test_lp_separable_rum_example1(example1):
    result = lp_separable_rum(example1)
    assert not result.feasible and result.phase1_objective > 0
    assert result.verdict == "infeasible"


def test_lp_separable_rum_reversal(reversal):
    nu, rule = reversal
    result = lp_separable_rum(rule)
    assert result.feasible
    assert verify_measure(rule, result.certificate).passed
    assert result.certificate.is_nonnegative()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_lp_separable_rum_generated(seed, k):
    g = generate(GeneratorSpec(seed, 3, 3, k, "probability"))
    result = lp_separable_rum(g.rule)
    assert result.feasible
    assert verify_measure(g.rule, result.certificate).passed


def test_lp_cap(example1):
    with pytest.raises(CapExceeded):
        lp_separable_rum(example1, cap=100)


def test_table2_not_separable():
    result = lp_stochastic_separability(fixture("table2").rule)
    assert not result.feasible
    assert result.n_variables == 16
    assert result.phase1_objective > 0


def test_table1_separability_regression():
    result = lp_stochastic_separability(fixture("table1").rule)
    assert result.feasible
    assert result.n_variables == 18
    assert verify_measure(fixture("table1").rule, result.certificate).passed


def test_product_rule_separable():
    xs, ys = AlternativeSet(("a", "b", "c")), AlternativeSet(("x", "y"))
    p1 = {xs.mask("a b c"): {0: HALF, 2: HALF}, xs.mask("a b"): {0: Fraction(1, 3), 1: Fraction(2, 3)}}
    p2 = {ys.mask("x y"): {0: Fraction(1, 4), 1: Fraction(3, 4)}, ys.mask("y"): {1: Fraction(1)}}
    tables = {(a, b): {(x, y): u * v for x, u in r1.items() for y, v in r2.items()}
              for a, r1 in p1.items() for b, r2 in p2.items()}
    rule = JointChoiceRule(xs, ys, tables, complete=False)
    result = lp_stochastic_separability(rule)
    assert result.feasible and verify_measure(rule, result.certificate).passed


def test_separability_unknown_budget():
    rule = fixture("table1").rule
    with pytest.raises(ChoiceError):
        lp_stochastic_separability(rule, [(1, 1)])


@pytest.mark.parametrize("name", ["table1", "table2"])
def test_separability_verdict_independent_of_variable_order(name):
    rule = fixture(name).rule
    assert (lp_stochastic_separability(rule).feasible
            == lp_stochastic_separability(rule, reverse=True).feasible)


def test_rum_verdict_independent_of_variable_order(example1, reversal):
    for rule in (example1, reversal[1]):
        assert lp_separable_rum(rule).feasible == lp_separable_rum(rule, reverse=True).feasible


def test_brute_force_example1_marginal(example1):
    p1, _ = marginal_rules(example1)
    result = brute_force_unique_rum(p1)
    assert not result.unique
    first, second = result.certificates
    assert first != second
    assert induce_from_orders(first) == p1 == induce_from_orders(second)


def test_brute_force_unique_cases(reversal):
    p1, _ = marginal_rules(reversal[1])
    assert brute_force_unique_rum(p1).unique
    g = AlternativeSet(("a", "b", "c", "d"))
    assert brute_force_unique_rum(induce_from_orders(SignedOrderMeasure(g, {(3, 1, 0, 2): 1}))).unique


def test_brute_force_limits():
    g = AlternativeSet(tuple("abcde"))
    with pytest.raises(CapExceeded):
        brute_force_unique_rum(induce_from_orders(SignedOrderMeasure(g, {(0, 1, 2, 3, 4): 1})))
    g3 = AlternativeSet(("a", "b", "c"))
    signed = SignedOrderMeasure(g3, {(0, 1, 2): 2, (1, 0, 2): -1})
    with pytest.raises(NotRationalizable):
        brute_force_unique_rum(induce_from_orders(signed))


def test_exact_lp_basics():
    assert not feasible_point([[1, 1], [1, 1]], [1, 2]).feasible
    res = feasible_point([[1, 1], [2, 2], [1, 0]], [1, 2, Fraction(1, 3)])
    assert res.feasible and res.x == (Fraction(1, 3), Fraction(2, 3))
    lp = ExactLP([[1, 1, 1]], [1])
    assert lp.minimize([3, 1, 2]).objective == 1
    assert lp.minimize([-1, 0, 0]).x == (1, 0, 0)
    assert lp.point() == ExactLP([[1, 1, 1]], [1]).point()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3),
       st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_exact_lp_finds_planted_points(rows, point):
    rhs = [sum(a * x for a, x in zip(row, point)) for row in rows]
    res = feasible_point(rows, rhs, 4)
    assert res.feasible
    assert all(v >= 0 for v in res.x)
    assert [sum(a * x for a, x in zip(row, res.x)) for row in rows] == rhs
