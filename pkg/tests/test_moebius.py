from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from jointchoice import (
    AlternativeSet,
    bm_joint,
    bm_marginal,
    check_marginality,
    check_nonnegativity,
    check_recursivity,
    induce_from_order_pairs,
    reconstruct_p,
)
from jointchoice.core import MarginalityError, PartialRuleError, split_labels
from jointchoice.corpus import EXAMPLE1_BM, GeneratorSpec, example1_bm_entries, fixture, generate
from jointchoice.moebius import BlockMarschakTable, bm_direct, bm_recursive, bm_to_dict, reconstruct_cells
from jointchoice.oracle import MSetQuery, mset_measure

from conftest import HALF, delta_pair


def label_supersets(small, ground):
    rest = [g for g in ground if g not in small]
    for k in range(len(rest) + 1):
        for extra in combinations(rest, k):
            yield set(small) | set(extra), k


def alternating_sum(rule, x, y, a, b):
    """Möbius inversion written over label sets, independent of the bitset code."""
    xs, ys = rule.x_set.labels, rule.y_set.labels
    total = Fraction(0)
    a, b = split_labels(a), split_labels(b)
    for a2, ka in label_supersets(a, xs):
        for b2, kb in label_supersets(b, ys):
            total += (-1) ** (ka + kb) * rule.prob(x, y, sorted(a2), sorted(b2))
    return total


def test_example1_table3_entries(example1):
    assert alternating_sum(example1, "c", "z", "c d", "y z") == HALF
    assert alternating_sum(example1, "d", "y", "c d", "y z") == HALF
    bm = bm_joint(example1)
    assert bm.value("c", "z", "c d", "y z") == HALF
    assert bm.value("d", "y", "c d", "y z") == HALF
    assert bm.value("a", "w", "a b c d", "w x y z") == HALF
    assert bm.value("a", "w", "a b c d", "w x y z") == example1.prob("a", "w", "a b c d", "w x y z")


def test_example1_nonzero_entries_are_exactly_table3(example1):
    bm = bm_joint(example1)
    expected = example1_bm_entries(example1.x_set, example1.y_set)
    assert bm.nonzero() == expected
    assert set(expected.values()) == {HALF}
    transcribed = sum(len(cells) for row in EXAMPLE1_BM.values() for cells in row.values())
    assert transcribed == len(expected) == 32


def test_remark_rule_polynomial():
    rule = fixture("remark_rule").rule
    assert bm_joint(rule).value("a", "c", "a", "c") == -1
    assert alternating_sum(rule, "a", "c", "a", "c") == -1


def test_direct_and_recursive_agree(example1):
    assert bm_direct(example1) == bm_recursive(example1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["probability", "signed", "arbitrary", "violating"]))
def test_direct_recursive_and_label_oracle_agree(seed, mode):
    rule = generate(GeneratorSpec(seed, 2, 3, 2, mode)).rule
    direct = bm_direct(rule)
    assert direct == bm_recursive(rule)
    xs, ys = rule.x_set, rule.y_set
    for (x, y, a, b), v in list(direct.items())[::7]:
        assert v == alternating_sum(rule, xs.labels[x], ys.labels[y], xs.names(a), ys.names(b))


def test_marginality_examples(example1):
    assert check_marginality(example1).passed
    table1 = fixture("table1").rule
    assert check_marginality(table1, allow_partial=True).passed
    with pytest.raises(PartialRuleError):
        check_marginality(table1)


def test_marginality_witness_names_budgets():
    rule = generate(GeneratorSpec(5, 3, 3, 3, "violating")).rule
    report = check_marginality(rule)
    assert not report.passed and report.witnesses
    where = report.witnesses[0].where
    assert {"alternative", "own_budget", "other_budget", "reference_budget"} <= set(where)


def test_bm_marginal_example1(example1):
    xs = example1.x_set
    q1 = bm_marginal(example1, 1)
    assert q1[(xs.index("a"), xs.full)] == HALF
    assert q1[(xs.index("d"), xs.mask("c d"))] == HALF
    bm = bm_joint(example1)
    row = sum((v for (x, y, a, b), v in bm.joint.items()
               if x == xs.index("a") and a == xs.full and b == example1.y_set.full), Fraction(0))
    assert row == HALF


def test_bm_marginal_delta_on_path_edges():
    rule = induce_from_order_pairs(delta_pair())
    q1 = bm_marginal(rule, 1)
    path = {(0, 0b1111), (1, 0b1110), (2, 0b1100), (3, 0b1000)}
    assert {k for k, v in q1.items() if v != 0} == path
    assert all(q1[k] == 1 for k in path)


def test_bm_marginal_needs_marginality():
    with pytest.raises(MarginalityError):
        bm_marginal(fixture("remark_rule").rule, 1)


def test_nonnegativity_examples(example1):
    assert check_nonnegativity(bm_joint(example1)).passed
    report = check_nonnegativity(bm_joint(fixture("remark_rule").rule))
    assert [(w.where, w.lhs) for w in report.witnesses] == [
        ({"x": "a", "y": "c", "A": ["a"], "B": ["c"]}, -1)]


def test_recursivity_examples(example1):
    assert check_recursivity(bm_joint(example1)).passed
    assert check_recursivity(bm_joint(induce_from_order_pairs(delta_pair()))).passed
    violating = generate(GeneratorSpec(1, 3, 3, 3, "violating")).rule
    assert not check_marginality(violating).passed
    assert not check_recursivity(bm_joint(violating)).passed


def test_reconstruct_example1(example1):
    assert reconstruct_p(bm_joint(example1)) == example1


def test_reconstruct_single_top_entry():
    xs, ys = AlternativeSet(("a", "b")), AlternativeSet(("x", "y"))
    joint = {(x, y, a, b): Fraction(0) for a in (1, 2, 3) for b in (1, 2, 3)
             for x in (0, 1) if a >> x & 1 for y in (0, 1) if b >> y & 1}
    joint[(0, 0, 3, 3)] = Fraction(1)
    cells = reconstruct_cells(BlockMarschakTable(xs, ys, joint))
    for (a, b), table in cells.items():
        for (x, y), v in table.items():
            # only the full-set pair (a, x) accumulates, and only where it is available
            assert v == (1 if (x, y) == (0, 0) else 0)


@pytest.mark.parametrize("seed", range(50))
def test_reconstruct_round_trip(seed):
    rule = generate(GeneratorSpec(seed, 3, 3, 3, "arbitrary" if seed % 2 else "probability")).rule
    assert reconstruct_p(bm_joint(rule)) == rule


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["probability", "arbitrary", "violating", "signed"]))
def test_marginality_iff_recursivity(seed, mode):
    rule = generate(GeneratorSpec(seed, 3, 3, 3, mode)).rule
    assert check_marginality(rule).passed == check_recursivity(bm_joint(rule)).passed


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_marginal_polynomials_nonnegative_and_summing(seed):
    rule = generate(GeneratorSpec(seed, 3, 3, 4, "probability")).rule
    bm = bm_joint(rule)
    assert check_marginality(rule) and check_nonnegativity(bm)
    ys = rule.y_set
    for (x, a), v in bm.marginal1.items():
        assert v >= 0
        assert v == sum((bm.joint[(x, y, a, ys.full)] for y in range(len(ys))), Fraction(0))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_polynomials_equal_event_measures(seed):
    g = generate(GeneratorSpec(seed, 3, 3, 3, "probability"))
    bm = bm_joint(g.rule)
    for (x, y, a, b), v in bm.joint.items():
        assert v == mset_measure(g.measure, MSetQuery(x, y, a, b))


def test_bm_export_omits_zeros_and_orders_canonically(example1):
    entries = bm_to_dict(bm_joint(example1))["entries"]
    assert len(entries) == 32 and all(e["q"] == "1/2" for e in entries)
    sizes = [(-len(e["A"]), -len(e["B"])) for e in entries]
    assert sizes == sorted(sizes)
