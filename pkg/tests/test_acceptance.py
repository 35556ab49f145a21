"""Acceptance criteria, one test each.

Every test prints a ``[criterion N] PASS|FAIL`` line; the lines are also
collected into the pytest terminal summary. Run directly with
``python tests/test_acceptance.py`` for just the ten lines.
"""

import contextlib
import io
import json
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import pytest

from jointchoice import (
    bm_joint,
    bm_marginal,
    brute_force_unique_rum,
    check_marginality,
    check_nonnegativity,
    check_recursivity,
    decompose_joint_rule,
    fixture,
    lp_separable_rum,
    lp_stochastic_separability,
    marginal_rules,
    recover_separable_rum,
    serialize,
    unique_rum_check,
    verify_measure,
)
from jointchoice.cli import run
from jointchoice.corpus import GeneratorSpec, example1_bm_entries, generate, random_choice_rule
from jointchoice.graphs import build_system
from jointchoice.moebius import single_bm

RESULTS: dict[int, str] = {}


def record(number, title, budget, check):
    start = time.perf_counter()
    try:
        detail = check()
        ok, error = True, ""
    except AssertionError as exc:
        ok, detail, error = False, "", str(exc) or "assertion failed"
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    verdict = "PASS" if ok and in_time else "FAIL"
    note = detail if ok else error
    if ok and not in_time:
        note = f"over time budget ({budget} s)"
    line = f"[criterion {number:2d}] {verdict} {title} ({elapsed:.2f} s) {note}".rstrip()
    RESULTS[number] = line
    print(line)
    assert ok, error
    assert in_time, f"criterion {number} took {elapsed:.2f} s, budget {budget} s"


def row_sums(cells, n):
    return [sum((v for (x, _), v in cells.items() if x == i), Fraction(0)) for i in range(n)]


def criterion_1():
    rule = fixture("table1").rule
    want = [Fraction(1, 2), Fraction(2, 5), Fraction(1, 10)]
    for cells in rule.tables.values():
        assert row_sums(cells, 3) == want
    assert len(rule.tables) == 2
    assert check_marginality(rule, allow_partial=True).passed
    return "row sums 1/2, 2/5, 1/10 in both tables"


def criterion_2():
    result = lp_stochastic_separability(fixture("table2").rule)
    assert not result.feasible
    assert result.phase1_objective > 0
    return f"infeasible, {result.n_variables} variables, phase-1 objective {result.phase1_objective}"


def criterion_3():
    rule = fixture("example1").rule
    assert check_marginality(rule).passed
    bm = bm_joint(rule)
    assert check_recursivity(bm).passed and check_nonnegativity(bm).passed
    listed = example1_bm_entries(rule.x_set, rule.y_set)
    assert all(v == Fraction(1, 2) for v in listed.values())
    assert all(bm.joint[k] == listed.get(k, 0) for k in bm.joint)
    assert not lp_separable_rum(rule).feasible
    p1, p2 = marginal_rules(rule)
    for agent, p in ((1, p1), (2, p2)):
        ground = rule.x_set if agent == 1 else rule.y_set
        check = unique_rum_check(bm_marginal(rule, agent), ground)
        assert not check.passed
        assert check.passed == brute_force_unique_rum(p).unique
    return f"{len(listed)} polynomial entries of 1/2, separable RUM infeasible, both marginals non-unique"


def criterion_4():
    bm = bm_joint(fixture("remark_rule").rule)
    assert bm.value("a", "c", "a", "c") == -1
    report = check_nonnegativity(bm)
    assert [(w.where, w.lhs) for w in report.witnesses] == [({"x": "a", "y": "c", "A": ["a"], "B": ["c"]}, -1)]
    return "single witness q(a,c|{a},{c}) = -1"


def criterion_5():
    cases = [(s, 3, 3) for s in range(30)] + [(100 + s, 4, 4) for s in range(10)]
    for seed, nx, ny in cases:
        g = generate(GeneratorSpec(seed, nx, ny, 4, "signed"))
        measure = decompose_joint_rule(g.rule)
        assert sum(measure.weights.values()) == 1
        report = verify_measure(g.rule, measure)
        assert report.passed, f"seed {seed}: {report.witnesses[:1]}"
    return "30 rules at 3x3 and 10 at 4x4 reproduced, M-set identity on every tuple"


def criterion_6():
    with tempfile.TemporaryDirectory() as tmp:
        _single_agent_runs(Path(tmp))
    planted = sum(1 for s in range(0, 60, 2) if min(single_bm(random_choice_rule(s, 4, True)).values()) < 0)
    assert planted == 30
    return "60 rules reproduced (30 with negative polynomials), trace bounds hold"


def _single_agent_runs(tmp: Path):
    for seed in range(60):
        rule = random_choice_rule(seed, 4, negative=seed % 2 == 0)
        negatives = sum(1 for v in single_bm(rule).values() if v < 0)
        src = io.StringIO()
        err = io.StringIO()
        path = tmp / f"rule{seed}.json"
        path.write_text(serialize(rule))
        with contextlib.redirect_stderr(err):
            code = run(["decompose", str(path), "--trace", "--format", "json"], stdout=src)
        assert code == 0
        events = [json.loads(line) for line in err.getvalue().splitlines()]
        phase1 = sum(e["phase"] == "negative-stripping" for e in events)
        phase2 = sum(e["phase"] == "positive-stripping" for e in events)
        assert phase1 <= negatives, f"seed {seed}: {phase1} > {negatives}"
        assert phase2 <= 4 * 2 ** 3
        out = tmp / f"measure{seed}.json"
        out.write_text(json.dumps(json.loads(src.getvalue())["data"]))
        assert run(["verify", str(path), str(out)], stdout=io.StringIO()) == 0


def criterion_7():
    agree = 0
    for seed in range(20):
        for mode, expected in (("probability", True), ("violating", False)):
            rule = generate(GeneratorSpec(seed, 3, 3, 3, mode)).rule
            m = check_marginality(rule).passed
            r = check_recursivity(bm_joint(rule)).passed
            assert m == expected and m == r, f"seed {seed} {mode}"
            agree += 1
    return f"{agree} verdict pairs agree"


def criterion_8():
    checked = 0
    for seed in range(40):
        for mode in ("probability", "signed", "arbitrary"):
            rule = generate(GeneratorSpec(seed, 3, 3, 3, mode)).rule
            if not rule.is_nonnegative() or not check_marginality(rule).passed:
                continue
            bm = bm_joint(rule)
            if not check_nonnegativity(bm).passed:
                continue
            checked += 1
            for agent, ground, other in ((1, rule.x_set, rule.y_set), (2, rule.y_set, rule.x_set)):
                table = bm if agent == 1 else bm.transpose()
                q = bm_marginal(rule, agent)
                for (x, a), v in q.items():
                    assert v >= 0
                    assert v == sum((table.joint[(x, y, a, other.full)] for y in range(len(other))), Fraction(0))
    assert checked >= 40
    return f"{checked} qualifying rules"


def criterion_9():
    done = 0
    seed = 0
    while done < 20:
        g = generate(GeneratorSpec(seed, 3, 2 + seed % 2, 1 + seed % 4, "probability"))
        seed += 1
        p1, _ = marginal_rules(g.rule)
        if not brute_force_unique_rum(p1).unique:
            continue
        measure = recover_separable_rum(g.rule, lead=1)
        assert all(w >= 0 for w in measure.weights.values())
        assert sum(measure.weights.values()) == 1
        assert verify_measure(g.rule, measure).passed
        assert measure.marginal(1) == g.measure.marginal(1)
        done += 1
    return f"20 recoveries from {seed} generated instances"


def criterion_10():
    compared = 0
    rule = fixture("example1").rule
    for agent, p in zip((1, 2), marginal_rules(rule)):
        ground = rule.x_set if agent == 1 else rule.y_set
        assert unique_rum_check(bm_marginal(rule, agent), ground).passed == brute_force_unique_rum(p).unique
        compared += 1
    non_unique = 0
    for seed in range(20):
        g = generate(GeneratorSpec(seed, 4, 2, 2 + seed % 5, "probability"))
        p1, _ = marginal_rules(g.rule)
        graph = build_system(bm_joint(g.rule), 1).marginal
        unique = brute_force_unique_rum(p1).unique
        non_unique += not unique
        assert unique_rum_check(graph).passed == unique, f"seed {seed}"
        compared += 1
    feasible = 0
    rules = [fixture("example1").rule] + [generate(GeneratorSpec(s, 3, 3, 3, m)).rule
                                          for s in range(5) for m in ("probability", "signed")]
    for r in rules:
        if not r.is_nonnegative():
            continue
        result = lp_separable_rum(r)
        if result.feasible:
            feasible += 1
            assert verify_measure(r, result.certificate).passed
    return f"{compared} uniqueness comparisons ({non_unique} non-unique), {feasible} LP certificates verified"


CRITERIA = [
    (1, "table1 fixture marginal row sums", 0.1, criterion_1),
    (2, "table2 fixture not stochastically separable", 0.5, criterion_2),
    (3, "example1 fixture axioms, polynomials, LP and uniqueness", 5, criterion_3),
    (4, "remark_rule fixture negative polynomial", 0.1, criterion_4),
    (5, "signed decomposition of joint rules", 60, criterion_5),
    (6, "signed decomposition of single-agent rules", 30, criterion_6),
    (7, "marginality iff recursivity", 30, criterion_7),
    (8, "marginal polynomials nonnegative and summing", 10, criterion_8),
    (9, "separable random utility recovery", 60, criterion_9),
    (10, "oracle self-consistency", 60, criterion_10),
]

@pytest.mark.parametrize("number, title, budget, check", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, budget, check):
    record(number, title, budget, check)


if __name__ == "__main__":
    failed = 0
    for number, title, budget, check in CRITERIA:
        try:
            record(number, title, budget, check)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
