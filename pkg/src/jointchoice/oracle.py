"""Independent ground truth: reconstruction checks, event measures, exact LPs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, prod

from .core import (
    ChoiceError,
    ChoiceFunctionPair,
    JointChoiceRule,
    RandomChoiceRule,
    SignedChoicePairMeasure,
    SignedOrderMeasure,
    SignedPairMeasure,
    ZERO,
    all_rankings,
    bits,
    induce_from_choice_pairs,
    induce_from_order_pairs,
    induce_from_orders,
    maximal,
)
from .lp import ExactLP, LPResult
from .moebius import AxiomReport, Witness, bm_joint

DEFAULT_RUM_CAP = 50_000
DEFAULT_SEPARABILITY_CAP = 100_000
DEFAULT_UNIQUE_SIZE = 4


class CapExceeded(ChoiceError):
    pass


class NotRationalizable(ChoiceError):
    """No probability measure over orders induces the given rule."""


@dataclass(frozen=True)
class MSetQuery:
    x: int
    y: int
    a: int
    b: int

    def __post_init__(self):
        if not (self.a >> self.x & 1 and self.b >> self.y & 1):
            raise ChoiceError("query needs x in A and y in B")


def in_mset(ranking: tuple[int, ...], x: int, a: int) -> bool:
    """True when the ranking puts everything outside ``a`` first, then ``x``."""
    k = len(ranking) - bin(a).count("1")
    if ranking[k] != x:
        return False
    return all(not a >> i & 1 for i in ranking[:k])


def mset_measure(measure: SignedPairMeasure, query: MSetQuery) -> Fraction:
    """Weight of order pairs ranking ``X-A > x > A-x`` and ``Y-B > y > B-y``."""
    return sum((w for (r1, r2), w in measure.weights.items()
                if in_mset(r1, query.x, query.a) and in_mset(r2, query.y, query.b)), ZERO)


def pair_mset_table(measure: SignedPairMeasure) -> dict[tuple[int, int, int, int], Fraction]:
    """All nonzero M-set weights, by walking each support pair's two paths."""
    out: dict = {}
    n1, n2 = len(measure.x_set), len(measure.y_set)
    for (r1, r2), w in measure.weights.items():
        a = (1 << n1) - 1
        for x in r1:
            b = (1 << n2) - 1
            for y in r2:
                key = (x, y, a, b)
                out[key] = out.get(key, ZERO) + w
                b &= ~(1 << y)
            a &= ~(1 << x)
    return {k: v for k, v in out.items() if v != 0}


def _first_difference(rule: JointChoiceRule, induced: JointChoiceRule):
    xs, ys = rule.x_set, rule.y_set
    for key in sorted(rule.tables):
        got, want = induced.tables.get(key, {}), rule.tables[key]
        for cell in sorted(set(got) | set(want)):
            if got.get(cell, ZERO) != want.get(cell, ZERO):
                (a, b), (x, y) = key, cell
                return Witness("reproduction", {
                    "x": xs.labels[x], "y": ys.labels[y], "A": xs.names(a), "B": ys.names(b)},
                    got.get(cell, ZERO), want.get(cell, ZERO))
    return None


def verify_measure(rule, measure) -> AxiomReport:
    """Does ``measure`` induce ``rule`` exactly?

    For complete joint rules and order-pair measures the polynomial identity
    ``q(x,y|A,B) = measure(M-set)`` is also checked on every tuple.
    """
    if isinstance(rule, RandomChoiceRule):
        if not isinstance(measure, SignedOrderMeasure) or measure.ground != rule.ground:
            raise ChoiceError("single-agent rules are verified against order measures on the same ground")
        induced = induce_from_orders(measure)
        witnesses = []
        for a in rule.ground.subsets():
            for x in bits(a):
                if induced[(x, a)] != rule[(x, a)]:
                    witnesses.append(Witness("reproduction", {"x": rule.ground.labels[x], "A": rule.ground.names(a)},
                                             induced[(x, a)], rule[(x, a)]))
        return AxiomReport("verify", tuple(witnesses))
    if (measure.x_set, measure.y_set) != (rule.x_set, rule.y_set):
        raise ChoiceError("measure and rule use different alternative sets")
    budgets = None if rule.complete else list(rule.tables)
    if isinstance(measure, SignedPairMeasure):
        induced = induce_from_order_pairs(measure, budgets, validate=False)
    elif isinstance(measure, SignedChoicePairMeasure):
        induced = induce_from_choice_pairs(measure, list(rule.tables), validate=False)
    else:
        raise ChoiceError(f"cannot verify {type(measure).__name__} against a joint rule")
    witnesses = []
    diff = _first_difference(rule, induced)
    if diff is not None:
        witnesses.append(diff)
    if rule.complete and isinstance(measure, SignedPairMeasure) and diff is None:
        bm = bm_joint(rule)
        events = pair_mset_table(measure)
        xs, ys = rule.x_set, rule.y_set
        for (x, y, a, b), q in bm.joint.items():
            got = events.get((x, y, a, b), ZERO)
            if got != q:
                witnesses.append(Witness("m-set", {"x": xs.labels[x], "y": ys.labels[y],
                                                   "A": xs.names(a), "B": ys.names(b)}, got, q))
    return AxiomReport("verify", tuple(witnesses))


# -- LP oracles ---------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    certificate: object | None
    phase1_objective: Fraction
    n_variables: int
    n_constraints: int

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"


def _dedupe(rows: list[tuple[frozenset, Fraction]]) -> list[tuple[frozenset, Fraction]]:
    seen = set()
    out = []
    for support, rhs in rows:
        if not support and rhs == 0:
            continue
        if (support, rhs) in seen:
            continue
        seen.add((support, rhs))
        out.append((support, rhs))
    return out


def _solve_rows(rows, n_vars: int, reverse: bool) -> tuple[ExactLP | None, LPResult]:
    order = list(range(n_vars))
    if reverse:
        order.reverse()
    col = {v: i for i, v in enumerate(order)}
    dense = []
    rhs = []
    for support, b in rows:
        row = [ZERO] * n_vars
        for v in support:
            row[col[v]] = Fraction(1)
        dense.append(row)
        rhs.append(b)
    if n_vars == 0:
        bad = any(b != 0 for b in rhs)
        return None, LPResult("infeasible" if bad else "optimal", (),
                              phase1_objective=sum((abs(b) for b in rhs), ZERO))
    lp = ExactLP(dense, rhs, n_vars)
    res = lp.result()
    if res.x is not None:
        x = [ZERO] * n_vars
        for v, i in col.items():
            x[v] = res.x[i]
        res = LPResult(res.status, tuple(x), res.objective, res.phase1_objective, res.pivots)
    return lp, res


def lp_separable_rum(rule: JointChoiceRule, cap: int = DEFAULT_RUM_CAP,
                     reverse: bool = False) -> FeasibilityResult:
    """Is ``rule`` induced by a probability measure over order pairs?

    Variables are order pairs, rows are the observed cells plus total mass.
    Before solving, pairs lying in an event whose polynomial is zero are
    fixed at zero: every rationalizing measure puts exactly that polynomial's
    value on the event, so a nonnegative one puts nothing on its members.
    """
    rule.require_complete()
    xs, ys = rule.x_set, rule.y_set
    total = factorial(len(xs)) * factorial(len(ys))
    if total > cap:
        raise CapExceeded(f"{total} order pairs exceed the cap of {cap}")
    bm = bm_joint(rule)
    r1s, r2s = all_rankings(len(xs)), all_rankings(len(ys))
    zero_events = {k for k, v in bm.joint.items() if v == 0}
    survivors = []
    for r1 in r1s:
        path1 = []
        a = xs.full
        for x in r1:
            path1.append((x, a))
            a &= ~(1 << x)
        for r2 in r2s:
            ok = True
            for x, a in path1:
                b = ys.full
                for y in r2:
                    if (x, y, a, b) in zero_events:
                        ok = False
                        break
                    b &= ~(1 << y)
                if not ok:
                    break
            if ok:
                survivors.append((r1, r2))
    rows: dict[tuple[int, int, int, int], set] = {}
    for v, (r1, r2) in enumerate(survivors):
        for a in xs.subsets():
            x = maximal(r1, a)
            for b in ys.subsets():
                rows.setdefault((a, b, x, maximal(r2, b)), set()).add(v)
    raw = []
    for (a, b), cells in rule.tables.items():
        for x in bits(a):
            for y in bits(b):
                raw.append((frozenset(rows.get((a, b, x, y), ())), cells.get((x, y), ZERO)))
    raw.append((frozenset(range(len(survivors))), Fraction(1)))
    deduped = _dedupe(raw)
    _, res = _solve_rows(deduped, len(survivors), reverse)
    cert = None
    if res.feasible:
        cert = SignedPairMeasure(xs, ys, {survivors[i]: w for i, w in enumerate(res.x) if w != 0})
    return FeasibilityResult(res.feasible, cert, res.phase1_objective, len(survivors), len(deduped))


def lp_stochastic_separability(rule: JointChoiceRule, budgets=None,
                               cap: int = DEFAULT_SEPARABILITY_CAP,
                               reverse: bool = False) -> FeasibilityResult:
    """Is ``rule`` a mixture of separable choice-function pairs on ``budgets``?

    Choice functions are restricted to the menus that appear in the queried
    budget pairs, so a variable is one selection per listed menu per agent.
    """
    xs, ys = rule.x_set, rule.y_set
    budgets = sorted(rule.tables) if budgets is None else sorted(set(budgets))
    for key in budgets:
        if key not in rule.tables:
            a, b = key
            raise ChoiceError(f"budget ({xs.names(a)}, {ys.names(b)}) is not in the rule")
    menus1 = sorted({a for a, _ in budgets})
    menus2 = sorted({b for _, b in budgets})
    count = prod(len(bits(a)) for a in menus1) * prod(len(bits(b)) for b in menus2)
    if count > cap:
        raise CapExceeded(f"{count} restricted choice-function pairs exceed the cap of {cap}")
    c1s = list(product(*(bits(a) for a in menus1)))
    c2s = list(product(*(bits(b) for b in menus2)))
    variables = list(product(c1s, c2s))
    pos1 = {a: i for i, a in enumerate(menus1)}
    pos2 = {b: i for i, b in enumerate(menus2)}
    raw = []
    for a, b in budgets:
        i, j = pos1[a], pos2[b]
        for x in bits(a):
            for y in bits(b):
                support = frozenset(v for v, (c1, c2) in enumerate(variables) if c1[i] == x and c2[j] == y)
                raw.append((support, rule.tables[(a, b)].get((x, y), ZERO)))
    raw.append((frozenset(range(len(variables))), Fraction(1)))
    deduped = _dedupe(raw)
    _, res = _solve_rows(deduped, len(variables), reverse)
    cert = None
    if res.feasible:
        weights = {}
        for v, w in enumerate(res.x):
            if w != 0:
                c1, c2 = variables[v]
                weights[ChoiceFunctionPair(tuple(zip(menus1, c1)), tuple(zip(menus2, c2)))] = w
        cert = SignedChoicePairMeasure(xs, ys, weights)
    return FeasibilityResult(res.feasible, cert, res.phase1_objective, len(variables), len(deduped))


# -- uniqueness by probing ------------------------------------------------------

@dataclass(frozen=True)
class UniquenessResult:
    unique: bool
    certificates: tuple[SignedOrderMeasure, ...]

    @property
    def verdict(self) -> str:
        return "unique" if self.unique else "non-unique"


def brute_force_unique_rum(rule: RandomChoiceRule, max_size: int = DEFAULT_UNIQUE_SIZE) -> UniquenessResult:
    """Is there exactly one probability measure over orders inducing ``rule``?

    Minimizes and maximizes every order's weight over the feasible polytope;
    the polytope is a point exactly when each minimum equals its maximum.
    """
    g = rule.ground
    if len(g) > max_size:
        raise CapExceeded(f"{len(g)} alternatives exceed the size cap of {max_size}")
    rankings = all_rankings(len(g))
    rows, rhs = [], []
    for a in g.subsets():
        tops = [maximal(r, a) for r in rankings]
        for x in bits(a):
            rows.append([1 if t == x else 0 for t in tops])
            rhs.append(rule[(x, a)])
    rows.append([1] * len(rankings))
    rhs.append(1)
    lp = ExactLP(rows, rhs, len(rankings))
    if not lp.feasible:
        raise NotRationalizable("no probability measure over orders induces this rule")

    def as_measure(x):
        return SignedOrderMeasure(g, {r: w for r, w in zip(rankings, x) if w != 0})

    for j in range(len(rankings)):
        c = [0] * len(rankings)
        c[j] = 1
        lo = lp.minimize(c)
        c[j] = -1
        hi = lp.minimize(c)
        if lo.x[j] != hi.x[j]:
            return UniquenessResult(False, (as_measure(lo.x), as_measure(hi.x)))
    return UniquenessResult(True, (as_measure(lp.point()),))

