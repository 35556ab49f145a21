"""Published fixtures and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import (
    AlternativeSet,
    JointChoiceRule,
    LinearOrder,
    RandomChoiceRule,
    SignedPairMeasure,
    ZERO,
    bits,
    induce_from_order_pairs,
    maximal,
    popcount,
)

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"
FIXTURE_NAMES = ("table1", "table2", "example1", "remark_rule")
MODES = ("probability", "signed", "arbitrary", "violating")
MAX_ALTERNATIVES = 6


@dataclass(frozen=True)
class Fixture:
    name: str
    rule: JointChoiceRule
    expected: dict = field(default_factory=dict)
    source: str = ""


def _table(x_set, y_set, a, b, rows: dict[str, dict[str, str]]):
    a_mask, b_mask = x_set.mask(a), y_set.mask(b)
    cells = {(x_set.index(x), y_set.index(y)): Fraction(v)
             for x, row in rows.items() for y, v in row.items()}
    return (a_mask, b_mask), cells


def table1() -> Fixture:
    xs = AlternativeSet(("x1", "x2", "x3"))
    ys = AlternativeSet(("y1", "y2", "y3"))
    tables = dict([
        _table(xs, ys, "x1 x2 x3", "y1 y2 y3", {
            "x1": {"y1": "0.2", "y2": "0", "y3": "0.3"},
            "x2": {"y1": "0.1", "y2": "0.3", "y3": "0"},
            "x3": {"y1": "0", "y2": "0", "y3": "0.1"}}),
        _table(xs, ys, "x1 x2 x3", "y1 y2", {
            "x1": {"y1": "0.3", "y2": "0.2"},
            "x2": {"y1": "0.1", "y2": "0.3"},
            "x3": {"y1": "0", "y2": "0.1"}}),
    ])
    return Fixture(
        "table1", JointChoiceRule(xs, ys, tables, complete=False),
        {"agent1_row_sums": (Fraction(1, 2), Fraction(2, 5), Fraction(1, 10)),
         "stochastically_separable": True},
        "two printed joint tables sharing the first agent's full menu")


def table2() -> Fixture:
    xs = AlternativeSet(("w", "x", "y", "z"))
    ys = AlternativeSet(("a", "b", "c", "d"))
    half = "1/2"
    tables = dict([
        _table(xs, ys, "w x", "a b", {"w": {"a": half}, "x": {"b": half}}),
        _table(xs, ys, "w x", "c d", {"w": {"c": half}, "x": {"d": half}}),
        _table(xs, ys, "y z", "a b", {"y": {"a": half}, "z": {"b": half}}),
        _table(xs, ys, "y z", "c d", {"y": {"d": half}, "z": {"c": half}}),
    ])
    return Fixture("table2", JointChoiceRule(xs, ys, tables, complete=False),
                   {"stochastically_separable": False},
                   "four budget pairs; marginal but not separable")


def _example1_rule() -> JointChoiceRule:
    xs = AlternativeSet(("a", "b", "c", "d"))
    ys = AlternativeSet(("w", "x", "y", "z"))
    half = Fraction(1, 2)
    outer = [(LinearOrder.from_labels(xs, "a b c d").ranking, LinearOrder.from_labels(ys, "w x y z").ranking),
             (LinearOrder.from_labels(xs, "b a d c").ranking, LinearOrder.from_labels(ys, "x w z y").ranking)]
    # inner orders only matter on {c, d} x {y, z}; the prefix is arbitrary
    inner = [(LinearOrder.from_labels(xs, "a b d c").ranking, LinearOrder.from_labels(ys, "w x y z").ranking),
             (LinearOrder.from_labels(xs, "a b c d").ranking, LinearOrder.from_labels(ys, "w x z y").ranking)]
    cd, yz = xs.mask("c d"), ys.mask("y z")
    tables = {}
    for a in xs.subsets():
        for b in ys.subsets():
            # the inner pair applies exactly when A <= {c,d} and B <= {y,z}
            pairs = inner if (a & ~cd == 0 and b & ~yz == 0) else outer
            cells: dict = {}
            for r1, r2 in pairs:
                key = (maximal(r1, a), maximal(r2, b))
                cells[key] = cells.get(key, ZERO) + half
            tables[(a, b)] = cells
    return JointChoiceRule(xs, ys, tables)


# Nonzero polynomials printed for the counterexample, all equal to 1/2:
# {first-agent set: {second-agent set: [(x, y), ...]}}
EXAMPLE1_BM = {
    "a b c d": {"w x y z": ["a w", "b x"], "x y z": ["a x"], "w y z": ["b w"],
                "y z": ["a y", "b z"], "y": ["b y"], "z": ["a z"]},
    "b c d": {"w x y z": ["b w"], "x y z": ["b x"], "y z": ["b y"], "z": ["b z"]},
    "a c d": {"w x y z": ["a x"], "w y z": ["a w"], "y z": ["a z"], "y": ["a y"]},
    "c d": {"w x y z": ["c w", "d x"], "x y z": ["c x"], "w y z": ["d w"],
            "y z": ["c z", "d y"], "y": ["c y"], "z": ["d z"]},
    "c": {"w x y z": ["c x"], "w y z": ["c w"], "y z": ["c y"], "z": ["c z"]},
    "d": {"w x y z": ["d w"], "x y z": ["d x"], "y z": ["d z"], "y": ["d y"]},
}


def example1_bm_entries(x_set: AlternativeSet, y_set: AlternativeSet) -> dict:
    """The printed polynomial table as ``{(x, y, A, B): 1/2}`` index tuples."""
    out = {}
    for a, row in EXAMPLE1_BM.items():
        for b, cells in row.items():
            for cell in cells:
                x, y = cell.split()
                out[(x_set.index(x), y_set.index(y), x_set.mask(a), y_set.mask(b))] = Fraction(1, 2)
    return out


def example1() -> Fixture:
    return Fixture(
        "example1", _example1_rule(),
        {"marginality": True, "non-negativity": True, "separable_rum": False,
         "unique_marginal_1": False, "unique_marginal_2": False},
        "one pair of order mixtures off {c,d}x{y,z}, another on it")


def remark_rule() -> Fixture:
    xs = AlternativeSet(("a", "b"))
    ys = AlternativeSet(("c", "d"))
    ranking = [("b", "d"), ("a", "c"), ("a", "d"), ("b", "c")]
    tables = {}
    for a in xs.subsets():
        for b in ys.subsets():
            for x, y in ranking:
                i, j = xs.index(x), ys.index(y)
                if a >> i & 1 and b >> j & 1:
                    tables[(a, b)] = {(i, j): Fraction(1)}
                    break
    return Fixture("remark_rule", JointChoiceRule(xs, ys, tables),
                   {"negative_witness": ("a", "c", ["a"], ["c"], Fraction(-1))},
                   "maximizing (b,d) > (a,c) > (a,d) > (b,c) over X x Y")


_BUILDERS = {"table1": table1, "table2": table2, "example1": example1, "remark_rule": remark_rule}


def fixture(name: str) -> Fixture:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}") from None


# -- generators ------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    nx: int = 3
    ny: int = 3
    k: int = 3
    mode: str = "probability"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not (1 <= self.nx <= MAX_ALTERNATIVES and 1 <= self.ny <= MAX_ALTERNATIVES):
            raise ValueError(f"sizes must lie in 1..{MAX_ALTERNATIVES}")
        if self.k < 1:
            raise ValueError("support size must be positive")


@dataclass(frozen=True)
class Generated:
    spec: GeneratorSpec
    rule: JointChoiceRule
    measure: SignedPairMeasure | None = None


def alternative_sets(nx: int, ny: int) -> tuple[AlternativeSet, AlternativeSet]:
    return (AlternativeSet(tuple(f"x{i + 1}" for i in range(nx))),
            AlternativeSet(tuple(f"y{i + 1}" for i in range(ny))))


def _ranking(rng: random.Random, n: int) -> tuple[int, ...]:
    return tuple(rng.sample(range(n), n))


def _simplex_point(rng: random.Random, n: int) -> list[Fraction]:
    # integer weights in 0..64, at least one positive
    w = [rng.randint(0, 64) for _ in range(n)]
    if not any(w):
        w[rng.randrange(n)] = 1
    total = sum(w)
    return [Fraction(v, total) for v in w]


def random_pair_measure(rng: random.Random, x_set, y_set, k: int, signed: bool = False) -> SignedPairMeasure:
    nx, ny = len(x_set), len(y_set)
    keys = [(_ranking(rng, nx), _ranking(rng, ny)) for _ in range(k)]
    if signed:
        weights = [Fraction(rng.randint(-64, 64), 64) for _ in range(k - 1)]
        weights.append(1 - sum(weights, ZERO))
    else:
        weights = [Fraction(rng.randint(1, 64)) for _ in range(k)]
        total = sum(weights)
        weights = [w / total for w in weights]
    out: dict = {}
    for key, w in zip(keys, weights):
        out[key] = out.get(key, ZERO) + w
    return SignedPairMeasure(x_set, y_set, out)


def _violate(rng: random.Random, rule: JointChoiceRule) -> JointChoiceRule:
    """Move half of one cell's mass to another first-agent alternative."""
    xs, ys = rule.x_set, rule.y_set
    if len(xs) < 2 or len(ys) < 2:
        raise ValueError("violating mode needs at least two alternatives per agent")
    candidates = [(a, b) for (a, b) in rule.tables if popcount(a) >= 2]
    a, b = candidates[rng.randrange(len(candidates))]
    cells = dict(rule.tables[(a, b)])
    (x, y), v = sorted(cells.items())[rng.randrange(len(cells))]
    others = [z for z in bits(a) if z != x]
    z = others[rng.randrange(len(others))]
    cells[(x, y)] = v - v / 2
    cells[(z, y)] = cells.get((z, y), ZERO) + v / 2
    tables = dict(rule.tables)
    tables[(a, b)] = cells
    return JointChoiceRule(xs, ys, tables, complete=rule.complete, signed=rule.signed)


def generate(spec: GeneratorSpec) -> Generated:
    """Deterministic instance for ``spec`` (same spec, same output)."""
    rng = random.Random(spec.seed)
    xs, ys = alternative_sets(spec.nx, spec.ny)
    if spec.mode in ("probability", "signed"):
        measure = random_pair_measure(rng, xs, ys, spec.k, signed=spec.mode == "signed")
        return Generated(spec, induce_from_order_pairs(measure, validate=False), measure)
    if spec.mode == "arbitrary":
        tables = {}
        for a in xs.subsets():
            for b in ys.subsets():
                keys = [(x, y) for x in bits(a) for y in bits(b)]
                tables[(a, b)] = dict(zip(keys, _simplex_point(rng, len(keys))))
        return Generated(spec, JointChoiceRule(xs, ys, tables))
    base = random_pair_measure(rng, xs, ys, spec.k)
    return Generated(spec, _violate(rng, induce_from_order_pairs(base)), None)


def random_choice_rule(seed: int, n: int, negative: bool = False) -> RandomChoiceRule:
    """Random single-agent rule; ``negative`` plants a negative polynomial.

    The planted pattern picks ``a`` with ``p(a, {a, z}) = 1`` for every ``z``
    and ``p(a, A) = 0`` on larger menus, so ``q(a, {a}) = 2 - n`` (negative
    once ``n >= 3``).
    """
    rng = random.Random(seed)
    g = AlternativeSet(tuple(f"x{i + 1}" for i in range(n)))
    a0 = rng.randrange(n) if negative else None
    probs = {}
    for menu in g.subsets():
        members = bits(menu)
        if a0 is not None and menu >> a0 & 1 and len(members) >= 2:
            if len(members) == 2:
                probs[(a0, menu)] = Fraction(1)
                continue
            rest = [m for m in members if m != a0]
            for m, v in zip(rest, _simplex_point(rng, len(rest))):
                probs[(m, menu)] = v
            continue
        for m, v in zip(members, _simplex_point(rng, len(members))):
            probs[(m, menu)] = v
    return RandomChoiceRule(g, probs)


def load_fixture_file(name: str) -> JointChoiceRule:
    from .io import parse_dataset

    return parse_dataset((FIXTURE_DIR / f"{name}.json").read_text())

