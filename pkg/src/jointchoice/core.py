"""Domain types for random joint choice data.

Subsets of an alternative set are encoded as integer bitsets over the
canonical label indices (label ``i`` is bit ``1 << i``). Every iteration over
subsets runs in ascending numeric bitset order, which fixes the tie-breaking
used by the decomposition algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping

ZERO = Fraction(0)
ONE = Fraction(1)


class ChoiceError(ValueError):
    """Base class for invalid choice data."""


class PartialRuleError(ChoiceError):
    """An operation needing every budget pair was given a partial rule."""


class MarginalityError(ChoiceError):
    """An operation needing marginality was given a rule that violates it."""


# -- bitset helpers ---------------------------------------------------------

def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> list[int]:
    """Indices set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def nonempty_subsets(full: int) -> list[int]:
    """All non-empty subsets of ``full`` in ascending bitset order."""
    return [s for s in range(1, full + 1) if s & full == s]


def supersets(mask: int, full: int) -> Iterator[int]:
    """Supersets of ``mask`` inside ``full`` (including ``mask`` itself)."""
    free = full & ~mask
    sub = free
    while True:
        yield mask | sub
        if sub == 0:
            break
        sub = (sub - 1) & free


def split_labels(labels: Iterable[str] | str) -> list[str]:
    """A string is read as whitespace- or comma-separated labels."""
    if isinstance(labels, str):
        return labels.replace(",", " ").split()
    return list(labels)


def as_fraction(value) -> Fraction:
    """Exact conversion of a string, int or Fraction; decimals stay exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ChoiceError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # repr gives the shortest decimal that round-trips
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ChoiceError(f"bad probability literal {value!r}") from exc
    raise ChoiceError(f"not a number: {value!r}")


# -- alternatives, budgets, orders -----------------------------------------

@dataclass(frozen=True)
class AlternativeSet:
    """Ordered, distinct labels. Position in ``labels`` is the canonical index."""

    labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ChoiceError("alternative set must be non-empty")
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise ChoiceError(f"labels must be non-empty strings, got {lab!r}")
        if len(set(labels)) != len(labels):
            raise ChoiceError(f"duplicate labels in {list(labels)}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ChoiceError(f"unknown alternative {label!r}") from None

    def mask(self, labels: Iterable[str] | str) -> int:
        """Bitset for a collection of labels (a string is split on spaces/commas)."""
        return mask_of(self.index(lab) for lab in split_labels(labels))

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def subsets(self) -> list[int]:
        return nonempty_subsets(self.full)


@dataclass(frozen=True)
class Budget:
    """A non-empty menu drawn from ``ground``."""

    ground: AlternativeSet
    members: int

    def __post_init__(self):
        if self.members <= 0 or self.members & ~self.ground.full:
            raise ChoiceError(f"invalid budget bitset {self.members}")

    @classmethod
    def of(cls, ground: AlternativeSet, labels: Iterable[str]) -> Budget:
        return cls(ground, ground.mask(labels))

    def labels(self) -> list[str]:
        return self.ground.names(self.members)


@dataclass(frozen=True)
class LinearOrder:
    """Strict total order given as a permutation of indices, best first."""

    ground: AlternativeSet
    ranking: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        if sorted(self.ranking) != list(range(len(self.ground))):
            raise ChoiceError(f"ranking {self.ranking} is not a permutation")

    @classmethod
    def from_labels(cls, ground: AlternativeSet, labels: Iterable[str] | str) -> LinearOrder:
        """``from_labels(g, "a b c")`` or ``from_labels(g, ["a", "b", "c"])``."""
        return cls(ground, tuple(ground.index(lab) for lab in split_labels(labels)))

    def labels(self) -> list[str]:
        return [self.ground.labels[i] for i in self.ranking]

    def __str__(self) -> str:
        return " > ".join(self.labels())


def maximal(order: LinearOrder | tuple[int, ...], menu: int | Budget) -> int:
    """Index of the best member of ``menu`` under ``order``."""
    ranking = order.ranking if isinstance(order, LinearOrder) else order
    if isinstance(menu, Budget):
        menu = menu.members
    if menu <= 0:
        raise ChoiceError("menu must be non-empty")
    for i in ranking:
        if menu >> i & 1:
            return i
    raise ChoiceError("menu is not contained in the order's ground set")


def all_rankings(n: int) -> list[tuple[int, ...]]:
    """All permutations of ``range(n)`` in lexicographic order."""
    return list(permutations(range(n)))


@dataclass(frozen=True)
class OrderPair:
    first: LinearOrder
    second: LinearOrder


@dataclass(frozen=True)
class ChoiceFunctionPair:
    """Deterministic choice for each agent, on a listed collection of menus.

    ``first`` and ``second`` are sorted tuples of ``(menu_bitset, chosen_index)``.
    """

    first: tuple[tuple[int, int], ...]
    second: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for part in (self.first, self.second):
            for menu, chosen in part:
                if not menu >> chosen & 1:
                    raise ChoiceError(f"choice {chosen} not in menu {menu}")
        object.__setattr__(self, "first", tuple(sorted(self.first)))
        object.__setattr__(self, "second", tuple(sorted(self.second)))

    def choose(self, a: int, b: int) -> tuple[int, int]:
        try:
            return dict(self.first)[a], dict(self.second)[b]
        except KeyError:
            raise ChoiceError(f"choice functions undefined at budget ({a}, {b})") from None


# -- choice rules -----------------------------------------------------------

Table = Mapping[tuple[int, int], Fraction]


def _clean_table(cells: Mapping[tuple[int, int], object]) -> dict[tuple[int, int], Fraction]:
    out = {}
    for key, val in cells.items():
        val = as_fraction(val)
        if val != 0:
            out[key] = val
    return dict(sorted(out.items()))


@dataclass(frozen=True, eq=False)
class JointChoiceRule:
    """A distribution over ``A x B`` for each budget pair ``(A, B)``.

    ``tables`` maps ``(A_bitset, B_bitset)`` to ``{(x, y): probability}``;
    zero cells are dropped. ``signed=True`` allows negative cells, which
    arise when a rule is induced by a signed measure.
    """

    x_set: AlternativeSet
    y_set: AlternativeSet
    tables: Mapping[tuple[int, int], Table]
    complete: bool = True
    signed: bool = False

    def __post_init__(self):
        tables = {}
        for (a, b), cells in sorted(self.tables.items()):
            if a <= 0 or a & ~self.x_set.full or b <= 0 or b & ~self.y_set.full:
                raise ChoiceError(f"invalid budget pair ({a}, {b})")
            cells = _clean_table(cells)
            for (x, y), val in cells.items():
                if not (a >> x & 1 and b >> y & 1):
                    raise ChoiceError(
                        f"cell ({self.x_set.labels[x]}, {self.y_set.labels[y]}) "
                        f"outside {self.x_set.names(a)} x {self.y_set.names(b)}")
                if val < 0 and not self.signed:
                    raise ChoiceError(
                        f"negative probability {val} at budget "
                        f"({self.x_set.names(a)}, {self.y_set.names(b)})")
            if sum(cells.values(), ZERO) != 1:
                raise ChoiceError(
                    f"table ({self.x_set.names(a)}, {self.y_set.names(b)}) "
                    f"does not sum to 1")
            tables[(a, b)] = cells
        if self.complete:
            want = len(self.x_set.subsets()) * len(self.y_set.subsets())
            if len(tables) != want:
                raise ChoiceError(
                    f"rule marked complete but has {len(tables)} of {want} budget pairs")
        object.__setattr__(self, "tables", tables)

    def __eq__(self, other):
        if not isinstance(other, JointChoiceRule):
            return NotImplemented
        return (self.x_set == other.x_set and self.y_set == other.y_set
                and self.complete == other.complete and self.tables == other.tables)

    def require_complete(self):
        if not self.complete:
            raise PartialRuleError("operation requires a complete rule (every budget pair)")

    def cell(self, x: int, y: int, a: int, b: int) -> Fraction:
        try:
            return self.tables[(a, b)].get((x, y), ZERO)
        except KeyError:
            raise PartialRuleError(
                f"no table for budget ({self.x_set.names(a)}, {self.y_set.names(b)})") from None

    def prob(self, x: str, y: str, a: Iterable[str] | str, b: Iterable[str] | str) -> Fraction:
        """Label-level lookup: ``rule.prob("c", "z", "c d", "y z")``."""
        xs, ys = self.x_set, self.y_set
        return self.cell(xs.index(x), ys.index(y), xs.mask(split_labels(a)), ys.mask(split_labels(b)))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for cells in self.tables.values() for v in cells.values())

    def transpose(self) -> JointChoiceRule:
        """Swap the roles of the two agents."""
        tables = {(b, a): {(y, x): v for (x, y), v in cells.items()}
                  for (a, b), cells in self.tables.items()}
        return JointChoiceRule(self.y_set, self.x_set, tables, self.complete, self.signed)


@dataclass(frozen=True, eq=False)
class RandomChoiceRule:
    """Single-agent random choice: ``probs[(x, A)]`` for ``x`` in ``A``."""

    ground: AlternativeSet
    probs: Mapping[tuple[int, int], Fraction]
    signed: bool = False

    def __post_init__(self):
        clean = {}
        totals: dict[int, Fraction] = {}
        for (x, a), val in self.probs.items():
            val = as_fraction(val)
            if a <= 0 or a & ~self.ground.full or not a >> x & 1:
                raise ChoiceError(f"invalid entry ({x}, {a})")
            if val < 0 and not self.signed:
                raise ChoiceError(f"negative probability at ({x}, {a})")
            totals[a] = totals.get(a, ZERO) + val
            if val != 0:
                clean[(x, a)] = val
        for a in self.ground.subsets():
            if totals.get(a, ZERO) != 1:
                raise ChoiceError(f"menu {self.ground.names(a)} does not sum to 1")
        object.__setattr__(self, "probs", dict(sorted(clean.items(), key=lambda kv: (kv[0][1], kv[0][0]))))

    def __eq__(self, other):
        if not isinstance(other, RandomChoiceRule):
            return NotImplemented
        return self.ground == other.ground and self.probs == other.probs

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.probs.get(key, ZERO)


# -- measures ----------------------------------------------------------------

def _clean_weights(weights: Mapping) -> dict:
    out = {}
    for key, w in weights.items():
        w = as_fraction(w)
        if w != 0:
            out[key] = out.get(key, ZERO) + w
    return {k: v for k, v in sorted(out.items()) if v != 0}


@dataclass(frozen=True, eq=False)
class SignedPairMeasure:
    """Finitely supported weights on pairs of rankings, summing to 1.

    Keys are ``(ranking_over_X, ranking_over_Y)`` index tuples, best first.
    """

    x_set: AlternativeSet
    y_set: AlternativeSet
    weights: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]

    def __post_init__(self):
        weights = _clean_weights(self.weights)
        nx, ny = len(self.x_set), len(self.y_set)
        for r1, r2 in weights:
            if sorted(r1) != list(range(nx)) or sorted(r2) != list(range(ny)):
                raise ChoiceError(f"malformed order pair {r1}, {r2}")
        if sum(weights.values(), ZERO) != 1:
            raise ChoiceError("measure weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        if not isinstance(other, SignedPairMeasure):
            return NotImplemented
        return (self.x_set, self.y_set, self.weights) == (other.x_set, other.y_set, other.weights)

    def is_nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights.values())

    def pairs(self) -> Iterator[tuple[OrderPair, Fraction]]:
        for (r1, r2), w in self.weights.items():
            yield OrderPair(LinearOrder(self.x_set, r1), LinearOrder(self.y_set, r2)), w

    def marginal(self, agent: int = 1) -> dict[tuple[int, ...], Fraction]:
        """Distribution of one agent's ranking."""
        out: dict[tuple[int, ...], Fraction] = {}
        for key, w in self.weights.items():
            r = key[agent - 1]
            out[r] = out.get(r, ZERO) + w
        return {r: w for r, w in sorted(out.items()) if w != 0}

    @classmethod
    def from_labels(cls, x_set, y_set, entries: Iterable[tuple[str, str, object]]) -> SignedPairMeasure:
        """Entries ``("a b c", "x y", "1/2")`` with rankings best first."""
        weights: dict = {}
        for first, second, w in entries:
            key = (LinearOrder.from_labels(x_set, first).ranking,
                   LinearOrder.from_labels(y_set, second).ranking)
            weights[key] = weights.get(key, ZERO) + as_fraction(w)
        return cls(x_set, y_set, weights)


@dataclass(frozen=True, eq=False)
class SignedOrderMeasure:
    ground: AlternativeSet
    weights: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        weights = _clean_weights(self.weights)
        for r in weights:
            if sorted(r) != list(range(len(self.ground))):
                raise ChoiceError(f"malformed order {r}")
        if sum(weights.values(), ZERO) != 1:
            raise ChoiceError("measure weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        if not isinstance(other, SignedOrderMeasure):
            return NotImplemented
        return (self.ground, self.weights) == (other.ground, other.weights)

    def is_nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights.values())


@dataclass(frozen=True, eq=False)
class SignedChoicePairMeasure:
    x_set: AlternativeSet
    y_set: AlternativeSet
    weights: Mapping[ChoiceFunctionPair, Fraction]

    def __post_init__(self):
        out: dict = {}
        for key, w in self.weights.items():
            w = as_fraction(w)
            out[key] = out.get(key, ZERO) + w
        weights = {k: v for k, v in sorted(out.items(), key=lambda kv: (kv[0].first, kv[0].second))
                   if v != 0}
        if sum(weights.values(), ZERO) != 1:
            raise ChoiceError("measure weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        if not isinstance(other, SignedChoicePairMeasure):
            return NotImplemented
        return (self.x_set, self.y_set, self.weights) == (other.x_set, other.y_set, other.weights)

    def is_nonnegative(self) -> bool:
        return all(w >= 0 for w in self.weights.values())


# -- inducing rules from measures ------------------------------------------

def _budget_list(x_set, y_set, budgets) -> tuple[list[tuple[int, int]], bool]:
    if budgets is None:
        return [(a, b) for a in x_set.subsets() for b in y_set.subsets()], True
    return sorted(set(budgets)), False


def _finish(x_set, y_set, tables, complete, nonnegative, validate):
    if validate is None:
        validate = nonnegative
    if validate:
        for (a, b), cells in tables.items():
            for (x, y), v in cells.items():
                if v < 0:
                    raise ChoiceError(
                        f"induced cell p({x_set.labels[x]}, {y_set.labels[y]} | "
                        f"{x_set.names(a)}, {y_set.names(b)}) = {v} is negative")
    return JointChoiceRule(x_set, y_set, tables, complete=complete, signed=not validate)


def induce_from_order_pairs(measure: SignedPairMeasure, budgets=None, validate=None) -> JointChoiceRule:
    """Rule obtained when each agent maximizes their own ranking.

    ``budgets`` is an iterable of ``(A_bitset, B_bitset)``; ``None`` means all
    pairs, giving a complete rule. Negative cells are rejected when
    ``validate`` is true; by default only nonnegative measures are validated.
    """
    xs, ys = measure.x_set, measure.y_set
    pairs, complete = _budget_list(xs, ys, budgets)
    best1: dict = {}
    best2: dict = {}
    tables: dict = {}
    for a, b in pairs:
        cells: dict[tuple[int, int], Fraction] = {}
        for (r1, r2), w in measure.weights.items():
            x = best1.get((r1, a))
            if x is None:
                x = best1[(r1, a)] = maximal(r1, a)
            y = best2.get((r2, b))
            if y is None:
                y = best2[(r2, b)] = maximal(r2, b)
            cells[(x, y)] = cells.get((x, y), ZERO) + w
        tables[(a, b)] = cells
    return _finish(xs, ys, tables, complete, measure.is_nonnegative(), validate)


def induce_from_choice_pairs(measure: SignedChoicePairMeasure, budgets=None, validate=None) -> JointChoiceRule:
    """Rule obtained by evaluating each choice-function pair on each budget."""
    xs, ys = measure.x_set, measure.y_set
    if budgets is None:
        firsts = {m for c in measure.weights for m, _ in c.first}
        seconds = {m for c in measure.weights for m, _ in c.second}
        pairs = sorted(product(firsts, seconds))
        complete = len(pairs) == len(xs.subsets()) * len(ys.subsets())
    else:
        pairs, complete = _budget_list(xs, ys, budgets)
    tables: dict = {}
    for a, b in pairs:
        cells: dict[tuple[int, int], Fraction] = {}
        for c, w in measure.weights.items():
            key = c.choose(a, b)
            cells[key] = cells.get(key, ZERO) + w
        tables[(a, b)] = cells
    return _finish(xs, ys, tables, complete, measure.is_nonnegative(), validate)


def induce_from_orders(measure: SignedOrderMeasure) -> RandomChoiceRule:
    probs: dict[tuple[int, int], Fraction] = {}
    for a in measure.ground.subsets():
        for r, w in measure.weights.items():
            key = (maximal(r, a), a)
            probs[key] = probs.get(key, ZERO) + w
    return RandomChoiceRule(measure.ground, probs, signed=not measure.is_nonnegative())


def marginal_rules(rule: JointChoiceRule, check: bool = True) -> tuple[RandomChoiceRule, RandomChoiceRule]:
    """Per-agent marginal rules, read at the opposite agent's full set.

    With ``check=False`` marginality is not verified; the result is then only
    the marginal at the full opposite budget.
    """
    if check:
        from .moebius import check_marginality

        report = check_marginality(rule)
        if not report.passed:
            raise MarginalityError(f"rule violates marginality ({len(report.witnesses)} witnesses)")
    xs, ys = rule.x_set, rule.y_set
    p1: dict[tuple[int, int], Fraction] = {}
    for a in xs.subsets():
        if (a, ys.full) not in rule.tables:
            raise PartialRuleError(f"missing table ({xs.names(a)}, Y)")
        for (x, _y), v in rule.tables[(a, ys.full)].items():
            p1[(x, a)] = p1.get((x, a), ZERO) + v
    p2: dict[tuple[int, int], Fraction] = {}
    for b in ys.subsets():
        if (xs.full, b) not in rule.tables:
            raise PartialRuleError(f"missing table (X, {ys.names(b)})")
        for (_x, y), v in rule.tables[(xs.full, b)].items():
            p2[(y, b)] = p2.get((y, b), ZERO) + v
    return (RandomChoiceRule(xs, p1, signed=rule.signed),
            RandomChoiceRule(ys, p2, signed=rule.signed))
