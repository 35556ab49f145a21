"""Block-Marschak polynomials and the axiom checks built on them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import (
    AlternativeSet,
    ChoiceError,
    JointChoiceRule,
    MarginalityError,
    RandomChoiceRule,
    ZERO,
    bits,
    marginal_rules,
    popcount,
    supersets,
)


class InternalError(RuntimeError):
    """An algorithmic invariant failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class Witness:
    """One violated identity: ``lhs != rhs`` (or ``lhs < 0``) at ``where``."""

    identity: str
    where: dict
    lhs: Fraction
    rhs: Fraction = ZERO

    def to_dict(self) -> dict:
        return {"identity": self.identity, "where": self.where,
                "lhs": str(self.lhs), "rhs": str(self.rhs)}


@dataclass(frozen=True)
class AxiomReport:
    name: str
    witnesses: tuple[Witness, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.witnesses

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"axiom": self.name, "verdict": self.verdict,
                "witnesses": [w.to_dict() for w in self.witnesses]}


# -- single agent ------------------------------------------------------------

def single_bm(rule: RandomChoiceRule) -> dict[tuple[int, int], Fraction]:
    """Single-agent polynomials ``q(x, A)`` by alternating sums over supersets."""
    full = rule.ground.full
    q = {}
    for a in rule.ground.subsets():
        for x in bits(a):
            total = ZERO
            for sup in supersets(a, full):
                v = rule[(x, sup)]
                if v:
                    total += v if popcount(sup ^ a) % 2 == 0 else -v
            q[(x, a)] = total
    return q


def single_reconstruct(ground: AlternativeSet, q: Mapping[tuple[int, int], Fraction]) -> dict:
    """Inverse of :func:`single_bm`: ``p(x, A) = sum of q(x, A')`` over ``A' >= A``."""
    full = ground.full
    return {(x, a): sum((q.get((x, s), ZERO) for s in supersets(a, full)), ZERO)
            for a in ground.subsets() for x in bits(a)}


# -- two agents ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockMarschakTable:
    """Joint polynomials ``q(x, y | A, B)`` plus per-agent marginal polynomials.

    ``joint`` holds every entry with ``x in A``, ``y in B`` (zeros included).
    The marginals are ``None`` when the source rule violates marginality.
    """

    x_set: AlternativeSet
    y_set: AlternativeSet
    joint: dict[tuple[int, int, int, int], Fraction]
    marginal1: dict[tuple[int, int], Fraction] | None = None
    marginal2: dict[tuple[int, int], Fraction] | None = None
    source: JointChoiceRule | None = field(default=None, repr=False)

    def q(self, x: int, y: int, a: int, b: int) -> Fraction:
        return self.joint.get((x, y, a, b), ZERO)

    def value(self, x: str, y: str, a, b) -> Fraction:
        """Label-level lookup: ``bm.value("c", "z", "c d", "y z")``."""
        xs, ys = self.x_set, self.y_set
        return self.q(xs.index(x), ys.index(y), xs.mask(a), ys.mask(b))

    def nonzero(self) -> dict[tuple[int, int, int, int], Fraction]:
        return {k: v for k, v in self.joint.items() if v != 0}

    def transpose(self) -> BlockMarschakTable:
        joint = {(y, x, b, a): v for (x, y, a, b), v in self.joint.items()}
        return BlockMarschakTable(
            self.y_set, self.x_set, joint, self.marginal2, self.marginal1,
            self.source.transpose() if self.source is not None else None)


def _tuples(x_set: AlternativeSet, y_set: AlternativeSet):
    for a in x_set.subsets():
        for b in y_set.subsets():
            for x in bits(a):
                for y in bits(b):
                    yield x, y, a, b


def bm_direct(rule: JointChoiceRule) -> dict[tuple[int, int, int, int], Fraction]:
    """Alternating sum with the product-lattice sign, entry by entry."""
    rule.require_complete()
    fx, fy = rule.x_set.full, rule.y_set.full
    out = {}
    for x, y, a, b in _tuples(rule.x_set, rule.y_set):
        total = ZERO
        for a2 in supersets(a, fx):
            sa = popcount(a2 ^ a)
            for b2 in supersets(b, fy):
                v = rule.tables[(a2, b2)].get((x, y))
                if v:
                    total += v if (sa + popcount(b2 ^ b)) % 2 == 0 else -v
        out[(x, y, a, b)] = total
    return out


def bm_recursive(rule: JointChoiceRule) -> dict[tuple[int, int, int, int], Fraction]:
    """``q = p - sum of q over strict product supersets``, largest sets first."""
    rule.require_complete()
    xs, ys = rule.x_set, rule.y_set
    fx, fy = xs.full, ys.full
    pairs = sorted(((a, b) for a in xs.subsets() for b in ys.subsets()),
                   key=lambda ab: (-(popcount(ab[0]) + popcount(ab[1])), ab))
    q: dict[tuple[int, int, int, int], Fraction] = {}
    for a, b in pairs:
        cells = rule.tables[(a, b)]
        for x in bits(a):
            for y in bits(b):
                total = cells.get((x, y), ZERO)
                for a2 in supersets(a, fx):
                    for b2 in supersets(b, fy):
                        if a2 == a and b2 == b:
                            continue
                        total -= q[(x, y, a2, b2)]
                q[(x, y, a, b)] = total
    return q


def check_marginality(rule: JointChoiceRule, allow_partial: bool = False) -> AxiomReport:
    """Each agent's choice frequencies must not depend on the other's budget.

    Complete rules compare every row sum with the one at the opposite
    agent's full set. With ``allow_partial`` the reference is the first
    present table sharing the same own-budget.
    """
    if not allow_partial:
        rule.require_complete()
    xs, ys = rule.x_set, rule.y_set
    witnesses = []
    for agent in (1, 2):
        groups: dict[int, list[int]] = {}
        for a, b in rule.tables:
            own, other = (a, b) if agent == 1 else (b, a)
            groups.setdefault(own, []).append(other)
        own_set, other_set = (xs, ys) if agent == 1 else (ys, xs)
        for own, others in sorted(groups.items()):
            others = sorted(others)
            if not allow_partial:
                others.remove(other_set.full)
                others.insert(0, other_set.full)
            sums = []
            for other in others:
                key = (own, other) if agent == 1 else (other, own)
                row: dict[int, Fraction] = {}
                for (x, y), v in rule.tables[key].items():
                    i = x if agent == 1 else y
                    row[i] = row.get(i, ZERO) + v
                sums.append(row)
            ref = sums[0]
            for other, row in zip(others[1:], sums[1:]):
                for i in bits(own):
                    if row.get(i, ZERO) != ref.get(i, ZERO):
                        witnesses.append(Witness(
                            "marginality", {
                                "agent": agent,
                                "alternative": own_set.labels[i],
                                "own_budget": own_set.names(own),
                                "other_budget": other_set.names(other),
                                "reference_budget": other_set.names(others[0]),
                            }, row.get(i, ZERO), ref.get(i, ZERO)))
    return AxiomReport("marginality", tuple(witnesses))


def bm_marginal(rule: JointChoiceRule, agent: int) -> dict[tuple[int, int], Fraction]:
    """Single-agent polynomials of one agent's marginal rule."""
    if not check_marginality(rule):
        raise MarginalityError("marginal polynomials need a rule satisfying marginality")
    p1, p2 = marginal_rules(rule, check=False)
    return single_bm(p1 if agent == 1 else p2)


def bm_joint(rule: JointChoiceRule) -> BlockMarschakTable:
    """Joint polynomials, computed recursively and checked against the direct sum."""
    rec = bm_recursive(rule)
    direct = bm_direct(rule)
    if rec != direct:
        bad = next(k for k in rec if rec[k] != direct[k])
        raise InternalError(f"recursive and direct polynomials disagree at {bad}")
    m1 = m2 = None
    if check_marginality(rule):
        p1, p2 = marginal_rules(rule, check=False)
        m1, m2 = single_bm(p1), single_bm(p2)
    return BlockMarschakTable(rule.x_set, rule.y_set, rec, m1, m2, rule)


def check_nonnegativity(bm: BlockMarschakTable) -> AxiomReport:
    xs, ys = bm.x_set, bm.y_set
    witnesses = tuple(
        Witness("non-negativity", {"x": xs.labels[x], "y": ys.labels[y],
                                   "A": xs.names(a), "B": ys.names(b)}, v)
        for (x, y, a, b), v in sorted(bm.joint.items(), key=lambda kv: (kv[0][2], kv[0][3], kv[0][0], kv[0][1]))
        if v < 0)
    return AxiomReport("non-negativity", witnesses)


def check_recursivity(bm: BlockMarschakTable) -> AxiomReport:
    """Flow conservation of the polynomials across each agent's lattice.

    For non-empty ``A != X``, each ``B`` and ``y in B``:
    ``sum_{x in A} q(x,y|A,B) == sum_{z not in A} q(z,y|A+z,B)``; likewise
    with the agents' roles exchanged.
    """
    xs, ys = bm.x_set, bm.y_set
    q = bm.q
    witnesses = []
    for a in xs.subsets():
        if a == xs.full:
            continue
        outside = bits(xs.full & ~a)
        for b in ys.subsets():
            for y in bits(b):
                lhs = sum((q(x, y, a, b) for x in bits(a)), ZERO)
                rhs = sum((q(z, y, a | 1 << z, b) for z in outside), ZERO)
                if lhs != rhs:
                    witnesses.append(Witness("recursivity", {
                        "agent": 1, "A": xs.names(a), "B": ys.names(b),
                        "y": ys.labels[y]}, lhs, rhs))
    for b in ys.subsets():
        if b == ys.full:
            continue
        outside = bits(ys.full & ~b)
        for a in xs.subsets():
            for x in bits(a):
                lhs = sum((q(x, y, a, b) for y in bits(b)), ZERO)
                rhs = sum((q(x, z, a, b | 1 << z) for z in outside), ZERO)
                if lhs != rhs:
                    witnesses.append(Witness("recursivity", {
                        "agent": 2, "A": xs.names(a), "B": ys.names(b),
                        "x": xs.labels[x]}, lhs, rhs))
    return AxiomReport("recursivity", tuple(witnesses))


def reconstruct_cells(bm: BlockMarschakTable) -> dict[tuple[int, int], dict[tuple[int, int], Fraction]]:
    """``p(x,y|A,B)`` as the sum of ``q`` over product supersets, unvalidated."""
    xs, ys = bm.x_set, bm.y_set
    fx, fy = xs.full, ys.full
    tables: dict = {}
    for x, y, a, b in _tuples(xs, ys):
        total = ZERO
        for a2 in supersets(a, fx):
            for b2 in supersets(b, fy):
                total += bm.q(x, y, a2, b2)
        tables.setdefault((a, b), {})[(x, y)] = total
    return tables


def reconstruct_p(bm: BlockMarschakTable) -> JointChoiceRule:
    cells = reconstruct_cells(bm)
    try:
        return JointChoiceRule(bm.x_set, bm.y_set, cells, complete=True, signed=True)
    except ChoiceError as exc:
        raise ChoiceError(f"polynomials do not invert to a choice rule: {exc}") from exc


def bm_to_dict(bm: BlockMarschakTable) -> dict:
    """Nonzero entries, largest sets first, then ascending bitsets."""
    xs, ys = bm.x_set, bm.y_set
    keys = sorted(bm.nonzero(), key=lambda k: (-popcount(k[2]), -popcount(k[3]), k[2], k[3], k[0], k[1]))
    return {"X": list(xs.labels), "Y": list(ys.labels), "entries": [
        {"x": xs.labels[x], "y": ys.labels[y], "A": xs.names(a), "B": ys.names(b),
         "q": str(bm.joint[(x, y, a, b)])} for x, y, a, b in keys]}


def marginal_to_dict(ground: AlternativeSet, q: Mapping[tuple[int, int], Fraction]) -> dict:
    keys = sorted((k for k, v in q.items() if v != 0), key=lambda k: (-popcount(k[1]), k[1], k[0]))
    return {"X": list(ground.labels), "entries": [
        {"x": ground.labels[x], "A": ground.names(a), "q": str(q[(x, a)])} for x, a in keys]}


def bm_json(bm: BlockMarschakTable) -> str:
    return json.dumps(bm_to_dict(bm), indent=2) + "\n"
