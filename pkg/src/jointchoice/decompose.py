"""Constructive decompositions into (signed) measures over orders.

* :func:`strip_signed_flow` turns a conserving lattice flow, possibly with
  negative edges, into signed weights on orders.
* :func:`decompose_choice_rule` applies it to a single-agent rule.
* :func:`decompose_joint_rule` writes any marginality-satisfying joint rule as
  a signed measure over order pairs.
* :func:`recover_separable_rum` builds a probability measure over order pairs
  when one marginal has a unique random utility representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import (
    ChoiceError,
    JointChoiceRule,
    MarginalityError,
    RandomChoiceRule,
    SignedOrderMeasure,
    SignedPairMeasure,
    ZERO,
    bits,
    popcount,
)
from .graphs import (
    DEFAULT_PATH_CAP,
    LatticeFlowGraph,
    build_system,
    flow_conservation,
    path_edges,
    unique_rum_check,
)
from .moebius import (
    BlockMarschakTable,
    InternalError,
    bm_joint,
    check_marginality,
    check_nonnegativity,
    check_recursivity,
    single_bm,
)

Trace = Callable[[dict], None]


class FlowConservationError(ChoiceError):
    pass


class PreconditionError(ChoiceError):
    """A named precondition of a recovery algorithm fails."""


@dataclass(frozen=True)
class PathFlowStep:
    ranking: tuple[int, ...]
    amount: Fraction
    phase: str  # "negative-stripping" | "positive-stripping"
    edge: tuple[int, int] | None = None
    negative_edges_left: int = 0


@dataclass
class StripResult:
    weights: dict[tuple[int, ...], Fraction]
    steps: list[PathFlowStep] = field(default_factory=list)

    @property
    def phase1_iterations(self) -> int:
        return sum(s.phase == "negative-stripping" for s in self.steps)

    @property
    def phase2_iterations(self) -> int:
        return sum(s.phase == "positive-stripping" for s in self.steps)


def _edge_key(edge: tuple[int, int]):
    x, a = edge
    return popcount(a), a, x


def _canonical_path_through(n: int, x: int, a: int) -> tuple[int, ...]:
    """Ranking ``(outside a ascending) + x + (rest of a ascending)``."""
    full = (1 << n) - 1
    return tuple(bits(full & ~a)) + (x,) + tuple(i for i in bits(a) if i != x)


def _emit(trace: Trace | None, event: dict):
    if trace is not None:
        trace(event)


def strip_signed_flow(graph: LatticeFlowGraph, trace: Trace | None = None,
                      phases: tuple[str, ...] = ("negative", "positive")) -> StripResult:
    """Split a conserving lattice flow into weights on orders.

    Phase 1 repeatedly takes the most negative edge (ties by ``|A|``, then
    bitset ``A``, then ``x``), and subtracts its value along a fixed path
    through it, which zeroes that edge and raises the rest of the path.
    Phase 2 then peels nonnegative paths, each at its minimum capacity,
    descending greedily through the lowest-index positive edge. The weights
    ``f`` satisfy ``sum of f over orders whose path uses (x, A) == capacity``.
    """
    report = flow_conservation(graph)
    if not report.passed:
        node = report.witnesses[0].where["node"]
        raise FlowConservationError(f"inflow differs from outflow at node {node}")
    n = len(graph.ground)
    cap = dict(graph.capacity)
    weights: dict[tuple[int, ...], Fraction] = {}
    steps: list[PathFlowStep] = []
    n_edges = n * (1 << (n - 1))

    def add(ranking, amount):
        weights[ranking] = weights.get(ranking, ZERO) + amount

    def subtract_path(ranking, amount):
        for e in path_edges(ranking):
            v = cap.get(e, ZERO) - amount
            if v == 0:
                cap.pop(e, None)
            else:
                cap[e] = v

    if "negative" in phases:
        bound = sum(1 for v in cap.values() if v < 0)
        for _ in range(bound + 1):
            negative = [e for e, v in cap.items() if v < 0]
            if not negative:
                break
            r = min(cap[e] for e in negative)
            edge = min((e for e in negative if cap[e] == r), key=_edge_key)
            ranking = _canonical_path_through(n, *edge)
            subtract_path(ranking, r)
            add(ranking, r)
            left = sum(1 for v in cap.values() if v < 0)
            steps.append(PathFlowStep(ranking, r, "negative-stripping", edge, left))
            _emit(trace, {"phase": "negative-stripping", "edge": list(edge), "ranking": list(ranking),
                          "amount": str(r), "negative_edges_left": left})
        else:
            raise InternalError("negative stripping did not terminate within its bound")
    elif any(v < 0 for v in cap.values()):
        raise ChoiceError("positive stripping needs nonnegative capacities")

    full = (1 << n) - 1
    for _ in range(n_edges + 1):
        if not cap:
            break
        ranking = []
        a = full
        while a:
            x = next((i for i in bits(a) if cap.get((i, a), ZERO) > 0), None)
            if x is None:
                raise InternalError("positive flow reached a node with no positive exit")
            ranking.append(x)
            a &= ~(1 << x)
        ranking = tuple(ranking)
        r = min(cap[e] for e in path_edges(ranking))
        subtract_path(ranking, r)
        add(ranking, r)
        steps.append(PathFlowStep(ranking, r, "positive-stripping"))
        _emit(trace, {"phase": "positive-stripping", "ranking": list(ranking), "amount": str(r),
                      "negative_edges_left": 0})
    else:
        raise InternalError("positive stripping did not terminate within its bound")
    return StripResult({k: v for k, v in sorted(weights.items()) if v != 0}, steps)


def decompose_choice_rule(rule: RandomChoiceRule, trace: Trace | None = None) -> SignedOrderMeasure:
    """Signed measure over orders inducing an arbitrary single-agent rule."""
    graph = LatticeFlowGraph(rule.ground, single_bm(rule))
    return SignedOrderMeasure(rule.ground, strip_signed_flow(graph, trace).weights)


# -- joint rules ----------------------------------------------------------------

class _Residual:
    """Mutable copy of the joint polynomials, indexed by lead edge."""

    def __init__(self, bm: BlockMarschakTable):
        self.nx, self.ny = len(bm.x_set), len(bm.y_set)
        self.y_set = bm.y_set
        self.by_edge: dict[tuple[int, int], dict[tuple[int, int], Fraction]] = {}
        for (x, y, a, b), v in bm.joint.items():
            if v != 0:
                self.by_edge.setdefault((x, a), {})[(y, b)] = v
        self.marginal = dict(bm.marginal1) if bm.marginal1 is not None else None

    def graph(self, edge) -> LatticeFlowGraph:
        return LatticeFlowGraph(self.y_set, self.by_edge.get(edge, {}))

    def nonzero(self, edge) -> bool:
        return bool(self.by_edge.get(edge))

    def subtract_vector(self, lead_ranking, caps: dict[tuple[int, int], Fraction]):
        """Subtract ``caps`` (a conditional flow) from every edge on the lead path."""
        for edge in path_edges(lead_ranking):
            row = self.by_edge.setdefault(edge, {})
            for key, v in caps.items():
                nv = row.get(key, ZERO) - v
                if nv == 0:
                    row.pop(key, None)
                else:
                    row[key] = nv
            if not row:
                del self.by_edge[edge]

    def subtract_pairs(self, lead_ranking, g: dict[tuple[int, ...], Fraction]):
        caps: dict[tuple[int, int], Fraction] = {}
        for r2, w in g.items():
            for e in path_edges(r2):
                caps[e] = caps.get(e, ZERO) + w
        self.subtract_vector(lead_ranking, caps)

    def is_zero(self) -> bool:
        return not self.by_edge

    def as_table(self, bm: BlockMarschakTable) -> BlockMarschakTable:
        joint = {k: ZERO for k in bm.joint}
        for (x, a), row in self.by_edge.items():
            for (y, b), v in row.items():
                joint[(x, y, a, b)] = v
        return BlockMarschakTable(bm.x_set, bm.y_set, joint)


def _lead_ranking(n: int, x: int, a: int) -> tuple[int, ...]:
    """Outside ``a`` ascending from the top, then ``x``, then ``a - x`` ascending.

    For a fixed ``D = a - x`` every such ranking orders ``D`` identically at
    the bottom, which is what the level-by-level clearing relies on.
    """
    return _canonical_path_through(n, x, a)


def decompose_joint_rule(rule: JointChoiceRule, trace: Trace | None = None,
                         debug: bool = False) -> SignedPairMeasure:
    """Signed measure over order pairs that induces a marginal joint rule.

    Lead edges ``(x, A)`` are cleared by size: all doubletons first, then
    ``|A| = 3 .. |X| - 1`` grouped by ``D = A - x``. Each nonzero conditional
    graph is stripped into signed weights over the second agent's orders;
    those weights are attached to one canonical first-agent order through
    the edge and removed from every conditional graph along its path.
    Full-set edges clear by marginality once the smaller ones are zero.
    """
    rule.require_complete()
    if not check_marginality(rule):
        raise MarginalityError("decomposition into order pairs needs marginality")
    bm = bm_joint(rule)
    res = _Residual(bm)
    nx = len(rule.x_set)
    weights: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}

    def clear(edge):
        x, a = edge
        strip = strip_signed_flow(res.graph(edge))
        lead = _lead_ranking(nx, x, a)
        for r2, w in strip.weights.items():
            key = (lead, r2)
            weights[key] = weights.get(key, ZERO) + w
        res.subtract_pairs(lead, strip.weights)
        _emit(trace, {"step": "clear", "edge": {"x": rule.x_set.labels[x], "A": rule.x_set.names(a)},
                      "lead_ranking": [rule.x_set.labels[i] for i in lead],
                      "orders": len(strip.weights), "negative_edges": sum(
                          1 for row in res.by_edge.values() for v in row.values() if v < 0)})
        if debug and not check_recursivity(res.as_table(bm)):
            raise InternalError("residual polynomials lost recursivity")

    def edges_of_size(j):
        return [(x, a) for a in rule.x_set.subsets() if popcount(a) == j for x in bits(a)]

    if nx == 1:
        clear((0, 1))
    else:
        doubletons = edges_of_size(2)
        for _ in range(len(doubletons) + 1):
            pending = [e for e in doubletons if res.nonzero(e)]
            if not pending:
                break
            clear(pending[0])
        else:
            raise InternalError("doubleton phase did not terminate")
        for j in range(1, 3):
            if any(res.nonzero(e) for e in edges_of_size(j)):
                raise InternalError(f"size-{j} polynomials nonzero after the doubleton phase")
        for j in range(3, nx):
            groups: dict[int, list] = {}
            for x, a in edges_of_size(j):
                groups.setdefault(a & ~(1 << x), []).append((x, a))
            for d in sorted(groups):
                for edge in groups[d]:
                    if res.nonzero(edge):
                        clear(edge)
            for i in range(1, j + 1):
                if any(res.nonzero(e) for e in edges_of_size(i)):
                    raise InternalError(f"size-{i} polynomials nonzero after clearing size {j}")
    if not res.is_zero():
        raise InternalError("nonzero polynomials remain after decomposition")
    return SignedPairMeasure(rule.x_set, rule.y_set, weights)


def recover_separable_rum(rule: JointChoiceRule, lead: str | int = "auto",
                          trace: Trace | None = None,
                          cap: int = DEFAULT_PATH_CAP) -> SignedPairMeasure:
    """Probability measure over order pairs, given a uniquely identified marginal.

    Each supported path of the lead marginal has a certifying edge used by
    no other supported path. The conditional graph at that edge is peeled
    into nonnegative path flows, which become the weights of pairs with
    that lead order; the same flow is then removed from every conditional
    graph and marginal edge along the lead path.
    """
    rule.require_complete()
    if not check_marginality(rule):
        raise PreconditionError("marginality fails")
    bm = bm_joint(rule)
    if not check_nonnegativity(bm):
        raise PreconditionError("non-negativity fails")
    candidates = (1, 2) if lead == "auto" else (int(lead),)
    if any(c not in (1, 2) for c in candidates):
        raise ValueError("lead must be 'auto', 1 or 2")
    chosen = None
    for agent in candidates:
        system = build_system(bm, agent)
        check = unique_rum_check(system.marginal, cap=cap)
        if check.passed:
            chosen = agent, check
            break
    if chosen is None:
        if lead == "auto":
            raise PreconditionError("neither marginal uniquely rationalizable")
        raise PreconditionError(f"marginal of agent {lead} is not uniquely rationalizable")
    agent, check = chosen
    work = bm if agent == 1 else bm.transpose()
    lead_set = work.x_set
    res = _Residual(work)
    weights: dict = {}
    for path in check.paths:
        edge = check.certificate[path]
        lead_ranking = path.ranking
        amount = res.marginal.get(edge, ZERO)
        caps = dict(res.by_edge.get(edge, {}))
        strip = strip_signed_flow(res.graph(edge), phases=("positive",))
        total = sum(strip.weights.values(), ZERO)
        if total != amount:
            raise InternalError("conditional flow at a certifying edge does not match its marginal")
        for r2, w in strip.weights.items():
            weights[(lead_ranking, r2)] = weights.get((lead_ranking, r2), ZERO) + w
        res.subtract_vector(lead_ranking, caps)
        for e in path_edges(lead_ranking):
            nv = res.marginal.get(e, ZERO) - amount
            if nv < 0:
                raise InternalError("marginal flow became negative")
            res.marginal[e] = nv
        _emit(trace, {"step": "recover", "lead_ranking": [lead_set.labels[i] for i in lead_ranking],
                      "edge": {"x": lead_set.labels[edge[0]], "A": lead_set.names(edge[1])},
                      "amount": str(amount)})
    if not res.is_zero() or any(v != 0 for v in res.marginal.values()):
        raise InternalError("flow remains after recovery")
    if agent == 2:
        weights = {(r1, r2): w for (r2, r1), w in weights.items()}
    return SignedPairMeasure(rule.x_set, rule.y_set, weights)
