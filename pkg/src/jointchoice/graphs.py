"""Flow graphs on subset lattices and the marginal graph system.

A lattice flow graph over ground set ``G`` has one node per subset of ``G``
and an edge ``A -> A - {x}`` for every ``x in A``, keyed ``(x, A)``. A maximal
chain ``G = A_0 > A_1 > ... > A_n = {}`` corresponds to the ranking that
removes ``A_0 - A_1`` first, ``A_1 - A_2`` second, and so on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

from .core import AlternativeSet, ChoiceError, LinearOrder, MarginalityError, ZERO, bits, popcount
from .moebius import AxiomReport, BlockMarschakTable, Witness, check_marginality

DEFAULT_PATH_CAP = 10_000


class PathCountError(ChoiceError):
    """Too many supported paths to materialize."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} supported paths exceed the cap of {cap}")
        self.count = count
        self.cap = cap


class NegativeCapacityError(ChoiceError):
    pass


@dataclass(frozen=True, eq=False)
class LatticeFlowGraph:
    """Edge capacities ``capacity[(x, A)]`` for the edge ``A -> A - {x}``.

    Zero capacities may be omitted; negative ones are allowed.
    """

    ground: AlternativeSet
    capacity: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        full = self.ground.full
        clean = {}
        for (x, a), v in self.capacity.items():
            if a <= 0 or a & ~full or not a >> x & 1:
                raise ChoiceError(f"no edge ({x}, {a}) in the lattice")
            if v != 0:
                clean[(x, a)] = Fraction(v)
        object.__setattr__(self, "capacity", clean)

    def __eq__(self, other):
        if not isinstance(other, LatticeFlowGraph):
            return NotImplemented
        return self.ground == other.ground and self.capacity == other.capacity

    def cap(self, x: int, a: int) -> Fraction:
        return self.capacity.get((x, a), ZERO)

    def edges(self) -> list[tuple[int, int]]:
        """Every lattice edge, ordered by ``(|A|, A, x)``."""
        return [(x, a) for a in sorted(self.ground.subsets(), key=lambda s: (popcount(s), s))
                for x in bits(a)]

    def is_zero(self) -> bool:
        return not self.capacity

    def to_dict(self) -> dict:
        g = self.ground
        return {"ground": list(g.labels), "edges": [
            {"from": g.names(a), "to": g.names(a & ~(1 << x)), "cap": str(v)}
            for (x, a), v in sorted(self.capacity.items(), key=lambda kv: (-popcount(kv[0][1]), kv[0][1], kv[0][0]))]}

    def to_dot(self, name: str = "lattice") -> str:
        g = self.ground

        def node(mask):
            return '"{' + ",".join(g.names(mask)) + '}"'

        lines = [f'digraph "{name}" {{', "  rankdir=TB;"]
        for (x, a), v in sorted(self.capacity.items(), key=lambda kv: (-popcount(kv[0][1]), kv[0][1], kv[0][0])):
            lines.append(f'  {node(a)} -> {node(a & ~(1 << x))} [label="{v}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class MarginalGraphSystem:
    """Lead agent's marginal graph plus one conditional graph per lead edge."""

    lead_agent: int
    marginal: LatticeFlowGraph
    conditionals: dict[tuple[int, int], LatticeFlowGraph]

    def to_dict(self) -> dict:
        g = self.marginal.ground
        return {"lead_agent": self.lead_agent, "marginal": self.marginal.to_dict(),
                "conditionals": [{"x": g.labels[x], "A": g.names(a), "graph": graph.to_dict()}
                                 for (x, a), graph in self.conditionals.items()]}


def build_system(bm: BlockMarschakTable, lead_agent: int = 1) -> MarginalGraphSystem:
    if lead_agent not in (1, 2):
        raise ValueError("lead_agent must be 1 or 2")
    if bm.marginal1 is None or bm.marginal2 is None:
        if bm.source is not None and not check_marginality(bm.source):
            raise MarginalityError("marginal graph system needs a rule satisfying marginality")
        raise MarginalityError("polynomial table carries no marginal polynomials")
    if lead_agent == 2:
        bm = bm.transpose()
    lead, other = bm.x_set, bm.y_set
    marginal = LatticeFlowGraph(lead, bm.marginal1)
    per_edge: dict[tuple[int, int], dict] = {(x, a): {} for a in lead.subsets() for x in bits(a)}
    for (x, y, a, b), v in bm.joint.items():
        if v != 0:
            per_edge[(x, a)][(y, b)] = v
    conditionals = {key: LatticeFlowGraph(other, caps) for key, caps in per_edge.items()}
    return MarginalGraphSystem(lead_agent, marginal, conditionals)


# -- paths ----------------------------------------------------------------------

@dataclass(frozen=True)
class LatticePath:
    """Maximal chain of bitsets from the full set down to the empty set."""

    sets: tuple[int, ...]

    def __post_init__(self):
        s = self.sets
        if s[-1] != 0:
            raise ChoiceError("a lattice path ends at the empty set")
        for big, small in zip(s, s[1:]):
            if small & ~big or popcount(big ^ small) != 1:
                raise ChoiceError(f"{big} -> {small} is not a lattice edge")

    @property
    def ranking(self) -> tuple[int, ...]:
        return tuple(bits(big ^ small)[0] for big, small in zip(self.sets, self.sets[1:]))

    def edges(self) -> list[tuple[int, int]]:
        """``(x, A)`` keys in path order."""
        return [(bits(big ^ small)[0], big) for big, small in zip(self.sets, self.sets[1:])]


def ranking_path(ranking: tuple[int, ...]) -> LatticePath:
    full = (1 << len(ranking)) - 1
    sets = [full]
    for i in ranking:
        sets.append(sets[-1] & ~(1 << i))
    return LatticePath(tuple(sets))


def order_to_path(order: LinearOrder) -> LatticePath:
    return ranking_path(order.ranking)


def path_to_order(path: LatticePath, ground: AlternativeSet) -> LinearOrder:
    if path.sets[0] != ground.full:
        raise ChoiceError("path does not start at the ground set")
    return LinearOrder(ground, path.ranking)


def path_edges(ranking: tuple[int, ...]) -> list[tuple[int, int]]:
    """Edges ``(x, A)`` used by the path of ``ranking``, top to bottom."""
    a = (1 << len(ranking)) - 1
    out = []
    for i in ranking:
        out.append((i, a))
        a &= ~(1 << i)
    return out


# -- checks ---------------------------------------------------------------------

def flow_conservation(graph: LatticeFlowGraph) -> AxiomReport:
    """Inflow equals outflow at every node strictly between the ground set and {}."""
    g = graph.ground
    full = g.full
    witnesses = []
    for a in g.subsets():
        if a == full:
            continue
        inflow = sum((graph.cap(z, a | 1 << z) for z in bits(full & ~a)), ZERO)
        outflow = sum((graph.cap(x, a) for x in bits(a)), ZERO)
        if inflow != outflow:
            witnesses.append(Witness("flow-conservation", {"node": g.names(a)}, inflow, outflow))
    return AxiomReport("flow-conservation", tuple(witnesses))


def _require_nonnegative(graph: LatticeFlowGraph):
    neg = [(x, a) for (x, a), v in graph.capacity.items() if v < 0]
    if neg:
        x, a = neg[0]
        raise NegativeCapacityError(
            f"negative capacity on edge ({graph.ground.labels[x]}, {graph.ground.names(a)})")


def count_supported_paths(graph: LatticeFlowGraph) -> int:
    _require_nonnegative(graph)
    memo = {0: 1}

    def count(a):
        if a not in memo:
            memo[a] = sum(count(a & ~(1 << x)) for x in bits(a) if graph.cap(x, a) > 0)
        return memo[a]

    return count(graph.ground.full)


def supported_paths(graph: LatticeFlowGraph, cap: int = DEFAULT_PATH_CAP) -> list[LatticePath]:
    """Maximal chains whose every edge has positive capacity.

    Output is sorted by ranking (lexicographic on removal order). The count
    is computed first; more than ``cap`` paths raises :class:`PathCountError`.
    """
    n = count_supported_paths(graph)
    if n > cap:
        raise PathCountError(n, cap)
    out: list[LatticePath] = []

    def descend(a, chain):
        if a == 0:
            out.append(LatticePath(tuple(chain)))
            return
        for x in bits(a):
            if graph.cap(x, a) > 0:
                child = a & ~(1 << x)
                chain.append(child)
                descend(child, chain)
                chain.pop()

    descend(graph.ground.full, [graph.ground.full])
    return out


class Branching(NamedTuple):
    branching: bool
    in_branching: bool
    out_branching: bool


def branching_relation(p: LatticePath, r: LatticePath) -> Branching:
    """The three pairwise definitions, evaluated on indices ``1..n-1``."""
    a, b = p.sets, r.sets
    if len(a) != len(b) or a[0] != b[0]:
        raise ChoiceError("paths must share a ground set")
    n = len(a) - 1
    inner = range(1, n)
    in_b = any(a[i] == b[i] and a[i - 1] != b[i - 1] for i in inner)
    out_b = any(a[i] == b[i] and a[i + 1] != b[i + 1] for i in inner)
    br = False
    for i in inner:
        if a[i - 1] == b[i - 1] or a[i] != b[i]:
            continue
        j = i
        while j + 1 < n and a[j + 1] == b[j + 1]:
            j += 1
        if j <= n - 1 and a[j + 1] != b[j + 1]:
            br = True
            break
    return Branching(br, in_b, out_b)


@dataclass(frozen=True)
class UniqueRumCheck:
    passed: bool
    paths: tuple[LatticePath, ...]
    certificate: dict[LatticePath, tuple[int, int]]
    unresolved: tuple[LatticePath, ...] = ()

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _in_branch_at(p, r, i):
    return p[i] == r[i] and p[i - 1] != r[i - 1]


def _out_branch_at(p, r, i):
    return p[i] == r[i] and p[i + 1] != r[i + 1]


def unique_rum_check(marginal: LatticeFlowGraph | Mapping[tuple[int, int], Fraction],
                     ground: AlternativeSet | None = None,
                     cap: int = DEFAULT_PATH_CAP) -> UniqueRumCheck:
    """Edge-uniqueness test for a random utility marginal.

    Passes when every supported path has an edge no other supported path
    uses, such that no other supported path joins it at or above the edge's
    upper node and none leaves it at or below the edge's lower node. The
    first qualifying edge in path order is the certificate.
    """
    graph = marginal if isinstance(marginal, LatticeFlowGraph) else LatticeFlowGraph(ground, marginal)
    _require_nonnegative(graph)
    paths = supported_paths(graph, cap)
    usage: dict[tuple[int, int], int] = {}
    for p in paths:
        for e in p.edges():
            usage[e] = usage.get(e, 0) + 1
    n = len(graph.ground)
    certificate = {}
    unresolved = []
    for p in paths:
        others = [r.sets for r in paths if r is not p]
        found = None
        for k, e in enumerate(p.edges()):
            if usage[e] != 1:
                continue
            # the edge runs from node k to node k + 1
            above_ok = all(not _in_branch_at(p.sets, r, i) for r in others for i in range(1, k + 1))
            below_ok = all(not _out_branch_at(p.sets, r, i) for r in others for i in range(k + 1, n))
            if above_ok and below_ok:
                found = e
                break
        if found is None:
            unresolved.append(p)
        else:
            certificate[p] = found
    return UniqueRumCheck(not unresolved, tuple(paths), certificate, tuple(unresolved))


def graph_json(graph: LatticeFlowGraph) -> str:
    return json.dumps(graph.to_dict(), indent=2) + "\n"
