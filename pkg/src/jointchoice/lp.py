"""Exact two-phase simplex over rationals with Bland's rule.

Solves ``A x = b, x >= 0`` (feasibility) and optionally minimizes ``c x``.
Dense tableau of :class:`fractions.Fraction`; sized for desk-scale problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    phase1_objective: Fraction = ZERO
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


class ExactLP:
    """Tableau kept after phase 1 so several objectives can reuse it.

    >>> lp = ExactLP([[1, 1]], [1])
    >>> lp.feasible
    True
    >>> lp.minimize([1, 0]).x
    (Fraction(0, 1), Fraction(1, 1))
    """

    def __init__(self, rows: Sequence[Sequence], rhs: Sequence, n: int | None = None):
        m = len(rows)
        n = len(rows[0]) if n is None else n
        self.m, self.n = m, n
        self.pivots = 0
        # columns 0..n-1 are structural, n..n+m-1 artificial; last entry is the rhs
        tab = []
        for i, (row, b) in enumerate(zip(rows, rhs)):
            row = [Fraction(v) for v in row]
            b = Fraction(b)
            if len(row) != n:
                raise ValueError("ragged constraint matrix")
            if b < 0:
                row = [-v for v in row]
                b = -b
            art = [ZERO] * m
            art[i] = Fraction(1)
            tab.append(row + art + [b])
        self.tab = tab
        self.basis = [n + i for i in range(m)]
        self.alive = [True] * m
        self._phase1()

    # -- core pivoting -----------------------------------------------------

    def _pivot(self, r: int, c: int, obj: list[Fraction] | None):
        tab = self.tab
        prow = tab[r]
        piv = prow[c]
        if piv != 1:
            prow = tab[r] = [v / piv for v in prow]
        nz = [j for j, v in enumerate(prow) if v != 0]
        for i, row in enumerate(tab):
            if i == r or not self.alive[i]:
                continue
            f = row[c]
            if f != 0:
                for j in nz:
                    row[j] -= f * prow[j]
        if obj is not None:
            f = obj[c]
            if f != 0:
                for j in nz:
                    obj[j] -= f * prow[j]
        self.basis[r] = c
        self.pivots += 1

    def _run(self, obj: list[Fraction], allowed: int) -> str:
        """Minimize; ``obj`` holds reduced costs with ``-value`` in the last slot."""
        tab = self.tab
        while True:
            enter = next((j for j in range(allowed) if obj[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(tab):
                if not self.alive[i]:
                    continue
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self._pivot(best[1], enter, obj)

    def _phase1(self):
        n, m = self.n, self.m
        width = n + m + 1
        obj = [ZERO] * width
        for row in self.tab:
            for j in range(n):
                obj[j] -= row[j]
            obj[-1] -= row[-1]
        self._run(obj, n + m)
        self.phase1_objective = -obj[-1]
        self.feasible = self.phase1_objective == 0
        if not self.feasible:
            return
        # drive zero-level artificials out of the basis, drop redundant rows
        for i in range(m):
            if self.basis[i] < n:
                continue
            col = next((j for j in range(n) if self.tab[i][j] != 0), None)
            if col is None:
                self.alive[i] = False
            else:
                self._pivot(i, col, None)

    # -- public --------------------------------------------------------------

    def point(self) -> tuple[Fraction, ...]:
        x = [ZERO] * self.n
        for i, j in enumerate(self.basis):
            if self.alive[i] and j < self.n:
                x[j] = self.tab[i][-1]
        return tuple(x)

    def minimize(self, c: Sequence) -> LPResult:
        """Optimize from a copy of the phase-1 tableau; ``self`` is unchanged."""
        if not self.feasible:
            return LPResult("infeasible", phase1_objective=self.phase1_objective, pivots=self.pivots)
        saved_tab = [row[:] for row in self.tab]
        saved_basis = self.basis[:]
        saved_pivots = self.pivots
        try:
            n, m = self.n, self.m
            c = [Fraction(v) for v in c]
            obj = c + [ZERO] * m + [ZERO]
            for i, j in enumerate(self.basis):
                if not self.alive[i] or c[j] == 0:
                    continue
                f = c[j]
                for k, v in enumerate(self.tab[i]):
                    if v != 0:
                        obj[k] -= f * v
            status = self._run(obj, n)
            if status == "unbounded":
                return LPResult("unbounded", pivots=self.pivots)
            x = self.point()
            return LPResult("optimal", x, sum((ci * xi for ci, xi in zip(c, x)), ZERO),
                            self.phase1_objective, self.pivots)
        finally:
            self.tab, self.basis = saved_tab, saved_basis
            self.pivots = saved_pivots

    def result(self) -> LPResult:
        if not self.feasible:
            return LPResult("infeasible", phase1_objective=self.phase1_objective, pivots=self.pivots)
        return LPResult("optimal", self.point(), ZERO, self.phase1_objective, self.pivots)


def feasible_point(rows, rhs, n: int | None = None) -> LPResult:
    """Phase 1 only: a basic feasible solution of ``A x = b, x >= 0`` or a verdict."""
    if not rows:
        return LPResult("optimal", tuple([ZERO] * (n or 0)), ZERO)
    return ExactLP(rows, rhs, n).result()
