"""Random codes from the union bound, and exact minimum lengths for toy sizes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import CodeMatrix


def rainbow_probability(q: int, ell: int) -> Fraction:
    """Probability that ``ell + 1`` uniform symbols cover all of ``1..q``."""
    draws = ell + 1
    if draws < q:
        return Fraction(0)
    total = sum(
        (-1) ** i * math.comb(q, i) * Fraction(q - i, q) ** draws for i in range(q + 1)
    )
    return Fraction(total)


@dataclass(frozen=True)
class ConstructionPlan:
    m: int
    q: int
    ell: int
    target_failure: float
    n_required: int

    @property
    def failure_bound(self) -> Fraction:
        p = rainbow_probability(self.q, self.ell)
        return math.comb(self.m, self.ell + 1) * (1 - p) ** self.n_required


def required_columns(m: int, q: int, ell: int, target_failure: float) -> int:
    """Smallest ``n`` with ``C(m, ell+1) * (1 - p)^n <= target_failure``.

    ``p`` is :func:`rainbow_probability`; the comparison is exact.
    """
    if not 0 < target_failure < 1:
        raise ValueError("target_failure must lie in (0, 1)")
    p = rainbow_probability(q, ell)
    if p == 0:
        raise ValueError(f"no rainbow is possible with {ell + 1} draws over {q} symbols")
    subsets = math.comb(m, ell + 1)
    target = Fraction(target_failure)

    def ok(n):
        return subsets * (1 - p) ** n <= target

    if p == 1:
        return 1
    # float estimate, then settle exactly
    est = math.log(subsets / target_failure) / -math.log1p(-float(p))
    n = max(1, math.ceil(est) - 1)
    while n > 1 and ok(n - 1):
        n -= 1
    while not ok(n):
        n += 1
    return n


def construction_plan(m: int, q: int, ell: int, target_failure: float) -> ConstructionPlan:
    return ConstructionPlan(m, q, ell, target_failure, required_columns(m, q, ell, target_failure))


def random_code(m: int, n: int, q: int, seed) -> CodeMatrix:
    rng = np.random.default_rng(seed)
    return CodeMatrix(rng.integers(1, q + 1, size=(m, n)), q)


# -- exact search -------------------------------------------------------------
#
# The search places rows one at a time for a fixed n.  Every matrix is
# equivalent (row order, column order, per-column symbol relabeling) to the
# row-major lexicographically least member of its orbit, and that member has
# (1) nondecreasing rows, (2) every column a restricted growth string (symbols
# appear in first-occurrence order 1, 2, ...), and (3) nondecreasing columns
# read top to bottom.  Only matrices with all three properties are visited.


class BudgetExhausted(Exception):
    pass


@dataclass
class MinCodeResult:
    n: int | None
    matrix: CodeMatrix | None
    nodes: int
    refuted: list[int]

    @property
    def known(self) -> bool:
        return self.n is not None


class _RowSearch:
    def __init__(self, m, q, ell, n, budget):
        self.m, self.q, self.ell, self.n = m, q, ell, n
        self.budget = budget
        self.nodes = 0
        w = q + 1
        self.low = sum(1 << (j * w) for j in range(n))
        self.high = self.low << q
        self.cands = list(itertools.product(range(1, q + 1), repeat=n))
        self.packed = [
            sum(1 << (j * w + v - 1) for j, v in enumerate(row)) for row in self.cands
        ]

    def run(self):
        rows: list[int] = []
        # masks[s] holds packed images of all s-subsets of the placed rows
        masks = [[0]] + [[] for _ in range(self.ell)]
        col_max = [0] * self.n
        ties = [True] * (self.n - 1)
        return self._place(rows, 0, masks, col_max, ties)

    def _admissible(self, row, col_max, ties):
        for j, v in enumerate(row):
            if v > col_max[j] + 1:
                return False
        for j, tied in enumerate(ties):
            if tied and row[j] > row[j + 1]:
                return False
        return True

    def _place(self, rows, start, masks, col_max, ties):
        if len(rows) == self.m:
            return [self.cands[i] for i in rows]
        low, high = self.low, self.high
        for ci in range(start, len(self.cands)):
            row = self.cands[ci]
            if not self._admissible(row, col_max, ties):
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExhausted
            bits = self.packed[ci]
            if any(not ((mk | bits) + low) & high for mk in masks[self.ell]):
                continue
            new_masks = [masks[0]] + [
                masks[s] + [mk | bits for mk in masks[s - 1]] for s in range(1, self.ell + 1)
            ]
            new_max = [max(a, v) for a, v in zip(col_max, row)]
            new_ties = [t and row[j] == row[j + 1] for j, t in enumerate(ties)]
            rows.append(ci)
            found = self._place(rows, ci, new_masks, new_max, new_ties)
            if found is not None:
                return found
            rows.pop()
        return None


def find_code(m: int, q: int, ell: int, n: int, budget: int = 10**6):
    """Search for an ``m x n`` ``ell``-list-decoding matrix over ``1..q``.

    Returns ``(matrix or None, nodes)``; raises :class:`BudgetExhausted` when
    the node budget runs out before the question is settled.
    """
    _check_search_args(m, q, ell)
    search = _RowSearch(m, q, ell, n, budget)
    rows = search.run()
    matrix = None if rows is None else CodeMatrix(np.array(rows), q)
    return matrix, search.nodes


def _check_search_args(m, q, ell):
    if q < 2 or m < 2:
        raise ValueError("need q >= 2 and m >= 2")
    if not 1 <= ell <= m - 1:
        raise ValueError(f"list size must be in 1..{m - 1}")
    if ell + 1 < q:
        raise ValueError(f"{ell + 1} rows can never show all {q} symbols")


def find_min_code(m: int, q: int, ell: int, budget: int = 10**6) -> MinCodeResult:
    """Exact ``n(m, q, ell)`` with a witness matrix, within ``budget`` nodes."""
    _check_search_args(m, q, ell)
    used = 0
    refuted = []
    n = 1
    while True:
        search = _RowSearch(m, q, ell, n, budget - used)
        try:
            rows = search.run()
        except BudgetExhausted:
            return MinCodeResult(None, None, budget, refuted)
        used += search.nodes
        if rows is not None:
            return MinCodeResult(n, CodeMatrix(np.array(rows), q), used, refuted)
        refuted.append(n)
        n += 1


def search_min_n(m: int, q: int, ell: int, budget: int = 10**6) -> int | None:
    """Exact ``n(m, q, ell)``, or None if the node budget runs out."""
    return find_min_code(m, q, ell, budget).n
