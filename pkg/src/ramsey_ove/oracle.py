"""Ground truth for Ramsey counterexamples.

Everything here is decided directly from cliques and independent sets, never
from the subgraph-membership machinery in :mod:`ramsey_ove.engine`, so it can
be used to audit that machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import Graph
from . import iso

DEFAULT_BUDGET = 2**30
# "auto" uses labelled brute force up to this many potential edges; dedup of
# the labelled survivors dominates beyond it
_LABELLED_MAX_EDGES = 10


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RamseyParams:
    s: int
    t: int

    def __post_init__(self) -> None:
        if self.s < 2 or self.t < 2:
            raise ValueError(f"need s >= 2 and t >= 2, got s={self.s}, t={self.t}")

    @property
    def max_st(self) -> int:
        return max(self.s, self.t)

    @property
    def symmetric(self) -> bool:
        return self.s == self.t

    def swapped(self) -> RamseyParams:
        return RamseyParams(self.t, self.s)


def _clique_in(rows: tuple[int, ...], cand: int, size: int) -> bool:
    if size <= 0:
        return True
    while cand:
        if cand.bit_count() < size:
            return False
        v = cand.bit_length() - 1
        cand ^= 1 << v
        # only lower-numbered vertices remain in cand, so each clique is seen once
        if size == 1 or _clique_in(rows, cand & rows[v], size - 1):
            return True
    return False


def has_clique(g: Graph, s: int) -> bool:
    if s < 1:
        raise ValueError("clique size must be at least 1")
    return _clique_in(g.rows, (1 << g.order) - 1, s)


def has_independent_set(g: Graph, t: int) -> bool:
    if t < 1:
        raise ValueError("independent set size must be at least 1")
    return has_clique(g.complement(), t)


def is_counterexample(g: Graph, p: RamseyParams) -> bool:
    return not has_clique(g, p.s) and not has_independent_set(g, p.t)


def new_vertex_ok(g: Graph, neighbors: int, p: RamseyParams) -> bool:
    """Whether attaching a vertex adjacent to ``neighbors`` keeps ``g`` a counterexample,
    assuming ``g`` already is one."""
    full = (1 << g.order) - 1
    non = full & ~neighbors
    if _clique_in(g.rows, neighbors, p.s - 1):
        return False
    co_rows = g.complement().rows
    return not _clique_in(co_rows, non, p.t - 1)


def labelled_graph_count(n: int) -> int:
    return 2 ** (n * (n - 1) // 2)


def enumerate_counterexamples(
    p: RamseyParams, n: int, budget: int = DEFAULT_BUDGET, method: str = "auto"
) -> list[Graph]:
    """All order-``n`` counterexamples for ``p``, one per isomorphism class.

    ``method="labelled"`` tests every labelled graph on ``n`` vertices.
    ``method="augment"`` builds classes vertex by vertex, trying every
    neighbourhood for the new vertex; this is exhaustive because deleting the
    last vertex of a counterexample leaves a counterexample. Output is sorted
    by graph6 string.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    space = labelled_graph_count(n)
    if space > budget:
        raise BudgetExceeded(
            f"exhaustive search at n={n} covers 2^{n * (n - 1) // 2} labelled graphs, "
            f"over the budget of {budget} (2^{budget.bit_length() - 1})"
        )
    if method == "auto":
        method = "labelled" if n * (n - 1) // 2 <= _LABELLED_MAX_EDGES else "augment"
    if method == "labelled":
        found = _labelled(p, n)
    elif method == "augment":
        found = _augment(p, n)
    else:
        raise ValueError(f"unknown enumeration method {method!r}")
    return sorted(found, key=str)


def _labelled(p: RamseyParams, n: int) -> list[Graph]:
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    bit_of = {e: k for k, e in enumerate(pairs)}
    m = len(pairs)
    if m == 0:
        return [Graph.empty(1)] if is_counterexample(Graph.empty(1), p) else []
    codes = np.arange(1 << m, dtype=np.int64)
    ok = np.ones(1 << m, dtype=bool)

    def subset_mask(vs):
        return sum(1 << bit_of[(a, b)] for a, b in combinations(vs, 2))

    for vs in combinations(range(n), p.s):
        mask = subset_mask(vs)
        ok &= (codes & mask) != mask
    for vs in combinations(range(n), p.t):
        ok &= (codes & subset_mask(vs)) != 0
    graphs = []
    for code in np.flatnonzero(ok).tolist():
        rows = [0] * n
        for k, (i, j) in enumerate(pairs):
            if code >> k & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        graphs.append(Graph._trusted(n, tuple(rows)))
    return iso.dedup_up_to_iso(graphs)


def _augment(p: RamseyParams, n: int) -> list[Graph]:
    level = [Graph.empty(1)] if is_counterexample(Graph.empty(1), p) else []
    for order in range(1, n):
        grown = []
        for g in level:
            for nb in range(1 << order):
                if new_vertex_ok(g, nb, p):
                    grown.append(g.add_vertex(nb))
        level = iso.dedup_up_to_iso(grown)
    return level


def max_clique_size(g: Graph) -> int:
    size = 1
    while has_clique(g, size + 1):
        size += 1
    return size


def independence_number(g: Graph) -> int:
    return max_clique_size(g.complement())


def brute_force_clique(g: Graph, s: int) -> bool:
    """Subset-enumeration clique test, for cross-checking :func:`has_clique`."""
    for vs in combinations(range(g.order), s):
        if all(g.rows[a] >> b & 1 for a, b in combinations(vs, 2)):
            return True
    return False


__all__ = [
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "RamseyParams",
    "brute_force_clique",
    "enumerate_counterexamples",
    "has_clique",
    "has_independent_set",
    "independence_number",
    "is_counterexample",
    "labelled_graph_count",
    "max_clique_size",
    "new_vertex_ok",
]
