"""Counterexample sets, the neighbour-set map, checking, extension and decrementing.

A graph on ``n + 1`` vertices whose ``max(s, t) + 1`` single-vertex deletions
all lie in a set of ``(s, t)`` counterexamples of order ``n`` is itself a
counterexample: any clique of size ``s`` or independent set of size ``t``
misses one of the deleted vertices and so survives in that subgraph. The
checker and the extension search below rely on nothing else.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import multiprocessing
from typing import Iterable, Optional

from . import iso, oracle
from .graph import Graph, VertexSet
from .iso import DEFAULT_SCHEME, IsoIndex, map_set
from .oracle import RamseyParams

log = logging.getLogger(__name__)

MODES = ("psi", "highlevel")


class CounterexampleSet:
    """Pairwise non-isomorphic counterexamples of one order for fixed (s, t)."""

    def __init__(
        self,
        params: RamseyParams,
        order: int,
        graphs: Iterable[Graph] = (),
        scheme: str = DEFAULT_SCHEME,
        verify: bool = True,
    ):
        self.params = params
        self.order = order
        self.scheme = scheme
        self.index = IsoIndex(scheme)
        for pos, g in enumerate(graphs):
            if g.order != order:
                raise ValueError(f"graph {pos} has order {g.order}, expected {order}")
            if verify and not oracle.is_counterexample(g, params):
                raise ValueError(
                    f"graph {pos} ({g}) is not an R({params.s},{params.t}) counterexample"
                )
            self.index.add_if_new(g)

    @classmethod
    def from_graphs(cls, params: RamseyParams, graphs: list[Graph], **kwargs) -> CounterexampleSet:
        if not graphs:
            raise ValueError("cannot infer the order of an empty graph list")
        return cls(params, graphs[0].order, graphs, **kwargs)

    @property
    def members(self) -> list[Graph]:
        return self.index.graphs

    @property
    def k(self) -> int:
        return len(self.index.graphs)

    def __len__(self) -> int:
        return self.k

    def __iter__(self):
        return iter(self.index.graphs)

    def find(self, g: Graph):
        return self.index.find(g)

    def __contains__(self, g: Graph) -> bool:
        return g.order == self.order and self.find(g) is not None

    def complement_partners(self) -> Optional[list[int]]:
        """Index of each member's complement, or None if the set is not complement-closed."""
        partners = []
        for g in self.members:
            hit = self.find(g.complement())
            if hit is None:
                return None
            partners.append(hit[0])
        return partners

    def sorted_lines(self) -> list[str]:
        return sorted(str(g) for g in self.members)

    def __repr__(self) -> str:
        p = self.params
        return f"CounterexampleSet(R({p.s},{p.t},{self.order}), k={self.k})"


@dataclass
class PsiMap:
    """Map from (n-1)-vertex key graphs to neighbour sets whose attachment gives a member.

    Entry sets are closed under the automorphisms of their key, so one
    isomorphism onto the key is enough to test membership.
    """

    order: int
    index: IsoIndex
    entries: list[set[VertexSet]] = field(default_factory=list)
    # (member, deleted vertex) -> (key id, map from the deleted graph onto the key)
    located: dict[tuple[int, int], tuple[int, tuple]] = field(default_factory=dict)

    @property
    def keys(self) -> list[Graph]:
        return self.index.graphs

    def entry(self, key_id: int) -> set[VertexSet]:
        return self.entries[key_id]

    def locate(self, g: Graph):
        if g.order != self.order:
            raise ValueError(f"graph of order {g.order} cannot match keys of order {self.order}")
        return self.index.find(g)

    def size(self) -> int:
        return sum(len(e) for e in self.entries)


def _drop_bit(mask: int, i: int) -> int:
    return (mask & ((1 << i) - 1)) | ((mask >> (i + 1)) << i)


def _lift_bits(mask: int, i: int) -> int:
    # inverse of _drop_bit for masks without bit i
    return (mask & ((1 << i) - 1)) | ((mask >> i) << (i + 1))


def build_psi(src: CounterexampleSet) -> PsiMap:
    if src.order < 2:
        raise ValueError("the neighbour-set map needs members of order at least 2")
    psi = PsiMap(src.order - 1, IsoIndex(src.scheme))
    for m, g in enumerate(src.members):
        for i in range(g.order):
            sub = g.delete_vertex(i)
            nbrs = _drop_bit(g.rows[i], i)
            hit = psi.index.find(sub)
            if hit is None:
                key_id = psi.index.add(sub)
                psi.entries.append(set())
                phi = tuple(range(sub.order))
            else:
                key_id, phi = hit
            entry = psi.entries[key_id]
            # every isomorphism onto the key is phi followed by a key automorphism
            for aut in iso.automorphisms(psi.keys[key_id]):
                entry.add(map_set(iso.compose(phi, aut), nbrs))
            psi.located[(m, i)] = (key_id, phi)
    return psi


def psi_attach_check(psi: PsiMap, g: Graph, neighbors: VertexSet) -> bool:
    """Whether adding a vertex adjacent to ``neighbors`` onto ``g`` gives a source member."""
    hit = psi.locate(g)
    if hit is None:
        return False
    key_id, phi = hit
    return map_set(phi, neighbors) in psi.entries[key_id]


def psi_completeness_failures(src: CounterexampleSet, psi: PsiMap) -> list[tuple[int, int]]:
    """(member, vertex) pairs whose own deletion is not reconstructed by ``psi``."""
    failures = []
    for m, g in enumerate(src.members):
        for i in range(g.order):
            if not psi_attach_check(psi, g.delete_vertex(i), _drop_bit(g.rows[i], i)):
                failures.append((m, i))
    return failures


def check_candidate(g: Graph, src: CounterexampleSet) -> bool:
    """Test ``g`` by looking up deletions of vertices ``0..max(s,t)`` in ``src``."""
    if g.order != src.order + 1:
        raise ValueError(f"candidate has order {g.order}, expected {src.order + 1}")
    need = src.params.max_st + 1
    if need > g.order:
        raise ValueError(
            f"need {need} single-vertex deletions but the candidate has only {g.order} vertices"
        )
    if src.k == 0:
        return False
    return all(src.find(g.delete_vertex(i)) is not None for i in range(need))


@dataclass
class ExtensionStats:
    candidates_examined: int = 0
    iso_calls: int = 0
    max_bucket: int = 0
    counterexamples_found: int = 0
    wall_time: float = 0.0
    k: int = 0
    order: int = 0
    mode: str = "psi"
    members_iterated: int = 0
    raw_hits: int = 0
    second_check_passed: int = 0
    psi_keys: int = 0
    psi_entries: int = 0
    psi_time: float = 0.0

    @property
    def candidate_bound(self) -> int:
        return 2 * self.k * self.k * self.order

    @property
    def within_bound(self) -> bool:
        return self.candidates_examined <= self.candidate_bound

    def as_dict(self) -> dict:
        d = asdict(self)
        d["candidate_bound"] = self.candidate_bound
        d["within_bound"] = self.within_bound
        return d


def _iteration_members(src: CounterexampleSet) -> tuple[list[int], bool]:
    everyone = list(range(src.k))
    if not src.params.symmetric:
        return everyone, False
    partners = src.complement_partners()
    if partners is None:
        return everyone, False
    return [m for m in everyone if partners[m] >= m], True


class _PsiSearch:
    """Candidate generation and checking for one source set. Picklable to forked workers."""

    def __init__(self, src: CounterexampleSet, psi: PsiMap):
        self.src = src
        self.psi = psi
        self.extra = src.params.max_st - 2

    def member(self, m: int) -> tuple[list[tuple[int, ...]], dict]:
        g = self.src.members[m]
        n = g.order
        to_key, from_key, entries = [], [], []
        for i in range(n):
            key_id, phi = self.psi.located[(m, i)]
            tk = [0] * n
            fk = [0] * (n - 1)
            for v in range(n):
                if v != i:
                    w = phi[v if v < i else v - 1]
                    tk[v] = w
                    fk[w] = v
            to_key.append(tk)
            from_key.append(fk)
            entries.append(self.psi.entries[key_id])

        def attaches(nbrs: int, k: int) -> bool:
            return map_set(to_key[k], nbrs & ~(1 << k)) in entries[k]

        found = []
        counts = {"candidates": 0, "second": 0}
        for i in range(n):
            j = (i + 1) % n
            for entry in entries[i]:
                base = map_set(from_key[i], entry)
                for nbrs in (base, base | (1 << i)):
                    counts["candidates"] += 1
                    if not attaches(nbrs, j):
                        continue
                    counts["second"] += 1
                    k, tested, ok = j, 0, True
                    while tested < self.extra:
                        k = (k + 1) % n
                        if k == i:
                            continue
                        if not attaches(nbrs, k):
                            ok = False
                            break
                        tested += 1
                    if ok:
                        found.append(g.add_vertex(nbrs).rows)
        return found, counts


class _HighLevelSearch:
    def __init__(self, src: CounterexampleSet):
        self.src = src
        self.iso_calls = 0
        self.deletions: dict = {}
        for m, g in enumerate(src.members):
            for u in range(g.order):
                sub = g.delete_vertex(u)
                key = iso.hash_key(sub, src.scheme)
                self.deletions.setdefault(key, []).append((sub, _drop_bit(g.rows[u], u)))

    def member(self, m: int) -> tuple[list[tuple[int, ...]], dict]:
        g = self.src.members[m]
        found = []
        counts = {"candidates": 0, "second": 0, "iso_calls": 0}
        for i in range(g.order):
            sub = g.delete_vertex(i)
            choices = set()
            for other, nbrs in self.deletions.get(iso.hash_key(sub, self.src.scheme), ()):
                counts["iso_calls"] += 1
                for phi in iso.iter_isomorphisms(other, sub):
                    choices.add(_lift_bits(map_set(phi, nbrs), i))
            for base in sorted(choices):
                for nbrs in (base, base | (1 << i)):
                    counts["candidates"] += 1
                    cand = g.add_vertex(nbrs)
                    if check_candidate(cand, self.src):
                        found.append(cand.rows)
        return found, counts


_WORKER_SEARCH = None


def _worker_member(m: int):
    return _WORKER_SEARCH.member(m)


def _run_members(search, members: list[int], workers: int):
    global _WORKER_SEARCH
    if workers <= 1 or len(members) < 2:
        return [search.member(m) for m in members]
    _WORKER_SEARCH = search
    try:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, len(members) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            return list(pool.map(_worker_member, members, chunksize=chunk))
    finally:
        _WORKER_SEARCH = None


def extend_set(
    src: CounterexampleSet, mode: str = "psi", workers: int = 1
) -> tuple[CounterexampleSet, ExtensionStats]:
    """All order-(n+1) graphs, up to isomorphism, with enough deletions in ``src``.

    Candidates put a new vertex next to a member so that deleting some old
    vertex ``v_i`` recreates a member; both adjacency choices for ``v_i`` are
    tried. When s = t and ``src`` is closed under complements only one member
    of each complementary pair is expanded and the output is re-closed.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    if src.k == 0:
        raise ValueError("cannot extend an empty counterexample set")
    if src.order < 2:
        raise ValueError("extension needs members of order at least 2")
    p = src.params
    if p.max_st + 1 > src.order + 1:
        raise ValueError(
            f"order {src.order + 1} is too small to test {p.max_st + 1} deletions"
        )
    start = time.perf_counter()
    stats = ExtensionStats(k=src.k, order=src.order, mode=mode)
    members, halved = _iteration_members(src)
    stats.members_iterated = len(members)

    if mode == "psi":
        t0 = time.perf_counter()
        psi = build_psi(src)
        stats.psi_time = time.perf_counter() - t0
        stats.psi_keys = len(psi.keys)
        stats.psi_entries = psi.size()
        search = _PsiSearch(src, psi)
    else:
        psi = None
        search = _HighLevelSearch(src)

    results = _run_members(search, members, workers)
    raw = []
    for found, counts in results:
        raw.extend(found)
        stats.candidates_examined += counts["candidates"]
        stats.second_check_passed += counts["second"]
        stats.iso_calls += counts.get("iso_calls", 0)
    stats.raw_hits = len(raw)

    graphs = sorted({Graph._trusted(src.order + 1, rows) for rows in raw}, key=str)
    out = CounterexampleSet(p, src.order + 1, graphs, scheme=src.scheme, verify=False)
    if halved:
        for g in list(out.members):
            out.index.add_if_new(g.complement())
    out = CounterexampleSet(p, src.order + 1, sorted(out.members, key=str), scheme=src.scheme, verify=False)

    stats.iso_calls += src.index.iso_calls + out.index.iso_calls
    if psi is not None:
        stats.iso_calls += psi.index.iso_calls
    stats.max_bucket = max(src.index.max_bucket, psi.index.max_bucket if psi else 0)
    stats.counterexamples_found = out.k
    stats.wall_time = time.perf_counter() - start
    if not stats.within_bound:
        log.warning(
            "examined %d candidates, above the 2k^2n bound of %d",
            stats.candidates_examined,
            stats.candidate_bound,
        )
    return out, stats


def decrement_set(src: CounterexampleSet) -> CounterexampleSet:
    """Every single-vertex deletion of every member, up to isomorphism."""
    if src.order < 2:
        raise ValueError("cannot decrement a set of order below 2")
    subs = sorted((g.delete_vertex(i) for g in src.members for i in range(src.order)), key=str)
    out = CounterexampleSet(src.params, src.order - 1, subs, scheme=src.scheme, verify=True)
    return CounterexampleSet(src.params, src.order - 1, sorted(out.members, key=str), scheme=src.scheme, verify=False)


@dataclass
class ChainStep:
    order: int
    count: int
    stats: Optional[ExtensionStats] = None

    def as_dict(self) -> dict:
        return {"order": self.order, "count": self.count, "stats": self.stats.as_dict() if self.stats else None}


@dataclass
class ChainReport:
    params: RamseyParams
    steps: list[ChainStep]
    final: CounterexampleSet

    @property
    def counts(self) -> dict[int, int]:
        return {step.order: step.count for step in self.steps}

    def as_dict(self) -> dict:
        return {
            "s": self.params.s,
            "t": self.params.t,
            "steps": [step.as_dict() for step in self.steps],
        }


def verify_chain(
    params: RamseyParams,
    start: CounterexampleSet,
    target_order: int,
    mode: str = "psi",
    workers: int = 1,
    budget: int = oracle.DEFAULT_BUDGET,
) -> ChainReport:
    """Extend repeatedly until ``target_order`` or an empty set is reached.

    The starting set is cross-checked against exhaustive enumeration when that
    fits inside ``budget``.
    """
    if start.params != params:
        raise ValueError("starting set was built for different parameters")
    if oracle.labelled_graph_count(start.order) <= budget:
        truth = oracle.enumerate_counterexamples(params, start.order, budget=budget)
        if len(truth) != start.k or any(g not in start for g in truth):
            raise ValueError(
                f"starting set has {start.k} classes but exhaustive search finds {len(truth)}"
            )
    steps = [ChainStep(start.order, start.k)]
    current = start
    while current.order < target_order and current.k > 0:
        current, stats = extend_set(current, mode=mode, workers=workers)
        steps.append(ChainStep(current.order, current.k, stats))
    return ChainReport(params, steps, current)


def reextend_parity(src: CounterexampleSet, mode: str = "psi") -> tuple[CounterexampleSet, CounterexampleSet, list[Graph]]:
    """Decrement ``src``, extend the result, and list outputs absent from ``src``."""
    lower = decrement_set(src)
    back, _ = extend_set(lower, mode=mode)
    novel = [g for g in back.members if g not in src]
    return lower, back, novel


__all__ = [
    "ChainReport",
    "ChainStep",
    "CounterexampleSet",
    "ExtensionStats",
    "PsiMap",
    "build_psi",
    "check_candidate",
    "decrement_set",
    "extend_set",
    "psi_attach_check",
    "psi_completeness_failures",
    "reextend_parity",
    "verify_chain",
]
