"""Isomorphism search and invariant hashing.

Isomorphisms are tuples ``phi`` with ``phi[v]`` the image of vertex ``v``.
The matcher refines vertex colourings to an equitable partition (seeded with
degree and triangle counts), then individualises one vertex at a time and
backtracks. Every leaf is re-verified edge by edge before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .graph import Graph, MAX_ORDER

SCHEMES = ("degree", "triangles", "k3profile")
DEFAULT_SCHEME = "triangles"

Isomorphism = tuple

_MASK = (1 << 40) - 1
_WEIGHTS = np.random.default_rng(20240917).integers(1, 2**31, size=MAX_ORDER + 1, dtype=np.int64)


@dataclass(frozen=True)
class HashKey:
    scheme: str
    data: bytes

    def values(self) -> list[int]:
        (count,) = np.frombuffer(self.data[:4], dtype=">u4")
        return np.frombuffer(self.data[4:], dtype=">u4", count=int(count)).tolist()


def _pack(values) -> bytes:
    values = list(values)
    return np.array([len(values), *values], dtype=">u4").tobytes()


def triangle_counts(g: Graph) -> np.ndarray:
    """Number of triangles through each vertex."""
    tri = g._cache.get("triangles")
    if tri is None:
        a = g.matrix
        tri = ((a @ a) * a).sum(axis=1) // 2
        g._cache["triangles"] = tri
    return tri


def k3_profile(g: Graph) -> list[tuple[int, int]]:
    """Per-vertex (triangles through v, induced 2-paths centred at v)."""
    tri = triangle_counts(g).tolist()
    out = []
    for v, row in enumerate(g.rows):
        d = row.bit_count()
        out.append((tri[v], d * (d - 1) // 2 - tri[v]))
    return out


def hash_key(g: Graph, scheme: str = DEFAULT_SCHEME) -> HashKey:
    cache_key = ("hash", scheme)
    key = g._cache.get(cache_key)
    if key is not None:
        return key
    if scheme == "degree":
        data = _pack(g.sorted_degree_sequence())
    elif scheme == "triangles":
        data = _pack(sorted(triangle_counts(g).tolist()))
    elif scheme == "k3profile":
        data = _pack(x for pair in sorted(k3_profile(g)) for x in pair)
    else:
        raise ValueError(f"unknown hash scheme {scheme!r}; choose from {SCHEMES}")
    key = HashKey(scheme, data)
    g._cache[cache_key] = key
    return key


# -- colour refinement -------------------------------------------------------

def _refine(a: np.ndarray, colors: np.ndarray) -> tuple[np.ndarray, tuple[bytes, ...]]:
    _, colors = np.unique(colors, return_inverse=True)
    colors = colors.reshape(-1)
    k = int(colors.max()) + 1
    n = colors.shape[0]
    rows = np.arange(n)
    trace = []
    while True:
        onehot = np.zeros((n, k), dtype=np.int64)
        onehot[rows, colors] = 1
        mixed = ((a @ onehot) @ _WEIGHTS[:k]) & _MASK
        sig = (colors.astype(np.int64) << 40) | mixed
        uniq, inv, cnt = np.unique(sig, return_inverse=True, return_counts=True)
        trace.append(uniq.tobytes() + cnt.tobytes())
        if len(uniq) == k:
            return colors, tuple(trace)
        colors = inv.reshape(-1)
        k = len(uniq)


def _profile(g: Graph) -> tuple[np.ndarray, tuple[bytes, ...]]:
    prof = g._cache.get("iso_profile")
    if prof is None:
        seed = g.matrix.sum(axis=1) * 4096 + triangle_counts(g)
        prof = _refine(g.matrix, seed)
        g._cache["iso_profile"] = prof
    return prof


def _individualize(colors: np.ndarray, v: int) -> np.ndarray:
    c = colors * 2 + 1
    c[v] -= 1
    return c


def _search(a, b, ca, cb) -> Iterator[Isomorphism]:
    n = ca.shape[0]
    k = int(ca.max()) + 1
    if k == n:
        where_b = np.empty(n, dtype=np.int64)
        where_b[cb] = np.arange(n)
        perm = where_b[ca]
        if np.array_equal(b[np.ix_(perm, perm)], a):
            yield tuple(perm.tolist())
        return
    sizes = np.bincount(ca, minlength=k)
    target = int(np.argmin(np.where(sizes > 1, sizes, n + 1)))
    x = int(np.flatnonzero(ca == target)[0])
    ra, ta = _refine(a, _individualize(ca, x))
    for y in np.flatnonzero(cb == target).tolist():
        rb, tb = _refine(b, _individualize(cb, y))
        if tb == ta:
            yield from _search(a, b, ra, rb)


def iter_isomorphisms(a: Graph, b: Graph) -> Iterator[Isomorphism]:
    if a.order != b.order or a.num_edges() != b.num_edges():
        return
    ca, ta = _profile(a)
    cb, tb = _profile(b)
    if ta != tb:
        return
    yield from _search(a.matrix, b.matrix, ca, cb)


def find_isomorphism(a: Graph, b: Graph) -> Optional[Isomorphism]:
    return next(iter_isomorphisms(a, b), None)


def all_isomorphisms(a: Graph, b: Graph) -> list[Isomorphism]:
    return list(iter_isomorphisms(a, b))


def automorphisms(g: Graph) -> list[Isomorphism]:
    auts = g._cache.get("automorphisms")
    if auts is None:
        auts = all_isomorphisms(g, g)
        g._cache["automorphisms"] = auts
    return auts


def is_isomorphism(a: Graph, b: Graph, phi) -> bool:
    """Exhaustive edge-preservation check over all vertex pairs."""
    n = a.order
    if b.order != n or sorted(phi) != list(range(n)):
        return False
    for u in range(n):
        for v in range(u + 1, n):
            if a.has_edge(u, v) != b.has_edge(phi[u], phi[v]):
                return False
    return True


def compose(first, second) -> Isomorphism:
    """Apply ``first`` then ``second``."""
    return tuple(second[x] for x in first)


def invert(phi) -> Isomorphism:
    inv = [0] * len(phi)
    for v, w in enumerate(phi):
        inv[w] = v
    return tuple(inv)


def map_set(phi, mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << phi[low.bit_length() - 1]
        mask ^= low
    return out


class IsoIndex:
    """Graphs of one order, bucketed by an invariant hash for lookup up to isomorphism."""

    def __init__(self, scheme: str = DEFAULT_SCHEME):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown hash scheme {scheme!r}; choose from {SCHEMES}")
        self.scheme = scheme
        self.graphs: list[Graph] = []
        self.buckets: dict[HashKey, list[int]] = {}
        self.iso_calls = 0

    def __len__(self) -> int:
        return len(self.graphs)

    def find(self, g: Graph) -> Optional[tuple[int, Isomorphism]]:
        """Index of a stored graph isomorphic to ``g`` and a map from ``g`` onto it."""
        for idx in self.buckets.get(hash_key(g, self.scheme), ()):
            self.iso_calls += 1
            phi = find_isomorphism(g, self.graphs[idx])
            if phi is not None:
                return idx, phi
        return None

    def add(self, g: Graph) -> int:
        idx = len(self.graphs)
        self.graphs.append(g)
        self.buckets.setdefault(hash_key(g, self.scheme), []).append(idx)
        return idx

    def add_if_new(self, g: Graph) -> bool:
        if self.find(g) is not None:
            return False
        self.add(g)
        return True

    @property
    def max_bucket(self) -> int:
        return max((len(b) for b in self.buckets.values()), default=0)


def dedup_up_to_iso(graphs: list[Graph], scheme: str = DEFAULT_SCHEME) -> list[Graph]:
    """First representative of each isomorphism class, in input order."""
    if len({g.order for g in graphs}) > 1:
        raise ValueError("dedup_up_to_iso needs graphs of a single order")
    index = IsoIndex(scheme)
    for g in graphs:
        index.add_if_new(g)
    return index.graphs
