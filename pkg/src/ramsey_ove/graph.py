"""Bitmask graphs and the graph6 interchange format.

A :class:`Graph` stores one integer per vertex; bit ``u`` of ``rows[v]`` is set
when ``u`` and ``v`` are adjacent. Vertex sets are plain ``int`` bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

MAX_ORDER = 64

VertexSet = int


class CapacityError(ValueError):
    """Raised when an operation would exceed :data:`MAX_ORDER` vertices."""


class Graph6Error(ValueError):
    """Malformed graph6 input. ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def bits(mask: VertexSet) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..order-1``."""

    order: int
    rows: tuple[int, ...]
    # per-instance memo for derived data (numpy matrix, invariants)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        n = self.order
        if not 1 <= n <= MAX_ORDER:
            raise CapacityError(f"order must be in 1..{MAX_ORDER}, got {n}")
        if len(self.rows) != n:
            raise ValueError(f"expected {n} rows, got {len(self.rows)}")
        full = (1 << n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {v} has bits beyond order {n}")
            if row >> v & 1:
                raise ValueError(f"loop at vertex {v}")
            for u in bits(row):
                if not self.rows[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def _trusted(cls, order: int, rows: tuple[int, ...]) -> Graph:
        # skips validation; callers guarantee the invariants
        g = object.__new__(cls)
        object.__setattr__(g, "order", order)
        object.__setattr__(g, "rows", rows)
        object.__setattr__(g, "_cache", {})
        return g

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for order {n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix) -> Graph:
        a = np.asarray(matrix)
        n = a.shape[0]
        rows = []
        for v in range(n):
            rows.append(vertex_set(int(u) for u in np.flatnonzero(a[v])))
        return cls(n, tuple(rows))

    # -- queries -----------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for v in range(self.order) for u in bits(self.rows[v] & ((1 << v) - 1))]

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def neighbor_set(self, v: int) -> VertexSet:
        self._check_vertex(v)
        return self.rows[v]

    def sorted_degree_sequence(self) -> list[int]:
        return sorted(r.bit_count() for r in self.rows)

    @property
    def matrix(self) -> np.ndarray:
        """0/1 adjacency matrix (int64), cached; do not mutate."""
        m = self._cache.get("matrix")
        if m is None:
            n = self.order
            r = np.array(self.rows, dtype=np.uint64)
            m = ((r[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(np.int64)
            m.setflags(write=False)
            self._cache["matrix"] = m
        return m

    # -- surgery -----------------------------------------------------------

    def delete_vertex(self, i: int) -> Graph:
        """Remove vertex ``i``; higher-numbered vertices shift down by one."""
        self._check_vertex(i)
        if self.order < 2:
            raise ValueError("cannot delete the only vertex of a graph")
        low = (1 << i) - 1
        rows = tuple(
            (r & low) | ((r >> (i + 1)) << i)
            for v, r in enumerate(self.rows)
            if v != i
        )
        return Graph._trusted(self.order - 1, rows)

    def add_isolated_vertex(self) -> Graph:
        if self.order >= MAX_ORDER:
            raise CapacityError(f"graph already has {MAX_ORDER} vertices")
        return Graph._trusted(self.order + 1, self.rows + (0,))

    def add_vertex(self, neighbors: VertexSet) -> Graph:
        """Append a new vertex adjacent to exactly ``neighbors``."""
        if self.order >= MAX_ORDER:
            raise CapacityError(f"graph already has {MAX_ORDER} vertices")
        if neighbors >> self.order:
            raise ValueError("neighbor set refers to vertices outside the graph")
        n = self.order
        rows = tuple(r | (1 << n) if neighbors >> v & 1 else r for v, r in enumerate(self.rows))
        return Graph._trusted(n + 1, rows + (neighbors,))

    def induced_subgraph(self, keep: VertexSet) -> Graph:
        """Subgraph on ``keep``, relabelled in ascending original order."""
        if keep == 0:
            raise ValueError("induced subgraph needs at least one vertex")
        if keep >> self.order:
            raise ValueError("keep set refers to vertices outside the graph")
        kept = list(bits(keep))
        rows = []
        for v in kept:
            r = self.rows[v]
            rows.append(vertex_set(new for new, old in enumerate(kept) if r >> old & 1))
        return Graph._trusted(len(kept), tuple(rows))

    def set_edge(self, u: int, v: int, present: bool = True) -> Graph:
        if u == v:
            raise ValueError("simple graphs have no loops")
        self._check_vertex(u)
        self._check_vertex(v)
        rows = list(self.rows)
        if present:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        else:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph._trusted(self.order, tuple(rows))

    def complement(self) -> Graph:
        full = (1 << self.order) - 1
        return Graph._trusted(
            self.order, tuple(full & ~r & ~(1 << v) for v, r in enumerate(self.rows))
        )

    def relabel(self, perm) -> Graph:
        """Graph whose vertex ``perm[v]`` plays the role of ``v`` here."""
        rows = [0] * self.order
        for v, r in enumerate(self.rows):
            rows[perm[v]] = vertex_set(perm[u] for u in bits(r))
        return Graph._trusted(self.order, tuple(rows))

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.order:
            raise IndexError(f"vertex {v} out of range for order {self.order}")

    def __str__(self) -> str:
        return graph6_encode(self)


# -- graph6 ----------------------------------------------------------------

_HEADER = ">>graph6<<"


def _encode_order(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    return bytes([126, (n >> 12 & 63) + 63, (n >> 6 & 63) + 63, (n & 63) + 63])


def graph6_encode(g: Graph) -> str:
    out = bytearray(_encode_order(g.order))
    acc = 0
    count = 0
    rows = g.rows
    for j in range(1, g.order):
        row = rows[j]
        for i in range(j):
            acc = (acc << 1) | (row >> i & 1)
            count += 1
            if count == 6:
                out.append(acc + 63)
                acc = count = 0
    if count:
        out.append((acc << (6 - count)) + 63)
    return out.decode("ascii")


def graph6_decode(text: str, lineno: int | None = None) -> Graph:
    s = text.strip()
    if s.startswith(_HEADER):
        s = s[len(_HEADER):]
    if not s:
        raise Graph6Error("empty graph6 string", lineno)
    data = s.encode("ascii", errors="replace")
    for pos, byte in enumerate(data):
        if not 63 <= byte <= 126:
            raise Graph6Error(f"invalid graph6 character {chr(byte)!r} at offset {pos}", lineno)
    if data[0] == 126:
        if len(data) >= 2 and data[1] == 126:
            raise Graph6Error(f"orders above {MAX_ORDER} are not supported", lineno)
        if len(data) < 4:
            raise Graph6Error("truncated order field", lineno)
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        if n < 63:
            raise Graph6Error(f"non-canonical order field for n={n}", lineno)
        body = data[4:]
    else:
        n = data[0] - 63
        body = data[1:]
    if n == 0:
        raise Graph6Error("graphs must have at least one vertex", lineno)
    if n > MAX_ORDER:
        raise Graph6Error(f"order {n} exceeds capacity {MAX_ORDER}", lineno)
    nbits = n * (n - 1) // 2
    expected = (nbits + 5) // 6
    if len(body) != expected:
        raise Graph6Error(
            f"expected {expected} data bytes for n={n}, found {len(body)}", lineno
        )
    acc = 0
    for byte in body:
        acc = (acc << 6) | (byte - 63)
    pad = expected * 6 - nbits
    if acc & ((1 << pad) - 1):
        raise Graph6Error("nonzero padding bits", lineno)
    acc >>= pad
    rows = [0] * n
    pos = nbits - 1
    for j in range(1, n):
        for i in range(j):
            if acc >> pos & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            pos -= 1
    return Graph._trusted(n, tuple(rows))


def parse_graph6_lines(lines: Iterable[str]) -> list[Graph]:
    graphs = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        graphs.append(graph6_decode(line, lineno))
    return graphs


def read_graph6(path: str | Path) -> list[Graph]:
    with open(path, encoding="ascii", errors="replace") as fh:
        return parse_graph6_lines(fh)


def write_graph6(path: str | Path, graphs: Iterable[Graph], sort: bool = True) -> list[str]:
    lines = [graph6_encode(g) for g in graphs]
    if sort:
        lines.sort()
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="ascii")
    return lines


# -- named graphs used throughout tests and docs ---------------------------

def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)])


def disjoint_union(a: Graph, b: Graph) -> Graph:
    shift = a.order
    return Graph.from_edges(a.order + b.order, a.edges() + [(u + shift, v + shift) for u, v in b.edges()])


def paley(q: int) -> Graph:
    """Paley graph on a prime ``q`` congruent to 1 mod 4."""
    squares = {x * x % q for x in range(1, q)}
    return Graph.from_edges(q, [(u, v) for u in range(q) for v in range(u + 1, q) if (v - u) % q in squares])
