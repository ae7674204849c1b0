"""Undirected simple graphs: edge-list I/O, degree statistics, joint-degree
counts and edge-set diffing.

Node ids are always dense integers ``0..node_count-1``. Arbitrary input ids are
relabeled at load time and the mapping can be persisted as a two-column
sidecar file. Isolated nodes are part of the node universe (degree 0); edge
writers record the universe size in a ``# nodes N`` header so that a write /
reload round trip preserves it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

Edge = tuple[int, int]

_NODES_HEADER = "# nodes"


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input (carries the offending line number)."""


def _canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected simple graph over nodes ``0..node_count-1``.

    Construction deduplicates edges (including reversed duplicates) and
    rejects self-loops and out-of-range endpoints. Instances are safe to
    share across threads.
    """

    __slots__ = ("_n", "_adj", "_edge_arr", "_edge_set", "_degrees")

    def __init__(self, node_count: int, edges: Iterable[Edge]):
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        adj: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u},{v}) outside node range 0..{node_count - 1}")
            adj[u].add(v)
            adj[v].add(u)
        self._n = node_count
        self._adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)
        self._edge_arr: np.ndarray | None = None
        self._edge_set: frozenset[Edge] | None = None
        self._degrees: np.ndarray | None = None

    @classmethod
    def _from_adj(cls, adj: list[set[int]]) -> "Graph":
        """Trusted fast path: adopt an adjacency structure without revalidation."""
        g = cls.__new__(cls)
        g._n = len(adj)
        g._adj = tuple(frozenset(s) for s in adj)
        g._edge_arr = None
        g._edge_set = None
        g._degrees = None
        return g

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return int(self.degrees().sum()) // 2

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            d = np.fromiter((len(s) for s in self._adj), dtype=np.int64, count=self._n)
            d.setflags(write=False)
            self._degrees = d
        return self._degrees

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int64 array with u < v, sorted lexicographically."""
        if self._edge_arr is None:
            rows = [(u, v) for u in range(self._n) for v in sorted(self._adj[u]) if u < v]
            arr = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
            arr.setflags(write=False)
            self._edge_arr = arr
        return self._edge_arr

    def edge_set(self) -> frozenset[Edge]:
        if self._edge_set is None:
            self._edge_set = frozenset((int(u), int(v)) for u, v in self.edge_array())
        return self._edge_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(nodes={self._n}, edges={self.edge_count})"


class GraphBuilder:
    """Single-owner mutable adjacency used while a mechanism edits edges."""

    def __init__(self, g: Graph):
        self.node_count = g.node_count
        self.adj: list[set[int]] = [set(g.neighbors(u)) for u in range(g.node_count)]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].remove(v)
        self.adj[v].remove(u)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def build(self) -> Graph:
        return Graph._from_adj(self.adj)


@dataclass(frozen=True)
class LoadStats:
    """Bookkeeping from parsing an edge list."""

    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0
    id_map: Mapping[int, int] = field(default_factory=dict)  # original id -> dense id


@dataclass(frozen=True)
class EdgeDiff:
    """Edge-set difference between an original and a derived graph."""

    added: frozenset[Edge]
    deleted: frozenset[Edge]


class DK2Series:
    """Counts of edges keyed by the unordered degree pair of their endpoints."""

    __slots__ = ("cells",)

    def __init__(self, cells: Mapping[tuple[int, int], int]):
        self.cells: dict[tuple[int, int], int] = {}
        for (i, j), c in cells.items():
            if i > j:
                i, j = j, i
            if i < 1:
                raise ValueError(f"degree pair ({i},{j}) has a degree below 1")
            if c < 0:
                raise ValueError(f"negative count for cell ({i},{j})")
            if c:
                self.cells[(i, j)] = self.cells.get((i, j), 0) + int(c)

    def total(self) -> int:
        return sum(self.cells.values())

    def get(self, i: int, j: int) -> int:
        return self.cells.get(_canon(i, j), 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DK2Series):
            return NotImplemented
        return self.cells == other.cells

    def __repr__(self) -> str:
        return f"DK2Series(cells={len(self.cells)}, total={self.total()})"


def dk2_series(g: Graph) -> DK2Series:
    """Joint degree counts: one increment per edge at (min, max) endpoint degree."""
    edges = g.edge_array()
    if edges.shape[0] == 0:
        return DK2Series({})
    deg = g.degrees()
    du = deg[edges[:, 0]]
    dv = deg[edges[:, 1]]
    lo = np.minimum(du, dv)
    hi = np.maximum(du, dv)
    key = lo * (int(deg.max()) + 1) + hi
    uniq, counts = np.unique(key, return_counts=True)
    base = int(deg.max()) + 1
    cells = {(int(k // base), int(k % base)): int(c) for k, c in zip(uniq, counts)}
    return DK2Series(cells)


def edge_diff(original: Graph, other: Graph) -> EdgeDiff:
    """added = edges of `other` missing from `original`; deleted = the reverse."""
    if original.node_count != other.node_count:
        raise ValueError(
            f"node universe mismatch: {original.node_count} vs {other.node_count}"
        )
    a = original.edge_set()
    b = other.edge_set()
    return EdgeDiff(added=frozenset(b - a), deleted=frozenset(a - b))


def parse_edge_list(lines: Iterable[str]) -> tuple[list[Edge], LoadStats]:
    """Parse "u v" lines into canonical dense-id edges.

    Comment lines start with '#'. Duplicate lines and reversed duplicates
    collapse; self-loops are dropped and counted. A ``# nodes N`` header, if
    present, pins the universe size so isolated nodes survive a round trip.
    """
    raw_edges: list[tuple[int, int]] = []
    ids: set[int] = set()
    self_loops = 0
    declared_nodes: int | None = None
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if s.startswith(_NODES_HEADER):
                tail = s[len(_NODES_HEADER):].strip()
                if tail.isdigit():
                    declared_nodes = int(tail)
            continue
        parts = s.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {s!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {s!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {s!r}")
        ids.add(u)
        ids.add(v)
        if u == v:
            self_loops += 1
            continue
        raw_edges.append((u, v))

    if not raw_edges:
        raise GraphFormatError("edge list contains no usable edges")

    if declared_nodes is not None and ids and max(ids) < declared_nodes and min(ids) >= 0:
        # A pinned universe keeps original dense ids and retains isolated nodes.
        id_map = {i: i for i in range(declared_nodes)}
    else:
        id_map = {orig: dense for dense, orig in enumerate(sorted(ids))}
    seen: set[Edge] = set()
    edges: list[Edge] = []
    for u, v in raw_edges:
        e = _canon(id_map[u], id_map[v])
        if e not in seen:
            seen.add(e)
            edges.append(e)
    dup = len(raw_edges) - len(edges)
    return edges, LoadStats(self_loops_dropped=self_loops, duplicates_collapsed=dup, id_map=id_map)


def load_edge_list_with_stats(path) -> tuple[Graph, LoadStats]:
    with open(path, "r", encoding="utf-8") as fh:
        edges, stats = parse_edge_list(fh)
    n = max(len(stats.id_map), max(stats.id_map.values(), default=-1) + 1)
    return Graph(n, edges), stats


def load_edge_list(path) -> Graph:
    """Load a whitespace-separated edge list, relabeling ids to 0..n-1."""
    g, _ = load_edge_list_with_stats(path)
    return g


def write_edge_list(g: Graph, path) -> None:
    """Write sorted "u v" lines (u < v) behind a ``# nodes N`` header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_NODES_HEADER} {g.node_count}\n")
        for u, v in g.edge_array():
            fh.write(f"{u} {v}\n")


def write_id_map(stats: LoadStats, path) -> None:
    """Persist the original-id -> dense-id mapping as two-column text."""
    with open(path, "w", encoding="utf-8") as fh:
        for orig in sorted(stats.id_map):
            fh.write(f"{orig} {stats.id_map[orig]}\n")


def read_id_map(path) -> dict[int, int]:
    mapping: dict[int, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            orig, dense = s.split()
            mapping[int(orig)] = int(dense)
    return mapping


def subtract_edges(g: Graph, edges: Iterable[Edge]) -> Graph:
    """New graph with the given edges removed (missing edges are an error)."""
    b = GraphBuilder(g)
    for u, v in edges:
        b.remove_edge(u, v)
    return b.build()

