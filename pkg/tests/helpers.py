"""Shared generators and independent oracles for the test suite.

Oracles are deliberately naive (brute-force enumeration, dense linear
algebra, closed forms) and independent of the implementations they check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from edgeaudit.graphs import Graph


def gnp_graph(n: int, p: float, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    return Graph(n, zip(iu[mask].tolist(), ju[mask].tolist()))


def planted_partition_graph(n: int, communities: int, p_in: float, p_out: float,
                            seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    comm = rng.integers(0, communities, n)
    iu, ju = np.triu_indices(n, k=1)
    same = comm[iu] == comm[ju]
    prob = np.where(same, p_in, p_out)
    mask = rng.random(iu.size) < prob
    return Graph(n, zip(iu[mask].tolist(), ju[mask].tolist()))


def social_like_graph(n: int = 600, communities: int = 12, boost: float = 400.0,
                      density: float = 0.0005, tail: float = 1.2, cap: float = 30.0,
                      seed: int = 0) -> Graph:
    """Degree-corrected block model: hubs plus community structure, the two
    ingredients the attack scenario needs (heavy-tailed degrees make degree
    anonymization add many edges, communities give the embedding signal)."""
    rng = np.random.default_rng(seed)
    comm = rng.integers(0, communities, n)
    weight = np.minimum(rng.pareto(tail, n) + 1.0, cap)
    iu, ju = np.triu_indices(n, k=1)
    base = density * weight[iu] * weight[ju]
    prob = np.where(comm[iu] == comm[ju], np.minimum(base * boost, 0.95), np.minimum(base, 0.95))
    mask = rng.random(iu.size) < prob
    return Graph(n, zip(iu[mask].tolist(), ju[mask].tolist()))


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def two_cliques(size: int) -> Graph:
    edges = list(itertools.combinations(range(size), 2))
    edges += [(u + size, v + size) for u, v in itertools.combinations(range(size), 2)]
    return Graph(2 * size, edges)


def barbell_graph(size: int) -> Graph:
    g = two_cliques(size)
    edges = set(g.edge_set())
    edges.add((size - 1, size))  # bridge
    return Graph(2 * size, edges)


# ---------------------------------------------------------------- oracles


def brute_dk2(g: Graph) -> dict[tuple[int, int], int]:
    """Per-edge recomputation of both endpoint degrees."""
    cells: dict[tuple[int, int], int] = {}
    for u, v in g.edge_set():
        du = sum(1 for _ in g.neighbors(u))
        dv = sum(1 for _ in g.neighbors(v))
        key = (min(du, dv), max(du, dv))
        cells[key] = cells.get(key, 0) + 1
    return cells


def exhaustive_kda_cost(degrees, k: int) -> int:
    """Minimum total increase over all contiguous partitions (parts >= k) of
    the descending-sorted sequence, each part raised to its maximum."""
    d = sorted(degrees, reverse=True)
    n = len(d)

    best: dict[int, int] = {0: 0}

    def solve(i: int) -> int:
        if i in best:
            return best[i]
        out = math.inf
        for j in range(i - k, -1, -1):
            if j != 0 and j < k:
                continue
            head = solve(j)
            if head is math.inf:
                continue
            group_cost = sum(d[j] - d[t] for t in range(j, i))
            out = min(out, head + group_cost)
        best[i] = out
        return out

    return solve(n)


def brute_triangles_per_node(g: Graph) -> np.ndarray:
    """Triple enumeration."""
    n = g.node_count
    out = np.zeros(n, dtype=np.int64)
    for a, b, c in itertools.combinations(range(n), 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            out[a] += 1
            out[b] += 1
            out[c] += 1
    return out


def dense_principal_eigenvector(g: Graph) -> np.ndarray:
    """Dense symmetric eigen-decomposition; normalized, nonnegative-oriented."""
    n = g.node_count
    a = np.zeros((n, n))
    for u, v in g.edge_set():
        a[u, v] = a[v, u] = 1.0
    vals, vecs = np.linalg.eigh(a)
    v = vecs[:, -1]
    v = v / np.linalg.norm(v)
    if v.sum() < 0:
        v = -v
    return v


def threshold_sweep_auc(fakeness: np.ndarray, is_fake: np.ndarray) -> float:
    """Trapezoid over an explicitly swept threshold ROC (oracle for AUC)."""
    thresholds = np.unique(fakeness)[::-1]
    pos = int(is_fake.sum())
    neg = int((~is_fake).sum())
    pts = [(0.0, 0.0)]
    for th in thresholds:
        predicted = fakeness >= th
        tp = int((predicted & is_fake).sum())
        fp = int((predicted & ~is_fake).sum())
        pts.append((fp / neg, tp / pos))
    pts.append((1.0, 1.0))
    arr = np.array(pts)
    return float(np.trapezoid(arr[:, 1], arr[:, 0]))


def brute_window_pairs(trace, window: int) -> list[tuple[int, int]]:
    out = []
    length = len(trace)
    for p in range(length):
        for q in range(length):
            if q != p and abs(q - p) <= window:
                out.append((int(trace[p]), int(trace[q])))
    return out
