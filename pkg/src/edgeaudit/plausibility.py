"""Edge plausibility: vector similarity of endpoint embeddings plus the
classical structural-proximity baselines.

Every metric is exposed under a "higher means more plausible" contract, so
the two distance metrics are negated when edges are scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .embedding import Embedding
from .graphs import Graph

EMBEDDING_METRICS = ("cosine", "euclidean", "bray_curtis")
STRUCTURAL_METRICS = ("embeddedness", "jaccard", "adamic_adar")
ALL_METRICS = EMBEDDING_METRICS + STRUCTURAL_METRICS


def cosine(f_u: np.ndarray, f_v: np.ndarray) -> float:
    """Cosine similarity; raises on a zero-norm vector."""
    f_u = np.asarray(f_u, dtype=np.float64)
    f_v = np.asarray(f_v, dtype=np.float64)
    nu = np.linalg.norm(f_u)
    nv = np.linalg.norm(f_v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for a zero-norm vector")
    return float(np.clip(np.dot(f_u, f_v) / (nu * nv), -1.0, 1.0))


def euclidean(f_u: np.ndarray, f_v: np.ndarray) -> float:
    """L2 distance between the two vectors."""
    return float(np.linalg.norm(np.asarray(f_u, dtype=np.float64) - np.asarray(f_v, dtype=np.float64)))


def bray_curtis(f_u: np.ndarray, f_v: np.ndarray) -> float:
    """sum|ui - vi| / sum|ui + vi|; raises when the denominator is zero."""
    f_u = np.asarray(f_u, dtype=np.float64)
    f_v = np.asarray(f_v, dtype=np.float64)
    denom = float(np.abs(f_u + f_v).sum())
    if denom == 0.0:
        raise ValueError("bray_curtis undefined: zero denominator")
    return float(np.abs(f_u - f_v).sum() / denom)


class StructuralScores(NamedTuple):
    embeddedness: int
    jaccard: float
    adamic_adar: float


def structural_baselines(g: Graph, edge: tuple[int, int]) -> StructuralScores:
    """Common-neighbor count, Jaccard index and Adamic-Adar score of an edge."""
    u, v = edge
    nu = g.neighbors(u)
    nv = g.neighbors(v)
    common = nu & nv
    union = len(nu | nv)
    jac = len(common) / union if union else 0.0
    aa = 0.0
    for w in common:
        dw = g.degree(w)
        # a common neighbor of two adjacent nodes has degree >= 2 in a
        # simple graph, so log(dw) is never zero here
        aa += 1.0 / math.log(dw)
    return StructuralScores(embeddedness=len(common), jaccard=jac, adamic_adar=aa)


@dataclass(frozen=True)
class EdgeScores:
    """One plausibility score per edge, in (u, v)-sorted edge order."""

    edges: np.ndarray  # (m, 2) int64, u < v
    scores: np.ndarray  # (m,) float64
    metric: str

    def __post_init__(self):
        if self.edges.shape[0] != self.scores.shape[0]:
            raise ValueError("edges and scores length mismatch")

    def __len__(self) -> int:
        return self.scores.shape[0]

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        for (u, v), s in zip(self.edges, self.scores):
            yield int(u), int(v), float(s)

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u,v,score,metric\n")
            for u, v, s in self:
                fh.write(f"{u},{v},{s:.17g},{self.metric}\n")

    @classmethod
    def load_csv(cls, path) -> "EdgeScores":
        edges = []
        scores = []
        metric = ""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.startswith("u,v,score"):
                raise ValueError(f"unexpected scores header: {header!r}")
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) < 4:
                    continue
                edges.append((int(parts[0]), int(parts[1])))
                scores.append(float(parts[2]))
                metric = parts[3]
        return cls(
            edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
            scores=np.asarray(scores, dtype=np.float64),
            metric=metric,
        )


def _embedding_scores(edges: np.ndarray, emb: Embedding, metric: str) -> np.ndarray:
    vec = emb.vectors.astype(np.float64)
    a = vec[edges[:, 0]]
    b = vec[edges[:, 1]]
    if metric == "cosine":
        norms = np.linalg.norm(vec, axis=1)
        bad = np.flatnonzero(norms == 0)
        used = np.unique(edges)
        zero_used = np.intersect1d(bad, used)
        if zero_used.size:
            raise ValueError(f"zero-norm embedding vector for node {int(zero_used[0])}")
        na = norms[edges[:, 0]]
        nb = norms[edges[:, 1]]
        return np.clip(np.einsum("ij,ij->i", a, b) / (na * nb), -1.0, 1.0)
    if metric == "euclidean":
        return -np.linalg.norm(a - b, axis=1)
    if metric == "bray_curtis":
        denom = np.abs(a + b).sum(axis=1)
        zero = np.flatnonzero(denom == 0)
        if zero.size:
            u, v = edges[zero[0]]
            raise ValueError(f"bray_curtis denominator is zero for edge ({u},{v})")
        return -(np.abs(a - b).sum(axis=1) / denom)
    raise ValueError(f"unknown embedding metric {metric!r}")


def score_edges(g: Graph, metric: str, emb: Embedding | None = None) -> EdgeScores:
    """Score every edge of `g`; distances are negated so higher is always
    more plausible."""
    edges = g.edge_array()
    if metric in EMBEDDING_METRICS:
        if emb is None:
            raise ValueError(f"metric {metric!r} needs an embedding")
        if emb.node_count < g.node_count:
            raise ValueError(
                f"embedding covers {emb.node_count} nodes, graph has {g.node_count}"
            )
        scores = _embedding_scores(edges, emb, metric)
    elif metric in STRUCTURAL_METRICS:
        idx = STRUCTURAL_METRICS.index(metric)
        scores = np.fromiter(
            (structural_baselines(g, (int(u), int(v)))[idx] for u, v in edges),
            dtype=np.float64,
            count=edges.shape[0],
        )
    else:
        raise ValueError(f"unknown metric {metric!r}; choose from {ALL_METRICS}")
    return EdgeScores(edges=edges, scores=scores, metric=metric)
