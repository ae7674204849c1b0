"""Attack evaluation and privacy/utility measurement.

AUC is computed with the rank statistic (probability that a random fake edge
ranks as more fake than a random original edge, ties at half weight), which
equals the trapezoidal integral of the tie-collapsed ROC curve; both are
produced so they can be cross-checked. Privacy loss is measured as mean
absolute degree difference, mean absolute joint-degree noise over graph
samples, and the empirical entropy (bits) of the per-cell noise values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse
from scipy.stats import rankdata

from .graphs import EdgeDiff, Graph, dk2_series
from .plausibility import EdgeScores


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration cap."""


@dataclass(frozen=True)
class RocResult:
    points: np.ndarray  # (k, 2) rows of (fpr, tpr), from (0,0) to (1,1)
    auc: float
    auc_trapezoid: float

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("fpr,tpr\n")
            for fpr, tpr in self.points:
                fh.write(f"{fpr:.17g},{tpr:.17g}\n")


@dataclass(frozen=True)
class PrivacyReport:
    delta_A: float | None = None
    delta_R: float | None = None
    zeta_A: float | None = None
    zeta_R: float | None = None
    entropy_A: float | None = None
    entropy_R: float | None = None


@dataclass(frozen=True)
class UtilityReport:
    anonymized: dict = field(default_factory=dict)
    enhanced: dict = field(default_factory=dict)


def rank_auc(fakeness: np.ndarray, is_fake: np.ndarray) -> float:
    """Mann-Whitney AUC with midranks for ties."""
    fakeness = np.asarray(fakeness, dtype=np.float64)
    is_fake = np.asarray(is_fake, dtype=bool)
    n_pos = int(is_fake.sum())
    n_neg = is_fake.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one fake and one original edge")
    ranks = rankdata(fakeness, method="average")
    u = float(ranks[is_fake].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def roc_points(fakeness: np.ndarray, is_fake: np.ndarray) -> np.ndarray:
    """Tie-collapsed ROC curve over all thresholds, descending fakeness."""
    fakeness = np.asarray(fakeness, dtype=np.float64)
    is_fake = np.asarray(is_fake, dtype=bool)
    n_pos = int(is_fake.sum())
    n_neg = is_fake.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one fake and one original edge")
    order = np.argsort(-fakeness, kind="stable")
    sorted_f = fakeness[order]
    sorted_l = is_fake[order]
    boundary = np.flatnonzero(np.diff(sorted_f) != 0)
    cut = np.concatenate((boundary, [sorted_f.size - 1]))
    tp = np.cumsum(sorted_l)[cut]
    fp = np.cumsum(~sorted_l)[cut]
    points = np.concatenate(
        ([[0.0, 0.0]], np.stack([fp / n_neg, tp / n_pos], axis=1))
    )
    return points


def roc_auc(scores: EdgeScores, truth: EdgeDiff) -> RocResult:
    """ROC/AUC for fake-edge detection; fakeness is negated plausibility."""
    added = truth.added
    is_fake = np.fromiter(
        ((int(u), int(v)) in added for u, v in scores.edges),
        dtype=bool,
        count=len(scores),
    )
    fakeness = -np.asarray(scores.scores, dtype=np.float64)
    points = roc_points(fakeness, is_fake)
    auc = rank_auc(fakeness, is_fake)
    trap = float(np.trapezoid(points[:, 1], points[:, 0]))
    return RocResult(points=points, auc=auc, auc_trapezoid=trap)


def precision_recall(predicted: Sequence | frozenset, truth: EdgeDiff) -> tuple[float, float]:
    """Precision and recall of a predicted fake-edge set against the diff."""
    pred = {(int(u), int(v)) if u < v else (int(v), int(u)) for u, v in predicted}
    if not pred:
        raise ValueError("empty prediction set: precision undefined")
    if not truth.added:
        raise ValueError("no fake edges in the ground truth: recall undefined")
    hit = len(pred & truth.added)
    return hit / len(pred), hit / len(truth.added)


def degree_difference(g: Graph, other: Graph) -> float:
    """Mean absolute per-node degree difference."""
    if g.node_count != other.node_count:
        raise ValueError("node universe mismatch")
    return float(np.abs(g.degrees() - other.degrees()).mean())


def dk2_noise_stats(g: Graph, samples: Sequence[Graph]) -> tuple[float, float]:
    """Mean absolute joint-degree noise and mean empirical entropy (bits).

    For every cell of the union of the original and sampled dK-2 series, the
    noise sample list is the per-sample count minus the original count (zero
    when absent). Entropy is the Shannon entropy of the observed noise-value
    frequencies, averaged over cells.
    """
    if not samples:
        raise ValueError("need at least one sampled graph")
    base = dk2_series(g)
    series = []
    for s in samples:
        if s.node_count != g.node_count:
            raise ValueError("sampled graph has a different node universe")
        series.append(dk2_series(s))
    cells = set(base.cells)
    for s in series:
        cells.update(s.cells)
    zeta_sum = 0.0
    entropy_sum = 0.0
    n_samples = len(series)
    for cell in cells:
        base_count = base.get(*cell)
        noise = np.asarray([s.get(*cell) - base_count for s in series], dtype=np.float64)
        zeta_sum += float(np.abs(noise).mean())
        _, counts = np.unique(noise, return_counts=True)
        p = counts / n_samples
        entropy_sum += float(-(p * np.log2(p)).sum())
    n_cells = len(cells)
    return zeta_sum / n_cells, entropy_sum / n_cells


@dataclass(frozen=True)
class UtilityVectors:
    degree_distribution: np.ndarray
    eigencentrality: np.ndarray
    triangle_count: np.ndarray


def _adjacency_matrix(g: Graph) -> scipy.sparse.csr_matrix:
    edges = g.edge_array()
    n = g.node_count
    if edges.shape[0] == 0:
        return scipy.sparse.csr_matrix((n, n))
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.ones(rows.size)
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def eigencentrality(g: Graph, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Principal adjacency eigenvector, L2-normalized, nonnegative.

    Iterates (A + I) x, which shares eigenvectors with A but cannot oscillate
    on bipartite graphs; starts uniform so the dominant component wins.
    """
    n = g.node_count
    if g.edge_count == 0:
        raise PowerIterationError("eigencentrality undefined on an edgeless graph")
    a = _adjacency_matrix(g)
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = a @ x + x
        norm = np.linalg.norm(y)
        if norm == 0:
            raise PowerIterationError("power iteration collapsed to zero")
        y /= norm
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    else:
        raise PowerIterationError(f"no convergence within {max_iter} iterations")
    if x.sum() < 0:
        x = -x
    return np.maximum(x, 0.0) if np.all(x > -1e-12) else x


def triangle_counts(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    a = _adjacency_matrix(g)
    if g.edge_count == 0:
        return np.zeros(g.node_count, dtype=np.int64)
    a2 = a @ a
    tri = np.asarray(a2.multiply(a).sum(axis=1)).ravel() / 2.0
    return np.round(tri).astype(np.int64)


def utility_vectors(g: Graph) -> UtilityVectors:
    """Degree distribution, eigencentrality and per-node triangle counts."""
    deg = g.degrees()
    dist = np.bincount(deg) / g.node_count
    return UtilityVectors(
        degree_distribution=dist,
        eigencentrality=eigencentrality(g),
        triangle_count=triangle_counts(g),
    )


def _cosine_padded(a: np.ndarray, b: np.ndarray, what: str) -> float:
    size = max(a.size, b.size)
    pa = np.zeros(size)
    pb = np.zeros(size)
    pa[: a.size] = a
    pb[: b.size] = b
    na = np.linalg.norm(pa)
    nb = np.linalg.norm(pb)
    if na == 0 or nb == 0:
        raise ValueError(f"zero {what} vector: cosine similarity undefined")
    return float(np.clip(pa @ pb / (na * nb), -1.0, 1.0))


def utility_similarity(a: UtilityVectors, b: UtilityVectors) -> dict[str, float]:
    """Cosine similarity per property (degree dists are zero-padded)."""
    if a.eigencentrality.size != b.eigencentrality.size:
        raise ValueError("per-node vectors must cover the same node universe")
    return {
        "degree_distribution": _cosine_padded(
            a.degree_distribution, b.degree_distribution, "degree-distribution"
        ),
        "eigencentrality": _cosine_padded(a.eigencentrality, b.eigencentrality, "eigencentrality"),
        "triangle_count": _cosine_padded(
            a.triangle_count.astype(np.float64), b.triangle_count.astype(np.float64),
            "triangle-count",
        ),
    }


def compare_utility(g: Graph, other: Graph) -> dict[str, float]:
    return utility_similarity(utility_vectors(g), utility_vectors(other))
