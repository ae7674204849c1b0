"""Hardened anonymizers: fake-edge partners are sampled in proportion to a
Gaussian prior over edge plausibility fitted on the original graph, instead
of by residual order (degree anonymization) or uniformly (joint-degree
noise). The privacy targets of the base mechanisms are unchanged; only the
partner choice differs, which makes the added edges blend into the original
plausibility distribution.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from .anonymize import (
    KdaConfig,
    RealizationError,
    SaladpConfig,
    _fix_parity,
    _pick_zero_residual_edge,
    kda_degree_sequence,
    saladp_noise_dk2,
)
from .embedding import Embedding
from .graphs import Graph, GraphBuilder, dk2_series
from .plausibility import EdgeScores


@dataclass(frozen=True)
class PlausibilityPrior:
    """Gaussian MLE over the original graph's edge plausibility scores."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def density(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        z = (s - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "PlausibilityPrior":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(**json.load(fh))


def fit_prior(scores) -> PlausibilityPrior:
    """Maximum-likelihood Gaussian (divisor n) over original-graph scores."""
    x = scores.scores if isinstance(scores, EdgeScores) else np.asarray(scores)
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError("need at least two edge scores to fit the prior")
    sigma = float(x.std())  # ddof=0: MLE
    if sigma == 0.0:
        raise ValueError("edge scores have zero variance; prior undefined")
    return PlausibilityPrior(mu=float(x.mean()), sigma=sigma)


def _coerce_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def weighted_pick(u: int, candidates, m: int, prior: PlausibilityPrior,
                  emb: Embedding, seed=0) -> list[int]:
    """Sample up to m candidates without replacement, weighted by the prior
    density of their plausibility with u.

    Returns every candidate when there are at most m of them. If all densities
    underflow to zero the pick falls back to uniform sampling.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    cand = np.asarray(sorted(int(c) for c in candidates), dtype=np.int64)
    if cand.size == 0:
        return []
    if cand.size <= m:
        return [int(c) for c in cand]
    rng = _coerce_rng(seed)
    unit = emb.unit_vectors()
    sims = unit[cand] @ unit[u]
    weights = prior.density(sims)
    if not np.isfinite(weights).all() or weights.sum() <= 0.0:
        weights = np.ones(cand.size, dtype=np.float64)
    picked: list[int] = []
    alive = np.ones(cand.size, dtype=bool)
    w = weights.copy()
    for _ in range(m):
        total = w[alive].sum()
        if total <= 0.0:
            w = np.where(alive, 1.0, 0.0)
            total = w.sum()
        probs = np.where(alive, w, 0.0) / total
        choice = int(rng.choice(cand.size, p=probs))
        picked.append(int(cand[choice]))
        alive[choice] = False
        w[choice] = 0.0
    return picked


def enhanced_kda_with_info(g: Graph, cfg: KdaConfig, prior: PlausibilityPrior,
                           emb: Embedding) -> tuple[Graph, dict]:
    deg = g.degrees()
    targets = _fix_parity(kda_degree_sequence(deg, cfg.k))
    residual = (targets - deg).astype(np.int64)
    info = {
        "mechanism": "enhanced-kda",
        "k": cfg.k,
        "seed": cfg.seed,
        "residual_total": int(residual.sum()),
        "edges_added": 0,
        "relax_deletions": 0,
        "steps": 0,
    }
    if residual.sum() == 0:
        return g, info

    builder = GraphBuilder(g)
    adj = builder.adj
    rng = np.random.default_rng([cfg.seed & 0x7FFFFFFF, 0xE12A])
    del_rng = random.Random(cfg.seed)
    pool = [(int(u), int(v)) for u, v in g.edge_array()]
    pool_index = {e: i for i, e in enumerate(pool)}
    budget = 10 * max(g.edge_count, 1)
    steps = 0

    while True:
        u = int(np.argmax(residual))
        if residual[u] == 0:
            break
        # stay on u until its residual is met (mirrors the base mechanism)
        while residual[u] > 0:
            positive = np.flatnonzero(residual > 0)
            gamma = [int(v) for v in positive if v != u and v not in adj[u]]
            need = int(residual[u])
            picked = weighted_pick(u, gamma, need, prior, emb, rng) if gamma else []
            if picked:
                for v in picked:
                    builder.add_edge(u, v)
                    e = (u, v) if u < v else (v, u)
                    pool_index[e] = len(pool)
                    pool.append(e)
                    residual[u] -= 1
                    residual[v] -= 1
                    info["edges_added"] += 1
                    steps += 1
            else:
                blocked = set(adj[u])
                blocked.add(u)
                e = _pick_zero_residual_edge(del_rng, pool, residual, blocked)
                if e is None:
                    info["steps"] = steps
                    info["unmet_residual"] = int(residual.sum())
                    raise RealizationError("no deletable edge available for relaxation", info)
                i = pool_index.pop(e)
                last = pool.pop()
                if last != e:
                    pool[i] = last
                    pool_index[last] = i
                builder.remove_edge(*e)
                residual[e[0]] += 1
                residual[e[1]] += 1
                info["relax_deletions"] += 1
                steps += 1
            if steps > budget:
                info["steps"] = steps
                info["unmet_residual"] = int(residual.sum())
                raise RealizationError("retry budget exhausted during realization", info)

    info["steps"] = steps
    return builder.build(), info


def enhanced_kda(g: Graph, cfg: KdaConfig, prior: PlausibilityPrior,
                 emb: Embedding) -> Graph:
    """Degree anonymization with plausibility-weighted partner sampling."""
    out, _ = enhanced_kda_with_info(g, cfg, prior, emb)
    return out


def enhanced_saladp_with_info(g: Graph, cfg: SaladpConfig, prior: PlausibilityPrior,
                              emb: Embedding) -> tuple[Graph, dict]:
    original = dk2_series(g)
    noised = saladp_noise_dk2(original, cfg.epsilon, cfg.seed)

    deg = g.degrees()
    groups: dict[int, np.ndarray] = {}
    for value in np.unique(deg):
        groups[int(value)] = np.flatnonzero(deg == value)

    edges = g.edge_array()
    lo = np.minimum(deg[edges[:, 0]], deg[edges[:, 1]])
    hi = np.maximum(deg[edges[:, 0]], deg[edges[:, 1]])
    edges_by_cell: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for idx in range(edges.shape[0]):
        key = (int(lo[idx]), int(hi[idx]))
        edges_by_cell.setdefault(key, []).append((int(edges[idx, 0]), int(edges[idx, 1])))

    builder = GraphBuilder(g)
    adj = builder.adj
    rng = np.random.default_rng([cfg.seed, 0x5A1AD2])
    info = {
        "mechanism": "enhanced-saladp",
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
        "edges_added": 0,
        "edges_deleted": 0,
        "unmet": {},
    }

    all_cells = sorted(set(original.cells) | set(noised.cells))
    deltas = {c: noised.get(*c) - original.get(*c) for c in all_cells}

    for cell in all_cells:
        d = deltas[cell]
        if d <= 0:
            continue
        i, j = cell
        side_a = groups[i]
        side_b = groups[j]
        need = d
        cell_saturated = False
        while need > 0 and not cell_saturated:
            placed = False
            for _ in range(50):
                a = int(side_a[rng.integers(side_a.size)])
                gamma = [int(b) for b in side_b if b != a and b not in adj[a]]
                if not gamma:
                    continue
                pick = weighted_pick(a, gamma, 1, prior, emb, rng)
                builder.add_edge(a, pick[0])
                info["edges_added"] += 1
                need -= 1
                placed = True
                break
            if not placed:
                cell_saturated = True
        if need > 0:
            info["unmet"][f"{i},{j}"] = int(need)

    from .anonymize import DELETION_BUDGET_FRACTION

    budget = int(DELETION_BUDGET_FRACTION * info["edges_added"])
    del_rng = np.random.default_rng([cfg.seed, 0xDE1E7E])
    for cell in all_cells:
        d = deltas[cell]
        if d >= 0:
            continue
        pool = edges_by_cell.get(cell, [])
        take = del_rng.permutation(len(pool))[: -d]
        unmet = 0
        for idx in take:
            if info["edges_deleted"] >= budget:
                unmet += 1
                continue
            builder.remove_edge(*pool[int(idx)])
            info["edges_deleted"] += 1
        if unmet:
            info["unmet"][f"{cell[0]},{cell[1]}"] = -unmet

    return builder.build(), info


def enhanced_saladp(g: Graph, cfg: SaladpConfig, prior: PlausibilityPrior,
                    emb: Embedding) -> Graph:
    """Joint-degree noise realization with plausibility-weighted partners."""
    out, _ = enhanced_saladp_with_info(g, cfg, prior, emb)
    return out
