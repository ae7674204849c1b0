"""Unsupervised fake-edge classification.

Edge plausibility scores are fit with a two-component Gaussian mixture by EM;
the component with the smaller mean is taken to be the fake-edge population.
Each edge is then labeled by its maximum posterior, and the recovered graph
is the anonymized graph minus all predicted-fake edges.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .graphs import Graph, subtract_edges
from .plausibility import EdgeScores

SIGMA_FLOOR = 1e-4
MAX_EM_ITERATIONS = 500
DEFAULT_TOL = 1e-3
DEFAULT_RESTARTS = 5


class DegenerateScoresError(ValueError):
    """All scores identical: a two-component mixture cannot be fit."""


@dataclass(frozen=True)
class GmmParams:
    """Two-component mixture; component 1 is the fake (smaller-mean) one."""

    w0: float
    mu0: float
    sigma0: float
    w1: float
    mu1: float
    sigma1: float
    loglik: float = float("nan")
    iterations: int = 0
    converged: bool = True

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "GmmParams":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(**json.load(fh))


@dataclass(frozen=True)
class PosteriorTable:
    """Per-edge posteriors and MAP labels (label True = fake)."""

    edges: np.ndarray
    scores: np.ndarray
    p_original: np.ndarray
    p_fake: np.ndarray
    labels: np.ndarray

    def predicted_fake_edges(self) -> frozenset[tuple[int, int]]:
        picked = self.edges[self.labels]
        return frozenset((int(u), int(v)) for u, v in picked)

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u,v,score,p_original,p_fake,label\n")
            for i in range(self.edges.shape[0]):
                u, v = self.edges[i]
                label = "fake" if self.labels[i] else "original"
                fh.write(
                    f"{u},{v},{self.scores[i]:.17g},"
                    f"{self.p_original[i]:.17g},{self.p_fake[i]:.17g},{label}\n"
                )


def _as_scores(scores) -> np.ndarray:
    arr = scores.scores if isinstance(scores, EdgeScores) else np.asarray(scores)
    return np.asarray(arr, dtype=np.float64).ravel()


def _log_normal_pdf(x: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    return -0.5 * np.log(2.0 * np.pi * sigma * sigma) - (x - mu) ** 2 / (2.0 * sigma * sigma)


def _em_once(x: np.ndarray, mu: np.ndarray, sigma: np.ndarray, w: np.ndarray,
             tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, int, bool]:
    n = x.size
    prev_ll = -np.inf
    converged = False
    iterations = 0
    for iterations in range(1, MAX_EM_ITERATIONS + 1):
        log_comp = np.stack([
            np.log(w[0]) + _log_normal_pdf(x, mu[0], sigma[0]),
            np.log(w[1]) + _log_normal_pdf(x, mu[1], sigma[1]),
        ])
        m = log_comp.max(axis=0)
        log_total = m + np.log(np.exp(log_comp - m).sum(axis=0))
        ll = float(log_total.sum())
        if not ll >= prev_ll - 1e-9 * max(1.0, abs(prev_ll)):
            raise AssertionError(
                f"EM log-likelihood decreased: {prev_ll} -> {ll} at iteration {iterations}"
            )
        resp = np.exp(log_comp - log_total)

        totals = resp.sum(axis=1)
        totals = np.maximum(totals, 1e-300)
        mu = (resp @ x) / totals
        var = np.array([
            float(resp[0] @ (x - mu[0]) ** 2) / totals[0],
            float(resp[1] @ (x - mu[1]) ** 2) / totals[1],
        ])
        sigma = np.maximum(np.sqrt(var), SIGMA_FLOOR)
        w = totals / n
        w = np.maximum(w, 1e-12)
        w = w / w.sum()

        if abs(ll - prev_ll) < tol:
            converged = True
            prev_ll = ll
            break
        prev_ll = ll
    return mu, sigma, w, prev_ll, iterations, converged


def fit_gmm(scores, tol: float = DEFAULT_TOL, seed: int = 0,
            restarts: int = DEFAULT_RESTARTS) -> GmmParams:
    """EM fit of the two-component mixture, best of `restarts` seeded starts.

    Initial means sit at the 10th/90th score percentiles (restarts jitter
    them), sigmas start at the sample standard deviation and weights at 1/2.
    Convergence is a log-likelihood delta below `tol`.
    """
    x = _as_scores(scores)
    if x.size < 2 or np.unique(x).size < 2:
        raise DegenerateScoresError("need at least two distinct score values")

    base_lo, base_hi = np.percentile(x, [10.0, 90.0])
    spread = float(x.std())
    if spread < SIGMA_FLOOR:
        spread = SIGMA_FLOOR
    rng = np.random.default_rng(seed)

    best: tuple[float, tuple] | None = None
    for r in range(max(1, restarts)):
        if r == 0:
            mu = np.array([base_hi, base_lo], dtype=np.float64)
        else:
            jitter = rng.normal(0.0, 0.25 * spread, size=2)
            mu = np.array([base_hi + jitter[0], base_lo + jitter[1]], dtype=np.float64)
        sigma = np.array([spread, spread], dtype=np.float64)
        w = np.array([0.5, 0.5], dtype=np.float64)
        mu_f, sigma_f, w_f, ll, iters, conv = _em_once(x, mu, sigma, w, tol)
        if best is None or ll > best[0]:
            best = (ll, (mu_f, sigma_f, w_f, iters, conv))

    ll, (mu, sigma, w, iters, conv) = best
    # component 1 is the fake population: the one with the smaller mean
    orig, fake = (0, 1) if mu[0] >= mu[1] else (1, 0)
    return GmmParams(
        w0=float(w[orig]), mu0=float(mu[orig]), sigma0=float(sigma[orig]),
        w1=float(w[fake]), mu1=float(mu[fake]), sigma1=float(sigma[fake]),
        loglik=ll, iterations=iters, converged=bool(conv),
    )


def posterior_probabilities(scores: np.ndarray, params: GmmParams) -> tuple[np.ndarray, np.ndarray]:
    """Bayes posteriors P(original|s), P(fake|s) under the fitted mixture."""
    x = np.asarray(scores, dtype=np.float64)
    log0 = np.log(max(params.w0, 1e-300)) + _log_normal_pdf(x, params.mu0, params.sigma0)
    log1 = np.log(max(params.w1, 1e-300)) + _log_normal_pdf(x, params.mu1, params.sigma1)
    m = np.maximum(log0, log1)
    denom = m + np.log(np.exp(log0 - m) + np.exp(log1 - m))
    return np.exp(log0 - denom), np.exp(log1 - denom)


def map_classify(scores: EdgeScores, params: GmmParams) -> PosteriorTable:
    """Label each edge fake iff P(fake|s) > P(original|s); ties stay original."""
    p0, p1 = posterior_probabilities(scores.scores, params)
    labels = p1 > p0
    return PosteriorTable(
        edges=scores.edges,
        scores=np.asarray(scores.scores, dtype=np.float64),
        p_original=p0,
        p_fake=p1,
        labels=labels,
    )


def recover_graph(ga: Graph, table: PosteriorTable) -> Graph:
    """Delete all predicted-fake edges from the anonymized graph."""
    covered = {(int(u), int(v)) for u, v in table.edges}
    actual = ga.edge_set()
    if covered != actual:
        raise ValueError(
            f"posterior table covers {len(covered)} edges, graph has {len(actual)}"
        )
    return subtract_edges(ga, table.predicted_fake_edges())


def baseline_random(ga: Graph, n_fake: int, seed: int = 0) -> frozenset[tuple[int, int]]:
    """Uniform sample of n_fake edges without replacement."""
    edges = ga.edge_array()
    m = edges.shape[0]
    if n_fake > m:
        raise ValueError(f"n_fake={n_fake} exceeds edge count {m}")
    rng = np.random.default_rng(seed)
    picked = rng.choice(m, size=n_fake, replace=False)
    return frozenset((int(edges[i, 0]), int(edges[i, 1])) for i in picked)
