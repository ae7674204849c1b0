"""Truncated random-walk corpora and skip-gram node embeddings.

Walks take uniform steps among neighbors; every walk owns an RNG stream
derived from (seed, start node, pass index), so corpora are reproducible
regardless of how generation is scheduled. Training maximizes the
negative-sampling surrogate of the walk co-occurrence softmax objective by
SGD over (center, context) pairs: the center row of the main table and the
context/negative rows of a separate context table are nudged per pair, with
the learning rate decaying linearly over all pairs. Single-worker training is
bit-reproducible; extra workers update the shared tables without locking and
trade determinism for speed.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from .graphs import Graph

_U64 = np.uint64
_EXP_TABLE_SIZE = 1000
_MAX_EXP = 6.0


class TrainingDivergedError(RuntimeError):
    """Non-finite values appeared in the embedding tables."""


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int
    walk_times: int
    window: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.walk_length < 1 or self.walk_times < 1 or self.window < 1:
            raise ValueError("walk_length, walk_times and window must all be >= 1")


@dataclass(frozen=True)
class TrainConfig:
    dimension: int
    negative_samples: int = 5
    initial_lr: float = 0.025
    final_lr: float = 0.00025
    epochs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.negative_samples < 1:
            raise ValueError("negative_samples must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


class WalkCorpus:
    """Fixed-width matrix of walk traces plus per-trace lengths."""

    def __init__(self, walks: np.ndarray, lengths: np.ndarray, node_count: int,
                 config: WalkConfig):
        self.walks = walks
        self.lengths = lengths
        self.node_count = node_count
        self.config = config

    def __len__(self) -> int:
        return self.walks.shape[0]

    def trace(self, i: int) -> np.ndarray:
        return self.walks[i, : self.lengths[i]]

    def iter_traces(self) -> Iterator[np.ndarray]:
        for i in range(len(self)):
            yield self.trace(i)

    def token_counts(self) -> np.ndarray:
        counts = np.zeros(self.node_count, dtype=np.int64)
        for i in range(len(self)):
            counts += np.bincount(self.trace(i), minlength=self.node_count)
        return counts

    def pair_count(self, window: int | None = None) -> int:
        """Exact number of (center, context) pairs within the window."""
        w = self.config.window if window is None else window
        total = 0
        lengths, reps = np.unique(self.lengths, return_counts=True)
        for length, rep in zip(lengths, reps):
            p = np.arange(length)
            per = np.minimum(p + w, length - 1) - np.maximum(p - w, 0)
            total += int(per.sum()) * int(rep)
        return total


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + _U64(0x9E3779B97F4A7C15)).astype(_U64)
    z = x
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def _walk_seeds(seed: int, nodes: np.ndarray, pass_idx: int) -> np.ndarray:
    base = _splitmix64(np.asarray([seed], dtype=_U64))[0]
    mixed = _splitmix64(nodes.astype(_U64) ^ base)
    mixed = _splitmix64(mixed ^ _U64(pass_idx * 0x9E3779B97F4A7C15 & 0xFFFFFFFFFFFFFFFF))
    return np.where(mixed == 0, _U64(0x1234567898765432), mixed)


@njit(cache=True)
def _walks_kernel(indptr, indices, starts, seeds, walk_length, walks, lengths):
    for w in range(starts.shape[0]):
        state = seeds[w]
        node = starts[w]
        walks[w, 0] = node
        length = 1
        for _ in range(walk_length):
            lo = indptr[node]
            deg = indptr[node + 1] - lo
            if deg == 0:
                break
            state ^= state >> np.uint64(12)
            state ^= (state << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
            state ^= state >> np.uint64(27)
            mixed = (state * np.uint64(2685821657736338717)) & np.uint64(0xFFFFFFFFFFFFFFFF)
            r32 = mixed >> np.uint64(32)
            idx = (r32 * np.uint64(deg)) >> np.uint64(32)
            node = indices[lo + idx]
            walks[w, length] = node
            length += 1
        lengths[w] = length


def _csr_adjacency(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    n = g.node_count
    indptr = np.zeros(n + 1, dtype=np.int64)
    degs = g.degrees()
    indptr[1:] = np.cumsum(degs)
    indices = np.empty(int(degs.sum()), dtype=np.int32)
    for u in range(n):
        nb = sorted(g.neighbors(u))
        indices[indptr[u] : indptr[u + 1]] = nb
    return indptr, indices


def single_walk(g: Graph, start: int, walk_length: int, seed: int = 0) -> list[int]:
    """One truncated random walk; a degree-0 start yields the singleton trace."""
    indptr, indices = _csr_adjacency(g)
    starts = np.asarray([start], dtype=np.int32)
    seeds = _walk_seeds(seed, starts.astype(np.int64), 0)
    walks = np.zeros((1, walk_length + 1), dtype=np.int32)
    lengths = np.zeros(1, dtype=np.int32)
    _walks_kernel(indptr, indices, starts, seeds, walk_length, walks, lengths)
    return walks[0, : lengths[0]].tolist()


def generate_walks(g: Graph, cfg: WalkConfig) -> WalkCorpus:
    """`walk_times` truncated walks from every node of degree >= 1."""
    indptr, indices = _csr_adjacency(g)
    active = np.flatnonzero(g.degrees() > 0).astype(np.int32)
    n_active = active.size
    rows = n_active * cfg.walk_times
    walks = np.zeros((max(rows, 1), cfg.walk_length + 1), dtype=np.int32)
    lengths = np.zeros(max(rows, 1), dtype=np.int32)
    starts = np.empty(rows, dtype=np.int32)
    seeds = np.empty(rows, dtype=_U64)
    for p in range(cfg.walk_times):
        order_rng = np.random.default_rng([cfg.seed & 0x7FFFFFFF, 0x77A1C5, p])
        order = active[order_rng.permutation(n_active)]
        starts[p * n_active : (p + 1) * n_active] = order
        seeds[p * n_active : (p + 1) * n_active] = _walk_seeds(cfg.seed, order.astype(np.int64), p)
    if rows:
        _walks_kernel(indptr, indices, starts, seeds, cfg.walk_length, walks, lengths)
    return WalkCorpus(walks[:rows], lengths[:rows], g.node_count, cfg)


def neighborhood_pairs(corpus: WalkCorpus, window: int) -> Iterator[tuple[int, int]]:
    """All (center, context) pairs with |position gap| <= window, trace by trace."""
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    for trace in corpus.iter_traces():
        length = trace.shape[0]
        for p in range(length):
            lo = max(0, p - window)
            hi = min(length - 1, p + window)
            for q in range(lo, hi + 1):
                if q != p:
                    yield int(trace[p]), int(trace[q])


def _sigmoid_tables() -> tuple[np.ndarray, np.ndarray]:
    x = (np.arange(_EXP_TABLE_SIZE) / _EXP_TABLE_SIZE * 2.0 - 1.0) * _MAX_EXP
    sig = 1.0 / (1.0 + np.exp(-x))
    return sig.astype(np.float32), np.log(sig).astype(np.float32)


def _negative_table(counts: np.ndarray, size: int) -> np.ndarray:
    """Unigram^(3/4) sampling table laid out node-by-node (word2vec style)."""
    weights = np.power(counts.astype(np.float64), 0.75)
    total = weights.sum()
    if total <= 0:
        raise ValueError("corpus has no tokens")
    table = np.empty(size, dtype=np.int32)
    i = 0
    cum = weights[0] / total
    for a in range(size):
        table[a] = i
        if (a + 1) / size > cum and i < counts.size - 1:
            i += 1
            cum += weights[i] / total
    return table


@njit(cache=True, fastmath=True, nogil=True)
def _train_kernel(walks, lengths, row_lo, row_hi, wv, cv, neg_table, window,
                  negative, alpha0, alpha_end, pair_offset, total_pairs,
                  rng_state, exp_table, log_table, track_loss, loss_sums,
                  loss_counts):
    d = wv.shape[1]
    table_len = np.uint64(neg_table.shape[0])
    table_size = exp_table.shape[0]
    neu = np.empty(d, dtype=np.float32)
    pairs_done = pair_offset
    state = rng_state
    for r in range(row_lo, row_hi):
        length = lengths[r]
        for p in range(length):
            u = walks[r, p]
            lo = p - window
            if lo < 0:
                lo = 0
            hi = p + window
            if hi > length - 1:
                hi = length - 1
            for q in range(lo, hi + 1):
                if q == p:
                    continue
                ctx = walks[r, q]
                progress = pairs_done / total_pairs
                alpha = np.float32(alpha0 + (alpha_end - alpha0) * progress)
                if alpha < alpha_end:
                    alpha = np.float32(alpha_end)
                for t in range(d):
                    neu[t] = 0.0
                pair_loss = 0.0
                for s in range(negative + 1):
                    if s == 0:
                        target = ctx
                        label = np.float32(1.0)
                    else:
                        state ^= state >> np.uint64(12)
                        state ^= (state << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
                        state ^= state >> np.uint64(27)
                        mixed = (state * np.uint64(2685821657736338717)) & np.uint64(0xFFFFFFFFFFFFFFFF)
                        target = neg_table[int(mixed % table_len)]
                        if target == ctx:
                            continue
                        label = np.float32(0.0)
                    dot = np.float32(0.0)
                    for t in range(d):
                        dot += wv[u, t] * cv[target, t]
                    if dot > _MAX_EXP:
                        sig = np.float32(1.0)
                    elif dot < -_MAX_EXP:
                        sig = np.float32(0.0)
                    else:
                        bin_idx = int((dot + _MAX_EXP) * (table_size / (2.0 * _MAX_EXP)))
                        if bin_idx >= table_size:
                            bin_idx = table_size - 1
                        sig = exp_table[bin_idx]
                    if track_loss:
                        # loss wants log sigma(dot) for the positive and
                        # log sigma(-dot) for negatives
                        x = dot if s == 0 else -dot
                        if x > _MAX_EXP:
                            pair_loss -= 0.0
                        elif x < -_MAX_EXP:
                            pair_loss -= x
                        else:
                            bi = int((x + _MAX_EXP) * (table_size / (2.0 * _MAX_EXP)))
                            if bi >= table_size:
                                bi = table_size - 1
                            pair_loss -= log_table[bi]
                    grad = (label - sig) * alpha
                    for t in range(d):
                        neu[t] += grad * cv[target, t]
                    for t in range(d):
                        cv[target, t] += grad * wv[u, t]
                for t in range(d):
                    wv[u, t] += neu[t]
                if track_loss:
                    bucket = int(4 * pairs_done // total_pairs)
                    if bucket > 3:
                        bucket = 3
                    loss_sums[bucket] += pair_loss
                    loss_counts[bucket] += 1
                pairs_done += 1
    return pairs_done


class Embedding:
    """Per-node real vectors; row index is the node id."""

    def __init__(self, vectors: np.ndarray):
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValueError("embedding matrix must be 2-D")
        vectors.setflags(write=False)
        self.vectors = vectors
        self._unit: np.ndarray | None = None

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def vector(self, u: int) -> np.ndarray:
        return self.vectors[u]

    def unit_vectors(self) -> np.ndarray:
        """Row-normalized copy (zero rows stay zero); cached."""
        if self._unit is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            safe = np.where(norms == 0, 1.0, norms)
            unit = (self.vectors / safe).astype(np.float32)
            unit.setflags(write=False)
            self._unit = unit
        return self._unit

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(
            np.array_equal(self.vectors, other.vectors)
        )

    def save_text(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.node_count} {self.dimension}\n")
            for u in range(self.node_count):
                row = " ".join(f"{x:.9g}" for x in self.vectors[u])
                fh.write(f"{u} {row}\n")

    @classmethod
    def load_text(cls, path) -> "Embedding":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            n, d = int(header[0]), int(header[1])
            vectors = np.zeros((n, d), dtype=np.float32)
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                u = int(parts[0])
                vectors[u] = [float(x) for x in parts[1 : d + 1]]
        return cls(vectors)

    def save_binary(self, path) -> None:
        with open(path, "wb") as fh:
            np.asarray([self.node_count, self.dimension], dtype="<i8").tofile(fh)
            self.vectors.astype("<f4").tofile(fh)

    @classmethod
    def load_binary(cls, path) -> "Embedding":
        with open(path, "rb") as fh:
            n, d = np.fromfile(fh, dtype="<i8", count=2)
            vectors = np.fromfile(fh, dtype="<f4", count=int(n) * int(d))
        return cls(vectors.reshape(int(n), int(d)))


def _run_training(corpus: WalkCorpus, cfg: TrainConfig, workers: int,
                  track_loss: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = corpus.node_count
    window = corpus.config.window
    init_rng = np.random.default_rng([cfg.seed & 0x7FFFFFFF, 0xE3BED])
    wv = ((init_rng.random((n, cfg.dimension)) - 0.5) / cfg.dimension).astype(np.float32)
    cv = np.zeros((n, cfg.dimension), dtype=np.float32)

    counts = corpus.token_counts()
    table_size = int(min(2_000_000, max(65_536, 256 * n)))
    neg_table = _negative_table(counts, table_size)
    exp_table, log_table = _sigmoid_tables()

    pairs_per_epoch = corpus.pair_count(window)
    if pairs_per_epoch == 0:
        return wv, cv, np.zeros(4)
    total_pairs = pairs_per_epoch * cfg.epochs
    loss_sums = np.zeros(4, dtype=np.float64)
    loss_counts = np.zeros(4, dtype=np.int64)

    rows = len(corpus)
    workers = max(1, int(workers))
    pair_offset = 0
    for epoch in range(cfg.epochs):
        if workers == 1:
            state = _walk_seeds(cfg.seed, np.asarray([0x7E57], dtype=np.int64), epoch)[0]
            pair_offset = _train_kernel(
                corpus.walks, corpus.lengths, 0, rows, wv, cv, neg_table,
                window, cfg.negative_samples, cfg.initial_lr, cfg.final_lr,
                pair_offset, total_pairs, state, exp_table, log_table,
                track_loss, loss_sums, loss_counts,
            )
        else:
            bounds = np.linspace(0, rows, workers + 1).astype(np.int64)
            offsets = [pair_offset]
            for b in range(workers):
                block = WalkCorpus(
                    corpus.walks[bounds[b] : bounds[b + 1]],
                    corpus.lengths[bounds[b] : bounds[b + 1]],
                    n, corpus.config,
                )
                offsets.append(offsets[-1] + block.pair_count(window))
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
                futures = []
                for b in range(workers):
                    state = _walk_seeds(cfg.seed, np.asarray([0x7E57 + b], dtype=np.int64), epoch)[0]
                    futures.append(pool.submit(
                        _train_kernel, corpus.walks, corpus.lengths,
                        int(bounds[b]), int(bounds[b + 1]), wv, cv, neg_table,
                        window, cfg.negative_samples, cfg.initial_lr,
                        cfg.final_lr, offsets[b], total_pairs, state,
                        exp_table, log_table, track_loss, loss_sums, loss_counts,
                    ))
                for f in futures:
                    f.result()
            pair_offset = offsets[-1]

    if not np.isfinite(wv).all() or not np.isfinite(cv).all():
        raise TrainingDivergedError(
            "non-finite parameters after training "
            f"(lr={cfg.initial_lr}, d={cfg.dimension}); lower the learning rate"
        )
    quarter_means = np.divide(loss_sums, np.maximum(loss_counts, 1))
    return wv, cv, quarter_means


def train_skipgram(corpus: WalkCorpus, cfg: TrainConfig, workers: int = 1) -> Embedding:
    """Train node vectors on the walk corpus.

    `workers=1` (the deterministic contract) yields bit-identical matrices for
    identical inputs; more workers run lock-free on shared tables.
    """
    wv, _, _ = _run_training(corpus, cfg, workers, track_loss=False)
    return Embedding(wv)


def train_skipgram_with_loss(corpus: WalkCorpus, cfg: TrainConfig,
                             workers: int = 1) -> tuple[Embedding, np.ndarray]:
    """Like train_skipgram, also returns mean pair loss per corpus quarter."""
    wv, _, quarters = _run_training(corpus, cfg, workers, track_loss=True)
    return Embedding(wv), quarters
