import numpy as np
import pytest

from edgeaudit.embedding import (
    Embedding,
    TrainConfig,
    TrainingDivergedError,
    WalkConfig,
    WalkCorpus,
    generate_walks,
    neighborhood_pairs,
    single_walk,
    train_skipgram,
    train_skipgram_with_loss,
)
from edgeaudit.graphs import Graph
from helpers import barbell_graph, brute_window_pairs, gnp_graph, star_graph, two_cliques


def test_single_walk_on_k2_alternates():
    g = Graph(2, [(0, 1)])
    assert single_walk(g, 0, walk_length=4, seed=1) == [0, 1, 0, 1, 0]


def test_single_walk_isolated_node_is_singleton():
    g = Graph(3, [(0, 1)])
    assert single_walk(g, 2, walk_length=10, seed=0) == [2]


def test_star_transitions_are_uniform():
    g = star_graph(4)
    steps = 200_000
    walk = single_walk(g, 0, walk_length=steps, seed=42)
    from_center = np.asarray(walk[1::2])  # odd positions follow the center
    counts = np.bincount(from_center, minlength=5)[1:]
    freqs = counts / counts.sum()
    assert np.abs(freqs - 0.25).max() < 0.005


def test_corpus_shape_and_walk_validity():
    g = gnp_graph(40, 0.15, seed=2)
    cfg = WalkConfig(walk_length=12, walk_times=7, window=4, seed=5)
    corpus = generate_walks(g, cfg)
    active = int((g.degrees() > 0).sum())
    assert len(corpus) == cfg.walk_times * active
    for trace in corpus.iter_traces():
        assert 1 <= trace.shape[0] <= cfg.walk_length + 1
        for a, b in zip(trace[:-1], trace[1:]):
            assert g.has_edge(int(a), int(b))


def test_corpus_excludes_isolated_starts():
    g = Graph(4, [(0, 1)])  # nodes 2, 3 isolated
    corpus = generate_walks(g, WalkConfig(walk_length=5, walk_times=3, seed=0))
    assert len(corpus) == 6
    assert set(np.unique(corpus.walks[:, 0])) == {0, 1}


def test_walks_deterministic_under_seed():
    g = gnp_graph(30, 0.2, seed=1)
    cfg = WalkConfig(walk_length=8, walk_times=4, seed=9)
    a = generate_walks(g, cfg)
    b = generate_walks(g, cfg)
    assert np.array_equal(a.walks, b.walks)
    assert np.array_equal(a.lengths, b.lengths)


def test_neighborhood_pairs_window_one():
    corpus = _corpus_from_traces([[0, 1, 2]], node_count=3)
    pairs = list(neighborhood_pairs(corpus, window=1))
    assert pairs == [(0, 1), (1, 0), (1, 2), (2, 1)]


def test_neighborhood_pairs_big_window():
    corpus = _corpus_from_traces([[0, 1, 2]], node_count=3)
    assert len(list(neighborhood_pairs(corpus, window=10))) == 6


def test_neighborhood_pairs_match_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(20):
        length = int(rng.integers(1, 15))
        trace = rng.integers(0, 9, size=length).tolist()
        window = int(rng.integers(1, 6))
        corpus = _corpus_from_traces([trace], node_count=10)
        ours = sorted(neighborhood_pairs(corpus, window))
        assert ours == sorted(brute_window_pairs(trace, window))


def test_neighborhood_pairs_symmetric():
    g = gnp_graph(25, 0.2, seed=3)
    corpus = generate_walks(g, WalkConfig(walk_length=10, walk_times=2, window=3, seed=1))
    seen: dict[tuple[int, int], int] = {}
    for pair in neighborhood_pairs(corpus, 3):
        seen[pair] = seen.get(pair, 0) + 1
    for (a, b), count in seen.items():
        assert seen.get((b, a), 0) == count


def test_pair_count_matches_enumeration():
    g = gnp_graph(25, 0.2, seed=3)
    corpus = generate_walks(g, WalkConfig(walk_length=9, walk_times=3, window=4, seed=2))
    assert corpus.pair_count() == len(list(neighborhood_pairs(corpus, 4)))


def test_empty_corpus_pairs_error():
    corpus = _corpus_from_traces([], node_count=1)
    with pytest.raises(ValueError):
        list(neighborhood_pairs(corpus, 2))


def _corpus_from_traces(traces, node_count):
    cfg = WalkConfig(walk_length=max((len(t) for t in traces), default=1), walk_times=1)
    width = cfg.walk_length + 1
    walks = np.zeros((len(traces), width), dtype=np.int32)
    lengths = np.zeros(len(traces), dtype=np.int32)
    for i, t in enumerate(traces):
        walks[i, : len(t)] = t
        lengths[i] = len(t)
    return WalkCorpus(walks, lengths, node_count, cfg)


def test_training_output_shape_and_finite():
    g = gnp_graph(30, 0.2, seed=4)
    corpus = generate_walks(g, WalkConfig(walk_length=10, walk_times=5, window=3, seed=0))
    emb = train_skipgram(corpus, TrainConfig(dimension=12, seed=0))
    assert emb.vectors.shape == (30, 12)
    assert np.isfinite(emb.vectors).all()


def test_isolated_nodes_keep_initial_vectors():
    g = Graph(5, [(0, 1), (1, 2), (0, 2)])  # 3, 4 isolated
    corpus = generate_walks(g, WalkConfig(walk_length=6, walk_times=4, window=2, seed=1))
    emb = train_skipgram(corpus, TrainConfig(dimension=8, seed=1))
    assert np.isfinite(emb.vectors[3]).all()
    assert np.abs(emb.vectors[3]).max() <= 0.5 / 8 + 1e-6


def test_clique_separation():
    g = two_cliques(10)
    corpus = generate_walks(g, WalkConfig(walk_length=30, walk_times=12, window=5, seed=3))
    emb = train_skipgram(corpus, TrainConfig(dimension=16, seed=3))
    unit = emb.unit_vectors()
    intra = np.mean([unit[a] @ unit[b] for a in range(10) for b in range(a + 1, 10)])
    inter = np.mean([unit[a] @ unit[b + 10] for a in range(10) for b in range(10)])
    assert intra > inter


def test_barbell_bridge_proximity():
    g = barbell_graph(8)
    wins = 0
    for seed in range(5):
        corpus = generate_walks(g, WalkConfig(walk_length=30, walk_times=15, window=5, seed=seed))
        emb = train_skipgram(corpus, TrainConfig(dimension=16, seed=seed))
        unit = emb.unit_vectors()
        bridge = float(unit[7] @ unit[8])
        cross = float(unit[0] @ unit[15])  # non-bridge endpoints across cliques
        wins += bridge > cross
    assert wins >= 3


def test_training_deterministic_single_worker():
    g = gnp_graph(40, 0.15, seed=7)
    corpus = generate_walks(g, WalkConfig(walk_length=12, walk_times=6, window=4, seed=2))
    a = train_skipgram(corpus, TrainConfig(dimension=24, seed=5))
    b = train_skipgram(corpus, TrainConfig(dimension=24, seed=5))
    assert a == b
    assert a.vectors.tobytes() == b.vectors.tobytes()


def test_multi_worker_mode_still_separates_cliques():
    g = two_cliques(10)
    corpus = generate_walks(g, WalkConfig(walk_length=30, walk_times=12, window=5, seed=3))
    emb = train_skipgram(corpus, TrainConfig(dimension=16, seed=3), workers=2)
    unit = emb.unit_vectors()
    intra = np.mean([unit[a] @ unit[b] for a in range(10) for b in range(a + 1, 10)])
    inter = np.mean([unit[a] @ unit[b + 10] for a in range(10) for b in range(10)])
    assert intra > inter


def test_loss_decreases_first_to_last_quarter():
    g = two_cliques(10)
    wins = 0
    for seed in range(5):
        corpus = generate_walks(g, WalkConfig(walk_length=40, walk_times=20, window=5, seed=seed))
        _, quarters = train_skipgram_with_loss(corpus, TrainConfig(dimension=16, seed=seed))
        wins += quarters[3] < quarters[0]
    assert wins >= 3


def test_training_diverges_with_absurd_learning_rate():
    g = gnp_graph(30, 0.25, seed=1)
    corpus = generate_walks(g, WalkConfig(walk_length=20, walk_times=10, window=5, seed=1))
    with pytest.raises(TrainingDivergedError):
        train_skipgram(corpus, TrainConfig(dimension=8, initial_lr=1e8, final_lr=1e8, seed=1))


def test_embedding_text_round_trip(tmp_path):
    emb = Embedding(np.random.default_rng(0).normal(size=(7, 5)).astype(np.float32))
    p = tmp_path / "emb.vec"
    emb.save_text(p)
    assert Embedding.load_text(p) == emb


def test_embedding_binary_round_trip(tmp_path):
    emb = Embedding(np.random.default_rng(1).normal(size=(9, 4)).astype(np.float32))
    p = tmp_path / "emb.bin"
    emb.save_binary(p)
    assert Embedding.load_binary(p) == emb


def test_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(walk_length=0, walk_times=1)
    with pytest.raises(ValueError):
        TrainConfig(dimension=0)
    with pytest.raises(ValueError):
        TrainConfig(dimension=4, negative_samples=0)
