import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgeaudit.graphs import EdgeDiff, Graph, edge_diff
from edgeaudit.metrics import (
    PowerIterationError,
    compare_utility,
    degree_difference,
    dk2_noise_stats,
    eigencentrality,
    precision_recall,
    rank_auc,
    roc_auc,
    roc_points,
    triangle_counts,
    utility_similarity,
    utility_vectors,
)
from edgeaudit.plausibility import EdgeScores
from helpers import (
    brute_triangles_per_node,
    complete_graph,
    dense_principal_eigenvector,
    gnp_graph,
    path_graph,
    threshold_sweep_auc,
)


def _scores_and_truth(scores_fake, scores_orig):
    n_f, n_o = len(scores_fake), len(scores_orig)
    edges = np.stack([np.arange(n_f + n_o), np.arange(1, n_f + n_o + 1)], axis=1)
    values = np.concatenate([scores_fake, scores_orig])
    fake_edges = frozenset((int(u), int(v)) for u, v in edges[:n_f])
    sc = EdgeScores(edges=edges, scores=values.astype(float), metric="cosine")
    truth = EdgeDiff(added=fake_edges, deleted=frozenset())
    return sc, truth


def test_auc_perfect_separation():
    sc, truth = _scores_and_truth([0.1, 0.2], [0.8, 0.9])
    assert roc_auc(sc, truth).auc == 1.0


def test_auc_identical_distributions_is_half():
    values = list(np.linspace(-1, 1, 50))
    sc, truth = _scores_and_truth(values, values)
    assert roc_auc(sc, truth).auc == pytest.approx(0.5, abs=1e-12)


def test_auc_rank_equals_trapezoid_on_random_sets():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n_f = int(rng.integers(1, 30))
        n_o = int(rng.integers(1, 30))
        quantize = rng.random() < 0.5
        f = rng.normal(0, 1, n_f)
        o = rng.normal(0.5, 1, n_o)
        if quantize:  # force ties
            f = np.round(f, 1)
            o = np.round(o, 1)
        sc, truth = _scores_and_truth(f, o)
        result = roc_auc(sc, truth)
        assert abs(result.auc - result.auc_trapezoid) < 1e-9


def test_auc_matches_independent_threshold_sweep():
    rng = np.random.default_rng(3)
    for _ in range(50):
        f = np.round(rng.normal(0, 1, 25), 1)
        o = np.round(rng.normal(0.8, 1, 25), 1)
        sc, truth = _scores_and_truth(f, o)
        fakeness = -sc.scores
        is_fake = np.array([True] * 25 + [False] * 25)
        assert rank_auc(fakeness, is_fake) == pytest.approx(
            threshold_sweep_auc(fakeness, is_fake), abs=1e-9
        )


def test_auc_invariant_under_monotone_transform():
    rng = np.random.default_rng(1)
    f = rng.normal(0, 1, 40)
    o = rng.normal(1, 1, 40)
    sc, truth = _scores_and_truth(f, o)
    base = roc_auc(sc, truth).auc
    transformed = EdgeScores(edges=sc.edges, scores=np.tanh(sc.scores) * 3 + 1, metric="x")
    assert roc_auc(transformed, truth).auc == pytest.approx(base, abs=1e-12)


def test_roc_endpoints_and_monotonicity():
    rng = np.random.default_rng(2)
    sc, truth = _scores_and_truth(rng.normal(0, 1, 30), rng.normal(1, 1, 40))
    pts = roc_auc(sc, truth).points
    assert pts[0].tolist() == [0.0, 0.0]
    assert pts[-1].tolist() == [1.0, 1.0]
    assert (np.diff(pts[:, 0]) >= 0).all()
    assert (np.diff(pts[:, 1]) >= 0).all()


def test_auc_requires_both_classes():
    sc, _ = _scores_and_truth([0.1], [0.9])
    with pytest.raises(ValueError):
        roc_auc(sc, EdgeDiff(added=frozenset(), deleted=frozenset()))


def test_precision_recall_exact_match():
    truth = EdgeDiff(added=frozenset({(0, 1), (2, 3)}), deleted=frozenset())
    assert precision_recall({(0, 1), (2, 3)}, truth) == (1.0, 1.0)


def test_precision_recall_disjoint():
    truth = EdgeDiff(added=frozenset({(0, 1)}), deleted=frozenset())
    assert precision_recall({(4, 5)}, truth) == (0.0, 0.0)


def test_precision_recall_empty_prediction_error():
    truth = EdgeDiff(added=frozenset({(0, 1)}), deleted=frozenset())
    with pytest.raises(ValueError, match="empty"):
        precision_recall(set(), truth)


def test_degree_difference_basics():
    g = gnp_graph(12, 0.3, seed=0)
    assert degree_difference(g, g) == 0.0
    k2 = Graph(2, [(0, 1)])
    empty2 = Graph(2, [])
    assert degree_difference(k2, empty2) == 1.0


def test_degree_difference_metric_properties():
    graphs = [gnp_graph(15, p, seed=s) for p, s in [(0.2, 1), (0.3, 2), (0.4, 3)]]
    a, b, c = graphs
    assert degree_difference(a, b) == degree_difference(b, a)
    assert degree_difference(a, b) + degree_difference(b, c) >= degree_difference(a, c) - 1e-12


def test_degree_difference_universe_mismatch():
    with pytest.raises(ValueError):
        degree_difference(gnp_graph(5, 0.5, 0), gnp_graph(6, 0.5, 0))


def test_dk2_noise_stats_identical_samples():
    g = gnp_graph(20, 0.3, seed=1)
    zeta, entropy = dk2_noise_stats(g, [g, g, g])
    assert zeta == 0.0
    assert entropy == 0.0


def test_dk2_noise_stats_hand_case():
    # one cell (1,1); samples at counts 2,2,0,0 -> noise {+1,+1,-1,-1}
    base = Graph(4, [(0, 1)])
    plus = Graph(4, [(0, 1), (2, 3)])
    minus = Graph(4, [])
    zeta, entropy = dk2_noise_stats(base, [plus, plus, minus, minus])
    assert zeta == pytest.approx(1.0)
    assert entropy == pytest.approx(1.0)


def test_utility_vectors_triangle_graph():
    v = utility_vectors(complete_graph(3))
    assert v.degree_distribution.tolist() == [0.0, 0.0, 1.0]
    assert v.triangle_count.tolist() == [1, 1, 1]
    assert np.allclose(v.eigencentrality, 1 / np.sqrt(3), atol=1e-9)


def test_utility_vectors_path_has_no_triangles():
    assert utility_vectors(path_graph(3)).triangle_count.tolist() == [0, 0, 0]


def test_eigencentrality_matches_dense_oracle():
    for seed in range(30):
        g = gnp_graph(20, 0.3, seed=seed)
        if g.edge_count == 0:
            continue
        ours = eigencentrality(g)
        oracle = dense_principal_eigenvector(g)
        assert np.abs(ours - oracle).max() < 1e-6, seed


def test_eigencentrality_uniform_on_regular_connected():
    g = complete_graph(7)
    assert np.allclose(eigencentrality(g), 1 / np.sqrt(7), atol=1e-10)
    ring = Graph(8, [(i, (i + 1) % 8) for i in range(8)])
    assert np.allclose(eigencentrality(ring), 1 / np.sqrt(8), atol=1e-8)


def test_eigencentrality_edgeless_error():
    with pytest.raises(PowerIterationError):
        eigencentrality(Graph(3, []))


def test_triangle_counts_match_enumeration():
    for seed in range(30):
        g = gnp_graph(25, 0.25, seed=seed)
        assert np.array_equal(triangle_counts(g), brute_triangles_per_node(g)), seed


def test_triangle_total_is_three_per_triangle():
    for seed in range(10):
        g = gnp_graph(30, 0.2, seed=seed)
        per_node = triangle_counts(g)
        n_triangles = 0
        for a in range(30):
            for b in range(a + 1, 30):
                if not g.has_edge(a, b):
                    continue
                n_triangles += sum(
                    1 for c in range(b + 1, 30) if g.has_edge(a, c) and g.has_edge(b, c)
                )
        assert per_node.sum() == 3 * n_triangles


def test_utility_similarity_identical_graph():
    g = gnp_graph(25, 0.3, seed=2)
    sims = compare_utility(g, g)
    assert all(v == pytest.approx(1.0, abs=1e-9) for v in sims.values())


def test_utility_similarity_pads_degree_distributions():
    a = utility_vectors(complete_graph(5))  # degrees up to 4
    b = utility_vectors(Graph(5, [(0, 1), (1, 2), (0, 2), (3, 4)]))  # max degree 2
    sims = utility_similarity(a, b)
    assert -1.0 <= sims["degree_distribution"] <= 1.0
    assert sims["triangle_count"] > 0.0


def test_utility_similarity_zero_vector_error():
    a = utility_vectors(complete_graph(4))
    b = utility_vectors(path_graph(4))  # no triangles -> zero vector
    with pytest.raises(ValueError, match="triangle"):
        utility_similarity(a, b)["triangle_count"]


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_roc_points_valid_for_random_data(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 200))
    fakeness = np.round(rng.normal(0, 1, n), 1)
    is_fake = rng.random(n) < 0.5
    if is_fake.all() or not is_fake.any():
        return
    pts = roc_points(fakeness, is_fake)
    assert (pts >= -1e-12).all() and (pts <= 1 + 1e-12).all()
    assert pts[0].tolist() == [0.0, 0.0] and pts[-1].tolist() == [1.0, 1.0]
