"""End-to-end orchestration: anonymize, embed, score, fit, recover, evaluate.

The attack stages are funneled through :func:`run_fake_edge_attack`, which
receives nothing but the anonymized graph and hyperparameters; the original
graph is touched only by the anonymization step (which produces the
anonymized graph) and by the evaluation step (which needs ground-truth
labels). Reports are JSON with sorted keys and no timestamps, so a fixed
seed in deterministic mode reproduces them byte for byte; wall-clock timings
go to a separate sidecar file.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .anonymize import (
    KdaConfig,
    SaladpConfig,
    kda_anonymize_with_info,
    saladp_anonymize_with_info,
)
from .embedding import Embedding, TrainConfig, WalkConfig, WalkCorpus, generate_walks, train_skipgram
from .enhance import (
    PlausibilityPrior,
    enhanced_kda_with_info,
    enhanced_saladp_with_info,
    fit_prior,
)
from .graphs import Graph, edge_diff, load_edge_list, write_edge_list
from .metrics import PrivacyReport, RocResult, degree_difference, dk2_noise_stats, roc_auc
from .plausibility import EdgeScores, score_edges
from .recover import GmmParams, PosteriorTable, baseline_random, fit_gmm, map_classify, recover_graph

KDA_DEFAULT_DIMENSION = 128
SALADP_DEFAULT_DIMENSION = 512


@dataclass(frozen=True)
class PipelineConfig:
    """Everything an end-to-end run needs; defaults follow the evaluation
    setup (walk length 100, 80 walks per node, window 10, dimension 128 for
    degree anonymization and 512 for joint-degree noise)."""

    input_path: str
    mechanism: str
    k: int | None = None
    epsilon: float | None = None
    walk_length: int = 100
    walk_times: int = 80
    window: int = 10
    dimension: int | None = None
    negative_samples: int = 5
    initial_lr: float = 0.025
    epochs: int = 1
    metrics: tuple[str, ...] = ("cosine",)
    seed: int = 0
    samples: int = 100
    workers: int = 1
    deterministic: bool = True
    output_dir: str = "edgeaudit-out"
    enhanced: bool = False

    def __post_init__(self):
        if self.mechanism not in ("kda", "saladp"):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if self.mechanism == "kda" and self.k is None:
            raise ValueError("kda requires k")
        if self.mechanism == "saladp" and self.epsilon is None:
            raise ValueError("saladp requires epsilon")
        if not self.metrics:
            raise ValueError("at least one metric is required")

    @property
    def resolved_dimension(self) -> int:
        if self.dimension is not None:
            return self.dimension
        return KDA_DEFAULT_DIMENSION if self.mechanism == "kda" else SALADP_DEFAULT_DIMENSION

    @property
    def effective_workers(self) -> int:
        return 1 if self.deterministic else max(1, self.workers)

    def walk_config(self) -> WalkConfig:
        return WalkConfig(
            walk_length=self.walk_length,
            walk_times=self.walk_times,
            window=self.window,
            seed=self.seed,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            dimension=self.resolved_dimension,
            negative_samples=self.negative_samples,
            initial_lr=self.initial_lr,
            epochs=self.epochs,
            seed=self.seed,
        )


@dataclass
class AttackArtifacts:
    """Everything the attack derives from the anonymized graph alone."""

    corpus: WalkCorpus
    embedding: Embedding
    scores: dict[str, EdgeScores]
    gmm: GmmParams
    posteriors: PosteriorTable
    recovered: Graph


@dataclass
class AttackReport:
    config: dict
    counts: dict
    aucs: dict
    gmm: dict
    precision: float
    recall: float
    precision_baseline: float
    recall_baseline: float
    privacy: dict
    anonymize_info: dict
    version: str = __version__

    def to_json(self, path) -> None:
        payload = asdict(self)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def graph_content_key(g: Graph) -> str:
    h = hashlib.sha256()
    h.update(str(g.node_count).encode())
    h.update(g.edge_array().astype("<i8").tobytes())
    return h.hexdigest()[:24]


class StageCache:
    """Content-addressed on-disk cache for walks and embeddings."""

    def __init__(self, root: Path | str | None):
        self.root = Path(root) if root is not None else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, key: str) -> Path | None:
        if self.root is None:
            return None
        return self.root / f"{kind}-{key}.npz"

    @staticmethod
    def walk_key(graph_key: str, cfg: WalkConfig) -> str:
        blob = f"walks|{graph_key}|{cfg.walk_length}|{cfg.walk_times}|{cfg.window}|{cfg.seed}"
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    @staticmethod
    def embedding_key(walk_key: str, cfg: TrainConfig, workers: int) -> str:
        blob = (
            f"emb|{walk_key}|{cfg.dimension}|{cfg.negative_samples}|{cfg.initial_lr}"
            f"|{cfg.final_lr}|{cfg.epochs}|{cfg.seed}|{workers}"
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def load_walks(self, key: str, cfg: WalkConfig) -> WalkCorpus | None:
        path = self._path("walks", key)
        if path is None or not path.exists():
            return None
        data = np.load(path)
        return WalkCorpus(data["walks"], data["lengths"], int(data["node_count"]), cfg)

    def store_walks(self, key: str, corpus: WalkCorpus) -> None:
        path = self._path("walks", key)
        if path is None:
            return
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(
            tmp, walks=corpus.walks, lengths=corpus.lengths,
            node_count=np.int64(corpus.node_count),
        )
        tmp.replace(path)

    def load_embedding(self, key: str) -> Embedding | None:
        path = self._path("embedding", key)
        if path is None or not path.exists():
            return None
        data = np.load(path)
        return Embedding(data["vectors"])

    def store_embedding(self, key: str, emb: Embedding) -> None:
        path = self._path("embedding", key)
        if path is None:
            return
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, vectors=emb.vectors)
        tmp.replace(path)


def embed_graph(ga: Graph, walk_cfg: WalkConfig, train_cfg: TrainConfig,
                workers: int = 1, cache: StageCache | None = None) -> tuple[WalkCorpus, Embedding]:
    """Walks plus trained embedding for a graph, with optional disk cache."""
    cache = cache or StageCache(None)
    gkey = graph_content_key(ga)
    wkey = cache.walk_key(gkey, walk_cfg)
    corpus = cache.load_walks(wkey, walk_cfg)
    if corpus is None:
        corpus = generate_walks(ga, walk_cfg)
        cache.store_walks(wkey, corpus)
    ekey = cache.embedding_key(wkey, train_cfg, workers)
    emb = cache.load_embedding(ekey) if workers == 1 else None
    if emb is None:
        emb = train_skipgram(corpus, train_cfg, workers=workers)
        if workers == 1:
            cache.store_embedding(ekey, emb)
    return corpus, emb


def run_fake_edge_attack(ga: Graph, walk_cfg: WalkConfig, train_cfg: TrainConfig,
                         metrics: tuple[str, ...] = ("cosine",), gmm_seed: int = 0,
                         workers: int = 1, cache: StageCache | None = None) -> AttackArtifacts:
    """The adversary's side of the pipeline: sees only the anonymized graph."""
    corpus, emb = embed_graph(ga, walk_cfg, train_cfg, workers=workers, cache=cache)
    scores = {m: score_edges(ga, m, emb) for m in metrics}
    primary = scores[metrics[0]]
    gmm = fit_gmm(primary, seed=gmm_seed)
    table = map_classify(primary, gmm)
    recovered = recover_graph(ga, table)
    return AttackArtifacts(
        corpus=corpus, embedding=emb, scores=scores, gmm=gmm,
        posteriors=table, recovered=recovered,
    )


def _anonymize(g: Graph, cfg: PipelineConfig,
               cache: StageCache | None = None) -> tuple[Graph, dict]:
    if cfg.enhanced:
        walk_cfg = WalkConfig(cfg.walk_length, cfg.walk_times, cfg.window, cfg.seed)
        train_cfg = cfg.train_config()
        _, emb_g = embed_graph(g, walk_cfg, train_cfg, workers=cfg.effective_workers, cache=cache)
        prior = fit_prior(score_edges(g, "cosine", emb_g))
        if cfg.mechanism == "kda":
            return enhanced_kda_with_info(g, KdaConfig(cfg.k, cfg.seed), prior, emb_g)
        return enhanced_saladp_with_info(g, SaladpConfig(cfg.epsilon, cfg.seed), prior, emb_g)
    if cfg.mechanism == "kda":
        return kda_anonymize_with_info(g, KdaConfig(cfg.k, cfg.seed))
    return saladp_anonymize_with_info(g, SaladpConfig(cfg.epsilon, cfg.seed))


def run_attack(cfg: PipelineConfig, graph: Graph | None = None,
               write_outputs: bool = True) -> tuple[AttackReport, AttackArtifacts, RocResult]:
    """Full pipeline: anonymize, attack, evaluate; emits report + artifacts."""
    outdir = Path(cfg.output_dir)
    if write_outputs:
        outdir.mkdir(parents=True, exist_ok=True)
    cache = StageCache(outdir / "cache") if write_outputs else StageCache(None)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    g = graph if graph is not None else load_edge_list(cfg.input_path)
    timings["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ga, anon_info = _anonymize(g, cfg, cache=cache)
    timings["anonymize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    artifacts = run_fake_edge_attack(
        ga, cfg.walk_config(), cfg.train_config(), metrics=cfg.metrics,
        gmm_seed=cfg.seed, workers=cfg.effective_workers, cache=cache,
    )
    timings["attack"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    truth = edge_diff(g, ga)
    aucs = {}
    roc = None
    for name, sc in artifacts.scores.items():
        result = roc_auc(sc, truth)
        aucs[name] = result.auc
        if name == cfg.metrics[0]:
            roc = result
    predicted = artifacts.posteriors.predicted_fake_edges()
    if predicted and truth.added:
        precision, recall = _pr(predicted, truth)
        rand = baseline_random(ga, len(predicted), seed=cfg.seed)
        precision_b, recall_b = _pr(rand, truth)
    else:
        precision = recall = precision_b = recall_b = float("nan")
    privacy = PrivacyReport(
        delta_A=degree_difference(g, ga),
        delta_R=degree_difference(g, artifacts.recovered),
    )
    timings["evaluate"] = time.perf_counter() - t0

    report = AttackReport(
        config=_config_dict(cfg),
        counts={
            "nodes": g.node_count,
            "edges_original": g.edge_count,
            "edges_anonymized": ga.edge_count,
            "edges_recovered": artifacts.recovered.edge_count,
            "fake_edges": len(truth.added),
            "deleted_edges": len(truth.deleted),
            "predicted_fake": len(predicted),
        },
        aucs=aucs,
        gmm=asdict(artifacts.gmm),
        precision=precision,
        recall=recall,
        precision_baseline=precision_b,
        recall_baseline=recall_b,
        privacy=asdict(privacy),
        anonymize_info=anon_info,
    )

    if write_outputs:
        write_edge_list(ga, outdir / "anonymized.edges")
        write_edge_list(artifacts.recovered, outdir / "recovered.edges")
        artifacts.embedding.save_text(outdir / "embedding.vec")
        artifacts.scores[cfg.metrics[0]].save_csv(outdir / "scores.csv")
        artifacts.gmm.to_json(outdir / "gmm.json")
        artifacts.posteriors.save_csv(outdir / "posteriors.csv")
        roc.save_csv(outdir / "roc.csv")
        report.to_json(outdir / "report.json")
        with open(outdir / "timings.json", "w", encoding="utf-8") as fh:
            json.dump({k: round(v, 3) for k, v in timings.items()}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        is_fake = np.fromiter(
            ((int(u), int(v)) in truth.added for u, v in artifacts.scores[cfg.metrics[0]].edges),
            dtype=bool, count=len(artifacts.scores[cfg.metrics[0]]),
        )
        from .plots import save_roc_figure, save_score_histogram, score_histogram_csv

        score_histogram_csv(
            artifacts.scores[cfg.metrics[0]].scores, is_fake, outdir / "score_hist.csv"
        )
        save_roc_figure(roc, outdir / "roc.png")
        save_score_histogram(
            artifacts.scores[cfg.metrics[0]].scores, is_fake, outdir / "score_hist.png"
        )
    return report, artifacts, roc


def _pr(predicted, truth) -> tuple[float, float]:
    from .metrics import precision_recall

    return precision_recall(predicted, truth)


def _config_dict(cfg: PipelineConfig) -> dict:
    d = asdict(cfg)
    d["resolved_dimension"] = cfg.resolved_dimension
    d["metrics"] = list(cfg.metrics)
    # the report describes the computation; where outputs land is not part of it
    d.pop("output_dir", None)
    return d


def hyperparam_sweep(cfg: PipelineConfig, grid: list[tuple[int, int, int]],
                     graph: Graph | None = None) -> list[dict]:
    """One attack AUC per (walk_length, walk_times, dimension) grid point.

    The anonymized graph is shared across points; walks are cached per
    (walk_length, walk_times) so dimension-only moves skip regeneration.
    """
    if not grid:
        raise ValueError("empty hyperparameter grid")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    cache = StageCache(outdir / "cache")
    g = graph if graph is not None else load_edge_list(cfg.input_path)
    ga, _ = _anonymize(g, cfg, cache=cache)
    truth = edge_diff(g, ga)
    rows = []
    for walk_length, walk_times, dimension in grid:
        walk_cfg = WalkConfig(walk_length, walk_times, cfg.window, cfg.seed)
        train_cfg = TrainConfig(
            dimension=dimension, negative_samples=cfg.negative_samples,
            initial_lr=cfg.initial_lr, epochs=cfg.epochs, seed=cfg.seed,
        )
        _, emb = embed_graph(ga, walk_cfg, train_cfg, workers=cfg.effective_workers, cache=cache)
        sc = score_edges(ga, cfg.metrics[0], emb)
        auc = roc_auc(sc, truth).auc
        rows.append({"l": walk_length, "t": walk_times, "d": dimension, "auc": auc})
    return rows


def write_sweep_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("l,t,d,auc\n")
        for r in rows:
            fh.write(f"{r['l']},{r['t']},{r['d']},{r['auc']:.17g}\n")


def noise_study(g: Graph, saladp_cfg: SaladpConfig, n_samples: int,
                walk_cfg: WalkConfig, train_cfg: TrainConfig,
                workers: int = 1) -> PrivacyReport:
    """Joint-degree noise and entropy before and after recovery over
    `n_samples` independently seeded anonymized graphs."""
    from .anonymize import saladp_anonymize

    anonymized: list[Graph] = []
    recovered: list[Graph] = []
    for i in range(n_samples):
        cfg_i = SaladpConfig(saladp_cfg.epsilon, saladp_cfg.seed + i)
        ga = saladp_anonymize(g, cfg_i)
        anonymized.append(ga)
        artifacts = run_fake_edge_attack(
            ga,
            WalkConfig(walk_cfg.walk_length, walk_cfg.walk_times, walk_cfg.window, cfg_i.seed),
            TrainConfig(
                dimension=train_cfg.dimension,
                negative_samples=train_cfg.negative_samples,
                initial_lr=train_cfg.initial_lr,
                epochs=train_cfg.epochs,
                seed=cfg_i.seed,
            ),
            metrics=("cosine",), gmm_seed=cfg_i.seed, workers=workers,
        )
        recovered.append(artifacts.recovered)
    zeta_a, entropy_a = dk2_noise_stats(g, anonymized)
    zeta_r, entropy_r = dk2_noise_stats(g, recovered)
    return PrivacyReport(
        zeta_A=zeta_a, zeta_R=zeta_r, entropy_A=entropy_a, entropy_R=entropy_r,
    )
