"""Command-line interface.

Subcommands mirror the pipeline stages (anonymize, embed, score, fit-gmm,
recover, eval, enhance, sweep, attack). Stage commands that operate on the
anonymized graph never read the original one; `eval` is the only place both
are consulted. `EDGEAUDIT_WORKERS` sets the default worker count and
`--deterministic` forces single-worker training.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .anonymize import (
    KdaConfig,
    SaladpConfig,
    kda_anonymize_with_info,
    saladp_anonymize_with_info,
)
from .embedding import Embedding, TrainConfig, WalkConfig, generate_walks, train_skipgram
from .enhance import PlausibilityPrior, enhanced_kda_with_info, enhanced_saladp_with_info, fit_prior
from .graphs import edge_diff, load_edge_list, write_edge_list
from .metrics import UtilityReport, compare_utility, degree_difference, roc_auc
from .pipeline import (
    PipelineConfig,
    hyperparam_sweep,
    noise_study,
    run_attack,
    write_sweep_csv,
)
from .plausibility import ALL_METRICS, EdgeScores, score_edges
from .recover import GmmParams, fit_gmm, map_classify, recover_graph


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("EDGEAUDIT_WORKERS", "1")))
    except ValueError:
        return 1


def _add_embed_options(p: argparse.ArgumentParser, dimension_default: int | None = 128) -> None:
    p.add_argument("--walk-length", type=int, default=100)
    p.add_argument("--walk-times", type=int, default=80)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--dimension", type=int, default=dimension_default)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--deterministic", action="store_true",
                   help="force single-worker, bit-reproducible training")


def _write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_anonymize(args) -> int:
    g = load_edge_list(args.infile)
    if args.enhanced and not (args.embedding and args.prior):
        raise SystemExit("--enhanced needs --embedding and --prior")
    if args.mechanism == "kda":
        if args.k is None:
            raise SystemExit("kda needs --k")
        cfg = KdaConfig(args.k, args.seed)
        if args.enhanced:
            emb = Embedding.load_text(args.embedding)
            prior = PlausibilityPrior.from_json(args.prior)
            ga, info = enhanced_kda_with_info(g, cfg, prior, emb)
        else:
            ga, info = kda_anonymize_with_info(g, cfg)
    else:
        if args.epsilon is None:
            raise SystemExit("saladp needs --epsilon")
        cfg = SaladpConfig(args.epsilon, args.seed)
        if args.enhanced:
            emb = Embedding.load_text(args.embedding)
            prior = PlausibilityPrior.from_json(args.prior)
            ga, info = enhanced_saladp_with_info(g, cfg, prior, emb)
        else:
            ga, info = saladp_anonymize_with_info(g, cfg)
    write_edge_list(ga, args.out)
    if args.meta:
        diff = edge_diff(g, ga)
        info = dict(info)
        info["added_edges"] = len(diff.added)
        info["deleted_edges"] = len(diff.deleted)
        _write_json(info, args.meta)
    print(f"anonymized {args.infile} -> {args.out} "
          f"(+{info.get('added_edges', info.get('edges_added'))} edges)")
    return 0


def _cmd_embed(args) -> int:
    ga = load_edge_list(args.infile)
    walk_cfg = WalkConfig(args.walk_length, args.walk_times, args.window, args.seed)
    train_cfg = TrainConfig(
        dimension=args.dimension, negative_samples=args.negative,
        initial_lr=args.lr, epochs=args.epochs, seed=args.seed,
    )
    workers = 1 if args.deterministic else args.workers
    corpus = generate_walks(ga, walk_cfg)
    emb = train_skipgram(corpus, train_cfg, workers=workers)
    if args.binary:
        emb.save_binary(args.out)
    else:
        emb.save_text(args.out)
    print(f"embedded {ga.node_count} nodes at d={args.dimension} -> {args.out}")
    return 0


def _cmd_score(args) -> int:
    ga = load_edge_list(args.infile)
    emb = None
    if args.embedding:
        path = Path(args.embedding)
        emb = Embedding.load_binary(path) if args.binary else Embedding.load_text(path)
    scores = score_edges(ga, args.metric, emb)
    scores.save_csv(args.out)
    print(f"scored {len(scores)} edges with {args.metric} -> {args.out}")
    return 0


def _cmd_fit_gmm(args) -> int:
    scores = EdgeScores.load_csv(args.scores)
    params = fit_gmm(scores, tol=args.tol, seed=args.seed, restarts=args.restarts)
    params.to_json(args.out)
    print(f"fit mixture: mu0={params.mu0:.4f} mu1={params.mu1:.4f} "
          f"w1={params.w1:.4f} ({params.iterations} iterations) -> {args.out}")
    return 0


def _cmd_recover(args) -> int:
    ga = load_edge_list(args.infile)
    scores = EdgeScores.load_csv(args.scores)
    params = GmmParams.from_json(args.gmm)
    table = map_classify(scores, params)
    gr = recover_graph(ga, table)
    write_edge_list(gr, args.out)
    if args.posteriors:
        table.save_csv(args.posteriors)
    removed = ga.edge_count - gr.edge_count
    print(f"recovered graph: removed {removed} predicted-fake edges -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    from .plots import save_roc_figure, save_score_histogram, score_histogram_csv

    g = load_edge_list(args.original)
    ga = load_edge_list(args.anonymized)
    truth = edge_diff(g, ga)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    payload: dict = {
        "counts": {
            "nodes": g.node_count,
            "edges_original": g.edge_count,
            "edges_anonymized": ga.edge_count,
            "fake_edges": len(truth.added),
            "deleted_edges": len(truth.deleted),
        },
        "privacy": {"delta_A": degree_difference(g, ga)},
    }
    if args.scores:
        scores = EdgeScores.load_csv(args.scores)
        roc = roc_auc(scores, truth)
        payload["auc"] = {scores.metric: roc.auc}
        roc.save_csv(outdir / "roc.csv")
        save_roc_figure(roc, outdir / "roc.png")
        is_fake = np.fromiter(
            ((int(u), int(v)) in truth.added for u, v in scores.edges),
            dtype=bool, count=len(scores),
        )
        score_histogram_csv(scores.scores, is_fake, outdir / "score_hist.csv")
        save_score_histogram(scores.scores, is_fake, outdir / "score_hist.png")
    if args.recovered:
        gr = load_edge_list(args.recovered)
        payload["privacy"]["delta_R"] = degree_difference(g, gr)
        payload["counts"]["edges_recovered"] = gr.edge_count
    if args.with_utility:
        report = UtilityReport(anonymized=compare_utility(g, ga))
        if args.enhanced_graph:
            gf = load_edge_list(args.enhanced_graph)
            report = UtilityReport(anonymized=report.anonymized,
                                   enhanced=compare_utility(g, gf))
        payload["utility"] = asdict(report)
    if args.with_noise_study:
        if args.epsilon is None:
            raise SystemExit("--with-noise-study needs --epsilon")
        study = noise_study(
            g, SaladpConfig(args.epsilon, args.seed), args.samples,
            WalkConfig(args.study_walk_length, args.study_walk_times, 10, args.seed),
            TrainConfig(dimension=args.study_dimension, seed=args.seed),
            workers=1 if args.deterministic else args.workers,
        )
        payload["privacy"].update({
            "zeta_A": study.zeta_A, "zeta_R": study.zeta_R,
            "entropy_A": study.entropy_A, "entropy_R": study.entropy_R,
        })
    _write_json(payload, outdir / "report.json")
    print(f"evaluation written to {outdir}")
    return 0


def _cmd_enhance(args) -> int:
    g = load_edge_list(args.infile)
    emb = Embedding.load_text(args.embedding)
    scores = score_edges(g, "cosine", emb)
    prior = fit_prior(scores)
    prior.to_json(args.prior_out)
    if args.scores_out:
        scores.save_csv(args.scores_out)
    print(f"prior fitted on {len(scores)} original edges: "
          f"mu={prior.mu:.4f} sigma={prior.sigma:.4f} -> {args.prior_out}")
    return 0


def _parse_grid(value: str) -> list[int]:
    return [int(x) for x in value.split(",") if x]


def _cmd_sweep(args) -> int:
    from .plots import save_sweep_figure

    cfg = _pipeline_config(args)
    grid = [(l, t, d)
            for l in _parse_grid(args.grid_l)
            for t in _parse_grid(args.grid_t)
            for d in _parse_grid(args.grid_d)]
    rows = hyperparam_sweep(cfg, grid)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, outdir / "sweep.csv")
    save_sweep_figure(rows, outdir / "sweep.png")
    for r in rows:
        print(f"l={r['l']} t={r['t']} d={r['d']} auc={r['auc']:.4f}")
    return 0


def _pipeline_config(args) -> PipelineConfig:
    metrics = tuple(args.metric.split(",")) if "," in args.metric else (args.metric,)
    for m in metrics:
        if m not in ALL_METRICS:
            raise SystemExit(f"unknown metric {m!r}; choose from {ALL_METRICS}")
    return PipelineConfig(
        input_path=args.infile,
        mechanism=args.mechanism,
        k=args.k,
        epsilon=args.epsilon,
        walk_length=args.walk_length,
        walk_times=args.walk_times,
        window=args.window,
        dimension=args.dimension,
        negative_samples=args.negative,
        initial_lr=args.lr,
        epochs=args.epochs,
        metrics=metrics,
        seed=args.seed,
        workers=args.workers,
        deterministic=args.deterministic,
        output_dir=args.outdir,
        enhanced=getattr(args, "enhanced", False),
    )


def _cmd_attack(args) -> int:
    cfg = _pipeline_config(args)
    report, _, roc = run_attack(cfg)
    primary = cfg.metrics[0]
    print(f"attack complete: AUC[{primary}]={report.aucs[primary]:.4f} "
          f"precision={report.precision:.4f} recall={report.recall:.4f}")
    print(f"outputs in {cfg.output_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgeaudit",
        description="Graph anonymization, fake-edge detection and privacy evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("anonymize", help="run a mechanism on an edge list")
    p.add_argument("--mechanism", choices=["kda", "saladp"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--meta")
    p.add_argument("--enhanced", action="store_true")
    p.add_argument("--embedding", help="original-graph embedding (enhanced mode)")
    p.add_argument("--prior", help="plausibility prior JSON (enhanced mode)")
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("embed", help="random walks + skip-gram embedding")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", action="store_true")
    _add_embed_options(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("score", help="score edges by plausibility or a baseline")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--embedding")
    p.add_argument("--binary", action="store_true")
    p.add_argument("--metric", default="cosine", choices=list(ALL_METRICS))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("fit-gmm", help="fit the two-component mixture to scores")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.set_defaults(func=_cmd_fit_gmm)

    p = sub.add_parser("recover", help="delete predicted-fake edges")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--gmm", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--posteriors")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("eval", help="evaluate against the original graph")
    p.add_argument("--original", required=True)
    p.add_argument("--anonymized", required=True)
    p.add_argument("--recovered")
    p.add_argument("--scores")
    p.add_argument("--outdir", required=True)
    p.add_argument("--with-utility", action="store_true",
                   help="add degree/eigencentrality/triangle similarities")
    p.add_argument("--enhanced-graph", help="hardened anonymized graph for the utility block")
    p.add_argument("--with-noise-study", action="store_true")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--study-walk-length", type=int, default=30)
    p.add_argument("--study-walk-times", type=int, default=5)
    p.add_argument("--study-dimension", type=int, default=32)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("enhance", help="fit the plausibility prior on the original graph")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--prior-out", required=True)
    p.add_argument("--scores-out")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("sweep", help="AUC over a hyperparameter grid")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mechanism", choices=["kda", "saladp"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", default="cosine")
    p.add_argument("--grid-l", required=True, help="comma-separated walk lengths")
    p.add_argument("--grid-t", required=True, help="comma-separated walk times")
    p.add_argument("--grid-d", required=True, help="comma-separated dimensions")
    p.add_argument("--outdir", required=True)
    _add_embed_options(p, dimension_default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("attack", help="end-to-end: anonymize, attack, evaluate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mechanism", choices=["kda", "saladp"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", default="cosine",
                   help="comma-separated list; first one drives the GMM")
    p.add_argument("--outdir", required=True)
    p.add_argument("--enhanced", action="store_true")
    _add_embed_options(p, dimension_default=None)
    p.set_defaults(func=_cmd_attack)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
