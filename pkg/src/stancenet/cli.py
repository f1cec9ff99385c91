"""Command-line pipeline.

Subcommands map to experiment families: `evaluate` scores the full
ensemble for one target pair, `ablate` runs the nine modality panels,
`sweep-shots` covers every ordered pair across the shot grid, `synth`
materializes a synthetic corpus, `embed-graph` turns one edge list into
node vectors, `train` fits and saves the per-modality heads for one cell,
`report` pretty-prints result files. Every writing command drops a
manifest with resolved settings and content hashes; with --deterministic
(workers pinned to 1) reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .data import load_posts, save_posts
from .ensemble import MODALITIES, ablation_grid
from .experiment import (build_panel, cell_records, embed_graphs, evaluate_cell,
                         export_network, load_results, relation_seed, run_cells,
                         save_results, write_manifest)
from .graphs import (RELATIONS, GraphBundle, export_edges, load_edge_list,
                     save_edge_list)
from .heads import TrainedHead
from .metrics import f1_scores
from .sgns import train_embeddings
from .splits import make_split
from .synth import generate
from .vecio import save_vectors
from .walks import generate_walks


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if getattr(args, "out", None):
        cfg.paths = replace(cfg.paths, out=args.out)
    if getattr(args, "seed_list", None):
        cfg.harness = replace(cfg.harness, seeds=tuple(args.seed_list))
    workers = getattr(args, "workers", None)
    if getattr(args, "deterministic", False):
        workers = 1
    if workers is not None:
        cfg.walker = replace(cfg.walker, workers=workers)
        cfg.embedder = replace(cfg.embedder, workers=workers)
    return cfg


def _pairs(cfg: RunConfig, args: argparse.Namespace, targets: list[str]) -> list[tuple[str, str]]:
    source = getattr(args, "source", None) or cfg.harness.source
    dest = getattr(args, "dest", None) or cfg.harness.dest
    if source and dest:
        if source == dest:
            raise ConfigError("source and dest must differ")
        return [(source, dest)]
    if source or dest:
        raise ConfigError("give both --source and --dest, or neither")
    return [(s, d) for s in targets for d in targets if s != d]


def _load_corpus(cfg: RunConfig):
    cfg.require_paths("posts", "followers", "friends", "likes")
    posts = load_posts(cfg.paths.posts)
    edges = {rel: load_edge_list(path)
             for rel, path in cfg.paths.edge_files().items()}
    bundle = GraphBundle.build(posts.user_ids, edges, undirected=True)
    return posts, bundle


def _build_panel(cfg: RunConfig, posts, bundle):
    embeddings = embed_graphs(bundle, cfg.walker, cfg.embedder)
    doc_path = cfg.paths.doc_vectors or None
    return build_panel(posts, bundle, embeddings, cfg.harness.text_dim, doc_path)


def _input_files(cfg: RunConfig) -> dict[str, str]:
    inputs = {"posts": cfg.paths.posts, **cfg.paths.edge_files()}
    if cfg.paths.doc_vectors:
        inputs["doc_vectors"] = cfg.paths.doc_vectors
    return inputs


def _settings(cfg: RunConfig, args: argparse.Namespace, **extra) -> dict:
    settings = {"command": args.command, "version": __version__,
                "config": cfg.to_dict()}
    settings.update(extra)
    return settings


def _run_and_save(cfg, args, posts, panel, pairs, shots_list, combos) -> Path:
    rows = run_cells(posts, panel, pairs, shots_list, list(cfg.harness.seeds),
                     combos, cfg.text_head, cfg.graph_head,
                     cfg.harness.partition_seed, cfg.harness.holdout_frac)
    out_dir = Path(cfg.paths.out)
    paths = save_results(rows, out_dir)
    write_manifest(out_dir, _settings(cfg, args, pairs=pairs, shots=shots_list),
                   _input_files(cfg),
                   {"results.jsonl": paths["jsonl"], "results.csv": paths["csv"]})
    return paths["jsonl"]


def cmd_synth(cfg: RunConfig, args: argparse.Namespace) -> int:
    data = generate(cfg.synth)
    out_dir = Path(cfg.paths.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    posts_path = out_dir / "posts.tsv"
    save_posts(posts_path, data.posts)
    outputs = {"posts.tsv": posts_path}
    bundle = data.bundle()
    ids = bundle.interner.ids()
    for rel in RELATIONS:
        path = out_dir / f"{rel}.tsv"
        pairs = export_edges(bundle.graphs[rel])
        save_edge_list(path, ((ids[a], ids[b]) for a, b in pairs.tolist()))
        outputs[f"{rel}.tsv"] = path
    communities = {u: int(c) for u, c in zip(data.users, data.communities)}
    net = export_network(out_dir, bundle, communities)
    outputs["nodes.csv"] = net["nodes"]
    outputs["edges.csv"] = net["edges"]
    write_manifest(out_dir, _settings(cfg, args), {}, outputs)
    print(f"wrote synthetic corpus: {len(data.posts)} posts, "
          f"{len(data.users)} users -> {out_dir}")
    return 0


def cmd_embed_graph(cfg: RunConfig, args: argparse.Namespace) -> int:
    edge_path = Path(args.edges)
    relation = args.relation or edge_path.stem
    if relation not in RELATIONS:
        raise ConfigError(
            f"cannot infer relation from {edge_path.name!r}; pass --relation "
            f"(one of {', '.join(RELATIONS)})")
    edges = load_edge_list(edge_path)
    bundle = GraphBundle.build([], {relation: edges}, undirected=not args.directed)
    g = bundle.graphs[relation]
    walker = replace(cfg.walker, seed=relation_seed(cfg.walker.seed, relation))
    embedder = replace(cfg.embedder, seed=relation_seed(cfg.embedder.seed, relation))
    corpus = generate_walks(g, walker)
    emb = train_embeddings(corpus, embedder)
    out_dir = Path(cfg.paths.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    vec_path = out_dir / f"{relation}.{'vec' if args.format == 'text' else 'svb'}"
    save_vectors(vec_path, bundle.interner.ids(), emb.vectors, args.format)
    write_manifest(out_dir,
                   _settings(cfg, args, relation=relation, format=args.format,
                             final_loss=float(emb.epoch_losses[-1])),
                   {"edges": edge_path}, {vec_path.name: vec_path})
    print(f"embedded {g.n} nodes ({g.num_directed_edges} directed edges) -> {vec_path}")
    return 0


def _head_arrays(heads: dict[str, TrainedHead]) -> dict[str, np.ndarray]:
    arrays = {}
    for mod, head in heads.items():
        for key, value in head.weights.items():
            arrays[f"{mod}.{key}"] = value
        arrays[f"{mod}.epoch_losses"] = head.epoch_losses
    return arrays


def cmd_train(cfg: RunConfig, args: argparse.Namespace) -> int:
    posts, bundle = _load_corpus(cfg)
    panel = _build_panel(cfg, posts, bundle)
    pairs = _pairs(cfg, args, posts.target_names())
    if len(pairs) != 1:
        raise ConfigError("train needs one pair: pass --source and --dest")
    source, dest = pairs[0]
    n_shots = args.shots or cfg.harness.shots[0]
    seed = cfg.harness.seeds[0]
    split = make_split(posts, source, dest, n_shots, seed,
                       cfg.harness.partition_seed, cfg.harness.holdout_frac)
    from .experiment import train_panel_heads
    heads = train_panel_heads(panel, posts.stances, split.train_idx, seed,
                              cfg.text_head, cfg.graph_head)
    out_dir = Path(cfg.paths.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    heads_path = out_dir / "heads.npz"
    np.savez(heads_path, **_head_arrays(heads))
    summary = {
        "source": source, "dest": dest, "shots": n_shots, "seed": seed,
        "train_posts": int(split.train_idx.shape[0]),
        "modalities": {},
    }
    for mod, head in heads.items():
        rows = split.train_idx[panel.present[mod][split.train_idx]]
        macro, _, _ = f1_scores(posts.stances[rows], head.predict(panel.feats[mod][rows]))
        summary["modalities"][mod] = {
            "train_macro_f1": macro,
            "final_loss": float(head.epoch_losses[-1]),
        }
    summary_path = out_dir / "train_summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    write_manifest(out_dir, _settings(cfg, args, source=source, dest=dest,
                                      shots=n_shots, seed=seed),
                   _input_files(cfg),
                   {"heads.npz": heads_path, "train_summary.json": summary_path})
    print(f"trained {len(heads)} heads on {source}->{dest} "
          f"({n_shots} shots, seed {seed}) -> {out_dir}")
    return 0


def cmd_evaluate(cfg: RunConfig, args: argparse.Namespace) -> int:
    posts, bundle = _load_corpus(cfg)
    panel = _build_panel(cfg, posts, bundle)
    pairs = _pairs(cfg, args, posts.target_names())
    shots_list = [args.shots] if args.shots else [cfg.harness.shots[0]]
    jsonl = _run_and_save(cfg, args, posts, panel, pairs, shots_list,
                          combos=[MODALITIES])
    for record in load_results(jsonl):
        print(json.dumps(record, sort_keys=True))
    return 0


def cmd_ablate(cfg: RunConfig, args: argparse.Namespace) -> int:
    posts, bundle = _load_corpus(cfg)
    panel = _build_panel(cfg, posts, bundle)
    pairs = _pairs(cfg, args, posts.target_names())
    shots_list = [args.shots] if args.shots else [cfg.harness.shots[0]]
    jsonl = _run_and_save(cfg, args, posts, panel, pairs, shots_list,
                          combos=ablation_grid())
    print(f"wrote {sum(1 for _ in open(jsonl))} ablation records -> {jsonl}")
    return 0


def cmd_sweep_shots(cfg: RunConfig, args: argparse.Namespace) -> int:
    posts, bundle = _load_corpus(cfg)
    panel = _build_panel(cfg, posts, bundle)
    pairs = _pairs(cfg, args, posts.target_names())
    jsonl = _run_and_save(cfg, args, posts, panel, pairs,
                          list(cfg.harness.shots), combos=[MODALITIES])
    print(f"swept {len(pairs)} pairs x {len(cfg.harness.shots)} shot counts -> {jsonl}")
    return 0


def cmd_report(cfg: RunConfig, args: argparse.Namespace) -> int:
    path = Path(args.results or cfg.paths.out)
    if path.is_dir():
        path = path / "results.jsonl"
    records = load_results(path)
    if not records:
        print("no records")
        return 0
    header = f"{'source':<10} {'dest':<10} {'shots':>5} {'config':<30} " \
             f"{'mean':>7} {'min':>7} {'max':>7} seeds"
    print(header)
    print("-" * len(header))
    for r in records:
        print(f"{r['source']:<10} {r['dest']:<10} {r['shots']:>5} "
              f"{r['config']:<30} {r['macro_f1_mean']:>7.4f} "
              f"{r['macro_f1_min']:>7.4f} {r['macro_f1_max']:>7.4f} "
              f"{len(r['seeds'])}")
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "embed-graph": cmd_embed_graph,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "sweep-shots": cmd_sweep_shots,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (defaults used when absent)")
    common.add_argument("--out", help="output directory (overrides paths.out)")
    common.add_argument("--workers", type=int, help="worker threads for kernels")
    common.add_argument("--seed-list", type=int, nargs="+",
                        help="harness seeds (overrides harness.seeds)")
    common.add_argument("--deterministic", action="store_true",
                        help="pin workers to 1 for byte-identical reruns")

    parser = argparse.ArgumentParser(
        prog="stancenet",
        description="few-shot cross-target stance detection over user networks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", parents=[common],
                   help="generate a synthetic corpus with community structure")

    p = sub.add_parser("embed-graph", parents=[common],
                       help="train node vectors for one edge list")
    p.add_argument("--edges", required=True, help="edge list file (src<TAB>dst)")
    p.add_argument("--relation", choices=RELATIONS,
                   help="relation name (default: inferred from file name)")
    p.add_argument("--format", choices=("text", "binary"), default="text")
    p.add_argument("--directed", action="store_true",
                   help="keep edge direction instead of symmetrizing")

    for name, needs_shots in (("train", True), ("evaluate", True), ("ablate", True),
                              ("sweep-shots", False)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--source", help="source target name")
        p.add_argument("--dest", help="destination target name")
        if needs_shots:
            p.add_argument("--shots", type=int, help="destination shots in train")

    p = sub.add_parser("report", parents=[common],
                       help="tabulate a results.jsonl")
    p.add_argument("--results", help="results.jsonl or its directory")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_flags(load_config(args.config), args)
        return _COMMANDS[args.command](cfg, args)
    except Exception as e:  # machine-readable error record
        record = {"error": type(e).__name__, "message": str(e)}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
