"""Cross-target few-shot evaluation harness.

One evaluation cell is (source, dest, shots, config); each cell is scored
once per seed and the result files carry both the per-seed details (JSON
lines, one record per cell) and a flat per-seed CSV for plotting. Node
embeddings are trained once per relation graph and shared across seeds;
seeds drive shot sampling, head initialization, and dropout.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import rng
from .data import PostTable
from .ensemble import MODALITIES, ablation_grid, config_name, panel_predict
from .graphs import RELATIONS, GraphBundle, export_edges
from .heads import TrainedHead, graph_head_params, text_head_params, train_head
from .metrics import AGAINST, f1_scores
from .sgns import NodeEmbeddings, SgnsParams, train_embeddings
from .splits import DEFAULT_HOLDOUT_FRAC, DEFAULT_PARTITION_SEED, make_split
from .textenc import DEFAULT_TEXT_DIM, doc_matrix, encode_posts
from .walks import WalkParams, generate_walks

DEFAULT_SEEDS = (24, 524, 1024, 1524, 2024)
DEFAULT_SHOTS = (100, 200, 300, 400)

_TAG_RELATION = 0x57A1
_TAG_HEAD = 0x4EAD

CSV_COLUMNS = ("source", "dest", "shots", "config", "seed",
               "macro_f1", "f1_favor", "f1_against")


def relation_seed(base_seed: int, relation: str) -> int:
    """Per-relation substream so the three graphs never share draws."""
    return rng.derive_stream(base_seed, _TAG_RELATION, RELATIONS.index(relation))


def embed_graphs(bundle: GraphBundle, walker: WalkParams, embedder: SgnsParams,
                 backend: str | None = None) -> dict[str, NodeEmbeddings]:
    """Walk + train node vectors for every relation with any edges."""
    out: dict[str, NodeEmbeddings] = {}
    for relation in RELATIONS:
        g = bundle.graphs[relation]
        if g.num_directed_edges == 0:
            continue
        w = replace(walker, seed=relation_seed(walker.seed, relation))
        e = replace(embedder, seed=relation_seed(embedder.seed, relation))
        corpus = generate_walks(g, w, backend=backend)
        out[relation] = train_embeddings(corpus, e, backend=backend)
    return out


@dataclass
class FeaturePanel:
    """Per-modality post features plus per-post presence masks."""

    feats: dict[str, np.ndarray]
    present: dict[str, np.ndarray]

    def n_posts(self) -> int:
        return next(iter(self.feats.values())).shape[0]


def build_panel(posts: PostTable, bundle: GraphBundle,
                embeddings: dict[str, NodeEmbeddings],
                text_dim: int = DEFAULT_TEXT_DIM,
                doc_vectors_path: str | Path | None = None) -> FeaturePanel:
    """Assemble features: node vector of the author per relation, document
    vector (or hashed fallback) for text.

    A graph modality is present for a post when its author has at least
    one edge in that relation; text is present when the feature row is
    nonzero.
    """
    feats: dict[str, np.ndarray] = {}
    present: dict[str, np.ndarray] = {}
    lookup = bundle.interner.lookup
    idx_list = []
    for u in posts.user_ids:
        idx = lookup(u)
        if idx is None:
            raise KeyError(f"post author {u!r} is not a node in the graph bundle")
        idx_list.append(idx)
    author_idx = np.array(idx_list, dtype=np.int64)
    for relation in RELATIONS:
        if relation not in embeddings:
            continue
        g = bundle.graphs[relation]
        feats[relation] = embeddings[relation].vectors[author_idx]
        present[relation] = g.degrees()[author_idx] > 0
    if doc_vectors_path is not None:
        feats["text"] = doc_matrix(posts.post_ids, doc_vectors_path)
    else:
        feats["text"] = encode_posts(posts.targets, posts.texts, text_dim)
    present["text"] = np.abs(feats["text"]).sum(axis=1) > 0
    return FeaturePanel(feats=feats, present=present)


def head_params_for(modality: str, input_dim: int, seed: int,
                    text_overrides: dict | None = None,
                    graph_overrides: dict | None = None):
    head_seed = rng.derive_stream(seed, _TAG_HEAD, MODALITIES.index(modality))
    if modality == "text":
        return text_head_params(input_dim, seed=head_seed, **(text_overrides or {}))
    return graph_head_params(input_dim, seed=head_seed, **(graph_overrides or {}))


def train_panel_heads(panel: FeaturePanel, stances: np.ndarray,
                      train_idx: np.ndarray, seed: int,
                      text_overrides: dict | None = None,
                      graph_overrides: dict | None = None) -> dict[str, TrainedHead]:
    """One head per modality, fitted on the train rows where the modality
    is present; modalities with no usable train rows are skipped."""
    heads: dict[str, TrainedHead] = {}
    for modality in MODALITIES:
        if modality not in panel.feats:
            continue
        rows = train_idx[panel.present[modality][train_idx]]
        if rows.size == 0:
            continue
        X = panel.feats[modality][rows]
        params = head_params_for(modality, X.shape[1], seed,
                                 text_overrides, graph_overrides)
        heads[modality] = train_head(X, stances[rows], params)
    return heads


def evaluate_cell(posts: PostTable, panel: FeaturePanel, source: str, dest: str,
                  n_shots: int, seed: int,
                  combos: list[tuple[str, ...]] | None = None,
                  text_overrides: dict | None = None,
                  graph_overrides: dict | None = None,
                  partition_seed: int = DEFAULT_PARTITION_SEED,
                  holdout_frac: float = DEFAULT_HOLDOUT_FRAC) -> list[dict]:
    """Train heads for one (source, dest, shots, seed) and score each
    modality panel on the fixed destination test set."""
    split = make_split(posts, source, dest, n_shots, seed,
                       partition_seed=partition_seed, holdout_frac=holdout_frac)
    heads = train_panel_heads(panel, posts.stances, split.train_idx, seed,
                              text_overrides, graph_overrides)
    test = split.test_idx
    y = posts.stances[test]
    predictions = {m: h.predict(panel.feats[m][test]) for m, h in heads.items()}
    confidences = {m: h.confidence(panel.feats[m][test]) for m, h in heads.items()}
    present = {m: panel.present[m][test] for m in heads}
    train_labels = posts.stances[split.train_idx]
    ones = int(train_labels.sum())
    majority = AGAINST if 2 * ones >= train_labels.shape[0] else 1 - AGAINST
    rows = []
    for combo in combos or ablation_grid():
        labels, _fellback = panel_predict(test.shape[0], combo, predictions,
                                          confidences, present, majority)
        macro, f1_f, f1_a = f1_scores(y, labels)
        rows.append({
            "source": source, "dest": dest, "shots": n_shots,
            "config": config_name(combo), "seed": seed,
            "macro_f1": macro, "f1_favor": f1_f, "f1_against": f1_a,
        })
    return rows


def run_cells(posts: PostTable, panel: FeaturePanel,
              pairs: list[tuple[str, str]], shots_list: list[int],
              seeds: list[int],
              combos: list[tuple[str, ...]] | None = None,
              text_overrides: dict | None = None,
              graph_overrides: dict | None = None,
              partition_seed: int = DEFAULT_PARTITION_SEED,
              holdout_frac: float = DEFAULT_HOLDOUT_FRAC) -> list[dict]:
    rows: list[dict] = []
    for source, dest in pairs:
        for n_shots in shots_list:
            for seed in seeds:
                rows.extend(evaluate_cell(
                    posts, panel, source, dest, n_shots, seed, combos,
                    text_overrides, graph_overrides, partition_seed,
                    holdout_frac))
    return rows


def cell_records(flat_rows: list[dict]) -> list[dict]:
    """Group per-seed rows into one record per cell, canonically ordered."""
    cells: dict[tuple, list[dict]] = {}
    for row in flat_rows:
        cells.setdefault((row["source"], row["dest"], row["shots"], row["config"]), []).append(row)
    records = []
    for key in sorted(cells):
        rows = sorted(cells[key], key=lambda r: r["seed"])
        macros = [r["macro_f1"] for r in rows]
        records.append({
            "source": key[0], "dest": key[1], "shots": key[2], "config": key[3],
            "seeds": [r["seed"] for r in rows],
            "per_seed": [{"seed": r["seed"], "macro_f1": r["macro_f1"],
                          "f1_favor": r["f1_favor"], "f1_against": r["f1_against"]}
                         for r in rows],
            "macro_f1_mean": sum(macros) / len(macros),
            "macro_f1_min": min(macros),
            "macro_f1_max": max(macros),
        })
    return records


def save_results(flat_rows: list[dict], out_dir: str | Path) -> dict[str, Path]:
    """results.jsonl (cell records) + results.csv (per-seed rows), both in
    canonical order so identical runs are byte-identical."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jsonl = out_dir / "results.jsonl"
    with open(jsonl, "w", encoding="utf-8") as fh:
        for record in cell_records(flat_rows):
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    csv_path = out_dir / "results.csv"
    ordered = sorted(flat_rows, key=lambda r: (r["source"], r["dest"], r["shots"],
                                               r["config"], r["seed"]))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in ordered:
            writer.writerow([row[c] for c in CSV_COLUMNS])
    return {"jsonl": jsonl, "csv": csv_path}


def load_results(jsonl_path: str | Path) -> list[dict]:
    with open(jsonl_path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: str | Path, settings: dict,
                   inputs: dict[str, str | Path],
                   outputs: dict[str, str | Path]) -> Path:
    """Resolved settings plus content hashes; no volatile fields, so a
    deterministic rerun rewrites the same bytes."""
    out_dir = Path(out_dir)
    manifest = {
        "settings": settings,
        "inputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                   for name, p in sorted(inputs.items())},
        "outputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                    for name, p in sorted(outputs.items())},
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def export_network(out_dir: str | Path, bundle: GraphBundle,
                   communities: dict[str, int] | None = None) -> dict[str, Path]:
    """nodes.csv / edges.csv for external visualization tools."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    nodes_path = out_dir / "nodes.csv"
    with open(nodes_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "community"])
        for uid in bundle.interner.ids():
            comm = communities.get(uid, "") if communities else ""
            writer.writerow([uid, comm])
    edges_path = out_dir / "edges.csv"
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "relation"])
        for relation in RELATIONS:
            g = bundle.graphs[relation]
            for a, b in export_edges(g):
                writer.writerow([bundle.interner.ids()[a],
                                 bundle.interner.ids()[b], relation])
    return {"nodes": nodes_path, "edges": edges_path}
