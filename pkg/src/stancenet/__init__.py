"""Few-shot cross-target stance detection over user networks.

Pipeline: CSR relation graphs -> second-order biased random walks ->
skip-gram node embeddings; post text -> target-conditioned features; one
feed-forward head per modality; majority-vote ensemble; few-shot
cross-target evaluation harness with seed-averaged macro-F1.
"""

__version__ = "0.1.0"

from .data import PostTable, load_posts, save_posts
from .ensemble import MODALITIES, ablation_grid, panel_predict, vote, vote_batch
from .graphs import Graph, GraphBundle, Interner, build_graph, load_edge_list
from .heads import HeadParams, TrainedHead, graph_head_params, text_head_params, train_head
from .metrics import AGAINST, FAVOR, f1_scores, macro_f1
from .sgns import NodeEmbeddings, SgnsParams, train_embeddings
from .splits import FewShotSplit, make_split
from .synth import SynthParams, generate
from .textenc import compose_input, encode_posts, hash_encode
from .walks import WalkCorpus, WalkParams, generate_walks

__all__ = [
    "__version__",
    "PostTable", "load_posts", "save_posts",
    "MODALITIES", "ablation_grid", "panel_predict", "vote", "vote_batch",
    "Graph", "GraphBundle", "Interner", "build_graph", "load_edge_list",
    "HeadParams", "TrainedHead", "graph_head_params", "text_head_params", "train_head",
    "AGAINST", "FAVOR", "f1_scores", "macro_f1",
    "NodeEmbeddings", "SgnsParams", "train_embeddings",
    "FewShotSplit", "make_split",
    "SynthParams", "generate",
    "compose_input", "encode_posts", "hash_encode",
    "WalkCorpus", "WalkParams", "generate_walks",
]
