"""Synthetic cross-target corpus with controllable difficulty.

Users split into one community per (target, stance) pair; community sizes
follow the per-target label mixes. Each post is authored inside its
(target, stance) community, round-robin, so a user's posts are label
consistent. The three relation graphs are independent block models over
the same communities: within-community edge probability p_in, across
p_out = p_in * (1 - homophily) / homophily, with p_in calibrated so the
expected mean degree matches `mean_degree`. homophily = 0.5 makes the
graph independent of the communities; 1.0 removes all cross edges.

Post text is a template with exactly one opinion token: with probability
`signal_rate` it comes from the author's true stance lexicon, otherwise
from the opposite one, so signal_rate caps how well any text-only
classifier can do.

Everything is drawn from counter-based substreams of `seed`; generation
is deterministic and platform independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .data import PostTable
from .graphs import RELATIONS, GraphBundle
from .splits import largest_remainder

DEFAULT_TARGETS = ("trump", "biden", "sanders")
# (favor, against) post counts per default target; community sizes and
# post allocations scale with these
DEFAULT_LABEL_MIX = ((519, 947), (702, 716), (776, 553))

FAVOR_WORDS = ("support", "endorse", "back", "cheer", "praise", "defend",
               "champion", "applaud")
AGAINST_WORDS = ("oppose", "reject", "slam", "blast", "criticize", "condemn",
                 "denounce", "boo")
FILLER_WORDS = ("the", "a", "today", "again", "really", "people", "policy",
                "rally", "vote", "news", "debate", "plan", "speech", "crowd",
                "media", "country", "state", "issue", "campaign", "poll",
                "record", "party", "moment", "story", "week", "town",
                "promise", "stage", "crisis", "budget", "reform", "tax",
                "jobs", "energy", "health", "border", "court", "bill",
                "union", "street")

_TAG_EDGE = 0x30
_TAG_TEXT = 0x44


@dataclass(frozen=True)
class SynthParams:
    n_users: int = 600
    n_posts: int = sum(sum(m) for m in DEFAULT_LABEL_MIX)
    targets: tuple[str, ...] = DEFAULT_TARGETS
    label_mix: tuple[tuple[int, int], ...] = DEFAULT_LABEL_MIX
    mean_degree: float = 20.0
    homophily: float = 0.9
    signal_rate: float = 0.7
    fillers_per_post: int = 6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_users < 2 * len(self.targets):
            raise ValueError("synth.n_users: need at least one user per community")
        if self.n_posts < 1:
            raise ValueError("synth.n_posts: must be >= 1")
        if len(self.targets) != len(set(self.targets)) or not self.targets:
            raise ValueError("synth.targets: must be non-empty and unique")
        if len(self.label_mix) != len(self.targets):
            raise ValueError("synth.label_mix: needs one (favor, against) pair per target")
        for pair in self.label_mix:
            if len(pair) != 2 or min(pair) < 0 or sum(pair) == 0:
                raise ValueError(f"synth.label_mix: bad pair {pair!r}")
        if not 0.0 < self.homophily <= 1.0:
            raise ValueError("synth.homophily: must be in (0, 1]")
        if not 0.0 <= self.signal_rate <= 1.0:
            raise ValueError("synth.signal_rate: must be in [0, 1]")
        if self.mean_degree <= 0:
            raise ValueError("synth.mean_degree: must be > 0")


@dataclass
class SynthData:
    params: SynthParams
    users: list[str]
    communities: np.ndarray  # int64 per user, index into community list
    community_of: list[tuple[str, int]]  # (target, stance) per community
    posts: PostTable
    edges: dict[str, np.ndarray]  # relation -> (m, 2) int64 user indices

    def bundle(self) -> GraphBundle:
        id_edges = {
            rel: [(self.users[a], self.users[b]) for a, b in e.tolist()]
            for rel, e in self.edges.items()
        }
        return GraphBundle.build(self.posts.user_ids, id_edges, undirected=True)


def edge_probabilities(params: SynthParams, community_sizes: np.ndarray) -> tuple[float, float]:
    """(p_in, p_out) hitting the requested mean degree; errors when the
    (degree, homophily) pair is infeasible."""
    sizes = np.asarray(community_sizes, dtype=np.float64)
    n = sizes.sum()
    ratio = (1.0 - params.homophily) / max(params.homophily, 1e-12)
    # expected degree of a user in community c: p_in (|c|-1) + p_out (n-|c|)
    per_user = (sizes * ((sizes - 1.0) + ratio * (n - sizes))).sum() / n
    if per_user <= 0:
        raise ValueError("graph too small for any edges at these settings")
    p_in = params.mean_degree / per_user
    p_out = ratio * p_in
    if p_in > 1.0 or p_out > 1.0:
        raise ValueError(
            f"infeasible synth graph: mean_degree={params.mean_degree} at "
            f"homophily={params.homophily} needs p_in={p_in:.3f}, p_out={p_out:.3f}")
    return p_in, p_out


def _block_edges(seed: int, rel_idx: int, ci: int, cj: int,
                 rows: np.ndarray, cols: np.ndarray, p: float) -> np.ndarray:
    """Bernoulli(p) edges between two user blocks (upper triangle when the
    blocks coincide); one substream per (relation, block pair)."""
    state = rng.derive_stream3(seed, _TAG_EDGE + rel_idx, ci, cj)
    u = rng.stream_uniforms(state, rows.shape[0] * cols.shape[0])
    hit = (u < p).reshape(rows.shape[0], cols.shape[0])
    if ci == cj:
        hit &= np.triu(np.ones_like(hit, dtype=bool), k=1)
    ii, jj = np.nonzero(hit)
    return np.column_stack((rows[ii], cols[jj])).astype(np.int64)


def generate(params: SynthParams) -> SynthData:
    """Build users, communities, relation graphs, and posts."""
    k = len(params.targets)
    weights = np.array([c for pair in params.label_mix for c in pair], dtype=np.float64)
    comm_sizes = largest_remainder(weights, params.n_users)
    if (comm_sizes == 0).any():
        bad = int(np.flatnonzero(comm_sizes == 0)[0])
        raise ValueError(
            f"synth.n_users={params.n_users} leaves community {bad} empty; "
            f"raise n_users or flatten label_mix")
    community_of = [(t, s) for t in params.targets for s in (0, 1)]
    communities = np.repeat(np.arange(2 * k, dtype=np.int64), comm_sizes)
    users = [f"u{i:05d}" for i in range(params.n_users)]
    bounds = np.concatenate(([0], np.cumsum(comm_sizes)))

    p_in, p_out = edge_probabilities(params, comm_sizes)
    edges: dict[str, np.ndarray] = {}
    for rel_idx, rel in enumerate(RELATIONS):
        chunks = []
        for ci in range(2 * k):
            rows = np.arange(bounds[ci], bounds[ci + 1])
            for cj in range(ci, 2 * k):
                cols = np.arange(bounds[cj], bounds[cj + 1])
                p = p_in if ci == cj else p_out
                if p <= 0.0:
                    continue
                chunk = _block_edges(params.seed, rel_idx, ci, cj, rows, cols, p)
                if chunk.size:
                    chunks.append(chunk)
        edges[rel] = (np.concatenate(chunks) if chunks
                      else np.empty((0, 2), dtype=np.int64))

    post_alloc = largest_remainder(weights, params.n_posts)
    post_ids: list[str] = []
    user_ids: list[str] = []
    targets_col: list[str] = []
    stances: list[int] = []
    texts: list[str] = []
    n_favor = len(FAVOR_WORDS)
    n_against = len(AGAINST_WORDS)
    n_fill = len(FILLER_WORDS)
    pid = 0
    for comm, (target, stance) in enumerate(community_of):
        members = np.arange(bounds[comm], bounds[comm + 1])
        for local in range(int(post_alloc[comm])):
            author = int(members[local % members.shape[0]])
            u = rng.stream_uniforms(rng.derive_stream(params.seed, _TAG_TEXT, pid),
                                    2 + params.fillers_per_post)
            honest = u[0] < params.signal_rate
            voiced = stance if honest else 1 - stance
            if voiced == 0:
                word = FAVOR_WORDS[min(int(u[1] * n_favor), n_favor - 1)]
            else:
                word = AGAINST_WORDS[min(int(u[1] * n_against), n_against - 1)]
            fillers = [FILLER_WORDS[min(int(x * n_fill), n_fill - 1)]
                       for x in u[2:]]
            half = params.fillers_per_post // 2
            text = " ".join(fillers[:half] + [word, target] + fillers[half:])
            post_ids.append(f"p{pid:06d}")
            user_ids.append(users[author])
            targets_col.append(target)
            stances.append(stance)
            texts.append(text)
            pid += 1
    posts = PostTable(post_ids=post_ids, user_ids=user_ids, targets=targets_col,
                      stances=np.array(stances, dtype=np.int64), texts=texts)
    return SynthData(params=params, users=users, communities=communities,
                     community_of=community_of, posts=posts, edges=edges)
