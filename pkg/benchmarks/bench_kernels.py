"""Compare the compiled walk/SGNS kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--scale N]

Reports wall time and throughput for both backends on the same synthetic
graph, and verifies the walk corpora are bitwise identical before timing
the trainers on them.
"""

import argparse
import time

import numpy as np

from stancenet.kernels import HAVE_NATIVE
from stancenet.sgns import SgnsParams, train_embeddings
from stancenet.synth import SynthParams, generate
from stancenet.walks import WalkParams, generate_walks


def bench(label, fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=1,
                    help="multiplier on users / walks (default 1)")
    args = ap.parse_args()

    data = generate(SynthParams(n_users=200 * args.scale, n_posts=400,
                                mean_degree=16, seed=5))
    g = data.bundle().graphs["followers"]
    wp = WalkParams(p=0.5, q=2.0, walks_per_node=40, walk_length=800, seed=9)
    sp = SgnsParams(dim=32, window=3, epochs=1, seed=9)

    backends = ["python"] + (["native"] if HAVE_NATIVE else [])
    if not HAVE_NATIVE:
        print("note: compiled extension not built, timing fallback only")

    corpora = {}
    print(f"graph: {g.n} nodes, {g.num_directed_edges} directed edges")
    print(f"\nwalk generation ({wp.walks_per_node} walks/node, length {wp.walk_length})")
    for b in backends:
        secs, corpus = bench(b, lambda b=b: generate_walks(g, wp, backend=b))
        corpora[b] = corpus
        hops = corpus.walks.shape[0] * (corpus.walks.shape[1] - 1)
        print(f"  {b:<7} {secs * 1e3:8.1f} ms  {hops / secs / 1e6:8.1f} M hops/s")
    if len(corpora) == 2:
        same = np.array_equal(corpora["python"].walks, corpora["native"].walks)
        print(f"  corpora bitwise identical: {same}")
        if not same:
            raise SystemExit("backend mismatch: walks differ")

    # smaller corpus for the trainer so the fallback finishes quickly
    corpus = generate_walks(g, WalkParams(walks_per_node=2, walk_length=60,
                                          seed=9))
    from stancenet.sgns import pair_counts
    pairs = int(pair_counts(corpus.lengths, sp.window)[-1]) * sp.epochs
    print(f"\nSGNS training (dim {sp.dim}, window {sp.window}, {sp.epochs} epoch, "
          f"{pairs} pairs)")
    for b in backends:
        secs, emb = bench(b, lambda b=b: train_embeddings(corpus, sp, backend=b),
                          repeats=1)
        print(f"  {b:<7} {secs * 1e3:8.1f} ms  {pairs / secs / 1e3:8.1f} K pairs/s")


if __name__ == "__main__":
    main()
