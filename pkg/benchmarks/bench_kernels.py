"""Throughput comparison: compiled CRF kernels vs the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--seqs 2000] [--length 50]
"""

import argparse
import time

import numpy as np

from initspan import kernels_py

try:
    from initspan import _ckernels
except ImportError:
    _ckernels = None


def bench(impl, instances, fn_name):
    fn = getattr(impl, fn_name)
    start = time.perf_counter()
    for e, tr, st, en in instances:
        fn(e, tr, st, en)
    return time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seqs", type=int, default=2000, help="number of sequences")
    ap.add_argument("--length", type=int, default=50, help="sentences per sequence")
    ap.add_argument("--labels", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    instances = []
    for _ in range(args.seqs):
        instances.append((
            rng.normal(size=(args.length, args.labels)),
            rng.normal(size=(args.labels, args.labels)),
            rng.normal(size=args.labels),
            rng.normal(size=args.labels),
        ))

    print(f"{args.seqs} sequences, T={args.length}, L={args.labels}")
    print(f"{'kernel':<18} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for fn_name in ("log_partition", "forward_backward", "viterbi"):
        t_py = bench(kernels_py, instances, fn_name)
        if _ckernels is None:
            print(f"{fn_name:<18} {t_py:>9.3f}s {'n/a':>10} {'n/a':>9}")
            continue
        t_c = bench(_ckernels, instances, fn_name)
        print(f"{fn_name:<18} {t_py:>9.3f}s {t_c:>9.3f}s {t_py / t_c:>8.1f}x")
    if _ckernels is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
