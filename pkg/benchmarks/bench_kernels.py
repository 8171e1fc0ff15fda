"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once untimed on the numba side so compilation is excluded,
then both backends run the same inputs and the results are compared.
"""
import argparse
import time

import numpy as np

from wiretap import kernels
from wiretap.channel import make_standard
from wiretap.oracle import chain_grid
from wiretap.probability import random_pmfs


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases():
    w = make_standard("bsc_bec", 0.1, 0.6)
    WB, HB, WE, HE = w.kernel_args()
    mats = (np.ascontiguousarray(w.main.matrix), np.ascontiguousarray(w.eavesdropper.matrix))
    P = random_pmfs(np.random.default_rng(0), 2, 200_000)
    x0 = np.array([0.5, 0.5, 0.3, 0.7, 0.6, 0.4])
    layout = np.array([2, 2], dtype=np.int64)
    blocks = np.array([[0, 2], [2, 2], [4, 2]], dtype=np.int64)
    coefs = np.array([1.0, -1.0, 1.0, -1.0])
    G = chain_grid(2, 3, 6)
    return {
        "mi_batch (2e5 inputs)": lambda k: k.mi_batch(WB, HB, P),
        "pattern_search (mixture)": lambda k: k.pattern_search(
            kernels.MIXTURE, x0, layout, blocks, WB, HB, WE, HE, coefs, 0.05, 1e-10, 2_000_000)[1],
        "brute_binary (res 150)": lambda k: k.brute_binary(*mats, 0.0, 150)[0],
        "brute_chain (2, 3, res 6)": lambda k: k.brute_chain(
            *mats, 0.0, G.xs, G.vsets, G.rows, G.pus, G.combos)[0],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.numba_impl is None:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':28s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}  max |diff|")
    for name, fn in cases().items():
        fn(kernels.numba_impl)
        tn, rn = _time(lambda: fn(kernels.numba_impl), args.repeat)
        tp, rp = _time(lambda: fn(kernels.numpy_impl), args.repeat)
        diff = float(np.max(np.abs(np.asarray(rn) - np.asarray(rp))))
        print(f"{name:28s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f}  {diff:.2e}")


if __name__ == "__main__":
    main()
