"""Time the compiled and NumPy filter-bank kernels on full wavelet-packet trees.

Usage: python benchmarks/bench_kernels.py [--out bench.csv] [--repeat 5]
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from wpspec import kernels
from wpspec.filters import builtin_filter

CASES = [
    # (length, filter, depth, mode)
    (4096, "haar", 8, "periodic"),
    (4096, "db8", 8, "periodic"),
    (12800, "db8", 5, "zeropad"),
    (12800, "db8", 8, "zeropad"),
    (12800, "db8", 11, "zeropad"),
    (65536, "db15", 6, "periodic"),
]


def full_tree(backend, x, fp, depth, mode):
    h, g = fp.lowpass, fp.highpass
    step = backend.analysis_periodic if mode == "periodic" else backend.analysis_zeropad
    nodes = [x]
    for _ in range(depth):
        nxt = []
        for node in nodes:
            a, d = step(node, h, g)
            nxt += [np.ascontiguousarray(a), np.ascontiguousarray(d)]
        nodes = nxt
    return nodes


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="bench_kernels.csv")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    compiled = kernels.compiled_backend()
    backends = {"python": kernels.python_backend}
    if compiled is None:
        print("compiled extension not built; timing the NumPy backend only", file=sys.stderr)
    else:
        backends["cython"] = compiled

    rng = np.random.default_rng(0)
    rows = []
    for n, name, depth, mode in CASES:
        x = rng.standard_normal(n)
        fp = builtin_filter(name)
        timings = {}
        for label, backend in backends.items():
            full_tree(backend, x, fp, depth, mode)  # warm-up
            t = timeit.repeat(lambda: full_tree(backend, x, fp, depth, mode), number=1, repeat=args.repeat)
            timings[label] = min(t)
        speedup = timings["python"] / timings["cython"] if "cython" in timings else float("nan")
        row = {
            "length": n,
            "filter": name,
            "depth": depth,
            "mode": mode,
            "python_s": timings["python"],
            "cython_s": timings.get("cython", float("nan")),
            "speedup": speedup,
        }
        rows.append(row)
        print(
            f"N={n:6d} {name:5s} J={depth:2d} {mode:8s} python {row['python_s'] * 1e3:8.2f} ms"
            f"  cython {row['cython_s'] * 1e3:8.2f} ms  x{speedup:5.1f}"
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
