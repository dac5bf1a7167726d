#!/usr/bin/env python3
"""Time the solver inner loops: compiled extension vs NumPy fallback.

Runs each kernel (exhaustive enumeration, annealing chunk, tabu search)
on a seeded workload with both backends, checks that they agree, and
prints best-of-``--repeats`` wall times with the speedup.  The compiled
backend is skipped (with a note) when the extension is not built.

Typical run::

    python benchmarks/bench_kernels.py --repeats 3
"""

import argparse
import time

import numpy as np

from qubofs._kernels import fallback

try:
    from qubofs._kernels import _core as compiled
except ImportError:  # pure-Python install
    compiled = None


def _symmetric(rng, n, scale=1.0):
    m = rng.normal(scale=scale, size=(n, n))
    return (m + m.T) / 2.0


def _time(fn, repeats):
    best = np.inf
    value = None
    for _ in range(repeats):
        start = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - start)
    return best, value


def bench_exhaustive(rng, bits, repeats):
    q = _symmetric(rng, bits)
    runs = {}
    for name, mod in _backends():
        runs[name] = _time(lambda m=mod: m.exhaustive_scan(q, 1e-12, True), repeats)
    if len(runs) == 2:
        (e_a, codes_a), (e_b, codes_b) = runs["compiled"][1], runs["python"][1]
        assert abs(e_a - e_b) < 1e-9 and np.array_equal(codes_a, codes_b)
    return f"exhaustive_scan n={bits} (2^{bits} states)", runs


def bench_anneal(rng, n, shots, sweeps, repeats):
    q = _symmetric(rng, n)
    x0 = rng.integers(0, 2, size=(shots, n)).astype(np.uint8)
    logu = np.log(rng.random(size=(shots, sweeps, n)))
    temps = np.geomspace(10.0, 1e-3, sweeps)
    runs = {}
    for name, mod in _backends():
        runs[name] = _time(lambda m=mod: m.anneal_chunk(q, x0, logu, temps), repeats)
    if len(runs) == 2:
        assert np.array_equal(runs["compiled"][1], runs["python"][1])
    return f"anneal_chunk n={n} shots={shots} sweeps={sweeps}", runs


def bench_tabu(rng, n, repeats):
    q = _symmetric(rng, n)
    x0 = rng.integers(0, 2, size=n).astype(np.uint8)
    runs = {}
    for name, mod in _backends():
        runs[name] = _time(
            lambda m=mod: m.tabu_search(q, x0, 10, 200, 20_000), repeats
        )
    if len(runs) == 2:
        assert np.array_equal(runs["compiled"][1], runs["python"][1])
    return f"tabu_search n={n} (20k iteration cap)", runs


def _backends():
    pairs = []
    if compiled is not None:
        pairs.append(("compiled", compiled))
    pairs.append(("python", fallback))
    return pairs


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="keep the best of this many timings (default 3)")
    parser.add_argument("--scan-bits", type=int, default=20,
                        help="variables for the enumeration benchmark (default 20)")
    parser.add_argument("--anneal-n", type=int, default=32)
    parser.add_argument("--shots", type=int, default=64)
    parser.add_argument("--sweeps", type=int, default=500)
    parser.add_argument("--tabu-n", type=int, default=256)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if compiled is None:
        print("compiled extension not available; timing the fallback only\n")

    rng = np.random.default_rng(args.seed)
    rows = [
        bench_exhaustive(rng, args.scan_bits, args.repeats),
        bench_anneal(rng, args.anneal_n, args.shots, args.sweeps, args.repeats),
        bench_tabu(rng, args.tabu_n, args.repeats),
    ]

    width = max(len(label) for label, _ in rows)
    print(f"{'workload':<{width}}  {'compiled':>10}  {'python':>10}  {'speedup':>8}")
    for label, runs in rows:
        py = runs["python"][0]
        if "compiled" in runs:
            co = runs["compiled"][0]
            print(f"{label:<{width}}  {co * 1e3:>8.1f}ms  {py * 1e3:>8.1f}ms  "
                  f"{py / co:>7.1f}x")
        else:
            print(f"{label:<{width}}  {'-':>10}  {py * 1e3:>8.1f}ms  {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
