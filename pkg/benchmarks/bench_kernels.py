#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from blast._kernels import available_backends, get_backend
from blast.structures import Structure, full_adjacency, make_lattice, neighbor_list

SW = dict(
    epsilon=2.1683, sigma=2.0951, a=1.80, lam=21.0, gamma=1.20,
    cos_theta0=-1.0 / 3.0, big_a=7.049556277, big_b=0.6022245584, p=4.0, q=0.0,
)


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def sw_inputs(n_repeat):
    s = make_lattice("diamond", 5.431, "Si", (n_repeat,) * 3)
    rc = SW["a"] * SW["sigma"]
    nl = neighbor_list(s, rc)
    keep = nl.dist < rc * (1 - 1e-12)
    pi, pj = nl.pair_i[keep], nl.pair_j[keep]
    pd, pr = nl.dvec[keep], nl.dist[keep]
    ptr, nj, nd, nr = full_adjacency(len(s), pi, pj, pd, pr)
    return len(s), pi, pj, pd, pr, ptr, nj, nd, nr


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    rng = np.random.default_rng(0)
    r_small = rng.uniform(0.8, 3.2, 1_000)
    r_large = rng.uniform(0.8, 3.2, 1_000_000)
    sw_args = sw_inputs(3)  # 216-atom diamond Si cell

    cases = [
        ("lj_pair 1e3", lambda k: k.lj_pair(r_small, 0.8, 1.1, 3.3)),
        ("lj_pair 1e6", lambda k: k.lj_pair(r_large, 0.8, 1.1, 3.3)),
        ("morse_pair 1e6", lambda k: k.morse_pair(r_large, 0.8, 1.5, 1.2, 3.3)),
        ("sw 216 atoms", lambda k: k.sw_energy_forces(*sw_args, *SW.values())),
    ]

    width = max(len(name) for name, _ in cases)
    header = f"{'case':{width}s}" + "".join(f"  {b:>12s}" for b in backends)
    if len(backends) > 1:
        header += f"  {'speedup':>8s}"
    print(header)
    for name, call in cases:
        times = [timeit(lambda: call(get_backend(b)), args.repeat) for b in backends]
        row = f"{name:{width}s}" + "".join(f"  {t * 1e3:10.3f}ms" for t in times)
        if len(times) > 1:
            row += f"  {times[-1] / times[0]:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
