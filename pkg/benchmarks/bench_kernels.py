#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallbacks on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row reports the best of ``--repeat`` runs per backend after one
warm-up call, and checks that both backends returned the same answer.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from letq import _accel, diagnosis, kernels
from letq.topology import build_letq


def cases(quick: bool):
    big = build_letq((2, 3) if quick else (3, 4))
    mid = build_letq((2, 3))
    rng = np.random.default_rng(0)
    rows = 2_000 if quick else 20_000
    masks = rng.random((rows, big.order)) < 0.05
    other = rng.random((rows, big.order)) < 0.05
    sets, _ = diagnosis.good_neighbor_sets(build_letq((1, 2)), 1, 3)
    yield "min_degree", f"{rows} masks, |V|={big.order}", lambda: kernels.min_degree(big.nbr, masks)
    yield "disconnected", f"{rows} masks, |V|={big.order}", lambda: kernels.disconnected(big.nbr, masks)
    yield "distinguishable[MM*]", f"{rows} pairs", lambda: kernels.distinguishable(big.nbr, masks, other, kernels.MMSTAR)
    yield ("first_indistinguishable", f"{sets.shape[0]} sets of LeTQ(1,2)",
           lambda: kernels.first_indistinguishable(build_letq((1, 2)).nbr, sets, kernels.PMC))
    k = 3 if quick else 4
    yield f"kappa_scan k={k}", "LeTQ(2,3), g=2", lambda: kernels.kappa_scan(mid.nbr, k, 2, 1 << 40)
    n = 5_000 if quick else 50_000
    yield ("sample_pairs", f"{n} pairs, LeTQ(2,3), g=1",
           lambda: diagnosis.sample_pairs(mid, 1, 4, n, np.random.default_rng(1)))


def best_of(fn, repeat: int) -> tuple[float, object]:
    result = fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<26}{'input':<30}{'numpy s':>10}{'numba s':>10}{'speedup':>9}  agree")
    for name, desc, fn in cases(args.quick):
        out = {}
        for backend in ("numpy", "numba"):
            prev = _accel.set_backend(backend)
            try:
                out[backend] = best_of(fn, args.repeat)
            finally:
                _accel.set_backend(prev)
        t_np, r_np = out["numpy"]
        t_nb, r_nb = out["numba"]
        print(f"{name:<26}{desc:<30}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>9.1f}  {same(r_np, r_nb)}")


if __name__ == "__main__":
    main()
