#!/usr/bin/env python3
"""Time the hot decision kernels: numba backend vs pure-numpy fallback.

Run from the repository root:

    python benchmarks/bench_backends.py [--reps 10000]

The first numba call compiles (cached on disk); compilation is excluded by a
warmup pass.
"""

import argparse
import time

import numpy as np

from condmtp import _kernels
from condmtp.procedures import ProcedureSpec
from condmtp.simkit import CorrelationModel, SimulationScenario, estimate_rate


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=10_000)
    args = parser.parse_args()

    numpy_be = _kernels.get_backend("numpy")
    numba_be = _kernels.get_backend("numba")
    rng = np.random.default_rng(0)

    workloads = []

    p_grid = rng.uniform(0, 1, (args.reps, 25))
    truth = np.ones(25, dtype=bool)
    alphas = np.array([0.05, 0.5, 0.95])
    lams = np.array([0.1, 0.5, 0.9])
    workloads.append((
        "cbp_grid_counts (m=25, 3x3 grid)",
        lambda be: be["cbp_grid_counts"](p_grid, truth, alphas, lams)))

    p_holm = rng.uniform(0, 1, (args.reps, 200))
    workloads.append((
        "holm step decisions (m=200)",
        lambda be: be["step_decisions"](p_holm, 0.5, 0.05, 0)))

    p_bh = rng.uniform(0, 1, (args.reps, 200))
    workloads.append((
        "bh step decisions (m=200)",
        lambda be: be["step_decisions"](p_bh, 0.5, 0.05, 2)))

    p_hommel = rng.uniform(0, 1, (args.reps // 5, 50))
    workloads.append((
        "hommel step decisions (m=50)",
        lambda be: be["step_decisions"](p_hommel, 1.0, 0.05, 3)))

    print(f"{'workload':<38} {'numpy':>9} {'numba':>9} {'speedup':>8}")
    for name, fn in workloads:
        fn(numba_be)  # warmup / compile
        t_np = _time(lambda: fn(numpy_be))
        t_nb = _time(lambda: fn(numba_be))
        print(f"{name:<38} {t_np*1e3:>7.1f}ms {t_nb*1e3:>7.1f}ms "
              f"{t_np/t_nb:>7.1f}x")

    # end to end: conditionalized Holm FWER estimate
    scn = SimulationScenario(
        m=50, noncentralities=np.zeros(50), n=1,
        correlation=CorrelationModel.equicorrelated(0.3),
        truth_mask=np.ones(50, dtype=bool),
        procedures=(ProcedureSpec("holm", 0.05, 0.5),),
        replications=args.reps, master_seed=1)
    estimate_rate(scn, scn.procedures[0], "fwer", backend="numba")
    t_np = _time(lambda: estimate_rate(scn, scn.procedures[0], "fwer",
                                       backend="numpy"), repeats=3)
    t_nb = _time(lambda: estimate_rate(scn, scn.procedures[0], "fwer",
                                       backend="numba"), repeats=3)
    name = "estimate_rate cond:holm (m=50, e2e)"
    print(f"{name:<38} {t_np*1e3:>7.1f}ms {t_nb*1e3:>7.1f}ms "
          f"{t_np/t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
