"""Compare the compiled and numpy kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Workloads: whole branch-and-bound solves of random bounded-integer models
(exercises the dual simplex kernel) and cover DP tables of growing size.
"""

import argparse
import time

import numpy as np

from ilpce import _kernels, mip
from ilpce.dp import dp_restricted_min
from ilpce.model import PresentProblem


def random_models(count, seed):
    rng = np.random.default_rng(seed)
    models = []
    for _ in range(count):
        n = int(rng.integers(8, 16))
        m = mip.MipModel()
        xs = [m.add_var(f"x{i}", 0, int(rng.integers(1, 6))) for i in range(n)]
        for _ in range(int(rng.integers(3, 9))):
            coeffs = {x: int(rng.integers(-9, 10)) for x in xs}
            m.add_constraint(coeffs, str(rng.choice(["<=", ">="])), int(rng.integers(-10, 30)))
        m.set_objective({x: int(rng.integers(-9, 10)) for x in xs}, "max")
        models.append(m)
    return models


def bench_lp(backend, models, repeat):
    best = float("inf")
    nodes = 0
    for _ in range(repeat):
        t = time.perf_counter()
        nodes = sum(mip.solve(m, backend=backend).node_count for m in models)
        best = min(best, time.perf_counter() - t)
    return best, nodes


def bench_dp(backend, sizes, repeat):
    rng = np.random.default_rng(1)
    out = []
    for n, b in sizes:
        p = PresentProblem(rng.integers(1, 100, n).tolist(), rng.integers(1, 60, n).tolist(), b)
        q = (rng.integers(0, 2, n).tolist(), 3)
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            val, ops = dp_restricted_min(p, [q], b, return_ops=True, backend=backend)
            best = min(best, time.perf_counter() - t)
        out.append((n, b, ops, best, val))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--models", type=int, default=60)
    args = ap.parse_args()
    backends = _kernels.available()
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    models = random_models(args.models, 0)
    lp = {b: bench_lp(b, models, args.repeat) for b in backends}
    print(f"\nbranch-and-bound, {len(models)} models")
    for b, (t, nodes) in lp.items():
        print(f"  {b:9s} {t:8.3f} s  {nodes} nodes")
    sizes = [(20, 200), (40, 500), (60, 1000)]
    dp = {b: bench_dp(b, sizes, args.repeat) for b in backends}
    print("\ncover DP (one side row)")
    for k, (n, bb) in enumerate(sizes):
        cells = "  ".join(f"{b}: {dp[b][k][3] * 1e3:8.2f} ms" for b in backends)
        print(f"  n={n:3d} b={bb:5d} ops={dp[backends[0]][k][2]:9d}  {cells}")
    if len(backends) == 2:
        print(f"\nspeedup (python / compiled): LP {lp['python'][0] / lp['compiled'][0]:.1f}x, "
              f"DP {sum(r[3] for r in dp['python']) / sum(r[3] for r in dp['compiled']):.1f}x")
        agree = all(dp["python"][k][4] == dp["compiled"][k][4] for k in range(len(sizes)))
        print(f"DP values agree across backends: {agree}")


if __name__ == "__main__":
    main()
