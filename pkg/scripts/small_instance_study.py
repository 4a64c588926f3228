#!/usr/bin/env python3
"""Compare heuristics against the exact optimum on small instances.

Generates seeded instances of every family, solves each exactly, runs a
set of algorithm expressions, and prints the mean gap to optimality per
(family, algorithm).  A compact reproduction of the small-instance
experiment design at sizes where enumeration is instant.

Usage:
    python3 scripts/small_instance_study.py --size 12x20 --seeds 5 \
        --algs G,A(G),F(G),Vex1,M(Vex1) --iters 100
"""

import argparse
import sys
import time
from collections import defaultdict

import numpy as np

import bqp
from bqp.cli import gap
from bqp.expr import needs_budget, needs_rng


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", default="12x20", help="instance size as MxN (M <= 24)")
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--algs", default="G,A(G),F(G),Vex1,M(Vex1)")
    parser.add_argument("--iters", type=int, default=100, help="budget for budgeted algorithms")
    parser.add_argument("--master-seed", type=int, default=0)
    args = parser.parse_args()

    m, n = (int(v) for v in args.size.split("x"))
    exprs = [bqp.parse_expr(tok) for tok in args.algs.split(",")]
    budget = bqp.Budget.iters(args.iters)

    gaps = defaultdict(list)
    times = defaultdict(list)
    for family in bqp.FAMILIES:
        for seed in range(args.seeds):
            inst = bqp.generate_instance(family, m, n, seed=seed)
            optimum = bqp.enumerate_exact(inst).objective
            for expr in exprs:
                rng = (
                    np.random.default_rng([args.master_seed, seed])
                    if needs_rng(expr)
                    else None
                )
                t0 = time.perf_counter()
                sol = bqp.run_expr(
                    inst, expr, budget=budget if needs_budget(expr) else None, rng=rng
                )
                times[(family, bqp.render_expr(expr))].append(time.perf_counter() - t0)
                g = gap(sol.objective, optimum)
                if g is not None:
                    gaps[(family, bqp.render_expr(expr))].append(g)

    header = f"{'family':<12} {'alg':<10} {'mean_gap_%':>10} {'mean_ms':>9}"
    print(header)
    print("-" * len(header))
    for family in bqp.FAMILIES:
        for expr in exprs:
            key = (family, bqp.render_expr(expr))
            gs, ts = gaps[key], times[key]
            mean_gap = f"{sum(gs) / len(gs):.2f}" if gs else "undef"
            print(f"{family:<12} {key[1]:<10} {mean_gap:>10} {1000 * sum(ts) / len(ts):>9.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
