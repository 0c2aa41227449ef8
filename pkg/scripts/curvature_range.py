"""Estimated curvature range of the exponential family against its closed form.

    python3 scripts/curvature_range.py --samples 200 --seed 0
"""

import argparse
import time

import numpy as np

from finslerium.chern import curvature_bound_estimate
from finslerium.metrics import SamplePlan, exp_family

PARAMS = [(1.0, 0.5), (2.0, -0.3), (0.5, 0.4), (1.0, -0.5), (3.0, 0.9)]


def analytic_range(a, b, M0=1.0):
    # K = -2(a+b) exp(-(a t + b s)), 0 <= s <= t <= M0^2
    T = M0 * M0
    phis = [np.exp(0.0), np.exp(a * T), np.exp((a + b) * T)]
    vals = [-2 * (a + b) / p for p in phis]
    return min(vals), max(vals)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'a':>5} {'b':>5} {'inf est':>12} {'inf exact':>12} {'sup est':>12} {'sup exact':>12} {'time':>6}")
    for a, b in PARAMS:
        t0 = time.perf_counter()
        est = curvature_bound_estimate(exp_family(a, b, 1.0, 2), SamplePlan(args.samples, 1.0, args.seed))
        lo, hi = analytic_range(a, b)
        print(f"{a:5.2f} {b:5.2f} {est.inf:12.6f} {lo:12.6f} {est.sup:12.6f} {hi:12.6f} {time.perf_counter() - t0:5.1f}s")


if __name__ == "__main__":
    main()
