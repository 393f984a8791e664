"""Exponent of random mBM-1 erasure patterns on the m-ary symmetric channel.

Prints, for the (31,25) code over GF(32) with 2^8 attempts, the predicted
failure probability 2^-F next to a short simulation, then the number of
attempts needed for a few target exponents.
"""

import argparse

import numpy as np

from rsrde.harness import ExperimentConfig, attempts_budget_report, run_experiment
from rsrde.rde import rate_frontier


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=5000)
    args = ap.parse_args()

    cfg = ExperimentConfig(params=(0.95, 0.96, 0.97, 0.98), rate=8, trials=args.frames,
                           min_errors=args.frames, seed=3)
    lo, hi = rate_frontier(cfg.d_target, cfg.n, cfg.params[0])
    print(f"(31,25), D = {cfg.d_target}; positive exponent for R in ({lo:.2f}, {hi:.2f}] at p = 0.95")
    print(f"{'p':>6} {'F':>7} {'2^-F':>9} {'list miss':>10} {'FER':>9}")
    for pt in run_experiment(cfg):
        miss = pt.list_misses / pt.frames
        print(f"{pt.channel_param:6.3f} {pt.f_exponent:7.3f} {pt.pe_approx:9.2e} {miss:10.2e} {pt.fer:9.2e}")

    print("\nattempts needed for a target exponent at p = 0.97")
    for p, F, R, A in attempts_budget_report(ExperimentConfig(params=(0.97,)), exponents=(2, 4, 6, 8, 10)):
        print(f"  F = {F:4.1f}: R = {R:6.3f}, {int(np.ceil(A)):>6} patterns")


if __name__ == "__main__":
    main()
