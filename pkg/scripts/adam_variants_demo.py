#!/usr/bin/env python3
"""Compare the moving-average variants on a stochastic quadratic.

Runs the standard update against its shuffled, averaged, and sign-only
variants from shared starting points.  If the sign carries most of the
information, the shuffled and averaged variants should track the standard
method closely while sign-only trails slightly.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from normdescent import (
    AdamConfig,
    BlockPartition,
    make_quadratic,
    quad_noisy_oracle,
    run_adam_family,
)

VARIANTS = ("standard", "shuffled", "averaged", "momentum_sign")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--lambda-max", type=float, default=30.0)
    ap.add_argument("--theta", type=float, default=0.2)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--T", type=int, default=2000)
    ap.add_argument("--seeds", type=int, default=16)
    args = ap.parse_args()

    problem = make_quadratic(args.d, args.lambda_max, args.theta, seed=0)
    half = args.d // 2
    blocks = BlockPartition((tuple(range(half)), tuple(range(half, args.d))))

    finals = {v: [] for v in VARIANTS}
    for s in range(args.seeds):
        x0 = np.random.default_rng([1, s]).standard_normal(args.d)
        for variant in VARIANTS:
            cfg = AdamConfig(step=args.step, variant=variant, blocks=blocks)
            oracle = quad_noisy_oracle(problem, args.sigma, np.random.default_rng([2, s]))
            trace = run_adam_family(oracle, cfg, x0, args.T, np.random.default_rng([3, s]))
            finals[variant].append(trace.f[-1])

    print(f"final objective after T={args.T} (median over {args.seeds} seeds):")
    for variant in VARIANTS:
        med = float(np.median(finals[variant]))
        print(f"  {variant:14s} {med:.6e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
