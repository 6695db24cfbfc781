#!/usr/bin/env python3
"""Recover the decay-rate trichotomy numerically for the pinned critical tuples.

Runs both the fixed-point solver on the integral system and the shooting
separatrix on the differential side for one parameter set per regime, and
prints fitted tail exponents against the predictions.

Usage: python scripts/regime_rates.py [--skip-picard]
"""

import argparse
import time
import warnings

from wolffkit.params import Parameters, classify_regime
from wolffkit.quasilinear import GroundStateConfig, ShootConfig, find_fast_ground_state
from wolffkit.solver import SolveConfig, solve_system

CASES = {
    "FastFast": Parameters(5, 1.0, 2.0, 2.0, 2.75, 0.0, 0.0),
    "Logarithmic": Parameters(5, 1.0, 2.0, 5 / 3, 31 / 9, 0.0, 0.0),
    "Intermediate": Parameters(5, 1.0, 2.0, 1.4, 49 / 11, 0.0, 0.0),
}


def describe(tag, result, prediction, elapsed):
    print(
        f"  {tag:<9} u: {result.rate_u.exponent:6.3f} (predicted {prediction.predicted_u_exponent:.3f})"
        f"   v: {result.rate_v.exponent:6.3f} (predicted {prediction.predicted_v_exponent:.3f})"
        f"   v log power: {result.rate_v.log_power:5.2f} (predicted {prediction.v_log_power:.2f})"
        f"   [{'converged' if result.converged else 'NOT converged'}, {elapsed:.0f}s]"
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--skip-picard", action="store_true", help="only run the shooting side")
    ap.add_argument("--max-iters", type=int, default=25)
    args = ap.parse_args()
    warnings.filterwarnings("ignore")

    for name, params in CASES.items():
        prediction = classify_regime(params)
        print(f"{name}  (p={params.p:.4f}, q={params.q:.4f}, {prediction.subcriticality.value})")
        if not args.skip_picard:
            t0 = time.perf_counter()
            res = solve_system(params, SolveConfig(max_iters=args.max_iters))
            describe("picard", res, prediction, time.perf_counter() - t0)
        t0 = time.perf_counter()
        res = find_fast_ground_state(
            params, GroundStateConfig(shoot=ShootConfig(r_stop=1e6), final_r_stop=1e6)
        )
        describe("shooting", res, prediction, time.perf_counter() - t0)


if __name__ == "__main__":
    main()
