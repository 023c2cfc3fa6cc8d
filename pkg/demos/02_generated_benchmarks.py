"""Generate a benchmark instance and race the two models on it.

Usage:
    python3 demos/02_generated_benchmarks.py [--preset K] [--seed N]

Picks one of the five built-in benchmark sizes, solves it under both
formulations, and prints a small comparison table. The allocation model
re-places the fleet from scratch every slot while the transfer model
carries one stock through time, so the two optima price the same day
differently and are not directly comparable.
"""

import argparse
import time

from ambuplan import generate, preset, solve_allocation, solve_transfer


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", type=int, default=2, choices=range(1, 6),
                    help="benchmark size, 1 smallest to 5 largest")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    params = preset(args.preset)
    inst = generate(params, args.seed)
    print(f"preset {args.preset} seed {args.seed}: "
          f"{inst.num_stations} stations, {inst.num_zones} zones, "
          f"{inst.num_slots} slots, fleet {inst.fleet_size}, "
          f"total demand {int(inst.demand.sum())}")

    print(f"\n{'model':<12} {'objective':>10} {'shortage':>9} "
          f"{'nodes':>6} {'time':>8}")
    for name, solver in (("allocation", solve_allocation),
                         ("transfer", solve_transfer)):
        started = time.perf_counter()
        outcome = solver(inst)
        elapsed = time.perf_counter() - started
        shortage = int(outcome.plan.shortage.sum())
        print(f"{name:<12} {outcome.objective:>10} {shortage:>9} "
              f"{outcome.nodes:>6} {elapsed:>7.2f}s")


if __name__ == "__main__":
    main()
