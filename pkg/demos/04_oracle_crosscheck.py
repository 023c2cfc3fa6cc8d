"""Cross-check the exact solver against brute-force enumeration.

Usage:
    python3 demos/04_oracle_crosscheck.py [--cases N] [--seed S]

Draws N tiny random instances (at most 3 stations, 4 zones, 3 slots) and
solves each one twice: once with the branch-and-bound engine and once by
enumerating every feasible plan. The optimal objectives must agree
exactly; any disagreement is printed with its seed so it can be replayed.
This is the library-level twin of `ambuplan check`.
"""

import argparse

from ambuplan import (
    SolveStatus,
    brute_force_allocation,
    brute_force_transfer,
    generate,
    solve_allocation,
    solve_transfer,
    tiny_params,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for name, solver, reference in (
        ("allocation", solve_allocation, brute_force_allocation),
        ("transfer", solve_transfer, brute_force_transfer),
    ):
        matched = 0
        for seed in range(args.seed, args.seed + args.cases):
            inst = generate(tiny_params(seed), seed)
            mine = solver(inst)
            ref = reference(inst)
            agrees = mine.status is ref.status and (
                mine.status is not SolveStatus.OPTIMAL
                or mine.objective == ref.objective)
            if agrees:
                matched += 1
            else:
                print(f"  seed {seed}: solver {mine.status.name} "
                      f"{mine.objective} vs oracle {ref.status.name} "
                      f"{ref.objective}")
        print(f"{name}: {matched}/{args.cases} match")


if __name__ == "__main__":
    main()
