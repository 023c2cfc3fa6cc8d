"""Show how the relocation price decides whether the fleet moves.

One vehicle, one zone, two stations that can both serve it, two slots.
Station A is cheap to hold in the morning and dear in the afternoon;
station B is the mirror image. Moving the vehicle at midday saves 4 in
holding cost, so it relocates exactly while the transfer price is below
that saving. The script sweeps the price and prints the tipping point.
"""

import dataclasses

from ambuplan import Instance, solve_transfer


def main():
    base = Instance(
        num_stations=2,
        num_zones=1,
        num_slots=2,
        fleet_size=1,
        coverage=[[1], [1]],
        capacity=[[1, 1], [1, 1]],
        hold_cost=[[1, 5],   # station A: cheap morning, dear afternoon
                   [5, 1]],  # station B: the reverse
        dispatch_cost=[[1, 1], [1, 1]],
        demand=[[1, 1]],
        big_m=1000,
        transfer_cost=0,
    )

    print(f"{'price':>5} {'objective':>10} {'moved':>6}  stock per slot")
    for tau in (0, 2, 4, 6, 8):
        inst = dataclasses.replace(base, transfer_cost=tau)
        outcome = solve_transfer(inst)
        plan = outcome.plan
        moved = int(plan.transfer_in.sum()) > 0
        stocks = [plan.stock[:, t].tolist() for t in range(inst.num_slots)]
        print(f"{tau:>5} {outcome.objective:>10} {str(moved):>6}  {stocks}")

    print("\nmoving saves 4 in holding cost, so the vehicle relocates")
    print("while the price is under 4 and parks for good once it is over;")
    print("at exactly 4 both plans tie and the solver picks one of them")


if __name__ == "__main__":
    main()
