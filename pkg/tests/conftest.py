"""Shared fixtures: the hand-checkable two-station instance and tiny corpora."""

import numpy as np
import pytest

from ambuplan import Instance, generate, tiny_params


@pytest.fixture
def tiny1() -> Instance:
    """Two stations, two zones, one slot; optimum 5 under both models.

    Station 0 covers zone 0 only, station 1 covers both. Dispatching from
    station 1 costs 2, so the cheapest complete plan splits the work:
    one vehicle at each station, each answering its own zone (1+1 holding
    plus 1+2 dispatch).
    """
    return Instance(
        num_stations=2,
        num_zones=2,
        num_slots=1,
        fleet_size=3,
        coverage=np.array([[1, 0], [1, 1]]),
        capacity=np.array([[2], [2]]),
        hold_cost=np.array([[1], [1]]),
        dispatch_cost=np.array([[1], [2]]),
        demand=np.array([[1], [1]]),
        big_m=1000,
    )


def tiny_corpus(start: int, count: int) -> list[tuple[int, Instance]]:
    """Seeded brute-forceable instances, shared by unit and acceptance tests."""
    return [(seed, generate(tiny_params(seed), seed))
            for seed in range(start, start + count)]
