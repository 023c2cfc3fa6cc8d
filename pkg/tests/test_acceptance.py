"""Acceptance gate: eight end-to-end guarantees, one verdict line each.

Each test prints a single "criterion N ...: PASS/FAIL" line so the suite
log doubles as the acceptance record. Objective comparisons are exact
integer equality; the only tolerances are the stated 1e-6 integrality
window and the wall-clock budgets.
"""

import csv
import dataclasses
import io
import subprocess
import sys
import time

import numpy as np
import pytest

from ambuplan import (
    SolveStatus,
    brute_force_allocation,
    brute_force_transfer,
    build_transfer_program,
    generate,
    preset,
    solve_allocation,
    solve_transfer,
    tiny_params,
)
from ambuplan.engine import LpStatus, solve_lp

CORPUS_COUNT = 200
TIME_BUDGET = 60.0


def verdict(number: int, description: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"\ncriterion {number} ({description}): {status}")
    assert not failures, f"criterion {number}: {failures[:5]}"


@pytest.fixture(scope="module")
def shared():
    """Criterion 1/2 corpora, reused by criterion 6."""
    return {}


def corpus(shared, key, solver, reference):
    if key not in shared:
        started = time.perf_counter()
        rows = []
        for seed in range(CORPUS_COUNT):
            inst = generate(tiny_params(seed), seed)
            rows.append((seed, inst, solver(inst), reference(inst)))
        shared[key] = (rows, time.perf_counter() - started)
    return shared[key]


def test_criterion_1_allocation_matches_oracle(shared):
    rows, elapsed = corpus(shared, "alloc", solve_allocation,
                           brute_force_allocation)
    failures = []
    for seed, _, mine, ref in rows:
        if mine.status is not ref.status:
            failures.append((seed, "status", mine.status, ref.status))
        elif ref.status is SolveStatus.OPTIMAL \
                and mine.objective != ref.objective:
            failures.append((seed, "objective", mine.objective, ref.objective))
    if elapsed >= TIME_BUDGET:
        failures.append(("runtime", elapsed))
    verdict(1, f"allocation solver equals exhaustive search on "
               f"{CORPUS_COUNT} seeds in {elapsed:.1f}s", failures)


def test_criterion_2_transfer_matches_oracle(shared):
    rows, elapsed = corpus(shared, "transfer", solve_transfer,
                           brute_force_transfer)
    failures = []
    for seed, _, mine, ref in rows:
        if mine.status is not ref.status:
            failures.append((seed, "status", mine.status, ref.status))
        elif mine.objective != ref.objective:
            failures.append((seed, "objective", mine.objective, ref.objective))
    if elapsed >= TIME_BUDGET:
        failures.append(("runtime", elapsed))
    verdict(2, f"transfer solver equals exhaustive search on "
               f"{CORPUS_COUNT} seeds in {elapsed:.1f}s", failures)


def test_criterion_3_network_relaxation_is_integral():
    failures = []
    for seed in range(1000, 1100):
        inst = generate(preset(1), seed)
        lp, _ = build_transfer_program(inst)
        relaxed = solve_lp(lp)
        if relaxed.status is not LpStatus.OPTIMAL:
            failures.append((seed, "relaxation", relaxed.status))
            continue
        drift = float(np.abs(relaxed.x - np.rint(relaxed.x)).max())
        if drift > 1e-6:
            failures.append((seed, "fractional", drift))
        outcome = solve_transfer(inst)
        if outcome.status is not SolveStatus.OPTIMAL or outcome.nodes > 1:
            failures.append((seed, "nodes", outcome.status, outcome.nodes))
    verdict(3, "transfer relaxation integral within 1e-6 and search closes"
               " at the root on 100 benchmark instances", failures)


def test_criterion_4_largest_benchmark_under_a_minute():
    inst = generate(preset(5), 7)
    failures = []
    timings = []
    for label, solver, evaluator_shortage in (
        ("allocation", solve_allocation,
         lambda plan: plan.shortage),
        ("transfer", solve_transfer,
         lambda plan: plan.shortage.sum(axis=0)),
    ):
        started = time.perf_counter()
        outcome = solver(inst)
        elapsed = time.perf_counter() - started
        timings.append(f"{label} {elapsed:.1f}s")
        if outcome.status is not SolveStatus.OPTIMAL:
            failures.append((label, outcome.status))
            continue
        if elapsed >= TIME_BUDGET:
            failures.append((label, "runtime", elapsed))
        plan = outcome.plan
        if label == "allocation":
            recomputed = inst.demand.sum(axis=0) - plan.dispatch.sum(axis=0)
        else:
            recomputed = (inst.demand - plan.serve.sum(axis=0)).sum(axis=0)
        if not np.array_equal(evaluator_shortage(plan), recomputed):
            failures.append((label, "shortage mismatch"))
    verdict(4, "24-slot 60-zone benchmark solves per model under 60s"
               f" ({', '.join(timings)}) with exact shortage accounting",
            failures)


def test_criterion_5_more_resources_never_cost_more():
    failures = []
    for seed in range(2000, 2050):
        params = tiny_params(seed)
        unit = (params.hold_cost_range[1] + params.dispatch_cost_range[1]
                + params.transfer_cost)
        roomy = unit * (2 * params.fleet_size) * params.num_slots + 1
        inst = generate(dataclasses.replace(params, big_m=roomy), seed)
        variants = (
            dataclasses.replace(inst, fleet_size=2 * inst.fleet_size),
            dataclasses.replace(inst, capacity=inst.capacity * 2),
        )
        for model, solver in ((1, solve_allocation), (2, solve_transfer)):
            base = solver(inst)
            if base.status is not SolveStatus.OPTIMAL:
                continue  # nothing to compare against
            for kind, variant in zip(("fleet", "capacity"), variants):
                grown = solver(variant)
                if grown.status is not SolveStatus.OPTIMAL:
                    failures.append((seed, model, kind, grown.status))
                elif grown.objective > base.objective:
                    failures.append((seed, model, kind,
                                     grown.objective, base.objective))
    verdict(5, "doubling fleet or capacities never raises either optimum"
               " across 50 seeds", failures)


def test_criterion_6_zero_shortage_found_whenever_one_exists(shared):
    alloc_rows, _ = corpus(shared, "alloc", solve_allocation,
                           brute_force_allocation)
    transfer_rows, _ = corpus(shared, "transfer", solve_transfer,
                              brute_force_transfer)
    failures = []
    witnesses = 0
    for label, rows in (("allocation", alloc_rows),
                        ("transfer", transfer_rows)):
        for seed, _, mine, ref in rows:
            if ref.status is not SolveStatus.OPTIMAL:
                continue
            if int(ref.plan.shortage.sum()) != 0:
                continue
            witnesses += 1
            if mine.plan is None or int(mine.plan.shortage.sum()) != 0:
                failures.append((label, seed))
    if witnesses == 0:
        failures.append("corpus produced no zero-shortage optimum")
    verdict(6, f"returned plans hit zero shortage on all {witnesses}"
               " instances where the oracle proves one exists", failures)


def run_cli(*args, cwd):
    return subprocess.run([sys.executable, "-m", "ambuplan", *args],
                          capture_output=True, text=True, cwd=cwd)


def test_criterion_7_byte_identical_artifacts(tmp_path):
    cwd = str(tmp_path)
    failures = []
    blobs = []
    for run in range(3):
        name = f"inst{run}.json"
        done = run_cli("generate", "--preset", "1", "--seed", "42",
                       "--out", name, cwd=cwd)
        if done.returncode != 0:
            failures.append(("generate", run, done.stderr))
        blobs.append((tmp_path / name).read_bytes())
    if len({bytes(b) for b in blobs}) != 1:
        failures.append("generated instances differ")
    plans = []
    for run in range(3):
        name = f"plan{run}.json"
        done = run_cli("solve", "--instance", "inst0.json", "--model", "2",
                       "--workers", "1", "--deterministic",
                       "--out", name, cwd=cwd)
        if done.returncode != 0:
            failures.append(("solve", run, done.stderr))
        plans.append((tmp_path / name).read_bytes())
    if len({bytes(b) for b in plans}) != 1:
        failures.append("solved plans differ")
    verdict(7, "instance and plan files byte-identical across 3 runs",
            failures)


def test_criterion_8_report_shape_matches_benchmark_table(tmp_path):
    cwd = str(tmp_path)
    failures = []
    for step in (("generate", "--preset", "1", "--seed", "42",
                  "--out", "inst.json"),
                 ("solve", "--instance", "inst.json", "--model", "2",
                  "--out", "plan.json")):
        done = run_cli(*step, cwd=cwd)
        if done.returncode != 0:
            failures.append((step[0], done.stderr))
    done = run_cli("report", "--instance", "inst.json", "--plan", "plan.json",
                   "--format", "csv", cwd=cwd)
    if done.returncode != 0:
        failures.append(("report", done.stderr))
    else:
        grid = list(csv.reader(io.StringIO(done.stdout)))
        header, rows = grid[0], grid[1:]
        if header[0] != "slot" or header[-1] != "shortage":
            failures.append(("header", header[:3], header[-1]))
        if header[1:-1] != [f"z{i}" for i in range(1, 21)]:
            failures.append(("zone columns", len(header) - 2))
        if len(rows) != 4 or any(len(row) != 22 for row in rows):
            failures.append(("grid", len(rows), [len(r) for r in rows]))
    text = run_cli("report", "--instance", "inst.json", "--plan", "plan.json",
                   cwd=cwd)
    if text.returncode != 0 or len(text.stdout.splitlines()) != 5:
        failures.append(("text rows", text.returncode,
                         len(text.stdout.splitlines())))
    verdict(8, "report renders 4 slot rows by 20 zone columns plus a"
               " shortage column", failures)
