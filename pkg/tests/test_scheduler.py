"""Scheduler tests: exact evaluation, GA front vs enumeration, SA/ACO quality, benchmark."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fabflow.errors import (
    EmptySeeds,
    MissingDistance,
    OverloadedVehicleRound,
    ValidationErrors,
)
from fabflow.scheduler import (
    AcoParams,
    Assignment,
    GaParams,
    SaParams,
    SchedulingInstance,
    TaskType,
    TransportTask,
    VehicleSpec,
    aco_optimize,
    baseline_assignment,
    benchmark,
    evaluate_schedule,
    ga_optimize,
    sa_optimize,
    task_time_h,
)
from fabflow.scenario import load_fixture
from support import brute_force_best_scalar, brute_force_front

V_SLOW = VehicleSpec("V1", speed=30.0, load_time_h=0.25, unload_time_h=0.25, cost_rate=60.0)
V_FAST = VehicleSpec("V2", speed=60.0, load_time_h=0.2, unload_time_h=0.2, cost_rate=70.0)

DIST = {("X", "Y"): 75.0, ("Y", "Z"): 45.0, ("X", "Z"): 120.0}


def task(tid, origin="X", destination="Y", tt=TaskType.PROCESSING):
    return TransportTask(tid, tt, origin, destination, lot_mass_kg=600.0, baseline_duration_h=3.0)


def small_instance():
    tasks = (task("t1"), task("t2", "Y", "Z"), task("t3", tt=TaskType.TESTING))
    return SchedulingInstance(tasks, (V_SLOW, V_FAST), DIST)


# --- task times and evaluation ----------------------------------------------

def test_task_time_is_travel_plus_handling():
    # 75 km at 30 km/h plus 0.25 h loading and 0.25 h unloading
    assert task_time_h(task("t"), V_SLOW, DIST) == pytest.approx(3.0)
    assert task_time_h(task("t"), V_FAST, DIST) == pytest.approx(75.0 / 60.0 + 0.4)


def test_missing_distance():
    with pytest.raises(MissingDistance) as exc:
        task_time_h(task("t", "X", "W"), V_SLOW, {})
    assert exc.value.origin == "X" and exc.value.destination == "W"


def test_evaluate_schedule_hand_example():
    inst = small_instance()
    assignment = Assignment(mapping={"t1": "V1", "t2": "V2", "t3": "V2"})
    obj = evaluate_schedule(inst, assignment)
    # V1 works 3.0 h; V2 works 1.15 + 1.65 h
    assert obj.makespan_h == pytest.approx(3.0)
    assert obj.total_cost == pytest.approx(3.0 * 60.0 + 2.8 * 70.0)
    assert obj.productivity == pytest.approx(1.0)


def test_rounds_do_not_change_objectives():
    inst = small_instance()
    mapping = {"t1": "V1", "t2": "V2", "t3": "V2"}
    plain = evaluate_schedule(inst, Assignment(mapping=mapping))
    staged = evaluate_schedule(
        inst, Assignment(mapping=mapping, rounds={"t1": 1, "t2": 1, "t3": 2})
    )
    assert staged == plain


def test_rounds_with_two_tasks_on_one_vehicle_in_same_round():
    inst = small_instance()
    mapping = {"t1": "V1", "t2": "V2", "t3": "V2"}
    with pytest.raises(OverloadedVehicleRound):
        evaluate_schedule(inst, Assignment(mapping=mapping, rounds={"t1": 1, "t2": 1, "t3": 1}))
    with pytest.raises(OverloadedVehicleRound):
        evaluate_schedule(inst, Assignment(mapping=mapping, rounds={"t1": 1, "t2": 1}))


def test_unassigned_task_rejected():
    inst = small_instance()
    with pytest.raises(ValidationErrors):
        evaluate_schedule(inst, Assignment(mapping={"t1": "V1"}))
    with pytest.raises(ValidationErrors):
        evaluate_schedule(inst, Assignment(mapping={"t1": "V1", "t2": "V2", "t3": "ghost"}))


@given(st.permutations(list(range(4))))
def test_task_declaration_order_is_irrelevant(order):
    tasks = (task("t1"), task("t2", "Y", "Z"), task("t3", "X", "Z"), task("t4"))
    mapping = {"t1": "V1", "t2": "V2", "t3": "V1", "t4": "V2"}
    base = evaluate_schedule(SchedulingInstance(tasks, (V_SLOW, V_FAST), DIST), Assignment(mapping))
    shuffled = SchedulingInstance(tuple(tasks[i] for i in order), (V_SLOW, V_FAST), DIST)
    got = evaluate_schedule(shuffled, Assignment(mapping))
    assert got.total_cost == pytest.approx(base.total_cost, abs=1e-9)
    assert got.makespan_h == pytest.approx(base.makespan_h, abs=1e-9)


def test_idle_vehicle_costs_nothing():
    inst = small_instance()
    spare = VehicleSpec("V9", speed=10.0, load_time_h=1.0, unload_time_h=1.0, cost_rate=999.0)
    with_spare = SchedulingInstance(inst.tasks, inst.vehicles + (spare,), inst.distances)
    mapping = {"t1": "V1", "t2": "V2", "t3": "V2"}
    assert evaluate_schedule(with_spare, Assignment(mapping)) == evaluate_schedule(
        inst, Assignment(mapping)
    )


def test_spec_validation():
    with pytest.raises(ValidationErrors):
        TransportTask("t", TaskType.PROCESSING, "X", "X", 600.0, 3.0)
    with pytest.raises(ValidationErrors):
        TransportTask("t", TaskType.PROCESSING, "X", "Y", -1.0, 3.0)
    with pytest.raises(ValidationErrors):
        VehicleSpec("V", speed=0.0, load_time_h=0.1, unload_time_h=0.1, cost_rate=10.0)
    with pytest.raises(ValidationErrors):
        VehicleSpec("V", speed=10.0, load_time_h=-0.1, unload_time_h=0.1, cost_rate=10.0)


# --- GA ----------------------------------------------------------------------

def test_ga_front_equals_enumerated_front():
    tasks = (task("t1"), task("t2", "Y", "Z"), task("t3", "X", "Z"), task("t4"))
    inst = SchedulingInstance(tasks, (V_SLOW, V_FAST), DIST)
    front = ga_optimize(inst, GaParams(population=24, generations=30), seed=5)
    got = {(round(o.total_cost, 9), round(o.makespan_h, 9)) for o in front.objectives}
    assert got == brute_force_front(inst)


def test_ga_is_reproducible_per_seed():
    inst = small_instance()
    params = GaParams(population=16, generations=12)
    a = ga_optimize(inst, params, seed=7)
    b = ga_optimize(inst, params, seed=7)
    assert a.to_csv_rows() == b.to_csv_rows()


def test_pareto_front_members_are_mutually_nondominated():
    tasks = tuple(task(f"t{i}", "X", "Y" if i % 2 else "Z") for i in range(6))
    inst = SchedulingInstance(tasks, (V_SLOW, V_FAST), DIST)
    front = ga_optimize(inst, GaParams(population=30, generations=40), seed=3)
    objs = front.objectives
    for a, b in itertools.permutations(objs, 2):
        assert not (
            a.total_cost <= b.total_cost
            and a.makespan_h <= b.makespan_h
            and (a.total_cost < b.total_cost or a.makespan_h < b.makespan_h)
        )
    cheap = front.best_by("total_cost")[1]
    assert cheap.total_cost == min(o.total_cost for o in objs)
    quick = front.best_by("productivity")[1]
    assert quick.productivity == max(o.productivity for o in objs)
    header, rows = front.to_csv_rows()
    assert header == ("assignment", "total_cost", "makespan_h", "productivity")
    assert len(rows) == len(objs)


def test_ga_rejects_empty_instance():
    inst = SchedulingInstance((), (V_SLOW,), DIST)
    with pytest.raises(ValidationErrors):
        ga_optimize(inst)
    with pytest.raises(ValidationErrors):
        evaluate_schedule(inst, Assignment(mapping={}))


# --- SA / ACO ----------------------------------------------------------------

def tradeoff_instance():
    """Six tasks, three vehicles with opposed speed and cost profiles."""
    v1 = VehicleSpec("V1", speed=20.0, load_time_h=0.3, unload_time_h=0.3, cost_rate=40.0)
    v2 = VehicleSpec("V2", speed=40.0, load_time_h=0.25, unload_time_h=0.25, cost_rate=75.0)
    v3 = VehicleSpec("V3", speed=60.0, load_time_h=0.2, unload_time_h=0.2, cost_rate=110.0)
    dist = {("X", "Y"): 60.0, ("Y", "Z"): 40.0, ("X", "Z"): 90.0, ("Z", "W"): 30.0}
    tasks = (
        task("t1", "X", "Y"),
        task("t2", "Y", "Z"),
        task("t3", "X", "Z"),
        task("t4", "Z", "W"),
        task("t5", "X", "Y"),
        task("t6", "Y", "Z"),
    )
    return SchedulingInstance(tasks, (v1, v2, v3), dist)


def test_sa_and_aco_land_near_scalar_optimum():
    inst = tradeoff_instance()
    sa = sa_optimize(inst, seed=42)
    aco = aco_optimize(inst, seed=42)
    # both methods normalize with the same seeded sample
    assert sa.bounds == aco.bounds
    optimum = brute_force_best_scalar(inst, sa.bounds)
    # SA reaches the optimum on this instance; ACO's 1/time heuristic biases
    # it toward fast vehicles, so it settles a band above
    assert sa.scalar_score <= optimum + 0.02
    assert aco.scalar_score <= optimum + 0.25
    assert aco.scalar_score < 0.43  # random-assignment median sits near 0.44
    assert sa.scalar_score == pytest.approx(
        sa.bounds.score(sa.objectives.total_cost, sa.objectives.makespan_h)
    )


def test_sa_is_reproducible_per_seed():
    inst = tradeoff_instance()
    fast = SaParams(t_initial=5.0, cooling=0.9, iters_per_temp=50)
    assert sa_optimize(inst, fast, seed=9).assignment.mapping == sa_optimize(
        inst, fast, seed=9
    ).assignment.mapping


def test_aco_is_reproducible_per_seed():
    inst = tradeoff_instance()
    fast = AcoParams(ants=10, iterations=20)
    assert aco_optimize(inst, fast, seed=9).assignment.mapping == aco_optimize(
        inst, fast, seed=9
    ).assignment.mapping


# --- benchmark ---------------------------------------------------------------

def test_benchmark_before_columns_are_exact():
    sc = load_fixture("table1_bench")
    table = benchmark(sc, seeds=(1,))
    before = {"A": 54.0, "B": 30.0, "C": 20.0, "D": 10.0, "E": 21.0}
    for tt, hours in before.items():
        for method in ("ga", "sa", "aco"):
            row = table.row(method, tt)
            assert row.before_hours == pytest.approx(hours)
            assert row.before_cost == pytest.approx(hours * 60.0)
            assert row.after_hours <= row.before_hours
            assert row.seed_count == 1
    agg_before, agg_after, cost_before, cost_after = table.aggregate("ga")
    assert agg_before == pytest.approx(135.0)
    assert cost_before == pytest.approx(8100.0)
    assert agg_after < agg_before and cost_after < cost_before
    header, rows = table.to_csv_rows()
    assert header[0] == "method" and len(rows) == 15


def test_benchmark_requires_seeds():
    sc = load_fixture("table1_bench")
    with pytest.raises(EmptySeeds):
        benchmark(sc, seeds=())


def test_instance_from_scenario():
    sc = load_fixture("table1_bench")
    inst = SchedulingInstance.from_scenario(sc)
    assert len(inst.tasks) == 61 and len(inst.vehicles) == 4
    sub = inst.restricted_to(TaskType.PROCESSING)
    assert len(sub.tasks) == 18
    assert all(t.task_type == TaskType.PROCESSING for t in sub.tasks)


def test_baseline_assignment_rides_first_vehicle():
    inst = small_instance()
    mapping = baseline_assignment(inst).mapping
    assert set(mapping.values()) == {"V1"}
    assert set(mapping) == {"t1", "t2", "t3"}
