"""Command-line behaviour: stdout contract, exit codes, artifact determinism."""
import json
import subprocess
import sys

import pytest

from fabflow.cli import main

SHRUNK_GA = (
    "--set",
    "metaheuristic_params.ga.population=20",
    "--set",
    "metaheuristic_params.ga.generations=10",
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def pairs_of(out: str) -> dict:
    line = out.strip().splitlines()[-1]
    out_pairs = {}
    for token in line.split(" "):
        key, _, value = token.partition("=")
        out_pairs[key] = value
    return out_pairs


# --- happy paths -------------------------------------------------------------

def test_maxflow_reports_value_and_cut(capsys):
    code, out, _ = run_cli(capsys, "maxflow", "--scenario", "fig10_optimized")
    assert code == 0
    got = pairs_of(out)
    assert got["value_kg"] == "26700"
    assert got["cut_capacity_kg"] == "26700"
    assert len(got["run_id"]) == 16


def test_mincost_reports_exact_cost(capsys):
    code, out, _ = run_cli(
        capsys, "mincost", "--scenario", "fig9_baseline", "--demand", "10000"
    )
    assert code == 0
    got = pairs_of(out)
    assert got["demand_kg"] == "10000"
    assert float(got["cost"]) == pytest.approx(2260.0)


def test_wip_reports_total(capsys):
    code, out, _ = run_cli(capsys, "wip", "--scenario", "queueing_reference")
    assert code == 0
    assert float(pairs_of(out)["total_wip"]) == pytest.approx(2.9958938246899126, rel=1e-9)


def test_worstcase_reports_direction(capsys):
    code, out, _ = run_cli(capsys, "worstcase", "--scenario", "planner_small")
    assert code == 0
    got = pairs_of(out)
    # nominal fleet (1, 1) barely clears instability at the corner
    assert float(got["v_star"]) == pytest.approx(204124.19794178221, rel=1e-6)
    assert len(got["p_star"].split(",")) == 3


def test_schedule_ga_prints_front_stats(capsys):
    code, out, _ = run_cli(
        capsys, "schedule", "--scenario", "table1_bench", "--method", "ga", *SHRUNK_GA
    )
    assert code == 0
    got = pairs_of(out)
    assert got["method"] == "ga"
    assert int(got["front_size"]) >= 1
    assert float(got["best_makespan_h"]) <= 135.0


def test_schedule_sa_writes_assignment(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "schedule",
        "--scenario",
        "table1_bench",
        "--method",
        "sa",
        "--set",
        "metaheuristic_params.sa.t_initial=1.0",
        "--set",
        "metaheuristic_params.sa.iters_per_temp=20",
        "--out",
        str(tmp_path),
    )
    assert code == 0
    assert pairs_of(out)["method"] == "sa"
    doc = json.loads((tmp_path / "schedule_summary.json").read_text(encoding="utf-8"))
    assert doc["data"]["method"] == "sa"
    assert len(doc["data"]["assignment"]) == 61


def test_bench_aggregates_per_method(capsys):
    code, out, _ = run_cli(
        capsys,
        "bench",
        "--scenario",
        "table1_bench",
        "--seeds",
        "1,2",
        *SHRUNK_GA,
        "--set",
        "metaheuristic_params.sa.t_initial=1.0",
        "--set",
        "metaheuristic_params.sa.iters_per_temp=20",
        "--set",
        "metaheuristic_params.aco.ants=5",
        "--set",
        "metaheuristic_params.aco.iterations=10",
    )
    assert code == 0
    got = pairs_of(out)
    assert float(got["before_hours"]) == pytest.approx(135.0)
    assert float(got["before_cost"]) == pytest.approx(8100.0)
    assert float(got["ga_after_hours"]) < 135.0
    assert float(got["sa_after_hours"]) < 135.0
    assert float(got["aco_after_hours"]) < 135.0


def test_fixtures_lists_catalog(capsys):
    code, out, _ = run_cli(capsys, "fixtures")
    assert code == 0
    assert pairs_of(out)["fixtures"] == (
        "fig10_optimized,fig9_baseline,planner_small,queueing_adversarial,"
        "queueing_reference,table1_bench"
    )


def test_report_composes_sections(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys, "report", "--scenario", "queueing_reference", "--out", str(tmp_path)
    )
    assert code == 0
    got = pairs_of(out)
    assert got["sections"] == "wip,monotonicity"
    assert got["artifacts"] == "4"
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "monotonicity_lines.csv",
        "monotonicity_summary.json",
        "wip_stations.csv",
        "wip_summary.json",
    ]
    audit = json.loads((tmp_path / "monotonicity_summary.json").read_text(encoding="utf-8"))
    assert audit["data"]["claims"] == {
        "gradient_positive": True,
        "p0_decreasing": True,
        "pi_increasing": True,
    }
    assert audit["data"]["violations"] == 0


def test_report_flow_only_scenario(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "report", "--scenario", "fig9_baseline", "--out", str(tmp_path))
    assert code == 0
    assert pairs_of(out)["sections"] == "flow"


# --- exit codes --------------------------------------------------------------

def test_unstable_fleet_exits_2(capsys):
    code, out, err = run_cli(
        capsys, "wip", "--scenario", "queueing_reference", "--set", "nominal_fleet.0=1"
    )
    assert code == 2
    assert out.strip() == "error=unstable_station"
    assert "unstable" in err


def test_infeasible_demand_exits_2(capsys):
    code, out, _ = run_cli(
        capsys, "mincost", "--scenario", "fig9_baseline", "--demand", "20001"
    )
    assert code == 2
    assert out.strip() == "error=infeasible_demand"


def test_invalid_override_value_exits_1(capsys):
    code, out, _ = run_cli(
        capsys, "wip", "--scenario", "queueing_reference", "--set", "nominal_p.0=2.0"
    )
    assert code == 1
    assert out.strip() == "error=validation_errors"


def test_usage_error_exits_1(capsys):
    code, out, _ = run_cli(capsys, "mincost", "--scenario", "fig9_baseline")
    assert code == 1
    assert out.strip() == "error=validation_errors"
    code, out, _ = run_cli(capsys, "not_a_command")
    assert code == 1


def test_unknown_scenario_ref_exits_1(capsys):
    code, out, _ = run_cli(capsys, "wip", "--scenario", "no_such_thing_anywhere")
    assert code == 1
    assert out.strip() == "error=io_error"


def test_override_path_errors_exit_1(capsys):
    code, out, _ = run_cli(
        capsys, "wip", "--scenario", "queueing_reference", "--set", "nominal_p.9=0.5"
    )
    assert code == 1
    code, out2, _ = run_cli(
        capsys, "wip", "--scenario", "queueing_reference", "--set", "broken"
    )
    assert code == 1
    assert out2.strip() == "error=validation_errors"


# --- determinism -------------------------------------------------------------

def test_repeated_runs_are_byte_identical(capsys, tmp_path):
    argv = ("maxflow", "--scenario", "fig10_optimized")
    code_a, out_a, _ = run_cli(capsys, *argv, "--out", str(tmp_path / "a"))
    code_b, out_b, _ = run_cli(capsys, *argv, "--out", str(tmp_path / "b"))
    assert code_a == code_b == 0
    assert out_a == out_b
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == ["maxflow_edges.csv", "maxflow_summary.json"]
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    # the emitted run id matches stdout and the CSV carries the digest comment
    run_id = pairs_of(out_a)["run_id"]
    doc = json.loads((tmp_path / "a" / "maxflow_summary.json").read_text(encoding="utf-8"))
    assert doc["run_id"] == run_id
    first_line = (tmp_path / "a" / "maxflow_edges.csv").read_text(encoding="utf-8").splitlines()[0]
    assert first_line == f"# inputs_digest={doc['inputs_digest']}"
    assert len(doc["inputs_digest"]) == 64


def test_overrides_change_the_run_id(capsys):
    _, out_plain, _ = run_cli(capsys, "wip", "--scenario", "queueing_reference")
    _, out_again, _ = run_cli(capsys, "wip", "--scenario", "queueing_reference")
    _, out_noted, _ = run_cli(
        capsys, "wip", "--scenario", "queueing_reference", "--set", "metadata.note=x"
    )
    assert pairs_of(out_plain)["run_id"] == pairs_of(out_again)["run_id"]
    assert pairs_of(out_noted)["run_id"] != pairs_of(out_plain)["run_id"]


def test_seed_is_part_of_the_run_id(capsys):
    _, out_a, _ = run_cli(capsys, "maxflow", "--scenario", "fig9_baseline", "--seed", "1")
    _, out_b, _ = run_cli(capsys, "maxflow", "--scenario", "fig9_baseline", "--seed", "2")
    assert pairs_of(out_a)["run_id"] != pairs_of(out_b)["run_id"]
    assert pairs_of(out_a)["value_kg"] == pairs_of(out_b)["value_kg"] == "20000"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fabflow", "fixtures"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("fixtures=")
