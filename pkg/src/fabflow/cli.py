"""Command line front end.

One subcommand per analysis; every run prints a single ``key=value`` line to
stdout and optionally writes artifacts under ``--out``.  Exit codes: 0 for
success, 1 when the scenario or arguments are malformed, 2 when the inputs
parse fine but the model has no feasible answer.  Runs are deterministic:
the same invocation produces byte-identical stdout and artifacts, keyed by
a run id derived from the scenario digest, the subcommand, and the seed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import netflow, queueing, robust_planner, scheduler
from .errors import InfeasibleError, ScenarioValidationError, ValidationErrors
from .scenario import (
    CsvArtifact,
    JsonArtifact,
    ReportBundle,
    canonical_json,
    emit_report,
    fixture_catalog,
    flow_csv_artifact,
    scenario_digest,
    scenario_from_dict,
    resolve_scenario_raw,
)

DEFAULT_SEED = 42
DEFAULT_BENCH_SEEDS = "1,2,3,4,5,6,7,8,9,10"


def _apply_override(raw: dict, spec: str):
    if "=" not in spec:
        raise ValidationErrors([f"override '{spec}' is not of the form key=value"])
    dotted, _, text = spec.partition("=")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text  # bare strings need no quoting
    node = raw
    parts = dotted.split(".")
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            try:
                idx = int(part)
            except ValueError:
                raise ValidationErrors(
                    [f"override '{spec}': '{part}' indexes a list and must be an integer"]
                )
            if not (0 <= idx < len(node)):
                raise ValidationErrors([f"override '{spec}': index {idx} out of range"])
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if last:
                node[part] = value
            else:
                if part not in node:
                    node[part] = {}
                node = node[part]
        else:
            raise ValidationErrors(
                [f"override '{spec}': '{part}' descends into a non-container value"]
            )


def _load(args):
    raw = resolve_scenario_raw(args.scenario)
    for spec in args.set or []:
        _apply_override(raw, spec)
    scenario = scenario_from_dict(raw)
    return scenario, scenario_digest(scenario)


def _run_id(digest: str, command: str, seed, extra: dict) -> str:
    payload = canonical_json(
        {"digest": digest, "command": command, "seed": seed, "extra": extra}
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _print_pairs(pairs):
    print(" ".join(f"{k}={v}" for k, v in pairs))


def _emit(args, bundle: ReportBundle):
    if args.out:
        emit_report(bundle, args.out)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


# --- subcommand bodies -------------------------------------------------------

def _cmd_maxflow(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    net = netflow.build_network(scenario)
    fa = netflow.max_flow(net)
    cut_nodes, cut_cap = netflow.min_cut(net)
    run_id = _run_id(digest, "maxflow", args.seed, {})
    bundle = ReportBundle(
        run_id=run_id,
        inputs_digest=digest,
        artifacts=(
            flow_csv_artifact("maxflow_edges.csv", net, fa),
            JsonArtifact(
                "maxflow_summary.json",
                {
                    "value_kg": fa.value,
                    "cut_capacity_kg": cut_cap,
                    "cut_source_side": sorted(cut_nodes),
                },
            ),
        ),
    )
    _emit(args, bundle)
    return [
        ("value_kg", str(fa.value)),
        ("cut_capacity_kg", str(cut_cap)),
        ("run_id", run_id),
    ]


def _cmd_mincost(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    net = netflow.build_network(scenario)
    fa = netflow.min_cost_flow(net, args.demand)
    cost = netflow.flow_cost(net, fa)
    run_id = _run_id(digest, "mincost", args.seed, {"demand": args.demand})
    bundle = ReportBundle(
        run_id=run_id,
        inputs_digest=digest,
        artifacts=(
            flow_csv_artifact("mincost_edges.csv", net, fa),
            JsonArtifact(
                "mincost_summary.json",
                {"demand_kg": args.demand, "cost": float(cost)},
            ),
        ),
    )
    _emit(args, bundle)
    return [
        ("demand_kg", str(args.demand)),
        ("cost", _fmt(float(cost))),
        ("run_id", run_id),
    ]


def _fleet_of(scenario) -> queueing.FleetConfig:
    if scenario.nominal_fleet is not None:
        return scenario.nominal_fleet
    return queueing.FleetConfig(counts=())


def _wip_artifacts(report) -> tuple:
    header, rows = report.to_csv_rows()
    return (
        CsvArtifact("wip_stations.csv", header, tuple(rows)),
        JsonArtifact(
            "wip_summary.json",
            {
                "total_wip": report.total_wip,
                "stations": {
                    sid: {"wip": w, "utilization": u}
                    for sid, w, u in zip(
                        report.station_ids, report.per_station_wip, report.utilizations
                    )
                },
            },
        ),
    )


def _cmd_wip(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    model = queueing.build_routing_model(scenario)
    fleet = _fleet_of(scenario)
    report = queueing.wip(model, scenario.nominal_p, fleet)
    run_id = _run_id(digest, "wip", args.seed, {})
    bundle = ReportBundle(run_id, digest, _wip_artifacts(report))
    _emit(args, bundle)
    return [("total_wip", _fmt(report.total_wip)), ("run_id", run_id)]


def _limits_of(scenario) -> robust_planner.PlannerLimits:
    if scenario.limits is not None:
        return scenario.limits
    # permissive defaults for ad hoc adversarial runs on fixtures without a
    # limits section; the fleet cap still has to cover the nominal fleet
    total = scenario.nominal_fleet.total if scenario.nominal_fleet else 0
    return robust_planner.PlannerLimits(
        c_max=max(total, 1),
        w_star=float("inf"),
        u=float("inf"),
        delta_wip_max=float("inf"),
    )


def _cmd_worstcase(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    model = queueing.build_routing_model(scenario)
    fleet = _fleet_of(scenario)
    wc = robust_planner.worst_case_direction(
        model, fleet, _limits_of(scenario), scenario.nominal_p
    )
    run_id = _run_id(digest, "worstcase", args.seed, {})
    bundle = ReportBundle(
        run_id, digest, (JsonArtifact("worstcase_summary.json", wc.to_dict()),)
    )
    _emit(args, bundle)
    return [
        ("v_star", _fmt(wc.v_star)),
        ("p_star", ",".join(repr(x) for x in wc.p_star)),
        ("run_id", run_id),
    ]


def _cmd_plan(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    model = queueing.build_routing_model(scenario)
    if scenario.fleet_candidates is None or scenario.limits is None:
        raise ValidationErrors(
            ["planning needs fleet_candidates and limits sections in the scenario"]
        )
    result = robust_planner.plan_fleet(
        model, scenario.fleet_candidates, scenario.limits, scenario.nominal_p
    )
    run_id = _run_id(digest, "plan", args.seed, {})
    header, rows = result.to_csv_rows()
    bundle = ReportBundle(
        run_id,
        digest,
        (
            CsvArtifact("plan_candidates.csv", header, tuple(rows)),
            JsonArtifact("plan_summary.json", result.to_dict()),
        ),
    )
    _emit(args, bundle)
    return [
        ("c_star", ",".join(str(c) for c in result.c_star.counts)),
        ("v_star", _fmt(result.worst_case.v_star)),
        ("nominal_wip", _fmt(result.nominal_wip)),
        ("search_mode", result.search_mode),
        ("run_id", run_id),
    ]


def _cmd_schedule(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    inst = scheduler.SchedulingInstance.from_scenario(scenario)
    run_id = _run_id(digest, "schedule", args.seed, {"method": args.method})
    if args.method == "ga":
        front = scheduler.ga_optimize(inst, scenario.metaheuristic.ga, args.seed)
        header, rows = front.to_csv_rows()
        _, best_mk = front.best_by("makespan_h")
        _, best_cost = front.best_by("total_cost")
        bundle = ReportBundle(
            run_id,
            digest,
            (
                CsvArtifact("schedule_front.csv", header, tuple(rows)),
                JsonArtifact(
                    "schedule_summary.json",
                    {
                        "method": "ga",
                        "front_size": len(front.members),
                        "best_makespan_h": best_mk.makespan_h,
                        "best_cost": best_cost.total_cost,
                    },
                ),
            ),
        )
        _emit(args, bundle)
        return [
            ("method", "ga"),
            ("front_size", str(len(front.members))),
            ("best_makespan_h", _fmt(best_mk.makespan_h)),
            ("best_cost", _fmt(best_cost.total_cost)),
            ("run_id", run_id),
        ]
    run = scheduler.sa_optimize if args.method == "sa" else scheduler.aco_optimize
    params = scenario.metaheuristic.sa if args.method == "sa" else scenario.metaheuristic.aco
    result = run(inst, params, args.seed)
    bundle = ReportBundle(
        run_id,
        digest,
        (
            JsonArtifact(
                "schedule_summary.json",
                {
                    "method": args.method,
                    "scalar_score": result.scalar_score,
                    "makespan_h": result.objectives.makespan_h,
                    "total_cost": result.objectives.total_cost,
                    "assignment": dict(sorted(result.assignment.mapping.items())),
                },
            ),
        ),
    )
    _emit(args, bundle)
    return [
        ("method", args.method),
        ("makespan_h", _fmt(result.objectives.makespan_h)),
        ("total_cost", _fmt(result.objectives.total_cost)),
        ("scalar_score", _fmt(result.scalar_score)),
        ("run_id", run_id),
    ]


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValidationErrors([f"--seeds must be a comma-separated integer list, got '{text}'"])
    return seeds


def _cmd_bench(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    seeds = _parse_seeds(args.seeds)
    table = scheduler.benchmark(
        scenario,
        seeds,
        scenario.metaheuristic.ga,
        scenario.metaheuristic.sa,
        scenario.metaheuristic.aco,
    )
    run_id = _run_id(digest, "bench", args.seed, {"seeds": seeds})
    header, rows = table.to_csv_rows()
    aggregates = {m: table.aggregate(m) for m in ("ga", "sa", "aco")}
    bundle = ReportBundle(
        run_id,
        digest,
        (
            CsvArtifact("bench_table.csv", header, tuple(rows)),
            JsonArtifact(
                "bench_summary.json",
                {
                    m: {
                        "before_hours": a[0],
                        "after_hours": a[1],
                        "before_cost": a[2],
                        "after_cost": a[3],
                    }
                    for m, a in aggregates.items()
                },
            ),
        ),
    )
    _emit(args, bundle)
    before_h, ga_h, before_c, ga_c = aggregates["ga"]
    return [
        ("before_hours", _fmt(before_h)),
        ("ga_after_hours", _fmt(ga_h)),
        ("sa_after_hours", _fmt(aggregates["sa"][1])),
        ("aco_after_hours", _fmt(aggregates["aco"][1])),
        ("before_cost", _fmt(before_c)),
        ("ga_after_cost", _fmt(ga_c)),
        ("run_id", run_id),
    ]


def _cmd_fixtures(args) -> list[tuple[str, str]]:
    return [("fixtures", ",".join(fixture_catalog()))]


def _cmd_report(args) -> list[tuple[str, str]]:
    scenario, digest = _load(args)
    run_id = _run_id(digest, "report", args.seed, {})
    artifacts: list = []
    sections: list[str] = []
    if scenario.network is not None:
        net = netflow.build_network(scenario)
        fa = netflow.max_flow(net)
        cut_nodes, cut_cap = netflow.min_cut(net)
        artifacts.append(flow_csv_artifact("maxflow_edges.csv", net, fa))
        artifacts.append(
            JsonArtifact(
                "maxflow_summary.json",
                {
                    "value_kg": fa.value,
                    "cut_capacity_kg": cut_cap,
                    "cut_source_side": sorted(cut_nodes),
                },
            )
        )
        sections.append("flow")
    if scenario.stations is not None:
        model = queueing.build_routing_model(scenario)
        fleet = _fleet_of(scenario)
        report = queueing.wip(model, scenario.nominal_p, fleet)
        artifacts.extend(_wip_artifacts(report))
        sections.append("wip")
        grid_spec = scenario.metadata.get("monotonicity_grid")
        if isinstance(grid_spec, dict) and "free_axes" in grid_spec:
            grid = queueing.grid_from_axes(
                grid_spec["free_axes"], len(scenario.nominal_p)
            )
            audit = queueing.check_monotonicity(model, grid, fleet)
            header, rows = audit.to_csv_rows()
            artifacts.append(CsvArtifact("monotonicity_lines.csv", header, tuple(rows)))
            artifacts.append(
                JsonArtifact(
                    "monotonicity_summary.json",
                    {
                        "grid_points": audit.grid_points,
                        "claims": dict(audit.claim_passed),
                        "violations": len(audit.violations),
                    },
                )
            )
            sections.append("monotonicity")
        if scenario.fleet_candidates is not None and scenario.limits is not None:
            result = robust_planner.plan_fleet(
                model, scenario.fleet_candidates, scenario.limits, scenario.nominal_p
            )
            header, rows = result.to_csv_rows()
            artifacts.append(CsvArtifact("plan_candidates.csv", header, tuple(rows)))
            artifacts.append(JsonArtifact("plan_summary.json", result.to_dict()))
            sections.append("plan")
    if not artifacts:
        raise ValidationErrors(
            ["scenario has no reportable sections (network or stations)"]
        )
    deltas = scenario.metadata.get("reference_deltas")
    if isinstance(deltas, dict) and deltas:
        # quoted source figures ride along verbatim; nothing downstream
        # treats them as targets
        artifacts.append(JsonArtifact("reference_deltas.json", dict(deltas)))
        sections.append("reference")
    bundle = ReportBundle(run_id, digest, tuple(artifacts))
    _emit(args, bundle)
    return [
        ("sections", ",".join(sections)),
        ("artifacts", str(len(artifacts))),
        ("run_id", run_id),
    ]


# --- wiring ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are malformed input, so they exit 1 like any other
    validation problem instead of argparse's default 2."""

    def error(self, message):
        raise ValidationErrors([f"usage: {message}"])


def _add_common(sub, scenario_required=True):
    if scenario_required:
        sub.add_argument("--scenario", required=True, help="scenario file path or fixture name")
        sub.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="dotted override applied to the scenario before validation",
        )
        sub.add_argument("--out", help="directory for report artifacts")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fabflow",
        description="Fab logistics analysis: network flow, queueing, fleet planning, dispatch.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("maxflow", help="maximum shipment throughput and the binding cut")
    _add_common(sub)
    sub.set_defaults(body=_cmd_maxflow)

    sub = commands.add_parser("mincost", help="cheapest routing of a fixed demand")
    _add_common(sub)
    sub.add_argument("--demand", type=int, required=True, help="kg to ship")
    sub.set_defaults(body=_cmd_mincost)

    sub = commands.add_parser("wip", help="steady-state WIP at the nominal operating point")
    _add_common(sub)
    sub.set_defaults(body=_cmd_wip)

    sub = commands.add_parser("worstcase", help="adversarial transfer direction search")
    _add_common(sub)
    sub.set_defaults(body=_cmd_worstcase)

    sub = commands.add_parser("plan", help="fleet sizing under the scenario limits")
    _add_common(sub)
    sub.set_defaults(body=_cmd_plan)

    sub = commands.add_parser("schedule", help="optimize the dispatch of the scenario's tasks")
    _add_common(sub)
    sub.add_argument("--method", choices=("ga", "sa", "aco"), default="ga")
    sub.set_defaults(body=_cmd_schedule)

    sub = commands.add_parser("bench", help="before/after dispatch benchmark per task type")
    _add_common(sub)
    sub.add_argument("--seeds", default=DEFAULT_BENCH_SEEDS, help="comma-separated seed list")
    sub.set_defaults(body=_cmd_bench)

    sub = commands.add_parser("fixtures", help="list bundled scenarios")
    _add_common(sub, scenario_required=False)
    sub.set_defaults(body=_cmd_fixtures)

    sub = commands.add_parser("report", help="emit every report the scenario supports")
    _add_common(sub)
    sub.set_defaults(body=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        pairs = args.body(args)
    except ScenarioValidationError as exc:
        print(f"error={exc.code}")
        print(str(exc), file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"error={exc.code}")
        print(str(exc), file=sys.stderr)
        return 2
    _print_pairs(pairs)
    return 0


if __name__ == "__main__":
    sys.exit(main())
