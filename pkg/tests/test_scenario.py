"""Scenario schema: round trips, digests, error collection, report emission."""
import json

import pytest

from fabflow.errors import IoError, ParseError, SchemaVersionUnsupported, ValidationErrors
from fabflow.netflow import build_network, max_flow
from fabflow.scenario import (
    CsvArtifact,
    JsonArtifact,
    ReportBundle,
    canonical_json,
    emit_report,
    fixture_catalog,
    flow_csv_artifact,
    load_fixture,
    load_scenario,
    load_scenario_text,
    resolve_scenario,
    resolve_scenario_raw,
    scenario_digest,
    scenario_from_dict,
    scenario_to_dict,
)

ALL_FIXTURES = (
    "fig10_optimized",
    "fig9_baseline",
    "planner_small",
    "queueing_adversarial",
    "queueing_reference",
    "table1_bench",
)


def minimal_doc(**extra):
    doc = {"schema_version": 1, "name": "t"}
    doc.update(extra)
    return doc


# --- catalog and round trips -------------------------------------------------

def test_fixture_catalog_is_sorted_and_complete():
    assert tuple(fixture_catalog()) == ALL_FIXTURES


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_fixture_round_trip_is_identity(name):
    sc = load_fixture(name)
    again = scenario_from_dict(scenario_to_dict(sc))
    assert again == sc
    assert scenario_digest(again) == scenario_digest(sc)


def test_product_routing_expression_survives_round_trip():
    sc = load_fixture("queueing_adversarial")
    exprs = {expr for _, _, expr in sc.routing}
    assert "p:1*1-p:2" in exprs
    again = scenario_from_dict(scenario_to_dict(sc))
    assert again.routing == sc.routing


# --- digests -----------------------------------------------------------------

def test_digest_ignores_formatting_and_key_order():
    raw = resolve_scenario_raw("fig9_baseline")
    reference = scenario_digest(scenario_from_dict(raw))
    spaced = load_scenario_text(json.dumps(raw, indent=4))
    assert scenario_digest(spaced) == reference
    reordered = scenario_from_dict(dict(reversed(list(raw.items()))))
    assert scenario_digest(reordered) == reference


def test_digest_changes_on_semantic_edit():
    raw = resolve_scenario_raw("fig9_baseline")
    reference = scenario_digest(scenario_from_dict(raw))
    raw["network"]["edges"][0]["capacity_kg"] += 1
    assert scenario_digest(scenario_from_dict(raw)) != reference


def test_canonical_json_is_compact_and_sorted():
    text = canonical_json({"b": 1, "a": [1.5, "x"]})
    assert text == '{"a":[1.5,"x"],"b":1}'


# --- schema version gate -----------------------------------------------------

def test_schema_version_rejections():
    with pytest.raises(SchemaVersionUnsupported):
        scenario_from_dict({"name": "t"})
    with pytest.raises(SchemaVersionUnsupported, match="99"):
        scenario_from_dict({"schema_version": 99, "name": "t"})
    with pytest.raises(SchemaVersionUnsupported):
        scenario_from_dict({"schema_version": True, "name": "t"})
    # the version gate fires before any other validation
    with pytest.raises(SchemaVersionUnsupported):
        scenario_from_dict({"schema_version": 99, "bogus_section": 1})


def test_parse_errors():
    with pytest.raises(ParseError):
        load_scenario_text("{not json")
    with pytest.raises(ParseError):
        scenario_from_dict([1, 2, 3])


# --- error collection --------------------------------------------------------

def test_every_problem_is_collected_in_one_pass():
    doc = {
        "schema_version": 1,
        "name": "",
        "surprise": {},
        "stations": [
            {"id": "A", "kind": "process", "mu_base": 1.0},
            {"id": "A", "kind": "process", "mu_base": 1.0},
            {"id": "B", "kind": "teleport", "mu_base": 1.0},
            {"id": "C", "kind": "process", "mu_base": 1.0},
        ],
        "nominal_p": [0.5, 0.6],
        "routing": [
            {"from": "A", "to": "A", "value": "const:0.1"},
            {"from": "A", "to": "A", "value": "const:0.1"},
            {"from": "Z", "to": "A", "value": "const:0.1"},
            {"from": "A", "to": "C", "value": "p:7"},
        ],
        "limits": {"c_max": 5, "w_star": 1.0, "u": 2.0, "delta_wip_max": 1.0, "bogus": 3},
        "distances": [
            {"from": "X", "to": "X", "distance": 1.0},
            {"from": "X", "to": "Y", "distance": -2.0},
        ],
        "tasks": [
            {
                "task_id": "t1",
                "task_type": "Q",
                "origin": "X",
                "destination": "Y",
                "lot_mass_kg": 1.0,
            }
        ],
    }
    with pytest.raises(ValidationErrors) as exc:
        scenario_from_dict(doc)
    messages = "\n".join(exc.value.errors)
    assert len(exc.value.errors) >= 9
    for fragment in (
        "unknown top-level sections",
        "non-empty string 'name'",
        "declared twice: A",
        "unknown station kind 'teleport'",
        "sum to 1",
        "declared twice",
        "unknown station 'Z'",
        "p index 7",
        "unknown fields ['bogus']",
        "distance from a node to itself",
        "must be non-negative",
        "unknown task type 'Q'",
    ):
        assert fragment in messages, fragment


def test_transport_station_needs_fleet_context():
    doc = minimal_doc(
        stations=[{"id": "T", "kind": "transport", "mu_base": 1.0, "vehicle_type": 0}],
        nominal_p=[0.5, 0.5],
    )
    with pytest.raises(ValidationErrors, match="no nominal_fleet or fleet_candidates"):
        scenario_from_dict(doc)
    doc_bad_index = minimal_doc(
        stations=[{"id": "T", "kind": "transport", "mu_base": 1.0, "vehicle_type": 3}],
        nominal_p=[0.5, 0.5],
        nominal_fleet=[2],
    )
    with pytest.raises(ValidationErrors, match="outside the 1 declared fleet types"):
        scenario_from_dict(doc_bad_index)


def test_stations_require_nominal_p():
    doc = minimal_doc(stations=[{"id": "A", "kind": "process", "mu_base": 1.0}])
    with pytest.raises(ValidationErrors, match="nominal_p missing"):
        scenario_from_dict(doc)


def test_metaheuristic_params_validation():
    ok = scenario_from_dict(minimal_doc(metaheuristic_params={"ga": {"population": 40}}))
    assert ok.metaheuristic.ga.population == 40
    assert ok.metaheuristic.sa.t_initial == 10.0
    with pytest.raises(ValidationErrors, match="unknown fields"):
        scenario_from_dict(minimal_doc(metaheuristic_params={"ga": {"popsize": 40}}))
    with pytest.raises(ValidationErrors, match="unknown groups"):
        scenario_from_dict(minimal_doc(metaheuristic_params={"pso": {}}))


def test_minimal_document_omits_empty_sections():
    sc = scenario_from_dict(minimal_doc())
    out = scenario_to_dict(sc)
    assert "description" not in out and "metadata" not in out
    assert "network" not in out and "stations" not in out
    assert set(out["metaheuristic_params"]) == {"ga", "sa", "aco"}
    assert "mutation_rate" not in out["metaheuristic_params"]["ga"]


# --- loading and resolving ---------------------------------------------------

def test_load_scenario_missing_file():
    with pytest.raises(IoError):
        load_scenario("/nonexistent/scenario.json")


def test_load_fixture_unknown_name():
    with pytest.raises(IoError):
        load_fixture("no_such_fixture")


def test_resolve_prefers_path_then_fixture(tmp_path):
    raw = resolve_scenario_raw("fig9_baseline")
    raw["name"] = "custom_copy"
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    assert resolve_scenario(str(path)).name == "custom_copy"
    assert resolve_scenario("fig9_baseline").name == "fig9_baseline"
    with pytest.raises(IoError, match="neither a readable file nor a bundled fixture"):
        resolve_scenario("definitely_not_here")


# --- report emission ---------------------------------------------------------

def sample_bundle():
    return ReportBundle(
        run_id="cafe012345678901",
        inputs_digest="d" * 64,
        artifacts=(
            CsvArtifact(name="table.csv", header=("a", "b"), rows=(("1", "2"), ("3", "4"))),
            JsonArtifact(name="summary.json", payload={"z": 1, "a": [1, 2]}),
        ),
    )


def test_emit_report_writes_documented_format(tmp_path):
    written = emit_report(sample_bundle(), tmp_path / "out")
    assert [p.name for p in written] == ["table.csv", "summary.json"]
    csv_bytes = (tmp_path / "out" / "table.csv").read_bytes()
    assert csv_bytes == b"# inputs_digest=" + b"d" * 64 + b"\na,b\n1,2\n3,4\n"
    doc = json.loads((tmp_path / "out" / "summary.json").read_text(encoding="utf-8"))
    assert doc == {
        "run_id": "cafe012345678901",
        "inputs_digest": "d" * 64,
        "data": {"z": 1, "a": [1, 2]},
    }
    raw = (tmp_path / "out" / "summary.json").read_bytes()
    assert raw.endswith(b"\n") and b"\r" not in raw


def test_emit_report_is_byte_deterministic(tmp_path):
    first = emit_report(sample_bundle(), tmp_path / "one")
    second = emit_report(sample_bundle(), tmp_path / "two")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_emit_report_rejects_unknown_artifact(tmp_path):
    bundle = ReportBundle(run_id="r", inputs_digest="d", artifacts=("not an artifact",))
    with pytest.raises(IoError):
        emit_report(bundle, tmp_path)


def test_flow_csv_artifact_covers_every_edge():
    sc = load_fixture("fig9_baseline")
    net = build_network(sc)
    flow = max_flow(net)
    art = flow_csv_artifact("flow.csv", net, flow)
    assert art.header == ("from", "to", "capacity_kg", "flow_kg", "cost")
    assert len(art.rows) == len(net.edges)
    total_out = sum(int(r[3]) for r in art.rows if r[0] == net.source)
    assert total_out == flow.value
