"""Document format: round trips, canonical bytes, schema errors, reports."""

import csv
import io
import json

import pytest

from anp import (
    IntegrityError,
    InvalidScaleValue,
    SchemaError,
    UnknownSlot,
    UnsupportedVersion,
    ConsistencyRejection,
    ConsistencyPolicy,
    SolveSettings,
    build_network,
    document_from_network,
    export_report,
    loads,
    loads_result,
    missing_pairs,
    model_digest,
    required_judgments,
    saves,
    saves_result,
    solve_document,
    verify_result,
    with_judgment,
)
from anp.fixtures import kwic_path, load_kwic
from conftest import kwic_network


@pytest.fixture()
def kwic_doc():
    return load_kwic()


def test_fixture_matches_programmatic_construction(kwic_doc):
    built = document_from_network(kwic_network(with_cluster_matrix=True))
    assert kwic_doc.network == built.network
    assert kwic_doc.judgments == built.judgments
    assert kwic_doc.options == built.options


def test_save_load_round_trip(kwic_doc):
    data = saves(kwic_doc)
    again = loads(data)
    assert again == kwic_doc
    assert saves(again) == data


def test_loads_accepts_str_and_bytes(kwic_doc):
    data = saves(kwic_doc)
    assert loads(data.decode("utf-8")) == loads(data)


def test_canonical_bytes_are_stable(kwic_doc):
    data = saves(kwic_doc)
    assert data.endswith(b"\n")
    assert b"\r" not in data
    obj = json.loads(data)
    assert list(obj) == ["format_version", "metadata", "options", "network", "judgments"]
    assert list(obj["network"]) == ["clusters", "edges", "cluster_comparisons"]
    # rationals in lowest terms, as strings
    assert obj["judgments"]["PRI:criteria"]["P,M"] == "1/2"
    assert obj["network"]["cluster_comparisons"]["criteria"]["judgments"] == {
        "criteria,alternatives": "4"
    }


def test_digest_is_sha256_and_content_sensitive(kwic_doc):
    digest = model_digest(kwic_doc)
    assert digest.startswith("sha256:") and len(digest) == len("sha256:") + 64
    assert digest == model_digest(loads(saves(kwic_doc)))
    bumped = with_judgment(kwic_doc, "PRI:criteria", "P,F", "3")
    assert model_digest(bumped) != digest


def test_fixture_metadata_annotations(kwic_doc):
    meta = kwic_doc.metadata
    assert meta["survey"]["attribute_importance"] == {"P": 4, "F": 3, "R": 2, "M": 5}
    assert meta["survey"]["style_satisfaction"]["PF"]["P"] == 15
    assert meta["published_results"]["ranking"] == ["PF", "ADT", "L", "BB"]


def test_build_network_attaches_complete_slots(kwic_doc):
    net = build_network(kwic_doc)
    assert required_judgments(net) == []
    assert missing_pairs(kwic_doc) == {}


def test_missing_pairs_reports_gaps(kwic_doc):
    judgments = {k: dict(v) for k, v in kwic_doc.judgments.items()}
    del judgments["P:alternatives"][("PF", "L")]
    del judgments["F:criteria"]
    import dataclasses

    partial = dataclasses.replace(kwic_doc, judgments=judgments)
    gaps = missing_pairs(partial)
    assert gaps["P:alternatives"] == ["PF,L"]
    assert gaps["F:criteria"] == ["P,R", "P,M", "R,M"]
    net = build_network(partial)
    missing_slots = [s.key for s in required_judgments(net)]
    assert missing_slots == ["F:criteria", "P:alternatives"]


def test_single_element_slot_is_vacuously_complete():
    from anp import Cluster, ClusterKind, DecisionNetwork, InfluenceEdge, Node

    net = DecisionNetwork(
        clusters=(
            Cluster("goal", "Goal", ClusterKind.GOAL, ("G",)),
            Cluster("alts", "Alternatives", ClusterKind.ALTERNATIVES, ("A", "B")),
        ),
        nodes=(Node("G", "Goal", "goal"), Node("A", "A", "alts"), Node("B", "B", "alts")),
        edges=(InfluenceEdge("A", "alts"),),
    )
    doc = document_from_network(net)
    built = build_network(doc)
    matrix = built.edges[0].matrix
    assert matrix is not None and matrix.order == 1
    assert matrix.labels == ("B",)


def test_with_judgment_is_pure(kwic_doc):
    before = saves(kwic_doc)
    bumped = with_judgment(kwic_doc, "PRI:criteria", "P,F", "5")
    assert saves(kwic_doc) == before
    assert bumped.judgments["PRI:criteria"][("P", "F")] == 5


def test_with_judgment_rejects_reversed_pair(kwic_doc):
    with pytest.raises(UnknownSlot, match="opposite orientation"):
        with_judgment(kwic_doc, "PRI:criteria", "F,P", "2")
    with pytest.raises(UnknownSlot):
        with_judgment(kwic_doc, "PRI:criteria", "P,X", "2")
    with pytest.raises(UnknownSlot):
        with_judgment(kwic_doc, "nope:criteria", "P,F", "2")


def test_with_judgment_scale_enforcement(kwic_doc):
    with pytest.raises(InvalidScaleValue):
        with_judgment(kwic_doc, "PRI:criteria", "P,F", "2.5")
    relaxed = with_judgment(kwic_doc, "PRI:criteria", "P,F", "2.5", on_scale=False)
    from fractions import Fraction

    assert relaxed.judgments["PRI:criteria"][("P", "F")] == Fraction(5, 2)


def test_solve_document_end_to_end(kwic_doc):
    res = solve_document(kwic_doc)
    assert res.ranking["order"] == ["PF", "ADT", "L", "BB"]
    assert res.model_digest == model_digest(kwic_doc)
    assert res.slots["PRI:criteria"]["elements"] == ["P", "F", "R", "M"]
    weights = dict(zip(res.slots["PRI:criteria"]["elements"], res.slots["PRI:criteria"]["weights"]))
    assert weights["M"] == pytest.approx(0.467296, abs=1e-5)
    assert res.cluster_weights["criteria"] == pytest.approx(
        {"criteria": 0.8, "alternatives": 0.2}
    )


def test_solve_document_overrides_beat_document_options(kwic_doc):
    res = solve_document(kwic_doc, policy="uniform")
    assert res.options.policy is ConsistencyPolicy.UNIFORM
    assert res.slots["P:alternatives"]["verdict"] == "warn"
    with pytest.raises(ConsistencyRejection) as err:
        solve_document(kwic_doc, strict=True)
    assert any(key == "P:alternatives" for key, _ in err.value.failures)


def test_result_round_trip_and_integrity(kwic_doc):
    res = solve_document(kwic_doc)
    data = saves_result(res)
    again = loads_result(data)
    assert again == res
    assert saves_result(again) == data
    verify_result(again, kwic_doc)
    tampered = with_judgment(kwic_doc, "PRI:criteria", "P,F", "9")
    with pytest.raises(IntegrityError):
        verify_result(again, tampered)


def test_report_json_equals_result_bytes(kwic_doc):
    res = solve_document(kwic_doc)
    assert export_report(res, "json") == saves_result(res)


def test_report_csv_sections(kwic_doc):
    res = solve_document(kwic_doc)
    data = export_report(res, "csv")
    assert b"\r" not in data
    rows = list(csv.reader(io.StringIO(data.decode("utf-8"))))
    sections = [r[1] for r in rows if r and r[0] == "section"]
    assert len([s for s in sections if ":" in s]) == 13
    assert sections[-4:] == ["unweighted", "weighted", "limit", "ranking"]
    ranking_at = rows.index(["section", "ranking"])
    header = rows[ranking_at + 1]
    assert header == ["rank", "id", "label", "limit_weight", "normalized"]
    first = rows[ranking_at + 2]
    assert first[0] == "1" and first[1] == "PF" and first[2] == "Pipes & Filters"


def test_report_markdown_ranking_table(kwic_doc):
    res = solve_document(kwic_doc)
    text = export_report(res, "markdown").decode("utf-8")
    assert "| Rank | Alternative | Limit weight | Normalized |" in text
    assert "| 1 | Pipes & Filters | 0.0676 |" in text
    assert "| Slot | CR | Threshold | Verdict |" in text
    assert "| P:alternatives |" in text


def test_report_format_rejects_unknown(kwic_doc):
    res = solve_document(kwic_doc)
    with pytest.raises(ValueError, match="unknown report format"):
        export_report(res, "xml")


def test_document_from_network_strips_matrices(kwic_doc):
    net = build_network(kwic_doc)
    doc = document_from_network(net)
    assert all(e.matrix is None for e in doc.network.edges)
    assert doc.judgments == kwic_doc.judgments


# ---------------------------------------------------------------------------
# schema errors


def _kwic_obj():
    return json.loads(saves(load_kwic()))


def _expect_schema_error(obj, fragment, path_fragment=None):
    with pytest.raises(SchemaError) as err:
        loads(json.dumps(obj))
    assert fragment in str(err.value)
    if path_fragment:
        assert path_fragment in err.value.path
    return err.value


def test_invalid_json_reports_position():
    with pytest.raises(SchemaError, match=r"line 1, column"):
        loads("{not json")
    with pytest.raises(SchemaError):
        loads(b"")


def test_duplicate_json_keys_rejected():
    with pytest.raises(SchemaError, match="duplicate key"):
        loads('{"format_version": 1, "format_version": 1}')


def test_format_version_required_and_checked():
    _expect_schema_error({}, "format_version is required", "format_version")
    _expect_schema_error({"format_version": "1"}, "must be an integer")
    with pytest.raises(UnsupportedVersion, match="format_version 2"):
        loads(json.dumps({"format_version": 2}))


def test_reciprocal_stored_is_rejected():
    obj = _kwic_obj()
    entry = obj["judgments"]["PRI:criteria"].pop("P,F")
    obj["judgments"]["PRI:criteria"]["F,P"] = str(
        1 / int(entry) if entry.isdigit() else entry
    )
    err = _expect_schema_error(obj, "reciprocal stored", "judgments.PRI:criteria")
    assert "P,F" in str(err)


def test_unknown_slot_and_element_in_judgments():
    obj = _kwic_obj()
    obj["judgments"]["PRI:alternatives"] = {"PF,L": "2"}
    _expect_schema_error(obj, "unknown slot", "PRI:alternatives")

    obj = _kwic_obj()
    obj["judgments"]["PRI:criteria"]["P,XX"] = "2"
    _expect_schema_error(obj, "outside", "P,XX")

    obj = _kwic_obj()
    obj["judgments"]["PRI:criteria"]["P,P"] = "1"
    _expect_schema_error(obj, "diagonal")


def test_bad_judgment_values():
    for bad in ("0", "-3", "abc", "1/0"):
        obj = _kwic_obj()
        obj["judgments"]["PRI:criteria"]["P,F"] = bad
        _expect_schema_error(obj, "", "judgments.PRI:criteria.P,F")


def test_edge_referential_errors():
    obj = _kwic_obj()
    obj["network"]["edges"][0]["control"] = "ghost"
    _expect_schema_error(obj, "unknown control node", "edges[0].control")

    obj = _kwic_obj()
    obj["network"]["edges"][0]["cluster"] = "ghost"
    _expect_schema_error(obj, "unknown cluster", "edges[0].cluster")

    obj = _kwic_obj()
    obj["network"]["edges"].append(dict(obj["network"]["edges"][0]))
    obj["judgments"] = {}
    _expect_schema_error(obj, "duplicate edge")


def test_identifier_errors():
    obj = _kwic_obj()
    obj["network"]["clusters"][0]["id"] = "has space"
    _expect_schema_error(obj, "must match", "clusters[0].id")

    obj = _kwic_obj()
    obj["network"]["clusters"][1]["id"] = "goal"
    _expect_schema_error(obj, "duplicate cluster id")

    obj = _kwic_obj()
    obj["network"]["clusters"][1]["nodes"][0]["id"] = "PRI"
    _expect_schema_error(obj, "duplicate or ambiguous")


def test_cluster_comparison_errors():
    obj = _kwic_obj()
    obj["network"]["cluster_comparisons"]["ghost"] = {
        "labels": ["criteria"], "judgments": {},
    }
    _expect_schema_error(obj, "unknown source cluster", "cluster_comparisons.ghost")

    obj = _kwic_obj()
    obj["network"]["cluster_comparisons"]["criteria"]["labels"] = ["criteria", "ghost"]
    _expect_schema_error(obj, "unknown cluster", "labels[1]")

    obj = _kwic_obj()
    obj["network"]["cluster_comparisons"]["criteria"]["judgments"] = {}
    _expect_schema_error(obj, "unusable", "cluster_comparisons.criteria")


def test_options_errors():
    obj = _kwic_obj()
    obj["options"]["policy"] = "strictest"
    _expect_schema_error(obj, "policy", "options.policy")

    obj = _kwic_obj()
    obj["options"]["tolerance"] = -1
    _expect_schema_error(obj, "positive", "options.tolerance")

    obj = _kwic_obj()
    obj["options"]["max_power"] = 1
    _expect_schema_error(obj, "max_power", "options.max_power")

    obj = _kwic_obj()
    obj["options"]["strict"] = "yes"
    _expect_schema_error(obj, "boolean", "options.strict")

    obj = _kwic_obj()
    obj["options"]["rci_overrides"] = {"four": 0.9}
    _expect_schema_error(obj, "integer", "rci_overrides")


def test_options_round_trip_through_document():
    obj = _kwic_obj()
    obj["options"] = {
        "policy": "uniform",
        "strict": True,
        "tolerance": 1e-12,
        "max_power": 4096,
        "rci_overrides": {"3": 0.52},
    }
    doc = loads(json.dumps(obj))
    assert doc.options == SolveSettings(
        policy="uniform", strict=True, tolerance=1e-12, max_power=4096,
        rci_overrides={3: 0.52},
    )
    assert json.loads(saves(doc))["options"]["rci_overrides"] == {"3": 0.52}


def test_fixture_path_points_at_packaged_file():
    assert kwic_path().name == "kwic.anp.json"
    assert load_kwic().format_version == 1
