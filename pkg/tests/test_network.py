"""Topology, slot enumeration, attachment semantics, and validation."""

import pytest

from anp.errors import SlotShapeMismatch, UnknownSlot
from anp.judgments import ComparisonMatrix, build_matrix
from anp.network import (
    Cluster,
    ClusterKind,
    DecisionNetwork,
    InfluenceEdge,
    JudgmentSlot,
    Node,
    all_judgment_slots,
    attach_judgments,
    find_slot,
    required_judgments,
    slot_elements,
    validate,
)

from conftest import matrix_for_slot


def small_net(**overrides) -> DecisionNetwork:
    fields = dict(
        clusters=(
            Cluster("goal", "Goal", ClusterKind.GOAL, ("G",)),
            Cluster("crit", "Criteria", ClusterKind.CRITERIA, ("c1", "c2")),
            Cluster("alts", "Alternatives", ClusterKind.ALTERNATIVES, ("a1", "a2")),
        ),
        nodes=(
            Node("G", "Goal", "goal"),
            Node("c1", "One", "crit"),
            Node("c2", "Two", "crit"),
            Node("a1", "A", "alts"),
            Node("a2", "B", "alts"),
        ),
        edges=(
            InfluenceEdge("G", "crit"),
            InfluenceEdge("c1", "alts"),
            InfluenceEdge("c2", "alts"),
        ),
    )
    fields.update(overrides)
    return DecisionNetwork(**fields)


def test_kwic_validates_clean(kwic_bare):
    assert validate(kwic_bare).ok


def test_kwic_has_thirteen_slots(kwic_bare):
    slots = required_judgments(kwic_bare)
    assert len(slots) == 13
    keys = [s.key for s in slots]
    assert keys[0] == "PRI:criteria"
    assert "P:alternatives" in keys and "ADT:criteria" in keys


def test_control_node_excluded_from_its_own_cluster(kwic_bare):
    assert slot_elements(kwic_bare, "P", "criteria") == ("F", "R", "M")
    assert slot_elements(kwic_bare, "PF", "criteria") == ("P", "F", "R", "M")
    assert slot_elements(kwic_bare, "PRI", "criteria") == ("P", "F", "R", "M")


def test_node_order_follows_cluster_declaration(kwic_bare):
    assert kwic_bare.node_order() == ("PRI", "P", "F", "R", "M", "PF", "L", "BB", "ADT")


def test_attach_consumes_exactly_one_slot(kwic_bare):
    slot = find_slot(kwic_bare, "P:criteria")
    before = {s.key for s in required_judgments(kwic_bare)}
    net2 = attach_judgments(kwic_bare, slot, matrix_for_slot(kwic_bare, "P:criteria"))
    after = {s.key for s in required_judgments(net2)}
    assert before - after == {"P:criteria"}
    # value semantics: the original still needs all 13
    assert len(required_judgments(kwic_bare)) == 13


def test_attach_is_shape_checked(kwic_bare):
    slot = find_slot(kwic_bare, "PRI:criteria")
    wrong = build_matrix(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)], labels=("P", "F", "R"))
    with pytest.raises(SlotShapeMismatch):
        attach_judgments(kwic_bare, slot, wrong)
    mislabeled = build_matrix(
        4,
        [(i, j, 1) for i in range(4) for j in range(i + 1, 4)],
        labels=("P", "F", "R", "PF"),
    )
    with pytest.raises(SlotShapeMismatch):
        attach_judgments(kwic_bare, slot, mislabeled)


def test_attach_replaces_existing_matrix(kwic_bare):
    slot = find_slot(kwic_bare, "M:criteria")
    m = matrix_for_slot(kwic_bare, "M:criteria")
    net2 = attach_judgments(kwic_bare, slot, m)
    net3 = attach_judgments(net2, slot, m.replaced("P", "F", "5"))
    assert net3.find_edge("M", "criteria").matrix.value("P", "F") == 5
    assert len(required_judgments(net3)) == len(required_judgments(net2))


def test_attach_unknown_slot(kwic_bare):
    ghost = JudgmentSlot("PF", "alternatives", ("L", "BB", "ADT"))
    with pytest.raises(UnknownSlot):
        attach_judgments(kwic_bare, ghost, build_matrix(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)], labels=("L", "BB", "ADT")))
    with pytest.raises(UnknownSlot):
        find_slot(kwic_bare, "PF:alternatives")


def test_slot_pairs_enumeration():
    slot = JudgmentSlot("x", "c", ("a", "b", "d"))
    assert slot.pairs() == [("a", "b"), ("a", "d"), ("b", "d")]
    assert slot.key == "x:c"


def test_validate_flags_missing_alternatives():
    net = small_net(
        clusters=(
            Cluster("goal", "Goal", ClusterKind.GOAL, ("G",)),
            Cluster("crit", "Criteria", ClusterKind.CRITERIA, ("c1", "c2")),
            Cluster("alts", "Alternatives", ClusterKind.ALTERNATIVES, ()),
        ),
        nodes=(
            Node("G", "Goal", "goal"),
            Node("c1", "One", "crit"),
            Node("c2", "Two", "crit"),
        ),
        edges=(InfluenceEdge("G", "crit"),),
    )
    report = validate(net)
    assert not report.ok
    assert any("alternatives" in v.message for v in report.violations)


def test_validate_flags_bad_ids_and_dangling_refs():
    net = small_net(
        nodes=(
            Node("G", "Goal", "goal"),
            Node("c 1", "One", "crit"),
            Node("c2", "Two", "nowhere"),
            Node("a1", "A", "alts"),
            Node("a2", "B", "alts"),
        ),
    )
    messages = " | ".join(validate(net).lines())
    assert "must match" in messages
    assert "missing cluster" in messages


def test_validate_flags_edge_problems():
    net = small_net(
        edges=(
            InfluenceEdge("G", "crit"),
            InfluenceEdge("G", "crit"),
            InfluenceEdge("ghost", "alts"),
            InfluenceEdge("c1", "void"),
            InfluenceEdge("c1", "goal"),
        )
    )
    messages = " | ".join(validate(net).lines())
    assert "duplicate edge" in messages
    assert "does not exist" in messages
    assert "goal cluster cannot receive influence" in messages


def test_validate_flags_wrong_cluster_matrix_label(kwic_bare):
    slot = find_slot(kwic_bare, "PRI:criteria")
    net = attach_judgments(kwic_bare, slot, matrix_for_slot(kwic_bare, "PRI:criteria"))
    # swap in an edge whose matrix is labeled with an alternatives node
    bad = build_matrix(
        4,
        [(i, j, 1) for i in range(4) for j in range(i + 1, 4)],
        labels=("P", "F", "R", "PF"),
    )
    edges = tuple(
        InfluenceEdge(e.control_node, e.dependent_cluster, bad)
        if e.control_node == "PRI"
        else e
        for e in net.edges
    )
    report = validate(
        DecisionNetwork(
            clusters=net.clusters,
            nodes=net.nodes,
            edges=edges,
            cluster_weight_matrices=net.cluster_weight_matrices,
        )
    )
    assert any("PRI->criteria" in v.path for v in report.violations)


def test_validate_flags_unreachable_cluster():
    net = small_net(edges=(InfluenceEdge("c1", "alts"), InfluenceEdge("c2", "alts")))
    # goal exists but points at nothing, so criteria and alternatives are unreachable
    report = validate(net)
    assert any("not reachable" in v.message for v in report.violations)


def test_validate_monotone_under_attachment(kwic_bare):
    net = kwic_bare
    assert validate(net).ok
    for key in ("PRI:criteria", "P:criteria", "M:alternatives"):
        net = attach_judgments(net, find_slot(net, key), matrix_for_slot(net, key))
        assert validate(net).ok


def test_goal_cluster_rules():
    net = small_net(
        clusters=(
            Cluster("goal", "Goal", ClusterKind.GOAL, ("G", "c1")),
            Cluster("crit", "Criteria", ClusterKind.CRITERIA, ("c2",)),
            Cluster("alts", "Alternatives", ClusterKind.ALTERNATIVES, ("a1", "a2")),
        ),
        nodes=(
            Node("G", "Goal", "goal"),
            Node("c1", "One", "goal"),
            Node("c2", "Two", "crit"),
            Node("a1", "A", "alts"),
            Node("a2", "B", "alts"),
        ),
        edges=(InfluenceEdge("G", "crit"), InfluenceEdge("c2", "alts")),
    )
    assert any(
        "exactly one node" in v.message for v in validate(net).violations
    )


def test_cluster_weight_matrix_validation(kwic_bare):
    bad = DecisionNetwork(
        clusters=kwic_bare.clusters,
        nodes=kwic_bare.nodes,
        edges=kwic_bare.edges,
        cluster_weight_matrices={
            "criteria": ComparisonMatrix.from_rows(("criteria", "bogus"), [[1, 2], ["1/2", 1]])
        },
    )
    assert any("unknown cluster" in v.message for v in validate(bad).violations)
