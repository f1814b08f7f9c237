"""Shared fixture: the KWIC architecture-style selection network.

One goal node, four criteria (with a feedback loop among them), four
alternative styles, thirteen judgment slots. Pairwise values are the
published study's matrices, entered as upper-triangle judgments.
"""

from fractions import Fraction

import pytest

from anp.judgments import ComparisonMatrix, build_matrix
from anp.network import (
    Cluster,
    ClusterKind,
    DecisionNetwork,
    InfluenceEdge,
    Node,
    attach_judgments,
    find_slot,
)

# slot key -> {(row, col): value}; upper-triangle in element order
KWIC_JUDGMENTS: dict[str, dict[tuple[str, str], str]] = {
    "PRI:criteria": {
        ("P", "F"): "2", ("P", "R"): "3", ("P", "M"): "1/2",
        ("F", "R"): "2", ("F", "M"): "1/3", ("R", "M"): "1/4",
    },
    "P:criteria": {("F", "R"): "2", ("F", "M"): "1/3", ("R", "M"): "1/4"},
    "F:criteria": {("P", "R"): "3", ("P", "M"): "1/2", ("R", "M"): "1/4"},
    "R:criteria": {("P", "F"): "2", ("P", "M"): "1/2", ("F", "M"): "1/3"},
    "M:criteria": {("P", "F"): "2", ("P", "R"): "3", ("F", "R"): "2"},
    "P:alternatives": {
        ("PF", "L"): "9", ("PF", "BB"): "8", ("PF", "ADT"): "3",
        ("L", "BB"): "1/6", ("L", "ADT"): "1/9", ("BB", "ADT"): "1/6",
    },
    "F:alternatives": {
        ("PF", "L"): "6", ("PF", "BB"): "4", ("PF", "ADT"): "8",
        ("L", "BB"): "1/3", ("L", "ADT"): "3", ("BB", "ADT"): "5",
    },
    "R:alternatives": {
        ("PF", "L"): "3", ("PF", "BB"): "5", ("PF", "ADT"): "3",
        ("L", "BB"): "3", ("L", "ADT"): "1", ("BB", "ADT"): "1/3",
    },
    "M:alternatives": {
        ("PF", "L"): "1/4", ("PF", "BB"): "1", ("PF", "ADT"): "1/5",
        ("L", "BB"): "4", ("L", "ADT"): "1/2", ("BB", "ADT"): "1/5",
    },
    "PF:criteria": {
        ("P", "F"): "2", ("P", "R"): "4", ("P", "M"): "8",
        ("F", "R"): "3", ("F", "M"): "7", ("R", "M"): "5",
    },
    "L:criteria": {
        ("P", "F"): "1/7", ("P", "R"): "1/8", ("P", "M"): "1/9",
        ("F", "R"): "1/2", ("F", "M"): "1/3", ("R", "M"): "1/2",
    },
    "BB:criteria": {
        ("P", "F"): "1/4", ("P", "R"): "1", ("P", "M"): "1",
        ("F", "R"): "4", ("F", "M"): "4", ("R", "M"): "1",
    },
    "ADT:criteria": {
        ("P", "F"): "7", ("P", "R"): "4", ("P", "M"): "2",
        ("F", "R"): "1/4", ("F", "M"): "1/6", ("R", "M"): "1/3",
    },
}

# updated limit mass between the criteria loop and the alternatives block,
# reconstructed from the study's published limit matrix (4:1 split)
KWIC_CLUSTER_MATRIX = ComparisonMatrix.from_rows(
    ("criteria", "alternatives"), [[1, 4], ["1/4", 1]]
)


def kwic_topology(with_cluster_matrix: bool = True) -> DecisionNetwork:
    clusters = (
        Cluster("goal", "Prioritize", ClusterKind.GOAL, ("PRI",)),
        Cluster("criteria", "Criteria", ClusterKind.CRITERIA, ("P", "F", "R", "M")),
        Cluster(
            "alternatives", "Alternatives", ClusterKind.ALTERNATIVES,
            ("PF", "L", "BB", "ADT"),
        ),
    )
    nodes = (
        Node("PRI", "Prioritize", "goal"),
        Node("P", "Performance", "criteria"),
        Node("F", "Flexibility", "criteria"),
        Node("R", "Reusability", "criteria"),
        Node("M", "Maintenance", "criteria"),
        Node("PF", "Pipes & Filters", "alternatives"),
        Node("L", "Layered", "alternatives"),
        Node("BB", "Blackboard", "alternatives"),
        Node("ADT", "Abstract Data Type", "alternatives"),
    )
    edges = tuple(
        InfluenceEdge(key.split(":")[0], key.split(":")[1]) for key in KWIC_JUDGMENTS
    )
    return DecisionNetwork(
        clusters=clusters,
        nodes=nodes,
        edges=edges,
        cluster_weight_matrices={"criteria": KWIC_CLUSTER_MATRIX} if with_cluster_matrix else {},
    )


def matrix_for_slot(net: DecisionNetwork, key: str) -> ComparisonMatrix:
    slot = find_slot(net, key)
    index = {nid: i for i, nid in enumerate(slot.elements)}
    pairs = [(index[a], index[b], v) for (a, b), v in KWIC_JUDGMENTS[key].items()]
    return build_matrix(slot.order, pairs, labels=slot.elements)


def kwic_network(with_cluster_matrix: bool = True) -> DecisionNetwork:
    net = kwic_topology(with_cluster_matrix)
    for key in KWIC_JUDGMENTS:
        net = attach_judgments(net, find_slot(net, key), matrix_for_slot(net, key))
    return net


@pytest.fixture
def kwic_bare():
    """Topology only: every slot still needs judgments."""
    return kwic_topology()


@pytest.fixture
def kwic_net():
    """Fully rated network with the reconstructed cluster weighting."""
    return kwic_network()


@pytest.fixture
def kwic_net_default_weights():
    """Fully rated network without cluster matrices (default weighting rule)."""
    return kwic_network(with_cluster_matrix=False)
