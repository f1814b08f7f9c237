"""Decision network topology.

Clusters of nodes, influence edges (feedback and self-loops allowed), and the
judgment slots those edges open up. A network is a value: attaching a matrix
returns a new network and leaves the original untouched.
"""

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import SlotShapeMismatch, UnknownSlot
from .judgments import ComparisonMatrix

ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")


class ClusterKind(str, enum.Enum):
    GOAL = "goal"
    CRITERIA = "criteria"
    ALTERNATIVES = "alternatives"
    OTHER = "other"

    @classmethod
    def parse(cls, raw: "str | ClusterKind") -> "ClusterKind":
        if isinstance(raw, cls):
            return raw
        try:
            return cls(str(raw).lower())
        except ValueError:
            raise ValueError(
                f"unknown cluster kind {raw!r}; expected one of {[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class Node:
    id: str
    label: str
    cluster_id: str


@dataclass(frozen=True)
class Cluster:
    """Ordered group of nodes; node order fixes supermatrix row/column order."""

    id: str
    label: str
    kind: ClusterKind
    node_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", ClusterKind.parse(self.kind))
        object.__setattr__(self, "node_ids", tuple(self.node_ids))


@dataclass(frozen=True)
class InfluenceEdge:
    """Declared dependency: the control node rates the dependent cluster's elements.

    The matrix is absent until judgments are attached.
    """

    control_node: str
    dependent_cluster: str
    matrix: ComparisonMatrix | None = None


@dataclass(frozen=True)
class JudgmentSlot:
    """One pairwise questionnaire: control node rating the listed elements."""

    control_node: str
    dependent_cluster: str
    elements: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def key(self) -> str:
        return f"{self.control_node}:{self.dependent_cluster}"

    @property
    def order(self) -> int:
        return len(self.elements)

    def pairs(self) -> list[tuple[str, str]]:
        """Upper-triangle element pairs, in element order."""
        es = self.elements
        return [(es[i], es[j]) for i in range(len(es)) for j in range(i + 1, len(es))]


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [str(v) for v in self.violations]


@dataclass(frozen=True)
class DecisionNetwork:
    """Clusters, nodes, declared influence edges, optional cluster weighting.

    cluster_weight_matrices maps a source cluster id to a comparison matrix
    over the cluster ids it influences; absent entries fall back to the
    default weighting rule downstream.
    """

    clusters: tuple[Cluster, ...]
    nodes: tuple[Node, ...]
    edges: tuple[InfluenceEdge, ...]
    cluster_weight_matrices: Mapping[str, ComparisonMatrix] = field(default_factory=dict)
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "cluster_weight_matrices", dict(self.cluster_weight_matrices))
        object.__setattr__(self, "metadata", dict(self.metadata))

    # -- lookups ------------------------------------------------------------

    def cluster(self, cluster_id: str) -> Cluster:
        for c in self.clusters:
            if c.id == cluster_id:
                return c
        raise KeyError(cluster_id)

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def cluster_of(self, node_id: str) -> Cluster:
        return self.cluster(self.node(node_id).cluster_id)

    def node_order(self) -> tuple[str, ...]:
        """Supermatrix index: cluster declaration order, node order within."""
        out: list[str] = []
        for c in self.clusters:
            out.extend(c.node_ids)
        return tuple(out)

    def goal_cluster(self) -> Cluster | None:
        for c in self.clusters:
            if c.kind is ClusterKind.GOAL:
                return c
        return None

    def alternatives_cluster(self) -> Cluster | None:
        for c in self.clusters:
            if c.kind is ClusterKind.ALTERNATIVES and c.node_ids:
                return c
        return None

    def find_edge(self, control_node: str, dependent_cluster: str) -> InfluenceEdge | None:
        for e in self.edges:
            if e.control_node == control_node and e.dependent_cluster == dependent_cluster:
                return e
        return None


def slot_elements(net: DecisionNetwork, control_node: str, dependent_cluster: str) -> tuple[str, ...]:
    """Elements the control node rates: the cluster's nodes, minus itself.

    A node is never compared against itself, so when the control node belongs
    to the dependent cluster it is excluded and the comparison shrinks by one.
    """
    cluster = net.cluster(dependent_cluster)
    return tuple(nid for nid in cluster.node_ids if nid != control_node)


def slot_for_edge(net: DecisionNetwork, edge: InfluenceEdge) -> JudgmentSlot:
    return JudgmentSlot(
        control_node=edge.control_node,
        dependent_cluster=edge.dependent_cluster,
        elements=slot_elements(net, edge.control_node, edge.dependent_cluster),
    )


def all_judgment_slots(net: DecisionNetwork) -> list[JudgmentSlot]:
    """Every declared slot, filled or not, in edge declaration order."""
    return [slot_for_edge(net, e) for e in net.edges]


def find_slot(net: DecisionNetwork, key: str) -> JudgmentSlot:
    """Resolve a 'control:cluster' key to its slot, or raise UnknownSlot."""
    for slot in all_judgment_slots(net):
        if slot.key == key:
            return slot
    raise UnknownSlot(f"no judgment slot {key!r} in the network")


def required_judgments(net: DecisionNetwork) -> list[JudgmentSlot]:
    """Slots still missing a matrix, in edge declaration order."""
    return [slot_for_edge(net, e) for e in net.edges if e.matrix is None]


def attach_judgments(
    net: DecisionNetwork, slot: JudgmentSlot, matrix: ComparisonMatrix
) -> DecisionNetwork:
    """Attach (or replace) the matrix for a declared slot. Returns a new network."""
    edge = net.find_edge(slot.control_node, slot.dependent_cluster)
    if edge is None:
        raise UnknownSlot(
            f"no declared edge {slot.control_node} -> {slot.dependent_cluster}"
        )
    expected = slot_elements(net, slot.control_node, slot.dependent_cluster)
    if tuple(slot.elements) != expected:
        raise SlotShapeMismatch(
            f"slot {slot.key} lists elements {slot.elements}, network expects {expected}"
        )
    if matrix.labels != expected:
        raise SlotShapeMismatch(
            f"matrix for {slot.key} is labeled {matrix.labels}, expected {expected}"
        )
    new_edges = tuple(
        InfluenceEdge(e.control_node, e.dependent_cluster, matrix) if e is edge else e
        for e in net.edges
    )
    return DecisionNetwork(
        clusters=net.clusters,
        nodes=net.nodes,
        edges=new_edges,
        cluster_weight_matrices=net.cluster_weight_matrices,
        metadata=net.metadata,
    )


def validate(net: DecisionNetwork) -> ValidationReport:
    """Structural soundness report. An empty report means the model can solve
    once all judgments are in."""
    out: list[Violation] = []

    def bad(path: str, message: str):
        out.append(Violation(path, message))

    seen_cluster_ids: set[str] = set()
    for c in net.clusters:
        path = f"clusters[{c.id}]"
        if not ID_PATTERN.match(c.id):
            bad(path, f"cluster id {c.id!r} must match {ID_PATTERN.pattern}")
        if c.id in seen_cluster_ids:
            bad(path, "duplicate cluster id")
        seen_cluster_ids.add(c.id)

    node_by_id: dict[str, Node] = {}
    for n in net.nodes:
        path = f"nodes[{n.id}]"
        if not ID_PATTERN.match(n.id):
            bad(path, f"node id {n.id!r} must match {ID_PATTERN.pattern}")
        if n.id in node_by_id:
            bad(path, "duplicate node id")
        node_by_id[n.id] = n
        if n.id in seen_cluster_ids:
            bad(path, "node id collides with a cluster id")
        if n.cluster_id not in seen_cluster_ids:
            bad(path, f"references missing cluster {n.cluster_id!r}")

    # membership agreement between node.cluster_id and cluster.node_ids
    listed: set[str] = set()
    for c in net.clusters:
        for nid in c.node_ids:
            path = f"clusters[{c.id}].node_ids"
            if nid not in node_by_id:
                bad(path, f"lists missing node {nid!r}")
                continue
            if nid in listed:
                bad(path, f"node {nid!r} listed in more than one cluster")
            listed.add(nid)
            if node_by_id[nid].cluster_id != c.id:
                bad(path, f"node {nid!r} declares cluster {node_by_id[nid].cluster_id!r}")
    for nid in node_by_id:
        if nid not in listed:
            bad(f"nodes[{nid}]", "not listed in its cluster's node_ids")

    goals = [c for c in net.clusters if c.kind is ClusterKind.GOAL]
    if len(goals) > 1:
        bad("clusters", f"more than one goal cluster: {[c.id for c in goals]}")
    for g in goals:
        if len(g.node_ids) != 1:
            bad(f"clusters[{g.id}]", "goal cluster must contain exactly one node")

    if net.alternatives_cluster() is None:
        bad("clusters", "no alternatives cluster with nodes")

    cluster_ids = {c.id for c in net.clusters}
    seen_edges: set[tuple[str, str]] = set()
    for idx, e in enumerate(net.edges):
        path = f"edges[{e.control_node}->{e.dependent_cluster}]"
        ok = True
        if e.control_node not in node_by_id:
            bad(path, f"control node {e.control_node!r} does not exist")
            ok = False
        if e.dependent_cluster not in cluster_ids:
            bad(path, f"dependent cluster {e.dependent_cluster!r} does not exist")
            ok = False
        if not ok:
            continue
        if goals and e.dependent_cluster == goals[0].id:
            bad(path, "the goal cluster cannot receive influence")
        key = (e.control_node, e.dependent_cluster)
        if key in seen_edges:
            bad(path, "duplicate edge")
        seen_edges.add(key)
        elements = slot_elements(net, e.control_node, e.dependent_cluster)
        if not elements:
            bad(path, "dependent cluster has no comparable elements for this control node")
        if e.matrix is not None and e.matrix.labels != elements:
            bad(
                path,
                f"matrix labels {e.matrix.labels} do not match slot elements {elements}",
            )

    for source_id, m in net.cluster_weight_matrices.items():
        path = f"cluster_weight_matrices[{source_id}]"
        if source_id not in cluster_ids:
            bad(path, f"source cluster {source_id!r} does not exist")
        for lbl in m.labels:
            if lbl not in cluster_ids:
                bad(path, f"matrix labeled with unknown cluster {lbl!r}")

    # cluster-level reachability from the goal
    if goals and not out:
        adj: dict[str, set[str]] = {c.id: set() for c in net.clusters}
        for e in net.edges:
            adj[node_by_id[e.control_node].cluster_id].add(e.dependent_cluster)
        reached = {goals[0].id}
        frontier = [goals[0].id]
        while frontier:
            for nxt in adj[frontier.pop()]:
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        for c in net.clusters:
            if c.node_ids and c.id not in reached:
                bad(f"clusters[{c.id}]", "not reachable from the goal cluster")

    return ValidationReport(tuple(out))
