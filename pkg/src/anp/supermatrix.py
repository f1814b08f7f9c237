"""Supermatrix pipeline: assemble, weight, take the limit, rank.

Column convention throughout: the column is the control node, the row is the
dependent element. Blocks are the priority vectors computed per judgment slot.
"""

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConsistencyRejection,
    ConvergenceFailure,
    IncompleteModel,
    NotAHierarchy,
    SchemaError,
    SlotShapeMismatch,
)
from .judgments import (
    ConsistencyPolicy,
    ConsistencyVerdict,
    PriorityVector,
    SaatyJudgment,
    principal_eigenvector,
    screen_consistency,
)
from .network import (
    ClusterKind,
    DecisionNetwork,
    JudgmentSlot,
    all_judgment_slots,
    attach_judgments,
    find_slot,
    required_judgments,
    slot_for_edge,
    validate,
)


class SupermatrixState(str, enum.Enum):
    UNWEIGHTED = "unweighted"
    WEIGHTED = "weighted"
    LIMIT = "limit"


@dataclass(frozen=True)
class ConvergenceOptions:
    """Limit computation budget: stop tolerance and the highest power tried."""

    tolerance: float = 1e-10
    max_power: int = 2**20

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_power < 2:
            raise ValueError("max_power must be at least 2")


@dataclass(frozen=True)
class ConvergenceInfo:
    """How the limit was reached: multiplication count, final residual,
    whether the period-2 average kicked in, and how far apart the limit
    columns ended up (zero when the chain mixes everything)."""

    iterations: int
    residual: float
    cesaro_used: bool
    column_spread: float


@dataclass(frozen=True)
class Supermatrix:
    index: tuple[str, ...]
    cluster_slices: tuple[tuple[str, int, int], ...]
    entries: np.ndarray
    state: SupermatrixState
    convergence: ConvergenceInfo | None = None

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(self.index))
        object.__setattr__(self, "cluster_slices", tuple(self.cluster_slices))
        arr = np.array(self.entries, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        n = len(self.index)
        if arr.shape != (n, n):
            raise ValueError(f"entries shape {arr.shape} does not match index size {n}")

    @property
    def order(self) -> int:
        return len(self.index)

    def position(self, node_id: str) -> int:
        try:
            return self.index.index(node_id)
        except ValueError:
            raise KeyError(node_id) from None

    def cell(self, row_node: str, col_node: str) -> float:
        return float(self.entries[self.position(row_node), self.position(col_node)])

    def column(self, col_node: str) -> dict[str, float]:
        j = self.position(col_node)
        return {nid: float(self.entries[i, j]) for i, nid in enumerate(self.index)}


@dataclass(frozen=True)
class ClusterWeights:
    """Per source cluster: how its columns' mass splits across target clusters."""

    weights: Mapping[str, Mapping[str, float]]

    def __post_init__(self):
        object.__setattr__(
            self, "weights", {k: dict(v) for k, v in dict(self.weights).items()}
        )

    def weight(self, source_cluster: str, target_cluster: str) -> float:
        return self.weights.get(source_cluster, {}).get(target_cluster, 0.0)


@dataclass(frozen=True)
class RankingReport:
    """Alternative priorities read off the limit matrix (or AHP synthesis)."""

    alternative_weights: Mapping[str, float]
    order: tuple[str, ...]
    renormalized: Mapping[str, float]
    raw_limit_column: Mapping[str, float]
    convergence: ConvergenceInfo | None = None

    def __post_init__(self):
        object.__setattr__(self, "alternative_weights", dict(self.alternative_weights))
        object.__setattr__(self, "renormalized", dict(self.renormalized))
        object.__setattr__(self, "raw_limit_column", dict(self.raw_limit_column))
        object.__setattr__(self, "order", tuple(self.order))


@dataclass(frozen=True)
class WhatIfReport:
    baseline: RankingReport
    perturbed: RankingReport
    delta: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "delta", dict(self.delta))


def compute_slot_eigenvectors(
    net: DecisionNetwork,
    rci: Mapping[int, float] | None = None,
    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994,
) -> tuple[dict[str, PriorityVector], dict[str, ConsistencyVerdict]]:
    """Eigenvector and screening verdict for every filled slot, in edge order."""
    missing = [s.key for s in required_judgments(net)]
    if missing:
        raise IncompleteModel(
            f"{len(missing)} judgment slot(s) still unrated: {', '.join(missing)}",
            missing=tuple(missing),
        )
    eigenvectors: dict[str, PriorityVector] = {}
    verdicts: dict[str, ConsistencyVerdict] = {}
    for edge in net.edges:
        slot = slot_for_edge(net, edge)
        pv = principal_eigenvector(edge.matrix, rci)
        eigenvectors[slot.key] = pv
        verdicts[slot.key] = screen_consistency(pv.cr, edge.matrix.order, policy)
    return eigenvectors, verdicts


def assemble_unweighted(
    net: DecisionNetwork, eigenvectors: Mapping[str, PriorityVector]
) -> Supermatrix:
    """Place each slot's priority vector into its block.

    Entry (row = dependent element, column = control node) carries the
    element's priority under that control. Everything undeclared stays zero,
    including the control node's own row within its slot.
    """
    index = net.node_order()
    pos = {nid: i for i, nid in enumerate(index)}
    n = len(index)
    entries = np.zeros((n, n))
    missing = []
    for edge in net.edges:
        slot = slot_for_edge(net, edge)
        pv = eigenvectors.get(slot.key)
        if pv is None:
            missing.append(slot.key)
            continue
        if pv.order != slot.order:
            raise SlotShapeMismatch(
                f"eigenvector for {slot.key} has {pv.order} weights, slot has {slot.order} elements"
            )
        col = pos[edge.control_node]
        for element, w in zip(slot.elements, pv.weights):
            entries[pos[element], col] = w
    if missing:
        raise IncompleteModel(
            f"no eigenvector for slot(s): {', '.join(missing)}", missing=tuple(missing)
        )
    slices = []
    start = 0
    for c in net.clusters:
        slices.append((c.id, start, start + len(c.node_ids)))
        start += len(c.node_ids)
    return Supermatrix(
        index=index,
        cluster_slices=tuple(slices),
        entries=entries,
        state=SupermatrixState.UNWEIGHTED,
    )


def derive_cluster_weights(
    net: DecisionNetwork,
    rci: Mapping[int, float] | None = None,
    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994,
    strict: bool = False,
) -> ClusterWeights:
    """Split each source cluster's column mass across the clusters it influences.

    With an explicit comparison matrix for the source cluster, its eigenvector
    decides the split (restricted to the clusters actually influenced and
    renormalized). Without one, influenced clusters share equally.
    """
    targets_by_source: dict[str, list[str]] = {}
    for edge in net.edges:
        src = net.cluster_of(edge.control_node).id
        targets_by_source.setdefault(src, [])
        if edge.dependent_cluster not in targets_by_source[src]:
            targets_by_source[src].append(edge.dependent_cluster)

    cluster_order = [c.id for c in net.clusters]
    weights: dict[str, dict[str, float]] = {}
    for src in cluster_order:
        targets = sorted(targets_by_source.get(src, []), key=cluster_order.index)
        if not targets:
            continue
        explicit = net.cluster_weight_matrices.get(src)
        if explicit is None:
            share = 1.0 / len(targets)
            weights[src] = {t: share for t in targets}
            continue
        not_covered = [t for t in targets if t not in explicit.labels]
        if not_covered:
            raise SchemaError(
                f"cluster weight matrix for {src!r} does not cover influenced "
                f"cluster(s) {not_covered}",
                path=f"cluster_weight_matrices.{src}",
            )
        pv = principal_eigenvector(explicit, rci)
        verdict = screen_consistency(pv.cr, explicit.order, policy)
        if strict and not verdict.acceptable:
            raise ConsistencyRejection(
                f"cluster weight matrix for {src!r} has CR {pv.cr:.4f} over "
                f"threshold {verdict.threshold}",
                failures=((f"clusters:{src}", pv.cr),),
            )
        by_label = dict(zip(explicit.labels, pv.weights))
        total = sum(by_label[t] for t in targets)
        weights[src] = {t: by_label[t] / total for t in targets}
    return ClusterWeights(weights)


def weight(unweighted: Supermatrix, cw: ClusterWeights) -> Supermatrix:
    """Scale blocks by cluster weights and renormalize to column stochastic.

    Columns that end up all zero (nodes influencing nothing) become unit
    self-loops: the node keeps its own weight rather than leaking mass or
    picking up influence the model never declared.
    """
    if unweighted.state is not SupermatrixState.UNWEIGHTED:
        raise ValueError(f"expected an unweighted matrix, got {unweighted.state.value}")
    entries = np.array(unweighted.entries)
    spans = {cid: (a, b) for cid, a, b in unweighted.cluster_slices}
    for src, (c0, c1) in spans.items():
        for tgt, (r0, r1) in spans.items():
            entries[r0:r1, c0:c1] *= cw.weight(src, tgt)
    for j in range(entries.shape[1]):
        total = entries[:, j].sum()
        if total > 0:
            entries[:, j] /= total
        else:
            entries[j, j] = 1.0
    return Supermatrix(
        index=unweighted.index,
        cluster_slices=unweighted.cluster_slices,
        entries=entries,
        state=SupermatrixState.WEIGHTED,
    )


def limit(
    weighted: Supermatrix, options: ConvergenceOptions = ConvergenceOptions()
) -> Supermatrix:
    """Raise the weighted matrix to its limit by repeated squaring.

    Stops when successive squarings agree within options.tolerance. A limit
    that is stable under squaring but not under one more multiplication is a
    period-2 oscillation; the average of the two phases is returned with
    cesaro_used set. Anything still moving at max_power fails loudly.
    """
    if weighted.state is not SupermatrixState.WEIGHTED:
        raise ValueError(f"expected a weighted matrix, got {weighted.state.value}")
    p = np.array(weighted.entries)
    power = 1
    mults = 0
    residual = float("inf")
    settled = False
    while power < options.max_power:
        q = p @ p
        power *= 2
        mults += 1
        residual = float(np.max(np.abs(q - p)))
        p = q
        if residual <= options.tolerance:
            settled = True
            break
    if not settled:
        raise ConvergenceFailure(
            f"supermatrix powers did not converge by power {power} "
            f"(residual {residual:.3e}, tolerance {options.tolerance:.1e}); "
            "cycle of period > 2 or convergence too slow"
        )
    step = p @ weighted.entries
    mults += 1
    step_residual = float(np.max(np.abs(step - p)))
    osc_tol = max(100 * options.tolerance, 1e-8)
    cesaro = step_residual > osc_tol
    if cesaro:
        # confirm the oscillation really has period 2 before averaging
        back = step @ weighted.entries
        mults += 1
        if float(np.max(np.abs(back - p))) > osc_tol:
            raise ConvergenceFailure(
                f"powers oscillate with period > 2 (step residual {step_residual:.3e})"
            )
        p = (p + step) / 2.0
    spread = float(np.max(p.max(axis=1) - p.min(axis=1))) if p.size else 0.0
    return Supermatrix(
        index=weighted.index,
        cluster_slices=weighted.cluster_slices,
        entries=p,
        state=SupermatrixState.LIMIT,
        convergence=ConvergenceInfo(
            iterations=mults,
            residual=residual,
            cesaro_used=cesaro,
            column_spread=spread,
        ),
    )


def _ranking_from_column(
    column: Mapping[str, float],
    alternatives: Sequence[str],
    convergence: ConvergenceInfo | None,
) -> RankingReport:
    alt_weights = {nid: float(column[nid]) for nid in alternatives}
    order = tuple(sorted(alt_weights, key=lambda nid: (-alt_weights[nid], nid)))
    total = sum(alt_weights.values())
    renorm = {
        nid: (w / total if total > 0 else 0.0) for nid, w in alt_weights.items()
    }
    return RankingReport(
        alternative_weights=alt_weights,
        order=order,
        renormalized=renorm,
        raw_limit_column={k: float(v) for k, v in column.items()},
        convergence=convergence,
    )


def rank(limit_m: Supermatrix, net: DecisionNetwork) -> RankingReport:
    """Read the alternatives' limit priorities.

    Uses the goal node's column when a goal exists (for networks whose limit
    columns all agree this changes nothing; for hierarchies with absorbing
    alternatives it is the column that carries the synthesis), the first
    column otherwise. Ties order lexicographically by node id.
    """
    if limit_m.state is not SupermatrixState.LIMIT:
        raise ValueError(f"expected a limit matrix, got {limit_m.state.value}")
    alts = net.alternatives_cluster()
    if alts is None:
        raise SchemaError("network has no alternatives cluster to rank", path="clusters")
    goal = net.goal_cluster()
    col_node = goal.node_ids[0] if goal and goal.node_ids else limit_m.index[0]
    return _ranking_from_column(
        limit_m.column(col_node), alts.node_ids, limit_m.convergence
    )


@dataclass(frozen=True)
class NetworkSolution:
    """Everything one solve produces, from eigenvectors to the ranking."""

    eigenvectors: Mapping[str, PriorityVector]
    verdicts: Mapping[str, ConsistencyVerdict]
    cluster_weights: ClusterWeights
    unweighted: Supermatrix
    weighted: Supermatrix
    limit: Supermatrix
    ranking: RankingReport
    policy: ConsistencyPolicy
    strict: bool
    options: ConvergenceOptions

    def __post_init__(self):
        object.__setattr__(self, "eigenvectors", dict(self.eigenvectors))
        object.__setattr__(self, "verdicts", dict(self.verdicts))


def solve_network(
    net: DecisionNetwork,
    rci: Mapping[int, float] | None = None,
    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994,
    strict: bool = False,
    options: ConvergenceOptions = ConvergenceOptions(),
) -> NetworkSolution:
    """Full pipeline: screen judgments, assemble, weight, limit, rank.

    Non-strict mode records Warn/Fail verdicts and proceeds; strict mode
    raises ConsistencyRejection listing every failing slot. Structural
    problems surface as SchemaError before any math runs.
    """
    report = validate(net)
    if not report.ok:
        first = report.violations[0]
        raise SchemaError(
            f"model fails validation ({len(report.violations)} violation(s)): {first}",
            path=first.path,
        )
    policy = ConsistencyPolicy.parse(policy)
    eigenvectors, verdicts = compute_slot_eigenvectors(net, rci, policy)
    if strict:
        failures = tuple(
            (key, v.cr) for key, v in verdicts.items() if not v.acceptable
        )
        if failures:
            names = ", ".join(f"{key} (CR {cr:.3f})" for key, cr in failures)
            raise ConsistencyRejection(
                f"strict mode: consistency screen failed for {names}", failures=failures
            )
    cw = derive_cluster_weights(net, rci, policy, strict)
    unweighted = assemble_unweighted(net, eigenvectors)
    weighted = weight(unweighted, cw)
    limit_m = limit(weighted, options)
    ranking = rank(limit_m, net)
    return NetworkSolution(
        eigenvectors=eigenvectors,
        verdicts=verdicts,
        cluster_weights=cw,
        unweighted=unweighted,
        weighted=weighted,
        limit=limit_m,
        ranking=ranking,
        policy=policy,
        strict=strict,
        options=options,
    )


def solve_hierarchy(
    net: DecisionNetwork,
    rci: Mapping[int, float] | None = None,
    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994,
) -> RankingReport:
    """Classical hierarchical synthesis: weights compose top-down, no limit.

    Requires a goal and an acyclic cluster graph (no feedback, no loops).
    Node score = sum over incoming edges of (controller score x cluster share
    x priority under that controller). Alternative scores are the ranking.
    """
    goal = net.goal_cluster()
    if goal is None or not goal.node_ids:
        raise NotAHierarchy("hierarchical synthesis needs a goal cluster")
    cluster_ids = [c.id for c in net.clusters]
    succ: dict[str, set[str]] = {cid: set() for cid in cluster_ids}
    for edge in net.edges:
        src = net.cluster_of(edge.control_node).id
        if edge.dependent_cluster == src:
            raise NotAHierarchy(
                f"cluster {src!r} compares its own elements (self-loop)"
            )
        succ[src].add(edge.dependent_cluster)

    # Kahn's algorithm; leftover clusters mean a feedback cycle
    indeg = {cid: 0 for cid in cluster_ids}
    for src, targets in succ.items():
        for t in targets:
            indeg[t] += 1
    queue = [cid for cid in cluster_ids if indeg[cid] == 0]
    topo: list[str] = []
    while queue:
        cid = queue.pop(0)
        topo.append(cid)
        for t in sorted(succ[cid], key=cluster_ids.index):
            indeg[t] -= 1
            if indeg[t] == 0:
                queue.append(t)
    if len(topo) != len(cluster_ids):
        cyclic = sorted(set(cluster_ids) - set(topo))
        raise NotAHierarchy(f"feedback cycle through cluster(s) {cyclic}")

    missing = [s.key for s in required_judgments(net)]
    if missing:
        raise IncompleteModel(
            f"{len(missing)} judgment slot(s) still unrated: {', '.join(missing)}",
            missing=tuple(missing),
        )

    # per-node split across the clusters that node actually influences
    node_targets: dict[str, list[str]] = {}
    for edge in net.edges:
        node_targets.setdefault(edge.control_node, []).append(edge.dependent_cluster)
    explicit = net.cluster_weight_matrices

    scores: dict[str, float] = {nid: 0.0 for nid in net.node_order()}
    scores[goal.node_ids[0]] = 1.0
    by_cluster = {c.id: c for c in net.clusters}
    for cid in topo:
        for control in by_cluster[cid].node_ids:
            targets = node_targets.get(control, [])
            if not targets:
                continue
            shares: dict[str, float]
            matrix = explicit.get(cid)
            if matrix is not None and all(t in matrix.labels for t in targets):
                pv = principal_eigenvector(matrix, rci)
                by_label = dict(zip(matrix.labels, pv.weights))
                total = sum(by_label[t] for t in targets)
                shares = {t: by_label[t] / total for t in targets}
            else:
                shares = {t: 1.0 / len(targets) for t in targets}
            for tgt in targets:
                edge = net.find_edge(control, tgt)
                pv = principal_eigenvector(edge.matrix, rci)
                slot = slot_for_edge(net, edge)
                for element, w in zip(slot.elements, pv.weights):
                    scores[element] += scores[control] * shares[tgt] * w

    alts = net.alternatives_cluster()
    if alts is None:
        raise SchemaError("network has no alternatives cluster to rank", path="clusters")
    return _ranking_from_column(scores, alts.node_ids, None)


def whatif(
    net: DecisionNetwork,
    overrides: Sequence[tuple[str, tuple[str, str], object]],
    rci: Mapping[int, float] | None = None,
    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994,
    options: ConvergenceOptions = ConvergenceOptions(),
) -> WhatIfReport:
    """Rank with some judgments swapped out, against the unchanged baseline.

    Each override is (slot key, (row element, col element), scale value); the
    pair must be in the slot's stored upper-triangle orientation. The input
    network is never mutated. Delta is per-alternative limit weight change.
    """
    baseline = solve_network(net, rci=rci, policy=policy, options=options).ranking
    perturbed_net = net
    for slot_key, (a, b), raw in overrides:
        slot = find_slot(perturbed_net, slot_key)
        if (a, b) not in slot.pairs():
            raise SlotShapeMismatch(
                f"({a},{b}) is not an upper-triangle pair of slot {slot_key}"
            )
        edge = perturbed_net.find_edge(slot.control_node, slot.dependent_cluster)
        if edge.matrix is None:
            raise IncompleteModel(
                f"slot {slot_key} has no judgments to override", missing=(slot_key,)
            )
        value = SaatyJudgment.parse(raw).value
        perturbed_net = attach_judgments(
            perturbed_net, slot, edge.matrix.replaced(a, b, value)
        )
    perturbed = solve_network(
        perturbed_net, rci=rci, policy=policy, options=options
    ).ranking
    delta = {
        nid: perturbed.alternative_weights[nid] - baseline.alternative_weights[nid]
        for nid in baseline.alternative_weights
    }
    return WhatIfReport(baseline=baseline, perturbed=perturbed, delta=delta)
