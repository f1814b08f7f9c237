"""Model documents (.anp.json), result documents, digests, and reports.

The on-disk format is JSON, format_version 1. Judgments are stored as
upper-triangle ratio strings only ("3", "1/7"): reciprocals are derived,
never stored, so the two directions of a pair cannot drift apart.
Serialization is canonical: same document, same bytes, every time.
"""

import csv
import enum
import hashlib
import io
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Mapping

from . import __version__ as ENGINE_VERSION
from .errors import (
    IntegrityError,
    InvalidScaleValue,
    SchemaError,
    UnknownSlot,
    UnsupportedVersion,
)
from .judgments import (
    ComparisonMatrix,
    ConsistencyPolicy,
    SaatyJudgment,
    build_matrix,
    format_ratio,
    parse_ratio,
    rci_table,
)
from .network import (
    Cluster,
    ClusterKind,
    DecisionNetwork,
    ID_PATTERN,
    InfluenceEdge,
    Node,
    all_judgment_slots,
    attach_judgments,
    find_slot,
)
from .supermatrix import ConvergenceOptions, NetworkSolution

FORMAT_VERSION = 1
DIGEST_PREFIX = "sha256:"

PairMap = Mapping[tuple[str, str], Fraction]


def pair_key(a: str, b: str) -> str:
    return f"{a},{b}"


@dataclass(frozen=True)
class SolveSettings:
    """Per-document solve options; CLI flags and API parameters override them."""

    policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994
    strict: bool = False
    tolerance: float = 1e-10
    max_power: int = 2**20
    rci_overrides: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "policy", ConsistencyPolicy.parse(self.policy))
        object.__setattr__(
            self,
            "rci_overrides",
            {int(k): float(v) for k, v in dict(self.rci_overrides).items()},
        )

    def merged(
        self,
        policy=None,
        strict: bool | None = None,
        tolerance: float | None = None,
        max_power: int | None = None,
    ) -> "SolveSettings":
        return SolveSettings(
            policy=self.policy if policy is None else ConsistencyPolicy.parse(policy),
            strict=self.strict if strict is None else bool(strict),
            tolerance=self.tolerance if tolerance is None else float(tolerance),
            max_power=self.max_power if max_power is None else int(max_power),
            rci_overrides=self.rci_overrides,
        )

    def rci(self) -> Mapping[int, float]:
        return rci_table(self.rci_overrides)

    def convergence_options(self) -> ConvergenceOptions:
        return ConvergenceOptions(tolerance=self.tolerance, max_power=self.max_power)


@dataclass(frozen=True)
class ModelDocument:
    """Topology plus (possibly partial) judgments plus options and metadata.

    The embedded network carries no slot matrices; judgments live in the
    upper-triangle maps and are compiled to matrices by build_network.
    """

    network: DecisionNetwork
    judgments: Mapping[str, PairMap]
    options: SolveSettings = SolveSettings()
    metadata: Mapping[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        object.__setattr__(
            self,
            "judgments",
            {
                key: {tuple(p): Fraction(v) for p, v in dict(pairs).items()}
                for key, pairs in dict(self.judgments).items()
            },
        )
        object.__setattr__(self, "metadata", dict(self.metadata))


# --------------------------------------------------------------------------
# parsing


def _dup_guard(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise SchemaError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _expect(obj, kind, path, what):
    if not isinstance(obj, kind):
        names = {dict: "object", list: "array", str: "string", bool: "boolean"}
        want = names.get(kind, getattr(kind, "__name__", str(kind)))
        raise SchemaError(f"expected {what} to be a JSON {want}", path=path)
    return obj


def _expect_id(raw, path) -> str:
    s = _expect(raw, str, path, "identifier")
    if not ID_PATTERN.match(s):
        raise SchemaError(
            f"identifier {s!r} must match {ID_PATTERN.pattern}", path=path
        )
    return s


def _parse_pairs(raw, elements: tuple[str, ...], path: str) -> dict[tuple[str, str], Fraction]:
    """Upper-triangle pair map keyed 'A,B' in element order."""
    raw = _expect(raw, dict, path, "judgment map")
    index = {e: i for i, e in enumerate(elements)}
    out: dict[tuple[str, str], Fraction] = {}
    for key, value in raw.items():
        ppath = f"{path}.{key}"
        parts = key.split(",")
        if len(parts) != 2 or not all(parts):
            raise SchemaError(f"pair key {key!r} must look like 'A,B'", path=ppath)
        a, b = parts
        if a not in index or b not in index:
            raise SchemaError(
                f"pair {key!r} names an element outside {list(elements)}", path=ppath
            )
        if a == b:
            raise SchemaError("diagonal judgments are fixed at 1", path=ppath)
        if index[a] > index[b]:
            raise SchemaError(
                f"reciprocal stored: keep the upper triangle and write '{b},{a}'",
                path=ppath,
            )
        try:
            ratio = parse_ratio(_expect(value, str, ppath, "judgment value"))
        except InvalidScaleValue as exc:
            raise SchemaError(str(exc), path=ppath) from exc
        out[(a, b)] = ratio
    return out


def parse_document(obj: Any, path: str = "$") -> ModelDocument:
    """Validate a parsed JSON object into a ModelDocument.

    Referential problems that make the document unreadable (unknown ids,
    reversed pairs, bad values) raise SchemaError with a JSON path. Semantic
    network problems (missing alternatives, unreachable clusters) are left
    to network.validate so they can be reported all at once.
    """
    obj = _expect(obj, dict, path, "document")

    version = obj.get("format_version")
    if version is None:
        raise SchemaError("format_version is required", path=f"{path}.format_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise SchemaError(
            "format_version must be an integer", path=f"{path}.format_version"
        )
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"format_version {version} is not supported (this engine reads {FORMAT_VERSION})"
        )

    metadata = obj.get("metadata", {})
    _expect(metadata, dict, f"{path}.metadata", "metadata")

    opt_raw = _expect(obj.get("options", {}), dict, f"{path}.options", "options")
    opath = f"{path}.options"
    try:
        policy = ConsistencyPolicy.parse(opt_raw.get("policy", "saaty1994"))
    except ValueError as exc:
        raise SchemaError(str(exc), path=f"{opath}.policy") from exc
    strict = opt_raw.get("strict", False)
    _expect(strict, bool, f"{opath}.strict", "strict")
    tolerance = opt_raw.get("tolerance", 1e-10)
    if not isinstance(tolerance, (int, float)) or isinstance(tolerance, bool) or tolerance <= 0:
        raise SchemaError("tolerance must be a positive number", path=f"{opath}.tolerance")
    max_power = opt_raw.get("max_power", 2**20)
    if not isinstance(max_power, int) or isinstance(max_power, bool) or max_power < 2:
        raise SchemaError("max_power must be an integer >= 2", path=f"{opath}.max_power")
    rci_raw = _expect(opt_raw.get("rci_overrides", {}), dict, f"{opath}.rci_overrides", "rci_overrides")
    rci_overrides: dict[int, float] = {}
    for k, v in rci_raw.items():
        kpath = f"{opath}.rci_overrides.{k}"
        try:
            order = int(k)
        except ValueError:
            raise SchemaError(f"order key {k!r} must be an integer", path=kpath) from None
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0:
            raise SchemaError("random index must be a nonnegative number", path=kpath)
        rci_overrides[order] = float(v)
    try:
        options = SolveSettings(
            policy=policy, strict=strict, tolerance=float(tolerance),
            max_power=max_power, rci_overrides=rci_overrides,
        )
        options.rci()  # validates override orders
    except Exception as exc:
        raise SchemaError(str(exc), path=opath) from exc

    net_raw = obj.get("network")
    npath = f"{path}.network"
    net_raw = _expect(net_raw, dict, npath, "network")

    clusters: list[Cluster] = []
    nodes: list[Node] = []
    cluster_ids: set[str] = set()
    node_ids: set[str] = set()
    raw_clusters = _expect(net_raw.get("clusters"), list, f"{npath}.clusters", "clusters")
    if not raw_clusters:
        raise SchemaError("at least one cluster is required", path=f"{npath}.clusters")
    for ci, rc in enumerate(raw_clusters):
        cpath = f"{npath}.clusters[{ci}]"
        rc = _expect(rc, dict, cpath, "cluster")
        cid = _expect_id(rc.get("id"), f"{cpath}.id")
        if cid in cluster_ids:
            raise SchemaError(f"duplicate cluster id {cid!r}", path=f"{cpath}.id")
        cluster_ids.add(cid)
        label = _expect(rc.get("label", cid), str, f"{cpath}.label", "label")
        try:
            kind = ClusterKind.parse(rc.get("kind", "other"))
        except ValueError as exc:
            raise SchemaError(str(exc), path=f"{cpath}.kind") from exc
        raw_nodes = _expect(rc.get("nodes", []), list, f"{cpath}.nodes", "nodes")
        members: list[str] = []
        for ni, rn in enumerate(raw_nodes):
            npth = f"{cpath}.nodes[{ni}]"
            rn = _expect(rn, dict, npth, "node")
            nid = _expect_id(rn.get("id"), f"{npth}.id")
            if nid in node_ids or nid in cluster_ids:
                raise SchemaError(f"duplicate or ambiguous node id {nid!r}", path=f"{npth}.id")
            node_ids.add(nid)
            nlabel = _expect(rn.get("label", nid), str, f"{npth}.label", "label")
            nodes.append(Node(nid, nlabel, cid))
            members.append(nid)
        clusters.append(Cluster(cid, label, kind, tuple(members)))

    edges: list[InfluenceEdge] = []
    seen_edges: set[tuple[str, str]] = set()
    raw_edges = _expect(net_raw.get("edges", []), list, f"{npath}.edges", "edges")
    for ei, re_ in enumerate(raw_edges):
        epath = f"{npath}.edges[{ei}]"
        re_ = _expect(re_, dict, epath, "edge")
        control = _expect(re_.get("control"), str, f"{epath}.control", "control")
        cluster = _expect(re_.get("cluster"), str, f"{epath}.cluster", "cluster")
        if control not in node_ids:
            raise SchemaError(f"unknown control node {control!r}", path=f"{epath}.control")
        if cluster not in cluster_ids:
            raise SchemaError(f"unknown cluster {cluster!r}", path=f"{epath}.cluster")
        if (control, cluster) in seen_edges:
            raise SchemaError(f"duplicate edge {control}->{cluster}", path=epath)
        seen_edges.add((control, cluster))
        edges.append(InfluenceEdge(control, cluster))

    cluster_matrices: dict[str, ComparisonMatrix] = {}
    raw_cw = _expect(
        net_raw.get("cluster_comparisons", {}), dict, f"{npath}.cluster_comparisons", "cluster_comparisons"
    )
    for src, entry in raw_cw.items():
        wpath = f"{npath}.cluster_comparisons.{src}"
        if src not in cluster_ids:
            raise SchemaError(f"unknown source cluster {src!r}", path=wpath)
        entry = _expect(entry, dict, wpath, "cluster comparison")
        labels_raw = _expect(entry.get("labels"), list, f"{wpath}.labels", "labels")
        labels: list[str] = []
        for li, lraw in enumerate(labels_raw):
            lbl = _expect(lraw, str, f"{wpath}.labels[{li}]", "label")
            if lbl not in cluster_ids:
                raise SchemaError(f"unknown cluster {lbl!r}", path=f"{wpath}.labels[{li}]")
            if lbl in labels:
                raise SchemaError(f"duplicate label {lbl!r}", path=f"{wpath}.labels[{li}]")
            labels.append(lbl)
        pairs = _parse_pairs(entry.get("judgments", {}), tuple(labels), f"{wpath}.judgments")
        index = {e: i for i, e in enumerate(labels)}
        try:
            cluster_matrices[src] = build_matrix(
                len(labels),
                [(index[a], index[b], v) for (a, b), v in pairs.items()],
                labels=tuple(labels),
                relaxed=True,
            )
        except Exception as exc:
            raise SchemaError(f"cluster comparison unusable: {exc}", path=wpath) from exc

    network = DecisionNetwork(
        clusters=tuple(clusters),
        nodes=tuple(nodes),
        edges=tuple(edges),
        cluster_weight_matrices=cluster_matrices,
    )

    judgments: dict[str, dict[tuple[str, str], Fraction]] = {}
    raw_judgments = _expect(obj.get("judgments", {}), dict, f"{path}.judgments", "judgments")
    slots = {s.key: s for s in all_judgment_slots(network)}
    for key, pairs_raw in raw_judgments.items():
        jpath = f"{path}.judgments.{key}"
        slot = slots.get(key)
        if slot is None:
            raise SchemaError(
                f"judgments for unknown slot {key!r} (declared edges: {sorted(slots)})",
                path=jpath,
            )
        judgments[key] = _parse_pairs(pairs_raw, slot.elements, jpath)

    return ModelDocument(
        network=network,
        judgments=judgments,
        options=options,
        metadata=metadata,
        format_version=version,
    )


def loads(data: "bytes | str") -> ModelDocument:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data, object_pairs_hook=_dup_guard)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from exc
    return parse_document(obj)


def load(path: str) -> ModelDocument:
    with open(path, "rb") as fh:
        return loads(fh.read())


# --------------------------------------------------------------------------
# serialization


def _canon(value: Any, path: str = "$.metadata") -> Any:
    if isinstance(value, dict):
        return {str(k): _canon(v, f"{path}.{k}") for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_canon(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    raise SchemaError(f"value of type {type(value).__name__} is not JSON data", path=path)


def _matrix_judgments(m: ComparisonMatrix) -> dict[str, str]:
    return {
        pair_key(m.labels[i], m.labels[j]): format_ratio(v)
        for i, j, v in m.upper_triangle()
    }


def document_to_object(doc: ModelDocument) -> dict:
    net = doc.network
    labels = {n.id: n.label for n in net.nodes}
    clusters = [
        {
            "id": c.id,
            "label": c.label,
            "kind": c.kind.value,
            "nodes": [{"id": nid, "label": labels[nid]} for nid in c.node_ids],
        }
        for c in net.clusters
    ]
    edges = [
        {"control": e.control_node, "cluster": e.dependent_cluster} for e in net.edges
    ]
    cluster_comparisons = {}
    for c in net.clusters:
        m = net.cluster_weight_matrices.get(c.id)
        if m is not None:
            cluster_comparisons[c.id] = {
                "labels": list(m.labels),
                "judgments": _matrix_judgments(m),
            }
    judgments: dict[str, dict[str, str]] = {}
    for slot in all_judgment_slots(net):
        stored = doc.judgments.get(slot.key, {})
        if not stored:
            continue
        judgments[slot.key] = {
            pair_key(a, b): format_ratio(stored[(a, b)])
            for (a, b) in slot.pairs()
            if (a, b) in stored
        }
    return {
        "format_version": doc.format_version,
        "metadata": _canon(doc.metadata),
        "options": {
            "policy": doc.options.policy.value,
            "strict": doc.options.strict,
            "tolerance": doc.options.tolerance,
            "max_power": doc.options.max_power,
            "rci_overrides": {
                str(k): doc.options.rci_overrides[k]
                for k in sorted(doc.options.rci_overrides)
            },
        },
        "network": {
            "clusters": clusters,
            "edges": edges,
            "cluster_comparisons": cluster_comparisons,
        },
        "judgments": judgments,
    }


def _dump(obj: dict) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=True) + "\n").encode("utf-8")


def saves(doc: ModelDocument) -> bytes:
    """Canonical bytes: fixed key order, rationals as strings, LF, trailing newline."""
    return _dump(document_to_object(doc))


def save(doc: ModelDocument, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(saves(doc))


def model_digest(doc: ModelDocument) -> str:
    """SHA-256 over the canonical serialization, prefixed with the algorithm name."""
    return DIGEST_PREFIX + hashlib.sha256(saves(doc)).hexdigest()


# --------------------------------------------------------------------------
# document operations


def document_from_network(
    net: DecisionNetwork,
    options: SolveSettings = SolveSettings(),
    metadata: Mapping[str, Any] | None = None,
) -> ModelDocument:
    """Strip attached matrices into judgment maps; topology stays in the network."""
    judgments: dict[str, dict[tuple[str, str], Fraction]] = {}
    bare_edges = []
    for e in net.edges:
        bare_edges.append(InfluenceEdge(e.control_node, e.dependent_cluster))
        if e.matrix is not None:
            key = f"{e.control_node}:{e.dependent_cluster}"
            judgments[key] = {
                (e.matrix.labels[i], e.matrix.labels[j]): v
                for i, j, v in e.matrix.upper_triangle()
            }
    bare = DecisionNetwork(
        clusters=net.clusters,
        nodes=net.nodes,
        edges=tuple(bare_edges),
        cluster_weight_matrices=net.cluster_weight_matrices,
        metadata={},
    )
    return ModelDocument(
        network=bare,
        judgments=judgments,
        options=options,
        metadata=dict(metadata or {}),
    )


def missing_pairs(doc: ModelDocument) -> dict[str, list[str]]:
    """Unanswered pair keys per slot, for slots that are not complete yet."""
    out: dict[str, list[str]] = {}
    for slot in all_judgment_slots(doc.network):
        stored = doc.judgments.get(slot.key, {})
        missing = [pair_key(a, b) for (a, b) in slot.pairs() if (a, b) not in stored]
        if missing:
            out[slot.key] = missing
    return out


def build_network(doc: ModelDocument) -> DecisionNetwork:
    """Compile complete judgment slots into attached matrices.

    Incomplete slots stay unfilled; solving such a network raises
    IncompleteModel with the missing slot keys.
    """
    net = doc.network
    for slot in all_judgment_slots(net):
        stored = doc.judgments.get(slot.key, {})
        wanted = slot.pairs()
        if all(p in stored for p in wanted):
            index = {e: i for i, e in enumerate(slot.elements)}
            matrix = build_matrix(
                slot.order,
                [(index[a], index[b], stored[(a, b)]) for (a, b) in wanted],
                labels=slot.elements,
                relaxed=True,
            )
            net = attach_judgments(net, slot, matrix)
    return net


def resolve_pair(doc: ModelDocument, slot_key: str, raw_pair: str) -> tuple[str, str]:
    """Check a 'A,B' pair against the slot's stored orientation."""
    slot = find_slot(doc.network, slot_key)
    parts = raw_pair.split(",")
    if len(parts) != 2:
        raise UnknownSlot(f"pair {raw_pair!r} must look like 'A,B'")
    a, b = parts
    if (a, b) in slot.pairs():
        return (a, b)
    if (b, a) in slot.pairs():
        raise UnknownSlot(
            f"pair {raw_pair!r} is stored in the opposite orientation; use {pair_key(b, a)!r}"
        )
    raise UnknownSlot(f"slot {slot_key} has no pair {raw_pair!r}")


def with_judgment(
    doc: ModelDocument, slot_key: str, raw_pair: str, value, on_scale: bool = True
) -> ModelDocument:
    """New document with one judgment set. The pair must use stored orientation."""
    a, b = resolve_pair(doc, slot_key, raw_pair)
    ratio = SaatyJudgment.parse(value).value if on_scale else parse_ratio(value)
    judgments = {k: dict(v) for k, v in doc.judgments.items()}
    judgments.setdefault(slot_key, {})[(a, b)] = ratio
    return replace(doc, judgments=judgments)


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class ResultDocument:
    """Solve output: per-slot figures, matrices, ranking, provenance digest."""

    engine_version: str
    model_digest: str
    options: SolveSettings
    nodes: Mapping[str, str]
    slots: Mapping[str, Any]
    cluster_weights: Mapping[str, Mapping[str, float]]
    matrices: Mapping[str, Any]
    ranking: Mapping[str, Any]

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "slots", dict(self.slots))
        object.__setattr__(
            self, "cluster_weights", {k: dict(v) for k, v in dict(self.cluster_weights).items()}
        )
        object.__setattr__(self, "matrices", dict(self.matrices))
        object.__setattr__(self, "ranking", dict(self.ranking))


def make_result(doc: ModelDocument, solution: NetworkSolution) -> ResultDocument:
    net = doc.network
    slots: dict[str, Any] = {}
    for slot in all_judgment_slots(net):
        pv = solution.eigenvectors[slot.key]
        verdict = solution.verdicts[slot.key]
        slots[slot.key] = {
            "elements": list(slot.elements),
            "weights": [float(w) for w in pv.weights],
            "lambda_max": pv.lambda_max,
            "ci": pv.ci,
            "cr": pv.cr,
            "verdict": verdict.status.value,
            "threshold": verdict.threshold,
        }
    matrices = {
        name: {
            "index": list(sm.index),
            "rows": [[float(x) for x in row] for row in sm.entries],
        }
        for name, sm in (
            ("unweighted", solution.unweighted),
            ("weighted", solution.weighted),
            ("limit", solution.limit),
        )
    }
    conv = solution.limit.convergence
    ranking = {
        "alternatives": {k: float(v) for k, v in solution.ranking.alternative_weights.items()},
        "order": list(solution.ranking.order),
        "renormalized": {k: float(v) for k, v in solution.ranking.renormalized.items()},
        "raw_limit_column": {k: float(v) for k, v in solution.ranking.raw_limit_column.items()},
        "convergence": {
            "iterations": conv.iterations,
            "residual": conv.residual,
            "cesaro_used": conv.cesaro_used,
            "column_spread": conv.column_spread,
        },
    }
    effective = SolveSettings(
        policy=solution.policy,
        strict=solution.strict,
        tolerance=solution.options.tolerance,
        max_power=solution.options.max_power,
        rci_overrides=doc.options.rci_overrides,
    )
    return ResultDocument(
        engine_version=ENGINE_VERSION,
        model_digest=model_digest(doc),
        options=effective,
        nodes={n.id: n.label for n in net.nodes},
        slots=slots,
        cluster_weights={k: dict(v) for k, v in solution.cluster_weights.weights.items()},
        matrices=matrices,
        ranking=ranking,
    )


def solve_document(
    doc: ModelDocument,
    policy=None,
    strict: bool | None = None,
    tolerance: float | None = None,
    max_power: int | None = None,
) -> ResultDocument:
    """Run the full pipeline with the document's options plus any overrides."""
    from .supermatrix import solve_network  # local import keeps module order simple

    settings = doc.options.merged(
        policy=policy, strict=strict, tolerance=tolerance, max_power=max_power
    )
    net = build_network(doc)
    solution = solve_network(
        net,
        rci=settings.rci(),
        policy=settings.policy,
        strict=settings.strict,
        options=settings.convergence_options(),
    )
    result = make_result(doc, solution)
    return replace(result, options=settings)


def result_to_object(res: ResultDocument) -> dict:
    return {
        "engine_version": res.engine_version,
        "model_digest": res.model_digest,
        "options": {
            "policy": res.options.policy.value,
            "strict": res.options.strict,
            "tolerance": res.options.tolerance,
            "max_power": res.options.max_power,
            "rci_overrides": {
                str(k): res.options.rci_overrides[k]
                for k in sorted(res.options.rci_overrides)
            },
        },
        "nodes": dict(res.nodes),
        "slots": {k: res.slots[k] for k in res.slots},
        "cluster_weights": {k: dict(v) for k, v in res.cluster_weights.items()},
        "matrices": res.matrices,
        "ranking": res.ranking,
    }


def parse_result(obj: Any, path: str = "$") -> ResultDocument:
    obj = _expect(obj, dict, path, "result document")
    for key in ("engine_version", "model_digest", "options", "nodes", "slots",
                "cluster_weights", "matrices", "ranking"):
        if key not in obj:
            raise SchemaError(f"result is missing {key!r}", path=f"{path}.{key}")
    opt = _expect(obj["options"], dict, f"{path}.options", "options")
    try:
        options = SolveSettings(
            policy=opt.get("policy", "saaty1994"),
            strict=bool(opt.get("strict", False)),
            tolerance=float(opt.get("tolerance", 1e-10)),
            max_power=int(opt.get("max_power", 2**20)),
            rci_overrides=opt.get("rci_overrides", {}),
        )
    except Exception as exc:
        raise SchemaError(str(exc), path=f"{path}.options") from exc
    return ResultDocument(
        engine_version=_expect(obj["engine_version"], str, f"{path}.engine_version", "engine_version"),
        model_digest=_expect(obj["model_digest"], str, f"{path}.model_digest", "model_digest"),
        options=options,
        nodes=_expect(obj["nodes"], dict, f"{path}.nodes", "nodes"),
        slots=_expect(obj["slots"], dict, f"{path}.slots", "slots"),
        cluster_weights=_expect(obj["cluster_weights"], dict, f"{path}.cluster_weights", "cluster_weights"),
        matrices=_expect(obj["matrices"], dict, f"{path}.matrices", "matrices"),
        ranking=_expect(obj["ranking"], dict, f"{path}.ranking", "ranking"),
    )


def saves_result(res: ResultDocument) -> bytes:
    return _dump(result_to_object(res))


def loads_result(data: "bytes | str") -> ResultDocument:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data, object_pairs_hook=_dup_guard)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from exc
    return parse_result(obj)


def save_result(res: ResultDocument, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(saves_result(res))


def load_result(path: str) -> ResultDocument:
    with open(path, "rb") as fh:
        return loads_result(fh.read())


def verify_result(res: ResultDocument, doc: ModelDocument) -> None:
    """Tamper check: the result must reference exactly this model's digest."""
    expected = model_digest(doc)
    if res.model_digest != expected:
        raise IntegrityError(
            "result does not match model: "
            f"result carries {res.model_digest}, model hashes to {expected}"
        )


# --------------------------------------------------------------------------
# reports


class ReportFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    MARKDOWN = "markdown"

    @classmethod
    def parse(cls, raw: "str | ReportFormat") -> "ReportFormat":
        if isinstance(raw, cls):
            return raw
        try:
            return cls(str(raw).lower())
        except ValueError:
            raise ValueError(
                f"unknown report format {raw!r}; expected one of {[f.value for f in cls]}"
            ) from None


def _markdown_report(res: ResultDocument) -> str:
    lines: list[str] = []
    lines.append("# Decision result")
    lines.append("")
    lines.append(f"Engine {res.engine_version}, model `{res.model_digest}`.")
    lines.append("")
    lines.append("## Ranking")
    lines.append("")
    lines.append("| Rank | Alternative | Limit weight | Normalized |")
    lines.append("| --- | --- | --- | --- |")
    ranking = res.ranking
    for position, nid in enumerate(ranking["order"], start=1):
        label = res.nodes.get(nid, nid)
        lines.append(
            f"| {position} | {label} | {ranking['alternatives'][nid]:.4f} "
            f"| {ranking['renormalized'][nid]:.4f} |"
        )
    lines.append("")
    lines.append("## Consistency")
    lines.append("")
    lines.append("| Slot | CR | Threshold | Verdict |")
    lines.append("| --- | --- | --- | --- |")
    for key, slot in res.slots.items():
        lines.append(
            f"| {key} | {slot['cr']:.4f} | {slot['threshold']:.2f} | {slot['verdict']} |"
        )
    lines.append("")
    return "\n".join(lines)


def _csv_report(res: ResultDocument) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for key, slot in res.slots.items():
        w.writerow(["section", key])
        w.writerow(["lambda_max", f"{slot['lambda_max']:.6f}"])
        w.writerow(["ci", f"{slot['ci']:.6f}"])
        w.writerow(["cr", f"{slot['cr']:.6f}"])
        w.writerow(["verdict", slot["verdict"]])
        w.writerow(["element", "weight"])
        for element, wt in zip(slot["elements"], slot["weights"]):
            w.writerow([element, f"{wt:.6f}"])
        w.writerow([])
    for name in ("unweighted", "weighted", "limit"):
        matrix = res.matrices[name]
        w.writerow(["section", name])
        w.writerow([""] + list(matrix["index"]))
        for nid, row in zip(matrix["index"], matrix["rows"]):
            w.writerow([nid] + [f"{x:.6f}" for x in row])
        w.writerow([])
    w.writerow(["section", "ranking"])
    w.writerow(["rank", "id", "label", "limit_weight", "normalized"])
    ranking = res.ranking
    for position, nid in enumerate(ranking["order"], start=1):
        w.writerow(
            [
                position,
                nid,
                res.nodes.get(nid, nid),
                f"{ranking['alternatives'][nid]:.6f}",
                f"{ranking['renormalized'][nid]:.6f}",
            ]
        )
    return buf.getvalue()


def export_report(res: ResultDocument, fmt: "str | ReportFormat") -> bytes:
    """Render a result: lossless json, sectioned csv, or a ranking table in markdown."""
    fmt = ReportFormat.parse(fmt)
    if fmt is ReportFormat.JSON:
        return saves_result(res)
    if fmt is ReportFormat.CSV:
        return _csv_report(res).encode("utf-8")
    return _markdown_report(res).encode("utf-8")
