"""Analytic Network Process decision engine.

Pairwise judgment matrices in, limit-supermatrix rankings out. The package
splits into judgment math (judgments), network topology (network), the
supermatrix pipeline (supermatrix), the document format (model_io), and two
front doors: a CLI (cli) and an HTTP service (service).
"""

__version__ = "0.1.0"

from .errors import (
    AnpError,
    ConsistencyRejection,
    ConvergenceFailure,
    DuplicateJudgment,
    IncompleteJudgments,
    IncompleteModel,
    IntegrityError,
    InvalidScaleValue,
    NotAHierarchy,
    SchemaError,
    SlotShapeMismatch,
    UnknownSlot,
    UnsupportedOrder,
    UnsupportedVersion,
)
from .judgments import (
    ComparisonMatrix,
    ConsistencyPolicy,
    ConsistencyVerdict,
    PriorityVector,
    SaatyJudgment,
    VerdictStatus,
    build_matrix,
    consistency_ratio,
    geometric_mean_vector,
    principal_eigenvector,
    rci_table,
    screen_consistency,
)
from .network import (
    Cluster,
    ClusterKind,
    DecisionNetwork,
    InfluenceEdge,
    JudgmentSlot,
    Node,
    ValidationReport,
    all_judgment_slots,
    attach_judgments,
    find_slot,
    required_judgments,
    validate,
)
from .supermatrix import (
    ClusterWeights,
    ConvergenceOptions,
    NetworkSolution,
    RankingReport,
    Supermatrix,
    SupermatrixState,
    WhatIfReport,
    assemble_unweighted,
    compute_slot_eigenvectors,
    derive_cluster_weights,
    limit,
    rank,
    solve_hierarchy,
    solve_network,
    weight,
    whatif,
)
from .model_io import (
    ModelDocument,
    ReportFormat,
    ResultDocument,
    SolveSettings,
    build_network,
    document_from_network,
    export_report,
    load,
    load_result,
    loads,
    loads_result,
    missing_pairs,
    model_digest,
    parse_document,
    parse_result,
    save,
    save_result,
    saves,
    saves_result,
    solve_document,
    verify_result,
    with_judgment,
)

__all__ = [
    "AnpError",
    "Cluster",
    "ClusterKind",
    "ClusterWeights",
    "ComparisonMatrix",
    "ConsistencyPolicy",
    "ConsistencyRejection",
    "ConsistencyVerdict",
    "ConvergenceFailure",
    "ConvergenceOptions",
    "DecisionNetwork",
    "DuplicateJudgment",
    "IncompleteJudgments",
    "IncompleteModel",
    "InfluenceEdge",
    "IntegrityError",
    "InvalidScaleValue",
    "JudgmentSlot",
    "ModelDocument",
    "NetworkSolution",
    "Node",
    "NotAHierarchy",
    "PriorityVector",
    "RankingReport",
    "ReportFormat",
    "ResultDocument",
    "SaatyJudgment",
    "SchemaError",
    "SlotShapeMismatch",
    "SolveSettings",
    "Supermatrix",
    "SupermatrixState",
    "UnknownSlot",
    "UnsupportedOrder",
    "UnsupportedVersion",
    "ValidationReport",
    "VerdictStatus",
    "WhatIfReport",
    "all_judgment_slots",
    "assemble_unweighted",
    "attach_judgments",
    "build_matrix",
    "build_network",
    "compute_slot_eigenvectors",
    "consistency_ratio",
    "derive_cluster_weights",
    "document_from_network",
    "export_report",
    "find_slot",
    "geometric_mean_vector",
    "limit",
    "load",
    "load_result",
    "loads",
    "loads_result",
    "missing_pairs",
    "model_digest",
    "parse_document",
    "parse_result",
    "principal_eigenvector",
    "rank",
    "rci_table",
    "required_judgments",
    "save",
    "save_result",
    "saves",
    "saves_result",
    "screen_consistency",
    "solve_document",
    "solve_hierarchy",
    "solve_network",
    "validate",
    "verify_result",
    "weight",
    "whatif",
    "with_judgment",
    "__version__",
]
