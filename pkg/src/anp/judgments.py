"""Pairwise judgment math.

The 1-9 comparison scale, reciprocal judgment matrices built from
upper-triangle input, principal eigenvectors by power iteration, and
consistency screening against a random-index table.

Matrix entries are exact rationals (fractions.Fraction); floating point
enters only when an eigenvector is computed.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    ConvergenceFailure,
    DuplicateJudgment,
    IncompleteJudgments,
    InvalidScaleValue,
    UnsupportedOrder,
)

RatioLike = Union[Fraction, int, float, str]

# Fundamental scale: 1..9 and reciprocals. 17 admissible positions.
SAATY_SCALE: tuple[Fraction, ...] = tuple(
    sorted({Fraction(k) for k in range(1, 10)} | {Fraction(1, k) for k in range(1, 10)})
)

# Random consistency index per matrix order (order 1 and 2 are always consistent).
DEFAULT_RCI: Mapping[int, float] = {
    1: 0.0,
    2: 0.0,
    3: 0.58,
    4: 0.90,
    5: 1.12,
    6: 1.24,
    7: 1.32,
    8: 1.41,
    9: 1.45,
    10: 1.49,
}

MAX_ORDER = max(DEFAULT_RCI)

# Reciprocity slack when validating prebuilt entry grids. Entries built through
# build_matrix are exact by construction; this only matters for hand-supplied rows.
RECIPROCITY_TOL = 1e-12


def parse_ratio(value: RatioLike) -> Fraction:
    """Convert a judgment input to an exact positive ratio.

    Accepts Fraction, int, "3", "1/3", or a float. Floats are snapped to the
    nearest small-denominator rational so UI-sourced 0.3333... round-trips to 1/3.
    """
    try:
        if isinstance(value, Fraction):
            ratio = value
        elif isinstance(value, int):
            ratio = Fraction(value)
        elif isinstance(value, str):
            ratio = Fraction(value.strip())
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(value)
            ratio = Fraction(value).limit_denominator(1_000_000)
        else:
            raise TypeError(type(value))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidScaleValue(f"not a ratio: {value!r}") from exc
    if ratio <= 0:
        raise InvalidScaleValue(f"judgment must be positive, got {value!r}")
    return ratio


def format_ratio(value: Fraction) -> str:
    """Canonical text form: '3' for integers, '1/3' otherwise."""
    return str(value)


@dataclass(frozen=True)
class SaatyJudgment:
    """A single pairwise judgment restricted to the fundamental scale."""

    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", parse_ratio(self.value))
        if self.value not in SAATY_SCALE:
            raise InvalidScaleValue(
                f"{format_ratio(self.value)} is not on the 1-9 scale "
                "(integers 1..9 or their reciprocals)"
            )

    @classmethod
    def parse(cls, raw: RatioLike) -> "SaatyJudgment":
        return cls(parse_ratio(raw))

    def reciprocal(self) -> "SaatyJudgment":
        return SaatyJudgment(1 / self.value)

    def __str__(self) -> str:
        return format_ratio(self.value)


@dataclass(frozen=True)
class ComparisonMatrix:
    """Square positive reciprocal matrix with labeled axes.

    Entries are exact rationals; the float view is materialized on demand.
    """

    labels: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))
        n = len(self.labels)
        if n < 1:
            raise UnsupportedOrder("matrix needs at least one element")
        if n > MAX_ORDER:
            raise UnsupportedOrder(
                f"order {n} exceeds the supported maximum of {MAX_ORDER}"
            )
        if len(set(self.labels)) != n:
            raise ValueError(f"duplicate labels: {self.labels}")
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError("entry grid is not square or does not match labels")
        for i in range(n):
            if self.entries[i][i] != 1:
                raise ValueError(f"diagonal entry ({i},{i}) must be 1")
            for j in range(n):
                a = self.entries[i][j]
                if a <= 0:
                    raise ValueError(f"entry ({i},{j}) must be positive")
                if i < j:
                    b = self.entries[j][i]
                    if abs(float(a * b) - 1.0) > RECIPROCITY_TOL:
                        raise ValueError(
                            f"entries ({i},{j}) and ({j},{i}) are not reciprocal"
                        )

    @property
    def order(self) -> int:
        return len(self.labels)

    def value(self, row: str, col: str) -> Fraction:
        return self.entries[self.labels.index(row)][self.labels.index(col)]

    def as_array(self) -> np.ndarray:
        return np.array([[float(a) for a in row] for row in self.entries], dtype=float)

    def upper_triangle(self) -> Iterable[tuple[int, int, Fraction]]:
        n = self.order
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j, self.entries[i][j]

    def replaced(self, row: str, col: str, value: RatioLike) -> "ComparisonMatrix":
        """New matrix with one off-diagonal judgment (and its mirror) changed."""
        i, j = self.labels.index(row), self.labels.index(col)
        if i == j:
            raise ValueError("cannot replace a diagonal entry")
        ratio = parse_ratio(value)
        grid = [list(r) for r in self.entries]
        grid[i][j] = ratio
        grid[j][i] = 1 / ratio
        return ComparisonMatrix(self.labels, tuple(tuple(r) for r in grid))

    @classmethod
    def from_rows(
        cls, labels: Sequence[str], rows: Sequence[Sequence[RatioLike]]
    ) -> "ComparisonMatrix":
        grid = tuple(tuple(parse_ratio(v) for v in row) for row in rows)
        return cls(tuple(labels), grid)


def build_matrix(
    order: int,
    pairs: Iterable[tuple[int, int, RatioLike]],
    labels: Sequence[str] | None = None,
    relaxed: bool = False,
) -> ComparisonMatrix:
    """Assemble a reciprocal matrix from upper-triangle judgments.

    Each pair is (i, j, value) with i < j; the mirror entry is derived, never
    supplied. Values must sit on the 1-9 scale unless relaxed is set, in which
    case any positive rational (e.g. a geometric-mean aggregate) is allowed.
    """
    if order < 1 or order > MAX_ORDER:
        raise UnsupportedOrder(f"order must be 1..{MAX_ORDER}, got {order}")
    if labels is None:
        labels = tuple(f"E{k + 1}" for k in range(order))
    labels = tuple(labels)
    if len(labels) != order:
        raise ValueError(f"expected {order} labels, got {len(labels)}")

    grid: list[list[Fraction | None]] = [
        [Fraction(1) if i == j else None for j in range(order)] for i in range(order)
    ]
    for i, j, raw in pairs:
        if not (0 <= i < j < order):
            raise ValueError(f"pair ({i},{j}) is not upper-triangle for order {order}")
        if grid[i][j] is not None:
            raise DuplicateJudgment(f"pair ({labels[i]},{labels[j]}) supplied twice")
        if relaxed:
            ratio = parse_ratio(raw)
        else:
            ratio = SaatyJudgment.parse(raw).value
        grid[i][j] = ratio
        grid[j][i] = 1 / ratio

    missing = [
        (labels[i], labels[j])
        for i in range(order)
        for j in range(i + 1, order)
        if grid[i][j] is None
    ]
    if missing:
        raise IncompleteJudgments(f"missing pairs: {missing}")
    return ComparisonMatrix(labels, tuple(tuple(row) for row in grid))  # type: ignore[arg-type]


@dataclass(frozen=True)
class PriorityVector:
    """Principal eigenvector of a judgment matrix plus its consistency figures."""

    weights: tuple[float, ...]
    lambda_max: float
    ci: float
    cr: float
    iterations: int

    @property
    def order(self) -> int:
        return len(self.weights)


def principal_eigenvector(
    matrix: ComparisonMatrix,
    rci: Mapping[int, float] | None = None,
    tolerance: float = 1e-12,
    max_iterations: int = 10_000,
) -> PriorityVector:
    """Perron eigenvector by power iteration, normalized to sum 1.

    Starts from the uniform vector; a positive matrix makes the principal
    eigenvalue dominant, so convergence is geometric. lambda_max is recovered
    as sum(A @ w) once w sums to one.
    """
    a = matrix.as_array()
    n = matrix.order
    w = np.full(n, 1.0 / n)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - w)) <= tolerance:
            w = nxt
            break
        w = nxt
    else:
        raise ConvergenceFailure(
            f"power iteration did not converge in {max_iterations} iterations"
        )
    lambda_max = float((a @ w).sum())
    ci, cr = consistency_ratio(lambda_max, n, rci)
    return PriorityVector(
        weights=tuple(float(x) for x in w),
        lambda_max=lambda_max,
        ci=ci,
        cr=cr,
        iterations=iterations,
    )


def geometric_mean_vector(matrix: ComparisonMatrix) -> tuple[float, ...]:
    """Row geometric means, normalized. Cross-check approximation, not the ranking source."""
    a = matrix.as_array()
    g = np.exp(np.log(a).mean(axis=1))
    g /= g.sum()
    return tuple(float(x) for x in g)


def consistency_ratio(
    lambda_max: float, order: int, rci: Mapping[int, float] | None = None
) -> tuple[float, float]:
    """(CI, CR) from the principal eigenvalue.

    CI = (lambda_max - n) / (n - 1); CR = CI / RCI(n). Orders 1 and 2 cannot
    be inconsistent, so both figures are zero there. Tiny negative CI from
    float round-off is clamped to zero.
    """
    table = DEFAULT_RCI if rci is None else rci
    if order not in table:
        raise UnsupportedOrder(f"no random index for order {order}")
    if order <= 2:
        return 0.0, 0.0
    ci = (lambda_max - order) / (order - 1)
    if -1e-9 < ci < 0:
        ci = 0.0
    denom = table[order]
    if denom == 0:
        return ci, 0.0
    return ci, ci / denom


def rci_table(overrides: Mapping[int, float] | None = None) -> Mapping[int, float]:
    """Default random-index table, optionally with per-order overrides."""
    if not overrides:
        return dict(DEFAULT_RCI)
    table = dict(DEFAULT_RCI)
    for order, value in overrides.items():
        order = int(order)
        if order < 1 or order > MAX_ORDER:
            raise UnsupportedOrder(f"random-index override for unsupported order {order}")
        if value < 0:
            raise ValueError(f"random index must be nonnegative, got {value}")
        table[order] = float(value)
    return table


class ConsistencyPolicy(str, enum.Enum):
    """Threshold schedule used when screening CR."""

    SAATY1994 = "saaty1994"  # 0.05 for 3x3, 0.08 for 4x4, 0.10 above; exceed -> Fail
    UNIFORM = "uniform"  # flat 0.10; exceed -> Warn

    @classmethod
    def parse(cls, raw: "str | ConsistencyPolicy") -> "ConsistencyPolicy":
        if isinstance(raw, cls):
            return raw
        try:
            return cls(str(raw).lower())
        except ValueError:
            raise ValueError(
                f"unknown consistency policy {raw!r}; expected one of "
                f"{[p.value for p in cls]}"
            ) from None


class VerdictStatus(str, enum.Enum):
    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Outcome of screening one matrix's CR against a policy threshold."""

    status: VerdictStatus
    cr: float
    threshold: float
    policy: ConsistencyPolicy

    @property
    def acceptable(self) -> bool:
        return self.status is VerdictStatus.PASS


def cr_threshold(order: int, policy: ConsistencyPolicy) -> float:
    if policy is ConsistencyPolicy.SAATY1994:
        if order == 3:
            return 0.05
        if order == 4:
            return 0.08
        return 0.10
    return 0.10


def screen_consistency(
    cr: float, order: int, policy: ConsistencyPolicy = ConsistencyPolicy.SAATY1994
) -> ConsistencyVerdict:
    """Compare CR to the policy threshold. Equality passes; only excess trips.

    saaty1994 marks excess as Fail (the study's revise-your-judgments stance);
    uniform marks it as Warn. Non-strict callers may proceed either way.
    """
    policy = ConsistencyPolicy.parse(policy)
    threshold = cr_threshold(order, policy)
    if cr <= threshold:
        status = VerdictStatus.PASS
    elif policy is ConsistencyPolicy.SAATY1994:
        status = VerdictStatus.FAIL
    else:
        status = VerdictStatus.WARN
    return ConsistencyVerdict(status=status, cr=cr, threshold=threshold, policy=policy)
