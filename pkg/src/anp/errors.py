"""Exception hierarchy shared by every layer of the engine.

All engine-raised exceptions derive from AnpError so callers can catch one
type at a process boundary (CLI, HTTP handlers) and map it to an exit code
or status without enumerating causes.
"""


class AnpError(Exception):
    """Base class for all engine errors."""


class InvalidScaleValue(AnpError):
    """Judgment value is not on the 1-9 comparison scale (or not a positive ratio in relaxed mode)."""


class DuplicateJudgment(AnpError):
    """The same pair was supplied twice when building a matrix."""


class IncompleteJudgments(AnpError):
    """An upper-triangle pair is missing, so the matrix cannot be assembled."""


class UnsupportedOrder(AnpError):
    """Matrix order is outside the supported 1..10 range of the random-index table."""


class ConvergenceFailure(AnpError):
    """Power iteration or the limit computation did not settle within its budget."""


class SlotShapeMismatch(AnpError):
    """A matrix was attached to a slot whose element list it does not match."""


class UnknownSlot(AnpError):
    """Referenced judgment slot does not exist in the network."""


class IncompleteModel(AnpError):
    """Solve was requested while required judgments are still missing."""

    def __init__(self, message: str, missing: tuple = ()):  # missing: slot keys or (slot, pair)
        super().__init__(message)
        self.missing = tuple(missing)


class NotAHierarchy(AnpError):
    """Hierarchy-only operation applied to a network with feedback."""


class ConsistencyRejection(AnpError):
    """Strict mode: at least one matrix failed its consistency screen."""

    def __init__(self, message: str, failures: tuple = ()):  # failures: (slot key, CR) pairs
        super().__init__(message)
        self.failures = tuple(failures)


class UnsupportedVersion(AnpError):
    """Document declares a format version this engine does not read."""


class SchemaError(AnpError):
    """Document violates the model schema; `path` points at the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(message)
        self.path = path


class IntegrityError(AnpError):
    """Stored digest does not match the recomputed digest of the model."""
