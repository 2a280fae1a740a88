"""Exception types shared across the package."""


class BridgewatchError(Exception):
    """Base class for all package-specific errors."""


class ScenarioError(BridgewatchError):
    """A scenario document is malformed or violates a field constraint."""


class TraceError(BridgewatchError):
    """A trace file is malformed or fails an audit invariant."""


class DecisionConflictError(BridgewatchError):
    """A supervisor decision was already recorded for this session."""


class MissingDecisionPointError(BridgewatchError):
    """The session has no decision point to operate on."""


class MissingMeasureError(BridgewatchError):
    """A cost component was selected for explanation but its recorded
    measure is absent; indicates a bookkeeping bug, not a user error."""
