"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so new errors should subclass one of the
three families below rather than ``NWLearnError`` directly.
"""


class NWLearnError(Exception):
    """Base class for all library errors."""


class StructuralError(NWLearnError, ValueError):
    """Malformed object: bad wire reference, length mismatch, bad index."""


class ParameterError(NWLearnError, ValueError):
    """Parameters outside the regime an operation supports."""


class BudgetExceeded(NWLearnError):
    """An exhaustive computation would exceed its configured work cap."""

    def __init__(self, what, needed, budget):
        super().__init__(f"{what}: needs {needed} work units, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class NotFound(NWLearnError):
    """A randomized search ran out of trials."""


class VerificationError(NWLearnError):
    """A machine-checked certificate failed."""


class PipelineError(VerificationError):
    """A multi-stage construction failed one of its own checks."""

    def __init__(self, message, measured=None):
        super().__init__(message)
        self.measured = measured


class SparsificationError(VerificationError):
    def __init__(self, message, worst_column=None, worst_payoff=None):
        super().__init__(message)
        self.worst_column = worst_column
        self.worst_payoff = worst_payoff


class DegenerateGame(NWLearnError):
    """The game has a trivial solution that makes the request meaningless."""


class ProtocolError(NWLearnError):
    """An oracle refused a request or a transcript is inconsistent."""


class ProtocolViolation(ProtocolError):
    """A witnessing procedure emitted an already-queried candidate."""


class BranchExhausted(ProtocolError):
    """A witnessing branch has no candidate left to emit."""


class IncompleteAdvice(ProtocolError):
    """A reconstruction query is not covered by the correction tables."""


class FrequentTraceNotFound(NotFound):
    pass
