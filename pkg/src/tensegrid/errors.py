"""Exception types shared across the toolkit."""


class TensegrityError(Exception):
    """Base class for every toolkit error."""


class DegeneratePosition(TensegrityError):
    """Three of the points involved are collinear at the active tolerance."""


class InsufficientSharing(TensegrityError):
    """A cell on a non-empty structure must anchor to at least two existing nodes."""


class UnknownNodeId(TensegrityError):
    pass


class UnknownMemberId(TensegrityError):
    pass


class AlreadyRemoved(TensegrityError):
    pass


class InvalidToken(TensegrityError):
    """Snapshot token does not belong to this structure lineage."""


class TooManyRemovals(TensegrityError):
    """Two or more removals require the new cell to share at least three nodes."""


class NoSolution(TensegrityError):
    """Placement lines are parallel or degenerate."""


class DegenerateResult(TensegrityError):
    """Computed node is collinear with two of the shared nodes."""


class DegenerateWheel(TensegrityError):
    """A center triangle of the wheel has (near-)zero area, so the rim
    recurrence has a vanishing denominator."""


class ClosureFailure(TensegrityError):
    """Wheel recurrence does not close cyclically; the geometry admits no wheel state."""


class SearchExhausted(TensegrityError):
    """Candidate enumeration ended before enough independent states were found."""


class IncompleteBasis(TensegrityError):
    """Basis assembly could not reach the target dimension."""

    def __init__(self, achieved: int, target: int):
        self.achieved = achieved
        self.target = target
        super().__init__(f"assembled {achieved} of {target} states")


class SingularT(TensegrityError):
    pass


class BudgetTooSmall(TensegrityError):
    pass


class DisconnectedMesh(TensegrityError):
    pass


class GenerationFailed(TensegrityError):
    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"generation failed at step {step}: {cause}")


class RemovalBreaksRigidity(TensegrityError):
    pass


class ParseError(TensegrityError):
    pass


class VersionMismatch(TensegrityError):
    pass
