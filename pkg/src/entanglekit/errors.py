"""Exception types shared across the toolkit."""


class EntanglementError(Exception):
    """Base class for all toolkit errors."""


class InvariantViolation(EntanglementError, ValueError):
    """A value failed one of its type invariants.

    ``invariant`` names the failed check so that callers (and the CLI) can
    report it verbatim.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class KindMismatch(EntanglementError, TypeError):
    pass


class DimensionMismatch(EntanglementError, ValueError):
    pass


class CapExceeded(EntanglementError, ValueError):
    """A requested computation exceeds a documented size cap."""


class SeparableInput(EntanglementError, ValueError):
    pass


class MixedStateError(EntanglementError, ValueError):
    pass


class RankMismatch(EntanglementError, ValueError):
    pass


class ChannelError(EntanglementError, ValueError):
    pass
