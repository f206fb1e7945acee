"""Exception hierarchy shared by all netrev modules."""


class NetrevError(Exception):
    """Base class for all errors raised by this package."""


class LibraryError(NetrevError):
    """Gate-library document is malformed or violates a library invariant."""


class ExpressionError(NetrevError):
    """Boolean expression could not be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


class NetlistError(NetrevError):
    """A netlist mutation or query violated the data-model contract."""


class SnapshotError(NetrevError):
    """Snapshot file is unreadable, incompatible or internally inconsistent."""


class InitFormatError(NetrevError):
    """A sized Verilog literal is malformed or has the wrong width."""


class VerilogSyntaxError(NetrevError):
    """Structural Verilog input violated the supported grammar."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location.line}:{location.column}: {message}"
        super().__init__(message)
        self.location = location


class AnalysisError(NetrevError):
    """An analysis precondition does not hold for the given netlist."""


class SupportLimitError(AnalysisError):
    """A Boolean function would exceed the configured variable cap."""


class FsmLimitError(AnalysisError):
    """State-graph exploration hit an input or state limit.

    ``states_found`` / ``transitions_found`` describe partial progress.
    """

    def __init__(self, message, states_found=0, transitions_found=0):
        super().__init__(message)
        self.states_found = states_found
        self.transitions_found = transitions_found


class NoObfuscationPrefix(AnalysisError):
    """State graph has no terminal region separate from the initial state."""


class AmbiguousOriginalRegion(AnalysisError):
    """Several disjoint terminal regions qualify as the original machine.

    ``candidates`` holds the state sets of every qualifying region.
    """

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = candidates
