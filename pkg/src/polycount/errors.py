"""Exception types shared across the package.

The CLI maps these onto exit codes: input problems (parse errors, unbounded
or infeasible systems, degenerate bodies) exit 2, resource caps exit 3.
"""


class PolycountError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PolycountError, ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class DimensionMismatchError(PolycountError, ValueError):
    """Vector or row length does not match the ambient dimension."""


class UnboundedError(PolycountError):
    """The polytope is unbounded in some direction."""


class InfeasibleError(PolycountError):
    """The constraint system has no real solution."""


class DegenerateBodyError(PolycountError):
    """The body has (numerically) empty interior."""


class ResourceCapError(PolycountError):
    """An iteration/attempt cap was exceeded. ``cap`` names which one."""

    def __init__(self, cap: str, message: str):
        self.cap = cap
        super().__init__(f"{cap} cap exceeded: {message}")


class OracleLimitError(PolycountError):
    """Exact enumeration refused: bounding box exceeds the point limit."""
