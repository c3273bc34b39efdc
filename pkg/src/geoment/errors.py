"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input file or text block.

    Carries the 1-based line number where parsing failed, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceError(RuntimeError):
    """An iterative refinement failed to converge within its step budget."""


class DegenerateArrangementError(ValueError):
    """An arrangement has (near-)coincident points where distinctness is required."""
