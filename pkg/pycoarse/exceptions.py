class CoarseError(Exception):
    """Base class for every error raised by pycoarse."""


class RejectedInputError(CoarseError):
    """
    Exception for inputs an operation refuses to work on.

    :param message: What was wrong with the input.
    :param witness: The offending value (index, pair, window...), if any.
    """

    def __init__(self, message: str, witness=None):
        self.message = message
        """What was wrong with the input."""
        self.witness = witness
        """The offending value, or None."""

    def __str__(self):
        if self.witness is None:
            return f"Rejected input: {self.message}"
        return f"Rejected input: {self.message} (witness: {self.witness})"


class PreconditionError(CoarseError):
    """
    Exception for inputs that violate a documented precondition.

    :param message: The precondition that failed.
    :param offending: The pair or value that breaks it.
    """

    def __init__(self, message: str, offending=None):
        self.message = message
        """The precondition that failed."""
        self.offending = offending
        """The pair or value that breaks the precondition."""

    def __str__(self):
        if self.offending is None:
            return f"Precondition failed: {self.message}"
        return f"Precondition failed: {self.message} at {self.offending}"


class GeneratorEvaluationError(CoarseError):
    """
    Exception for a phi rule that could not enumerate phi(n).

    :param n: The argument the rule failed on.
    :param original_exception: The exception raised by the rule.
    """

    def __init__(self, n: int, original_exception: Exception):
        self.n = n
        """The argument the rule failed on."""
        self.original_exception = original_exception
        """The exception raised by the rule."""

    def __str__(self):
        return (
            f"Could not evaluate phi({self.n}).\n"
            f"Original exception: {self.original_exception}"
        )


class OracleCapError(CoarseError):
    """
    Exception raised when the brute-force oracle is asked for too much.

    :param size: The requested window size.
    :param cap: The configured cap.
    """

    def __init__(self, size: int, cap: int):
        self.size = size
        """The requested window size."""
        self.cap = cap
        """The configured cap."""

    def __str__(self):
        return (
            f"Brute-force search refused: window size {self.size} exceeds "
            f"the cap of {self.cap}"
        )


class ConvergenceSearchError(CoarseError):
    """
    Exception raised when an exponent search runs out of budget.

    :param tolerance: The tolerance that was not reached.
    :param best_exponent: The closest exponent seen.
    :param best_distance: Its exact distance to the limit point.
    """

    def __init__(self, tolerance, best_exponent, best_distance):
        self.tolerance = tolerance
        """The tolerance that was not reached."""
        self.best_exponent = best_exponent
        """The closest exponent seen during the search."""
        self.best_distance = best_distance
        """Exact distance of best_exponent to the limit point."""

    def __str__(self):
        return (
            f"No fresh exponent within {self.tolerance} of the limit. "
            f"Best exponent: {self.best_exponent} "
            f"(distance ~{float(self.best_distance):.3g})"
        )


class ConvergenceCheckError(CoarseError):
    """
    Exception raised when a K rule fails its windowed convergence check.

    :param offending: List of (n, m) generating pairs that do not shrink.
    """

    def __init__(self, offending: list):
        self.offending = offending
        """Generating pairs (n, m) whose element stays far from 0."""

    def __str__(self):
        shown = ", ".join(str(pair) for pair in self.offending[:5])
        more = "" if len(self.offending) <= 5 else " ..."
        return f"K rule does not converge to 0; offending pairs: {shown}{more}"


class DocumentFormatError(CoarseError):
    """
    Exception for malformed text documents.

    :param line_number: 1-based line number of the problem (0 = whole file).
    :param message: What was expected.
    """

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        """1-based line number of the problem."""
        self.message = message
        """What was expected."""

    def __str__(self):
        return f"Malformed document at line {self.line_number}: {self.message}"


class ConfigError(CoarseError):
    """
    Exception for malformed configuration overrides.

    :param name: The environment variable.
    :param value: The value it held.
    """

    def __init__(self, name: str, value: str):
        self.name = name
        """The environment variable."""
        self.value = value
        """The value it held."""

    def __str__(self):
        return f"Invalid value for {self.name}: {self.value!r}"
