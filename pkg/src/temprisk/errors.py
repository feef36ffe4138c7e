"""Exception hierarchy shared by the library and the CLI."""


class TempriskError(Exception):
    """Base class for all errors raised by temprisk."""


class ShapeError(TempriskError, ValueError):
    """Dimension mismatch between a signal and a shift vector or partition."""


class ValidationError(TempriskError, ValueError):
    """A structurally invalid object (partition, interval, pmf, config)."""


class SpecSyntaxError(TempriskError):
    """Malformed specification text."""

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class SpecificationError(TempriskError):
    """A specification that is well-formed but cannot be evaluated as posed."""


class ResourceError(TempriskError):
    """A computation would exceed its evaluation guard."""


class InsufficientSamplesError(TempriskError):
    """Sample count too small for the requested (beta, delta) pair."""

    def __init__(self, n, beta, delta, required_n):
        self.n = n
        self.beta = beta
        self.delta = delta
        self.required_n = required_n
        super().__init__(
            f"insufficient samples for (beta={beta}, delta={delta}): "
            f"N={n}, need N >= {required_n}"
        )


class GenerationError(TempriskError):
    """A trajectory generator could not produce a signal for its parameters."""
