"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class ParameterError(ValueError):
    """A scalar parameter is outside its admissible range."""


class DegenerateReferenceError(ValueError):
    """Reference image is identically zero where a nonzero one is required."""


class EmptyMaskError(ValueError):
    """Requested sampling density yields no sample positions."""


class DensityUnreachableError(RuntimeError):
    """Mask generator cannot reach the requested density within tolerance."""


class NumericalError(RuntimeError):
    """Iterative solver produced a non-finite quantity; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
