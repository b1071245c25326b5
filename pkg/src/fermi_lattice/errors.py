"""Exception types shared across the package."""


class FermiLatticeError(Exception):
    """Base class for all package-specific errors."""


class InvalidParametersError(FermiLatticeError, ValueError):
    """A parameter set violates a documented precondition."""


class UnsupportedConfigurationError(FermiLatticeError, ValueError):
    """The request is well-formed but outside the implemented regime."""


class NumericalFailureError(FermiLatticeError, RuntimeError):
    """An iterative numerical procedure failed to converge."""


class SchemaError(FermiLatticeError, ValueError):
    """A scenario file or run section does not match the expected schema."""
