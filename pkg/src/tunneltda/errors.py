"""Exception and warning types shared across the package."""


class InputError(ValueError):
    """Invalid user input: bad files, out-of-range parameters, malformed data."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed (singular system, non-finite result)."""


class ConditioningWarning(UserWarning):
    """A linear system is ill-conditioned; results may lose precision."""
