"""Exception hierarchy shared by all modules."""


class TrajAdvError(Exception):
    """Base class for every error raised by this package."""


class ContractError(TrajAdvError, ValueError):
    """An input violated a precondition (wrong dimension, bad id, ...)."""


class ConfigError(TrajAdvError, ValueError):
    """Invalid configuration value or file."""


class NumericalError(TrajAdvError, ArithmeticError):
    """Non-finite values or a numerically fatal model state."""


class SingularityError(NumericalError):
    """The torque-to-task map lost rank beyond the pseudoinverse tolerance."""

    def __init__(self, sigma_min, sigma_max, message=None):
        self.sigma_min = float(sigma_min)
        self.sigma_max = float(sigma_max)
        super().__init__(
            message
            or f"task map is singular: sigma_min={self.sigma_min:.3e}, sigma_max={self.sigma_max:.3e}"
        )
