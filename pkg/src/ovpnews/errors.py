"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """A distribution or model parameter lies outside its domain."""


class DegenerateDataError(ValueError):
    """A dataset carries no usable information (empty, or all zeros)."""


class NoRootError(RuntimeError):
    """Bisection could not bracket a sign change.

    ``index`` identifies the offending row when raised from a batched solve.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class PolicyError(RuntimeError):
    """A policy failed during evaluation; carries the (theta, policy, replicate) cell."""

    def __init__(self, message: str, theta: float, policy: str, replicate: int | None):
        super().__init__(f"{message} [theta={theta!r}, policy={policy}, replicate={replicate}]")
        self.theta = theta
        self.policy = policy
        self.replicate = replicate


class ConfigError(ValueError):
    """Malformed or invalid experiment configuration."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
