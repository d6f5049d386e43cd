"""Exception types shared across the package."""


class ImpnsError(Exception):
    """Base class for all package errors."""


class ContractViolationError(ImpnsError):
    """An operation was called with arguments violating its contract."""


class DimensionMismatchError(ContractViolationError):
    """Operator and state dimensions disagree."""


class DomainError(ImpnsError):
    """A numeric argument is outside the mathematical domain of the operation."""


class NoAdmissibleWindowError(ImpnsError):
    """The local window search found no (delta, T) pair with d1 <= r and q < 1."""


class PicardDivergedError(ImpnsError):
    """Successive-iterate residuals grew for three consecutive iterations."""


class PicardMaxIterError(ImpnsError):
    """The fixed-point iteration hit the iteration cap before reaching tolerance."""


class BlowUpError(ImpnsError):
    """The trajectory norm exceeded the blow-up guard during integration."""

    def __init__(self, t: float, norm: float, guard: float):
        self.t = t
        self.norm = norm
        self.guard = guard
        super().__init__(
            f"blow-up guard tripped at t={t!r}: |u|_H={norm:.6e} > guard={guard:.6e}"
        )


class PreconditionError(ImpnsError):
    """A theorem check was invoked outside its stated hypotheses."""


class ConfigError(ImpnsError):
    """A scenario configuration file failed validation."""
