"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input fails a construction invariant (finiteness, hermiticity, trace, ...)."""


class DimensionError(ValidationError):
    """Matrix or vector has the wrong shape or an unsupported dimension."""


class InvalidStateError(ValidationError):
    """A would-be density matrix is not positive semidefinite or not normalizable."""


class AnalysisError(RuntimeError):
    """Spectral analysis cannot be carried out (e.g. defective matrix)."""


class DegenerateEvolutionError(RuntimeError):
    """The non-Hermitian flow annihilated the state (normalization denominator underflow)."""


class StiffnessError(RuntimeError):
    """Adaptive integration failed; carries the time at which the step size collapsed."""

    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(f"integration failed at t={t:.6g}" + (f": {message}" if message else ""))


class ConfigError(ValueError):
    """Scenario configuration is invalid; carries a list of located issues."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {i}" for i in self.issues))
