"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a formula or model is defined."""


class NonConfinementError(RuntimeError):
    """A stationary density could not be localized on a finite window."""


class SimulationError(RuntimeError):
    """A replica was aborted during time stepping.

    Attributes
    ----------
    replica : int
    step : int
        Index of the step that produced the offending state.
    state : numpy.ndarray
        State vector ``(X_1..X_N, Z)`` at abort.
    reason : str
    """

    def __init__(self, replica, step, state, reason):
        self.replica = replica
        self.step = step
        self.state = state
        self.reason = reason
        super().__init__(
            f"replica {replica} aborted at step {step} ({reason}); state={list(state)}"
        )


class QuadratureWarning(RuntimeWarning):
    """A quadrature error estimate exceeded its requested tolerance."""
