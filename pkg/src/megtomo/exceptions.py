"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates the structural contract (shape, Hermiticity, normalization)."""


class InvalidParameterError(ValueError):
    """A scalar parameter is out of its admissible range."""


class UnsupportedDimensionError(ValueError):
    """No construction is available for the requested dimension."""


class EstimatorStepError(RuntimeError):
    """A MEG update failed numerically.

    Attributes:
        iteration: index of the update that failed.
    """

    def __init__(self, message, iteration):
        super().__init__(f"iteration {iteration}: {message}")
        self.message = message
        self.iteration = iteration

    def __reduce__(self):
        return type(self), (self.message, self.iteration)


class EnsembleError(RuntimeError):
    """One or more ensemble members failed; the others still ran.

    Attributes:
        failures: ``{(state, repeat): exception}``.
        traces: ``{(state, repeat): TrackTrace}`` for the members that finished.
    """

    def __init__(self, failures, traces):
        shown = sorted(failures)[:5]
        details = "; ".join(f"(state {s}, repeat {r}) {failures[(s, r)]}" for s, r in shown)
        more = f"; and {len(failures) - len(shown)} more" if len(failures) > len(shown) else ""
        super().__init__(f"{len(failures)} ensemble run(s) failed: {details}{more}")
        self.failures = failures
        self.traces = traces
