"""Exception types shared across the package."""


class VdpsyncError(Exception):
    """Base class for all numerical/physical failures raised by this package."""


class InvalidTruncationError(VdpsyncError, ValueError):
    """Fock truncation is malformed (n_max < 1) or inconsistent."""


class DegenerateSteadyStateError(VdpsyncError):
    """The Liouvillian null space has dimension > 1; no unique steady state."""


class SolverFailureError(VdpsyncError):
    """Linear solve did not reach the requested residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PositivityError(VdpsyncError):
    """A state violates positivity beyond tolerance (truncation or solver bug)."""


class StepSizeError(VdpsyncError):
    """Fixed-step integration became unstable (trace drift detected)."""


class TruncationFailureError(VdpsyncError):
    """Observables did not converge below the hard truncation cap."""


class ResonanceError(VdpsyncError):
    """A perturbative denominator vanished (cannot occur for gamma1 > 0)."""


class NearSingularityError(VdpsyncError):
    """Effective-model linear system is numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PerturbationRegimeWarning(UserWarning):
    """Parameters are outside the weak coupling/drive window of the expansion."""
