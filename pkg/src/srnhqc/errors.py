"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitianError(SimulationError, ValueError):
    def __init__(self, what: str, defect: float):
        super().__init__(f"{what} is not Hermitian (max |H - H^dag| = {defect:.3e})")
        self.defect = defect


class DimensionError(SimulationError, ValueError):
    pass


class NotOrthonormalError(SimulationError, ValueError):
    pass


class IntegrityError(SimulationError):
    """Numerical-integrity failure: trace drift, CP violation, leakage or
    loss of unitarity beyond the abort thresholds."""


class CalibrationError(SimulationError):
    """A compiled pulse does not reproduce its target gate."""


class StepResolutionError(SimulationError):
    """Fine-step integration failed to converge."""
