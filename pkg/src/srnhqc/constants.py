"""Numerical tolerances shared across the package.

All times are in nanoseconds and all angular frequencies in rad/ns.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    unitary: float = 1e-10
    propagator_unitary: float = 1e-9
    state_norm: float = 1e-10
    orthonormal: float = 1e-10
    density_hermitian: float = 1e-10
    density_trace: float = 1e-9
    density_eig: float = 1e-9
    trace_drift_abort: float = 1e-6
    trace_preserving: float = 1e-8
    choi_eig: float = 1e-7
    choi_abort: float = 1e-6
    leakage_abort: float = 0.5
    calibration: float = 1e-6


TOL = Tolerances()

# rad/ns per MHz (angular)
TWO_PI_MHZ = 2e-3 * 3.141592653589793
