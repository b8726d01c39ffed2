from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from scipy.integrate import solve_ivp

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def ode_evolve(segments, psi0, rtol=1e-12):
    """Reference Schroedinger integration with an adaptive Runge-Kutta solver."""
    psi = np.asarray(psi0, dtype=complex)
    for h, duration in segments:
        sol = solve_ivp(lambda t, y: -1j * (h @ y), (0.0, duration), psi,
                        method="DOP853", rtol=rtol, atol=1e-14)
        psi = sol.y[:, -1]
    return psi


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
