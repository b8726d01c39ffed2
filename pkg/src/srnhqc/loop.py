"""Kinematics of a bright/auxiliary loop driven by piecewise-constant pulses.

Both the single- and two-logical-qubit gates reduce to a three-state
problem: a bright state ``|b>`` exchanged with an auxiliary state ``|a>``
through ``H = g (e^{-i phi} |b><a| + h.c.)`` while a dark state ``|d>`` is
annihilated by ``H``.

``pulse_area`` is the rotation angle of the (b, a) pair,
``Omega(t) = 2 * int_0^t g(s) ds``, so that the ancillary states

    mu_b = cos(Omega/2) |b> - i sin(Omega/2) e^{i phi} |a>
    mu_a = -i sin(Omega/2) e^{-i phi} |b> + cos(Omega/2) |a>

solve the Schroedinger equation inside each constant-phase segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhaseProfile:
    """Piecewise-constant phase and coupling amplitude.

    ``breakpoints`` holds ``n + 1`` strictly increasing times from 0 to the
    gate time; interval ``k`` is ``(breakpoints[k], breakpoints[k+1]]``
    (the first one closed at 0) and carries phase ``values[k]`` and coupling
    ``amplitudes[k]`` in rad/ns.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    amplitudes: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        amps = tuple(float(a) for a in self.amplitudes)
        if len(bp) != len(vals) + 1 or len(amps) != len(vals) or not vals:
            raise ValueError("need n+1 breakpoints for n phase values and amplitudes")
        if bp[0] != 0.0:
            raise ValueError("first interval must start at t = 0")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def uniform(cls, values, duration: float, amplitude: float) -> "PhaseProfile":
        n = len(values)
        return cls(
            tuple(duration * k / n for k in range(n + 1)), tuple(values), (amplitude,) * n
        )

    @property
    def duration(self) -> float:
        return self.breakpoints[-1]

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def index(self, t: float) -> int:
        k = int(np.searchsorted(self.breakpoints, t, side="left")) - 1
        return min(max(k, 0), len(self.values) - 1)

    def value_at(self, t: float) -> float:
        return self.values[self.index(t)]

    def amplitude_at(self, t: float) -> float:
        return self.amplitudes[self.index(t)]

    def scaled_time(self, factor: float) -> "PhaseProfile":
        """Same path traversed ``factor`` times slower (amplitudes divided by ``factor``)."""
        return PhaseProfile(
            tuple(b * factor for b in self.breakpoints),
            self.values,
            tuple(a / factor for a in self.amplitudes),
        )


def pulse_area(profile: PhaseProfile, t: float) -> float:
    """Rotation angle ``Omega(t) = 2 int_0^t g``."""
    area = 0.0
    for t0, t1, g in zip(profile.breakpoints, profile.breakpoints[1:], profile.amplitudes):
        if t <= t0:
            break
        area += g * (min(t, t1) - t0)
    return 2.0 * area


def geometric_phase(profile: PhaseProfile, t: float) -> float:
    """Phase ``gamma_b(t) = int <mu_b| i d/dt |mu_b>``.

    Inside a constant-phase segment the integrand vanishes; a jump
    ``Delta phi`` at time ``t_j`` contributes ``-sin^2(Omega(t_j)/2) Delta phi``.
    A jump at ``t_j`` counts for ``t > t_j``.
    """
    gamma = 0.0
    bp = profile.breakpoints
    for k in range(1, len(profile.values)):
        tj = bp[k]
        if t <= tj:
            break
        jump = profile.values[k] - profile.values[k - 1]
        gamma -= math.sin(0.5 * pulse_area(profile, tj)) ** 2 * jump
    return gamma


def ancillary_triple(
    profile: PhaseProfile, t: float, bright: np.ndarray, aux: np.ndarray, dark: np.ndarray,
    conjugate_phase: bool = False,
) -> dict[str, np.ndarray]:
    """``mu_d, mu_b, mu_a`` at time ``t``.

    ``conjugate_phase`` flips the sign of the phase, as needed for a block
    driven by ``g (e^{+i phi} |b><a| + h.c.)``.
    """
    half = 0.5 * pulse_area(profile, t)
    phi = profile.value_at(t)
    if conjugate_phase:
        phi = -phi
    c, s = math.cos(half), math.sin(half)
    ph = complex(math.cos(phi), math.sin(phi))
    return {
        "d": dark.astype(complex),
        "b": c * bright - 1j * s * ph * aux,
        "a": -1j * s * ph.conjugate() * bright + c * aux,
    }


def sr_integrand(profile: PhaseProfile, t: float) -> complex:
    """``g(t) exp(i (2 gamma_b(t) + phi(t)))``, equal to ``<psi_a|H|psi_b>``."""
    return profile.amplitude_at(t) * np.exp(1j * (2 * geometric_phase(profile, t) + profile.value_at(t)))


def sr_integral(profile: PhaseProfile, points: int) -> complex:
    """Midpoint-rule quadrature of :func:`sr_integrand` over the gate."""
    tau = profile.duration
    h = tau / points
    mids = (np.arange(points) + 0.5) * h
    # gamma_b, phi and g are constant on each interval (jumps count for t > t_j)
    bp = np.asarray(profile.breakpoints)
    per_interval = np.array([
        sr_integrand(profile, 0.5 * (t0 + t1)) for t0, t1 in zip(bp, bp[1:])
    ])
    k = np.clip(np.searchsorted(bp, mids, side="left") - 1, 0, len(profile.values) - 1)
    return complex(np.sum(per_interval[k]) * h)


@dataclass(frozen=True)
class ConditionReport:
    """Defects of the holonomic-gate conditions for one control path.

    ``sr_defect`` is normalised by the total coupling integral
    ``int g dt``; ``sr_defect_fine`` repeats it on a 16x finer grid.
    """

    cyclicity_defect: float
    transport_defect: float
    sr_defect: float
    sr_defect_fine: float
    grid: int
    fine_grid: int

    @property
    def richardson_gap(self) -> float:
        return abs(self.sr_defect - self.sr_defect_fine)

    def checks(self, sr_tol: float = 1e-6, tol: float = 1e-9) -> dict[str, bool]:
        return {
            "cyclicity": self.cyclicity_defect < tol,
            "parallel_transport": self.transport_defect < tol,
            "super_robust": self.sr_defect < sr_tol and self.sr_defect_fine < sr_tol,
        }

    def as_dict(self, sr_tol: float = 1e-6, tol: float = 1e-9) -> dict:
        return {
            "cyclicity_defect": self.cyclicity_defect,
            "transport_defect": self.transport_defect,
            "sr_defect": self.sr_defect,
            "sr_defect_fine": self.sr_defect_fine,
            "grid": self.grid,
            "fine_grid": self.fine_grid,
            "pass": self.checks(sr_tol, tol),
        }


def _ray_distance(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.max(np.abs(np.outer(u, u.conj()) - np.outer(v, v.conj()))))


def loop_conditions(
    profile: PhaseProfile,
    hamiltonian_at,
    triples,
    grid: int = 1024,
    fine_factor: int = 16,
) -> ConditionReport:
    """Evaluate cyclicity, parallel transport and the super-robust integral.

    ``triples(t)`` returns the ancillary states (a dict of kets) at ``t`` and
    ``hamiltonian_at(t)`` the control Hamiltonian.
    """
    tau = profile.duration
    start, end = triples(0.0), triples(tau)
    cyc = max(_ray_distance(start[k], end[k]) for k in start)

    mids = (np.arange(grid) + 0.5) * tau / grid
    transport = 0.0
    for t in mids:
        h = hamiltonian_at(t)
        for mu in triples(t).values():
            transport = max(transport, abs(np.vdot(mu, h @ mu)))

    norm = float(np.sum(profile.amplitudes * profile.durations))
    coarse = abs(sr_integral(profile, grid)) / norm
    fine = abs(sr_integral(profile, grid * fine_factor)) / norm
    return ConditionReport(cyc, float(transport), coarse, fine, grid, grid * fine_factor)


def wrap_angle(x: float) -> float:
    """Map to ``(-pi, pi]``."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y
