"""Single-logical-qubit holonomic gates in a decoherence-free subspace.

The logical qubit lives on two data transmons (1, 2) in the single-excitation
sector, ``|0_L> = |10>_12`` and ``|1_L> = |01>_12``; an ancilla ``a`` starts in
``|0>`` and carries the auxiliary state ``|a1> = |100>_a12``.

Conventions
-----------
* Subsystem order is ``(a, 1, 2)``.
* Logical Paulis follow the ``sigma_z^L = |1_L><1_L| - |0_L><0_L|`` sign, so in
  the ``(|0_L>, |1_L>)`` basis ``sigma_x^L = X``, ``sigma_y^L = -Y`` and
  ``sigma_z^L = -Z``.
* The target of ``(theta, phi, gamma)`` is
  ``exp(i gamma/2) exp(-i gamma n . sigma^L / 2)`` with
  ``n = (-sin theta cos phi, -sin theta sin phi, cos theta)``. It acts as
  ``I + (e^{i gamma} - 1) |b1><b1|`` on the logical space.
* Under the staircase ``(0, s, 0, s)`` with ``g = 2 pi / tau`` every quarter is
  a full bright/auxiliary swap and the bright state returns with phase
  ``exp(-2 i s)``. A holonomy angle ``gamma`` therefore needs ``s = pi - gamma/2``.
  The first-order control-error response is proportional to
  ``1 + e^{-is} + e^{-2is} + e^{-3is}``, which vanishes for ``s = pi/2``
  (``gamma = pi``) and ``s = pi`` (identity).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import loop
from .errors import IntegrityError
from .loop import ConditionReport, PhaseProfile
from .metrics import FidelityReport, avg_fidelity_channel, channel_leakage
from .open_system import NoiseSpec, channel_superoperator, restrict_channel
from .qdyn import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    HilbertSpace,
    PulseSchedule,
    Segment,
    dag,
    expm_generator,
    states_at,
    tensor,
)

LEAKAGE_ABORT = 0.5

# logical Paulis in the (|0_L>, |1_L>) basis
PAULI_L = (SIGMA_X, -SIGMA_Y, -SIGMA_Z)


class ProtocolKind(str, enum.Enum):
    SR_NHQC_DFS = "SR_NHQC_DFS"
    SR_NHQC_BARE = "SR_NHQC_BARE"
    NHQC_DFS = "NHQC_DFS"
    NHQC_BARE = "NHQC_BARE"
    DG_BARE = "DG_BARE"

    @property
    def is_dfs(self) -> bool:
        return self in (ProtocolKind.SR_NHQC_DFS, ProtocolKind.NHQC_DFS)

    @property
    def is_super_robust(self) -> bool:
        return self in (ProtocolKind.SR_NHQC_DFS, ProtocolKind.SR_NHQC_BARE)

    @classmethod
    def parse(cls, name: str) -> "ProtocolKind":
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown protocol {name!r}; expected one of {[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class SingleLogicalEncoding:
    """Three-transmon encoding, subsystem order ``(a, 1, 2)``."""

    space: HilbertSpace = HilbertSpace((2, 2, 2))

    def ket(self, a: int, q1: int, q2: int) -> np.ndarray:
        return self.space.ket((a, q1, q2))

    @cached_property
    def zero_L(self) -> np.ndarray:
        return self.ket(0, 1, 0)

    @cached_property
    def one_L(self) -> np.ndarray:
        return self.ket(0, 0, 1)

    @property
    def logical_kets(self) -> list[np.ndarray]:
        return [self.zero_L, self.one_L]

    @property
    def s1(self) -> list[np.ndarray]:
        return [self.ket(0, 0, 1), self.ket(0, 1, 0), self.ket(1, 0, 0)]

    @property
    def s2(self) -> list[np.ndarray]:
        return [self.ket(0, 1, 1), self.ket(1, 0, 1), self.ket(1, 1, 0)]

    def embed(self, psi_logical: np.ndarray) -> np.ndarray:
        """``|0>_a (x) psi`` for a logical amplitude pair ``(c0, c1)``."""
        c0, c1 = np.asarray(psi_logical, dtype=complex)
        return c0 * self.zero_L + c1 * self.one_L


@dataclass(frozen=True)
class BareEncoding:
    """Three-level system ``{|0>, |1>, |e>}`` (or a plain qubit for ``levels=2``)."""

    levels: int = 3

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace((self.levels,))

    @property
    def logical_kets(self) -> list[np.ndarray]:
        return [self.space.ket((0,)), self.space.ket((1,))]

    @property
    def excited(self) -> np.ndarray:
        return self.space.ket((2,))

    def embed(self, psi_logical: np.ndarray) -> np.ndarray:
        c0, c1 = np.asarray(psi_logical, dtype=complex)
        k0, k1 = self.logical_kets
        return c0 * k0 + c1 * k1


DFS = SingleLogicalEncoding()


def encoding_for(kind: ProtocolKind):
    kind = ProtocolKind(kind)
    if kind.is_dfs:
        return DFS
    if kind is ProtocolKind.DG_BARE:
        return BareEncoding(2)
    return BareEncoding(3)


@dataclass(frozen=True)
class GateParams:
    """Gate angles and time scale.

    ``g_peak`` defaults to ``2 pi / tau`` (10 MHz x 2 pi at 100 ns).
    """

    theta: float
    phi: float
    gamma: float
    tau: float = 100.0
    g_peak: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.g_peak is None:
            object.__setattr__(self, "g_peak", 2 * math.pi / self.tau)
        elif not self.g_peak > 0:
            raise ValueError("g_peak must be positive")


NOT_PARAMS = dict(theta=math.pi / 2, phi=0.0, gamma=math.pi)
HADAMARD_PARAMS = dict(theta=math.pi / 4, phi=0.0, gamma=math.pi)


def dressed_basis(theta: float, phi: float, enc: SingleLogicalEncoding = DFS) -> dict[str, np.ndarray]:
    """Bright, dark and auxiliary states of both excitation sectors."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    k = enc.ket
    # |1>_a |1_L> = |101>, |1>_a |0_L> = |110>
    return {
        "b1": c * k(0, 1, 0) + s * em * k(0, 0, 1),
        "d1": c * k(0, 0, 1) - s * ep * k(0, 1, 0),
        "a1": k(1, 0, 0),
        "b2": c * k(1, 0, 1) + s * ep * k(1, 1, 0),
        "d2": s * k(1, 0, 1) - c * ep * k(1, 1, 0),
        "a2": k(0, 1, 1),
    }


def _exchange(site_up: int, space: HilbertSpace) -> np.ndarray:
    """``sigma_site^+ sigma_a^-`` on the ``(a, 1, 2)`` register."""
    mats = [SIGMA_MINUS, np.eye(2), np.eye(2)]
    mats[site_up] = SIGMA_PLUS
    return tensor(*mats)


def control_hamiltonian(params: GateParams, profile: PhaseProfile, t: float) -> np.ndarray:
    """Physical exchange Hamiltonian of the DFS register at time ``t``.

    The couplings are ``g cos(theta/2)`` and ``g sin(theta/2)`` with phases
    ``phi'_1(t)`` and ``phi'_1(t) + phi``; ``g(t)`` comes from the profile.
    """
    g = profile.amplitude_at(t)
    p1 = profile.value_at(t)
    p2 = p1 + params.phi
    space = DFS.space
    h = (
        g * math.cos(params.theta / 2) * np.exp(-1j * p1) * _exchange(1, space)
        + g * math.sin(params.theta / 2) * np.exp(-1j * p2) * _exchange(2, space)
    )
    return h + dag(h)


def bare_hamiltonian(params: GateParams, profile: PhaseProfile, t: float) -> np.ndarray:
    """Lambda-system coupling ``g e^{-i phi'} |b><e| + h.c.`` on ``{|0>, |1>, |e>}``."""
    enc = BareEncoding(3)
    k0, k1 = enc.logical_kets
    bright = math.cos(params.theta / 2) * k0 + math.sin(params.theta / 2) * np.exp(-1j * params.phi) * k1
    h = profile.amplitude_at(t) * np.exp(-1j * profile.value_at(t)) * np.outer(bright, enc.excited.conj())
    return h + dag(h)


def sr_phase_profile(gamma: float, tau: float, g: float | None = None) -> PhaseProfile:
    """Staircase ``(0, gamma, 0, gamma)`` on equal quarters of ``tau``.

    ``gamma`` here is the literal step height. With the default coupling
    ``g = 2 pi / tau`` each quarter is a complete swap; see the module notes
    for the step that realises a given holonomy angle.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    return PhaseProfile.uniform((0.0, gamma, 0.0, gamma), tau, 2 * math.pi / tau if g is None else g)


def nhqc_phase_profile(gamma: float, tau: float, g: float | None = None) -> PhaseProfile:
    """Two-segment loop ``(0, gamma + pi)``; default ``g = pi / tau`` closes it once.

    The realised bright-state phase is ``exp(-i gamma)``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    return PhaseProfile.uniform((0.0, gamma + math.pi), tau, math.pi / tau if g is None else g)


def sr_step(gamma: float) -> float:
    """Staircase step giving bright-state phase ``exp(i gamma)``."""
    return loop.wrap_angle(math.pi - gamma / 2)


def dg_schedule(theta: float, phi: float, rotation_angle: float, tau: float) -> PulseSchedule:
    """Resonant Rabi rotation on a bare qubit.

    ``H = (Omega_R / 2) m . sigma`` with ``m = (sin theta cos phi,
    sin theta sin phi, cos theta)`` in the standard Pauli basis and
    ``Omega_R tau = rotation_angle``. ``theta = pi/2`` is the usual equatorial
    drive ``cos(phi) X + sin(phi) Y``.
    """
    if not (0 < rotation_angle <= 2 * math.pi + 1e-12):
        raise ValueError(f"rotation angle must lie in (0, 2 pi], got {rotation_angle}")
    if not tau > 0:
        raise ValueError("tau must be positive")
    rabi = rotation_angle / tau
    axis = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    h = 0.5 * rabi * (axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z)
    return PulseSchedule(HilbertSpace((2,)), (Segment(h, tau),), "DG_BARE")


def profile_for(kind: ProtocolKind, params: GateParams) -> PhaseProfile:
    """Phase profile compiled for ``kind`` (holonomic kinds only)."""
    kind = ProtocolKind(kind)
    if kind.is_super_robust:
        return sr_phase_profile(sr_step(params.gamma), params.tau, params.g_peak)
    if kind in (ProtocolKind.NHQC_DFS, ProtocolKind.NHQC_BARE):
        return nhqc_phase_profile(-params.gamma, params.tau, params.g_peak / 2)
    raise ValueError(f"{kind.value} has no holonomic phase profile")


def schedule_from_profile(space: HilbertSpace, hamiltonian_at, profile: PhaseProfile, label: str) -> PulseSchedule:
    segs = []
    for t0, t1 in zip(profile.breakpoints, profile.breakpoints[1:]):
        segs.append(Segment(hamiltonian_at(0.5 * (t0 + t1)), t1 - t0))
    return PulseSchedule(space, tuple(segs), label)


def compile_gate(kind: ProtocolKind, params: GateParams) -> PulseSchedule:
    """Piecewise-constant schedule realising ``target_unitary`` for ``kind``.

    Holonomic kinds share one peak coupling ``g``: the staircase takes ``tau``
    and the two-segment loop, at half that coupling, also takes ``tau``.
    The dynamical gate runs at Rabi frequency ``g`` for ``gamma / g``.
    """
    kind = ProtocolKind(kind)
    if kind is ProtocolKind.DG_BARE:
        angle = params.gamma % (2 * math.pi)
        if angle == 0.0:
            angle = 2 * math.pi
        # logical Paulis flip the y and z axes
        sched = dg_schedule(math.pi - params.theta, math.pi - params.phi, angle, angle / params.g_peak)
        return sched
    profile = profile_for(kind, params)
    if kind.is_dfs:
        return schedule_from_profile(
            DFS.space, lambda t: control_hamiltonian(params, profile, t), profile, kind.value
        )
    return schedule_from_profile(
        BareEncoding(3).space, lambda t: bare_hamiltonian(params, profile, t), profile, kind.value
    )


def target_unitary(theta: float, phi: float, gamma: float) -> np.ndarray:
    """``exp(i gamma/2) exp(-i gamma n . sigma^L / 2)`` on ``(|0_L>, |1_L>)``."""
    n = (-math.sin(theta) * math.cos(phi), -math.sin(theta) * math.sin(phi), math.cos(theta))
    ns = sum(c * p for c, p in zip(n, PAULI_L))
    rot = math.cos(gamma / 2) * np.eye(2) - 1j * math.sin(gamma / 2) * ns
    return np.exp(1j * gamma / 2) * rot


@dataclass(frozen=True)
class LogicalChannel:
    """Trace-decreasing logical block of a propagated gate."""

    superop: np.ndarray
    leakage: float
    full: np.ndarray | None = None


def run_gate(schedule: PulseSchedule, kind: ProtocolKind, noise: NoiseSpec) -> LogicalChannel:
    """Propagate under ``(1 + delta) H`` with dephasing and keep the logical block.

    DFS kinds dephase through ``noise.topology`` on the three-transmon
    register; bare kinds dephase their single device with the number-weighted
    ``z``. Inputs are ``|0>_a<0| (x) rho_L``.
    """
    kind = ProtocolKind(kind)
    enc = encoding_for(kind)
    if schedule.space != enc.space:
        raise ValueError(f"schedule space {schedule.space.factor_dims} does not fit {kind.value}")
    full = channel_superoperator(schedule.scaled(1.0 + noise.delta), noise)
    block = restrict_channel(full, enc.logical_kets)
    leakage = channel_leakage(block)
    if leakage > LEAKAGE_ABORT:
        raise IntegrityError(f"{kind.value}: leakage {leakage:.3f} out of the logical space")
    return LogicalChannel(block, leakage, full)


def gate_fidelity(kind: ProtocolKind, params: GateParams, noise: NoiseSpec = NoiseSpec()) -> FidelityReport:
    """Compile, run and score one single-qubit gate."""
    ch = run_gate(compile_gate(kind, params), kind, noise)
    return avg_fidelity_channel(ch.superop, target_unitary(params.theta, params.phi, params.gamma))


def geometric_phase(params: GateParams, profile: PhaseProfile, t: float) -> float:
    """``gamma_b1(t)`` in closed form; ``params`` fixes nothing beyond the path."""
    return loop.geometric_phase(profile, t)


def ancillary_states(params: GateParams, profile: PhaseProfile, t: float) -> dict[str, np.ndarray]:
    """Ancillary states of both excitation sectors at time ``t``."""
    basis = dressed_basis(params.theta, params.phi)
    one = loop.ancillary_triple(profile, t, basis["b1"], basis["a1"], basis["d1"])
    two = loop.ancillary_triple(profile, t, basis["b2"], basis["a2"], basis["d2"], conjugate_phase=True)
    return {
        "mu_d1": one["d"], "mu_b1": one["b"], "mu_a1": one["a"],
        "mu_d2": two["d"], "mu_b2": two["b"], "mu_a2": two["a"],
    }


def verify_conditions(params: GateParams, profile: PhaseProfile, grid: int = 1024) -> ConditionReport:
    """Cyclicity, parallel transport and super-robustness defects of ``profile``."""
    return loop.loop_conditions(
        profile,
        lambda t: control_hamiltonian(params, profile, t),
        lambda t: ancillary_states(params, profile, t),
        grid=grid,
    )


@dataclass(frozen=True)
class PopulationTrace:
    times: np.ndarray
    pop_0L: np.ndarray
    pop_1L: np.ndarray


def population_trace(
    schedule: PulseSchedule, kind: ProtocolKind, psi0: np.ndarray, grid: int = 201
) -> PopulationTrace:
    """Closed-system logical populations at ``grid`` uniform times."""
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-10:
        raise ValueError("initial logical state must be normalised")
    if grid < 2:
        raise ValueError("need at least two trace points")
    enc = encoding_for(kind)
    times = np.linspace(0.0, schedule.total_duration, grid)
    states = states_at(schedule, enc.embed(psi0), times)
    k0, k1 = enc.logical_kets
    return PopulationTrace(times, np.abs(states @ k0.conj()) ** 2, np.abs(states @ k1.conj()) ** 2)


def realized_unitary(schedule: PulseSchedule, kind: ProtocolKind) -> np.ndarray:
    """Noiseless logical block of the propagator (may be sub-unitary if it leaks)."""
    enc = encoding_for(kind)
    u = np.eye(schedule.space.total_dim, dtype=complex)
    for seg in schedule.segments:
        u = expm_generator(seg.hamiltonian, seg.duration) @ u
    v = np.column_stack(enc.logical_kets)
    return dag(v) @ u @ v
