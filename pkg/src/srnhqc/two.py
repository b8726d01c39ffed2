"""Two-logical-qubit holonomic gate on four transmons.

Logical states sit in the two-excitation sector of ``(Q1, Q2, Q3, Q4)``
with levels ``(2, 3, 2, 2)``; ``Q2`` supplies the auxiliary ``|A> = |0200>``.
Two exchange terms ``|11><20|`` on the pairs (2, 3) and (2, 4) couple ``|A>``
to the bright state

    |B> = sin(theta/2) |10>_L - cos(theta/2) e^{-i phi} |11>_L

while the dark state ``|D> = cos(theta/2) |10>_L + sin(theta/2) e^{-i phi} |11>_L``
is left alone. A staircase ``(0, s, 0, s)`` of the drive phase at
``G = 2 pi / tau`` returns ``|B>`` with phase ``exp(-2 i s)``, so a rotation
angle ``gamma_g`` uses ``s = gamma_g / 2`` (``s = pi`` for ``gamma_g = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import loop
from .errors import IntegrityError
from .loop import ConditionReport, PhaseProfile
from .metrics import FidelityReport, avg_fidelity_channel, channel_leakage
from .open_system import NoiseSpec, channel_superoperator, restrict_channel, sector_channel
from .qdyn import HilbertSpace, PulseSchedule, dag, ketbra, propagator, tensor
from .single import LEAKAGE_ABORT, ProtocolKind, schedule_from_profile, sr_phase_profile, nhqc_phase_profile

SPACE = HilbertSpace((2, 3, 2, 2))
LOGICAL_LABELS = ("00", "01", "10", "11")
TWO_QUBIT_KINDS = (ProtocolKind.SR_NHQC_DFS, ProtocolKind.NHQC_DFS)


@dataclass(frozen=True)
class TwoLogicalEncoding:
    space: HilbertSpace = SPACE

    @property
    def logical_kets(self) -> list[np.ndarray]:
        """``|00>_L, |01>_L, |10>_L, |11>_L``."""
        return [self.space.ket(l) for l in ((1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1))]

    @property
    def aux(self) -> np.ndarray:
        return self.space.ket((0, 2, 0, 0))

    def embed(self, psi_logical: np.ndarray) -> np.ndarray:
        return np.column_stack(self.logical_kets) @ np.asarray(psi_logical, dtype=complex)


ENC = TwoLogicalEncoding()


@dataclass(frozen=True)
class TwoQubitGateParams:
    """Mixing angle, phase and time scale; ``G`` defaults to ``2 pi / tau``."""

    theta: float = math.pi / 2
    varphi: float = 0.0
    tau: float = 100.0
    G: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.G is None:
            object.__setattr__(self, "G", 2 * math.pi / self.tau)

    @property
    def couplings(self) -> tuple[complex, complex]:
        """``(g'_23, g'_24)`` in units of ``G``."""
        return math.sin(self.theta / 2), -math.cos(self.theta / 2) * np.exp(-1j * self.varphi)


def bright_dark(theta: float, varphi: float) -> tuple[np.ndarray, np.ndarray]:
    k = ENC.logical_kets
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    em = np.exp(-1j * varphi)
    return s * k[2] - c * em * k[3], c * k[2] + s * em * k[3]


@lru_cache(maxsize=None)
def _exchange_ops() -> tuple[np.ndarray, np.ndarray]:
    """``|1><2|_2 |1><0|_3`` and ``|1><2|_2 |1><0|_4`` (Q2 gives up one quantum to its neighbour)."""
    i2 = np.eye(2)
    down2 = ketbra(1, 2, 3)
    up = ketbra(1, 0, 2)
    return tensor(i2, down2, up, i2), tensor(i2, down2, i2, up)


def two_qubit_hamiltonian(params: TwoQubitGateParams, profile: PhaseProfile, t: float) -> np.ndarray:
    """Effective exchange Hamiltonian on the 24-dim register at time ``t``."""
    op23, op24 = _exchange_ops()
    g = profile.amplitude_at(t)
    c23, c24 = params.couplings
    h = g * np.exp(-1j * profile.value_at(t)) * (c23 * op23 + c24 * op24)
    return h + dag(h)


def sr_step_two(gamma_g: float) -> float:
    s = loop.wrap_angle(gamma_g / 2)
    return math.pi if abs(s) < 1e-15 else s


def two_qubit_profile(kind: ProtocolKind, gamma_g: float, tau: float, G: float | None = None) -> PhaseProfile:
    kind = ProtocolKind(kind)
    G = 2 * math.pi / tau if G is None else G
    if kind is ProtocolKind.SR_NHQC_DFS:
        return sr_phase_profile(sr_step_two(gamma_g), tau, G)
    if kind is ProtocolKind.NHQC_DFS:
        return nhqc_phase_profile(gamma_g, tau, G / 2)
    raise ValueError(f"two-qubit gates support {[k.value for k in TWO_QUBIT_KINDS]}, not {kind.value}")


def compile_two_qubit(
    kind: ProtocolKind, theta: float, varphi: float, gamma_g: float, tau: float = 100.0
) -> PulseSchedule:
    params = TwoQubitGateParams(theta, varphi, tau)
    profile = two_qubit_profile(kind, gamma_g, tau, params.G)
    return schedule_from_profile(
        SPACE, lambda t: two_qubit_hamiltonian(params, profile, t), profile, ProtocolKind(kind).value
    )


def cnot_schedule(tau: float = 100.0, kind: ProtocolKind = ProtocolKind.SR_NHQC_DFS) -> PulseSchedule:
    """CNOT: ``theta = pi/2``, ``varphi = 0``, rotation ``pi``; four quarters for the SR staircase."""
    return compile_two_qubit(kind, math.pi / 2, 0.0, math.pi, tau)


def two_qubit_target(theta: float, varphi: float, gamma_g: float) -> np.ndarray:
    """Identity on ``|00>, |01>`` and ``e^{-i g/2} e^{i g n . sigma_L / 2}`` on ``|10>, |11>``.

    ``sigma_ZL = |11><11| - |10><10|`` and ``n = (sin t cos p, sin t sin p, -cos t)``.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, 1j], [-1j, 0]], dtype=complex)
    sz = np.diag([-1.0, 1.0]).astype(complex)
    n = (math.sin(theta) * math.cos(varphi), math.sin(theta) * math.sin(varphi), -math.cos(theta))
    ns = n[0] * sx + n[1] * sy + n[2] * sz
    block = np.exp(-0.5j * gamma_g) * (math.cos(gamma_g / 2) * np.eye(2) + 1j * math.sin(gamma_g / 2) * ns)
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = block
    return u


CNOT = two_qubit_target(math.pi / 2, 0.0, math.pi)


@dataclass(frozen=True)
class TwoQubitChannel:
    """Logical block, leakage and the propagated channel it came from
    (two-excitation sector or full register)."""

    superop: np.ndarray
    leakage: float
    full: np.ndarray | None = None


def two_excitation_sector() -> np.ndarray:
    """Basis indices with total excitation 2 (``|2>`` counts twice); 7 of 24."""
    return np.flatnonzero(SPACE.excitation_number() == 2)


def run_two_qubit_gate(schedule: PulseSchedule, noise: NoiseSpec, reduce: bool = True) -> TwoQubitChannel:
    """Noisy logical 4x4 block (16x16 superoperator) plus leakage.

    With ``reduce`` the Lindblad flow runs on the two-excitation sector only,
    which the exchange Hamiltonian and the diagonal dephasing leave invariant;
    ``reduce=False`` propagates the full 24-level register.
    """
    if schedule.space != SPACE:
        raise ValueError("schedule does not act on the four-transmon register")
    scaled = schedule.scaled(1.0 + noise.delta)
    if reduce:
        idx = two_excitation_sector()
        sup = sector_channel(scaled, noise, idx)
        kets = [k[idx] for k in ENC.logical_kets]
    else:
        sup = channel_superoperator(scaled, noise)
        kets = ENC.logical_kets
    block = restrict_channel(sup, kets)
    leakage = channel_leakage(block)
    if leakage > LEAKAGE_ABORT:
        raise IntegrityError(f"two-qubit gate leaks {leakage:.3f} out of the logical space")
    return TwoQubitChannel(block, leakage, sup)


def cnot_fidelity(kind: ProtocolKind, noise: NoiseSpec = NoiseSpec(), tau: float = 100.0) -> FidelityReport:
    ch = run_two_qubit_gate(cnot_schedule(tau, kind), noise)
    return avg_fidelity_channel(ch.superop, CNOT)


def ancillary_states(params: TwoQubitGateParams, profile: PhaseProfile, t: float) -> dict[str, np.ndarray]:
    b, d = bright_dark(params.theta, params.varphi)
    tri = loop.ancillary_triple(profile, t, b, ENC.aux, d)
    return {"nu_D": tri["d"], "nu_B": tri["b"], "nu_A": tri["a"]}


def verify_two_qubit_conditions(
    params: TwoQubitGateParams, profile: PhaseProfile, grid: int = 1024
) -> ConditionReport:
    return loop.loop_conditions(
        profile,
        lambda t: two_qubit_hamiltonian(params, profile, t),
        lambda t: ancillary_states(params, profile, t),
        grid=grid,
    )


def aux_bright_phases(schedule: PulseSchedule, theta: float = math.pi / 2, varphi: float = 0.0) -> tuple[float, float]:
    """``(gamma_A, gamma_B)``: eigenphases of the noiseless propagator on ``span{|A>, |B>}``."""
    u = propagator(schedule)
    b, _ = bright_dark(theta, varphi)
    v = np.column_stack([ENC.aux, b])
    block = dag(v) @ u @ v
    return float(np.angle(block[0, 0])), float(np.angle(block[1, 1]))
