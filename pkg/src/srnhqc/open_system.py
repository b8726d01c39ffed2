"""Lindblad propagation under pure dephasing and channel extraction.

Superoperators act on column-stacked density matrices, so that
``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import expm

from .constants import TOL
from .errors import DimensionError, IntegrityError
from .qdyn import HilbertSpace, PulseSchedule, dag, embed, require_hermitian, unvec, vec

Topology = Literal["collective", "independent"]

# z = 2n - 1: sigma_z on a qubit, linear in excitation number on a qutrit
TRANSMON_WEIGHTS: tuple[float, ...] = (-1.0, 1.0, 3.0)


@dataclass(frozen=True)
class NoiseSpec:
    """Control-error amplitude and dephasing configuration.

    ``t2_us`` may be ``math.inf`` for no dephasing. The dephasing rate is
    ``1/T2`` by default; ``rate_convention="half"`` gives ``1/(2 T2)``.
    """

    delta: float = 0.0
    t2_us: float = math.inf
    topology: Topology = "collective"
    dephasing_weights: tuple[float, ...] = TRANSMON_WEIGHTS
    rate_convention: Literal["inverse", "half"] = "inverse"
    gamma_override: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.t2_us > 0):
            raise ValueError(f"t2_us must be positive or inf, got {self.t2_us}")
        if self.topology not in ("collective", "independent"):
            raise ValueError(f"unknown noise topology {self.topology!r}")
        if self.rate_convention not in ("inverse", "half"):
            raise ValueError(f"unknown rate convention {self.rate_convention!r}")
        if self.gamma_override is not None and self.gamma_override < 0:
            raise ValueError("dephasing rate must be non-negative")

    @property
    def gamma_phi(self) -> float:
        """Pure dephasing rate in 1/ns."""
        if self.gamma_override is not None:
            return float(self.gamma_override)
        if math.isinf(self.t2_us):
            return 0.0
        t2_ns = self.t2_us * 1e3
        return 1.0 / t2_ns if self.rate_convention == "inverse" else 0.5 / t2_ns

    @classmethod
    def with_rate(cls, gamma: float, **kw) -> "NoiseSpec":
        """Noise with an explicit dephasing rate (1/ns) instead of a T2."""
        t2 = math.inf if gamma == 0 else 1e-3 / gamma
        return cls(t2_us=t2, gamma_override=gamma, **kw)


def _level_op(weights: Sequence[float], dim: int) -> np.ndarray:
    if len(weights) < dim:
        raise ValueError(f"no dephasing weight for level {len(weights)} of a {dim}-level factor")
    return np.diag(np.asarray(weights[:dim], dtype=complex))


def local_z(space: HilbertSpace, weights: Sequence[float] = TRANSMON_WEIGHTS) -> list[np.ndarray]:
    """Per-subsystem dephasing operators ``z_j``."""
    return [embed(_level_op(weights, d), j, space) for j, d in enumerate(space.factor_dims)]


def collective_z(space: HilbertSpace, weights: Sequence[float] = TRANSMON_WEIGHTS) -> np.ndarray:
    """Collective dephasing operator ``sum_j z_j``."""
    return sum(local_z(space, weights))


def dephasing_operators(space: HilbertSpace, noise: NoiseSpec) -> list[np.ndarray]:
    if noise.topology == "collective":
        return [collective_z(space, noise.dephasing_weights)]
    return local_z(space, noise.dephasing_weights)


def commutator_super(h: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> -i[H, rho]``."""
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_super(z: np.ndarray, rate: float) -> np.ndarray:
    """Superoperator of ``(rate/2)(2 Z rho Z - Z^2 rho - rho Z^2)`` for Hermitian ``Z``."""
    eye = np.eye(z.shape[0])
    z2 = z @ z
    return 0.5 * rate * (2 * np.kron(z.T, z) - np.kron(eye, z2) - np.kron(z2.T, eye))


def apply_dissipator(z: np.ndarray, rate: float, rho: np.ndarray) -> np.ndarray:
    z2 = z @ z
    return 0.5 * rate * (2 * z @ rho @ z - z2 @ rho - rho @ z2)


def build_liouvillian(
    h: np.ndarray, noise: NoiseSpec, space: HilbertSpace | None = None
) -> np.ndarray:
    """Generator ``L`` with ``d vec(rho)/dt = L vec(rho)``."""
    require_hermitian(h, "Hamiltonian")
    if space is None:
        space = HilbertSpace((h.shape[0],))
    if space.total_dim != h.shape[0]:
        raise DimensionError("Hamiltonian does not match the Hilbert space")
    gen = commutator_super(h)
    rate = noise.gamma_phi
    if rate > 0:
        for z in dephasing_operators(space, noise):
            gen = gen + dissipator_super(z, rate)
    return gen


def _segment_supers(schedule: PulseSchedule, noise: NoiseSpec) -> list[np.ndarray]:
    return [
        expm(build_liouvillian(s.hamiltonian, noise, schedule.space) * s.duration)
        for s in schedule.segments
    ]


def propagate_density(schedule: PulseSchedule, rho0: np.ndarray, noise: NoiseSpec) -> np.ndarray:
    """Density matrix at the end of ``schedule``.

    The schedule Hamiltonians are used as given; apply the control-error
    scaling beforehand with :meth:`PulseSchedule.scaled`.
    """
    d = schedule.space.total_dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise DimensionError(f"rho of shape {rho0.shape} in a space of dim {d}")
    v = vec(rho0)
    for sup in _segment_supers(schedule, noise):
        v = sup @ v
    rho = unvec(v, d)
    rho = 0.5 * (rho + dag(rho))
    drift = abs(np.trace(rho).real - np.trace(rho0).real)
    if drift > TOL.trace_drift_abort:
        raise IntegrityError(f"trace drifted by {drift:.3e} during propagation")
    return rho


def channel_superoperator(schedule: PulseSchedule, noise: NoiseSpec) -> np.ndarray:
    """Full ``d^2 x d^2`` superoperator of the noisy schedule."""
    d = schedule.space.total_dim
    sup = np.eye(d * d, dtype=complex)
    for seg in _segment_supers(schedule, noise):
        sup = seg @ sup
    _check_channel(sup)
    return sup


def sector_channel(schedule: PulseSchedule, noise: NoiseSpec, indices: Sequence[int]) -> np.ndarray:
    """Superoperator restricted to an invariant set of basis states.

    Exact when every segment Hamiltonian leaves ``span{|i> : i in indices}``
    invariant and the dephasing operators are diagonal: the Lindblad flow then
    never couples the sector block of ``rho`` to anything else.
    """
    idx = np.asarray(indices, dtype=int)
    d = schedule.space.total_dim
    rest = np.setdiff1d(np.arange(d), idx)
    zs = dephasing_operators(schedule.space, noise) if noise.gamma_phi > 0 else []
    for z in zs:
        if np.max(np.abs(z - np.diag(np.diag(z)))) > 0:
            raise ValueError("sector reduction needs diagonal dephasing operators")
    n = len(idx)
    sup = np.eye(n * n, dtype=complex)
    for k, seg in enumerate(schedule.segments):
        h = seg.hamiltonian
        if rest.size and np.max(np.abs(h[np.ix_(rest, idx)])) > 1e-13:
            raise ValueError(f"segment {k} couples the sector to the rest of the space")
        gen = commutator_super(h[np.ix_(idx, idx)])
        for z in zs:
            gen = gen + dissipator_super(z[np.ix_(idx, idx)], noise.gamma_phi)
        sup = expm(gen * seg.duration) @ sup
    _check_channel(sup)
    return sup


def _check_channel(sup: np.ndarray) -> None:
    lo = choi_min_eig(sup)
    if lo < -TOL.choi_abort:
        raise IntegrityError(f"channel is not completely positive: Choi eigenvalue {lo:.3e}")
    tp = trace_preservation_defect(sup)
    if tp > TOL.trace_drift_abort:
        raise IntegrityError(f"channel is not trace preserving: defect {tp:.3e}")


def unitary_super(u: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> U rho U^dag``."""
    return np.kron(u.conj(), u)


def choi_matrix(sup: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) Lambda(|i><j|)``."""
    d = int(round(np.sqrt(sup.shape[0])))
    s4 = sup.reshape(d, d, d, d)  # [b, a, j, i] for rows a + d*b, cols i + d*j
    return s4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


def choi_min_eig(sup: np.ndarray) -> float:
    j = choi_matrix(sup)
    return float(np.linalg.eigvalsh(0.5 * (j + dag(j))).min())


def trace_preservation_defect(sup: np.ndarray) -> float:
    """``max |(vec I)^dag S - (vec I)^dag|``."""
    d = int(round(np.sqrt(sup.shape[0])))
    vi = vec(np.eye(d))
    return float(np.max(np.abs(vi.conj() @ sup - vi)))


def restrict_channel(sup: np.ndarray, kets: Sequence[np.ndarray]) -> np.ndarray:
    """Channel on the span of ``kets``: embed ``V rho V^dag``, propagate, read ``V^dag rho V``.

    The result is trace-decreasing when population leaves the span.
    """
    v = np.column_stack([np.asarray(k, dtype=complex) for k in kets])
    inject = np.kron(v.conj(), v)
    extract = np.kron(v.T, dag(v))
    return extract @ sup @ inject


def apply_super(sup: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(sup @ vec(rho), rho.shape[0])
