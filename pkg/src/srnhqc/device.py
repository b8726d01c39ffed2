"""Transmon pair under parametric frequency modulation.

Covers the Bessel-sideband effective coupling and a fine-step check of the
rotating-wave approximation against the full time-dependent two-qubit model.
Qubit levels use ``z = diag(-1, +1)`` so that ``|1>`` is the excited state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import StepResolutionError
from .qdyn import SIGMA_MINUS, SIGMA_PLUS, tensor

SERIES_LIMIT = 12.0
MAX_ARG = 50.0


def _bessel_series(n: int, x: float) -> float:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= -half * half / (k * (k + n))
        terms.append(term)
        if k > half and abs(term) < 1e-20:
            break
    return math.fsum(terms)


def _bessel_miller(n: int, x: float) -> float:
    # downward recurrence from an even start far above max(n, x), normalised
    # with J0 + 2 (J2 + J4 + ...) = 1
    start = 2 * ((max(n, int(x)) + 30 + int(math.sqrt(60 * max(n, x)))) // 2)
    j_above, j_here = 0.0, 1.0
    even_sum = 0.0
    result = 0.0
    add = False
    for k in range(start, 0, -1):
        j_below = 2 * k / x * j_here - j_above
        j_above, j_here = j_here, j_below  # j_here is now J_{k-1}
        if abs(j_here) > 1e200:
            j_here *= 1e-200
            j_above *= 1e-200
            even_sum *= 1e-200
            result *= 1e-200
        if add:
            even_sum += j_here
        add = not add
        if k == n:
            result = j_above
    if n == 0:
        result = j_here
    return result / (2 * even_sum - j_here)


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind ``J_n(x)`` for integer ``n >= 0``, ``|x| <= 50``."""
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a non-negative integer, got {n}")
    n = int(n)
    if abs(x) > MAX_ARG:
        raise ValueError(f"|x| = {abs(x)} exceeds the supported range {MAX_ARG}")
    sign = -1.0 if (x < 0 and n % 2) else 1.0
    ax = abs(x)
    if ax == 0.0:
        return 1.0 if n == 0 else 0.0
    if ax <= SERIES_LIMIT:
        return sign * _bessel_series(n, ax)
    return sign * _bessel_miller(n, ax)


@dataclass(frozen=True)
class TransmonSpec:
    omega: float
    alpha: float = 0.0
    levels: int = 2

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("qubit frequency must be positive")
        if self.levels not in (2, 3):
            raise ValueError("levels must be 2 or 3")
        if self.alpha < 0:
            raise ValueError("anharmonicity must be non-negative")


@dataclass(frozen=True)
class ModulationSpec:
    """``omega(t) = omega + epsilon sin(nu t + phase)``."""

    epsilon: float
    nu: float
    phase: float = 0.0

    def __post_init__(self):
        if self.nu == 0:
            raise ValueError("modulation frequency must be non-zero")

    @property
    def beta(self) -> float:
        return self.epsilon / self.nu

    @classmethod
    def from_beta(cls, beta: float, nu: float, phase: float = 0.0) -> "ModulationSpec":
        return cls(epsilon=beta * nu, nu=nu, phase=phase)


@dataclass(frozen=True)
class CouplingSpec:
    g: complex


def effective_coupling(g: complex, mod: ModulationSpec) -> complex:
    """First-sideband exchange strength ``g J1(beta) exp(-i(phase + pi/2))``."""
    return g * bessel_j(1, mod.beta) * cmath.exp(-1j * (mod.phase + math.pi / 2))


_Z2 = np.diag([-1.0, 1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)
_X2 = SIGMA_PLUS + SIGMA_MINUS


def lab_frame_pair_hamiltonian(
    q1: TransmonSpec, q2: TransmonSpec, c: CouplingSpec, mod: ModulationSpec, t: float
) -> np.ndarray:
    """Two-level lab-frame Hamiltonian at time ``t`` with qubit 1 modulated."""
    w1 = q1.omega + mod.epsilon * math.sin(mod.nu * t + mod.phase)
    h0 = 0.5 * w1 * tensor(_Z2, _I2) + 0.5 * q2.omega * tensor(_I2, _Z2)
    # g sigma1+ (sigma2+ + sigma2-) + h.c.; equals g X1 X2 for real g
    half = c.g * tensor(SIGMA_PLUS, _X2)
    return h0 + half + half.conj().T


def _phase_integrals(q1: TransmonSpec, q2: TransmonSpec, mod: ModulationSpec, t: np.ndarray):
    """Closed-form ``int_0^t omega_m(s) ds`` for both qubits."""
    th1 = q1.omega * t - mod.beta * (np.cos(mod.nu * t + mod.phase) - math.cos(mod.phase))
    th2 = q2.omega * t
    return th1, th2


def _offdiag_terms(q1, q2, c, mod, t):
    """Interaction-picture matrix elements ``<10|H_I|01>`` and ``<11|H_I|00>``."""
    th1, th2 = _phase_integrals(q1, q2, mod, t)
    # state energy is (omega1 z1 + omega2 z2)/2 with z = -1, +1
    exchange = c.g * np.exp(1j * (th1 - th2))
    pair = c.g * np.exp(1j * (th1 + th2))
    return exchange, pair


def _su2_exp(k: np.ndarray) -> np.ndarray:
    """Batched ``exp(-i K)`` for Hermitian traceless 2x2 ``K`` of shape (N, 2, 2)."""
    kz = k[:, 0, 0].real
    kx = k[:, 1, 0].real
    ky = k[:, 1, 0].imag
    norm = np.sqrt(kx**2 + ky**2 + kz**2)
    cos = np.cos(norm)
    sinc = np.where(norm > 0, np.sin(norm) / np.where(norm > 0, norm, 1.0), 1.0)
    out = np.empty_like(k)
    out[:, 0, 0] = cos - 1j * sinc * k[:, 0, 0]
    out[:, 1, 1] = cos - 1j * sinc * k[:, 1, 1]
    out[:, 0, 1] = -1j * sinc * k[:, 0, 1]
    out[:, 1, 0] = -1j * sinc * k[:, 1, 0]
    return out


def _offdiag_block(h: np.ndarray) -> np.ndarray:
    m = np.zeros((h.size, 2, 2), dtype=complex)
    m[:, 0, 1] = h
    m[:, 1, 0] = h.conj()
    return m


def _step_propagators(coupling, t0: float, dt: float, n: int, scheme: str) -> np.ndarray:
    """One-step propagators for ``H(t) = [[0, h(t)], [h*(t), 0]]``."""
    starts = t0 + dt * np.arange(n)
    if scheme == "midpoint":
        k = dt * _offdiag_block(coupling(starts + 0.5 * dt))
    elif scheme == "magnus4":
        off = math.sqrt(3) / 6
        h1 = _offdiag_block(coupling(starts + (0.5 - off) * dt))
        h2 = _offdiag_block(coupling(starts + (0.5 + off) * dt))
        comm = h1 @ h2 - h2 @ h1
        k = 0.5 * dt * (h1 + h2) + 1j * (math.sqrt(3) / 12) * dt**2 * comm
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return _su2_exp(k)


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(2, dtype=complex)[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _block_path(coupling, duration: float, samples: int, steps_per_sample: int, scheme: str):
    """Cumulative propagators at ``samples`` equally spaced times, t=0 included."""
    dt = duration / ((samples - 1) * steps_per_sample)
    path = np.empty((samples, 2, 2), dtype=complex)
    path[0] = np.eye(2)
    for i in range(1, samples):
        t0 = (i - 1) * steps_per_sample * dt
        step = _step_propagators(coupling, t0, dt, steps_per_sample, scheme)
        path[i] = _ordered_product(step) @ path[i - 1]
    return path


@dataclass(frozen=True)
class RWAResult:
    times: np.ndarray
    p_full: np.ndarray
    p_eff: np.ndarray
    deviation: float
    step_ns: float
    unitarity_defect: float
    refinement_change: float


def rwa_curves(
    q1: TransmonSpec,
    q2: TransmonSpec,
    c: CouplingSpec,
    mod: ModulationSpec,
    duration: float | None = None,
    samples: int = 201,
    scheme: str = "magnus4",
    tol: float = 1e-8,
    max_refinements: int = 6,
) -> RWAResult:
    """Population transfer ``|10> -> |01>`` in the full and the effective model.

    The full model is integrated in the interaction picture with a fixed step
    no larger than ``2 pi / (100 f_max)``; the step is halved until the
    final propagator changes by less than ``tol``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    g_eff = abs(effective_coupling(c.g, mod))
    if duration is None:
        if g_eff == 0:
            raise ValueError("duration required when the effective coupling vanishes")
        duration = math.pi / g_eff
    times = np.linspace(0.0, duration, samples)
    p_eff = np.sin(g_eff * times) ** 2

    exch = lambda t: _offdiag_terms(q1, q2, c, mod, t)[0]  # noqa: E731
    pair = lambda t: _offdiag_terms(q1, q2, c, mod, t)[1]  # noqa: E731
    f_exch = abs(q1.omega - q2.omega) + abs(mod.epsilon)
    f_pair = q1.omega + q2.omega + abs(mod.epsilon)
    f_max = max(f_exch, f_pair)
    dt_max = 2 * math.pi / (100 * f_max)
    base = max(1, math.ceil(duration / ((samples - 1) * dt_max)))

    def final_props(k: int):
        per_sample = base * 2**k
        e = _block_path(exch, duration, samples, per_sample, scheme)
        p = _block_path(pair, duration, samples, per_sample, scheme)[-1]
        return e, p

    prev_e, prev_p = final_props(0)
    change = math.inf
    for k in range(1, max_refinements + 1):
        cur_e, cur_p = final_props(k)
        change = max(
            float(np.max(np.abs(cur_e[-1] - prev_e[-1]))),
            float(np.max(np.abs(cur_p - prev_p))),
        )
        prev_e, prev_p = cur_e, cur_p
        if change < tol:
            break
    else:
        raise StepResolutionError(
            f"fine-step propagator still changes by {change:.2e} after {max_refinements} refinements"
        )
    # ordering (|00>, |01>, |10>, |11>); exchange block on (|10>, |01>), pair block on (|11>, |00>)
    full = np.zeros((4, 4), dtype=complex)
    e, p = prev_e[-1], prev_p
    full[np.ix_([2, 1], [2, 1])] = e
    full[np.ix_([3, 0], [3, 0])] = p
    defect = float(np.max(np.abs(full.conj().T @ full - np.eye(4))))
    if defect > 1e-8:
        raise StepResolutionError(f"full-model propagator not unitary: defect {defect:.2e}")
    # start in |10> (first basis vector of the exchange block), read |01>
    p_full = np.abs(prev_e[:, 1, 0]) ** 2
    return RWAResult(
        times=times,
        p_full=p_full,
        p_eff=p_eff,
        deviation=float(np.max(np.abs(p_full - p_eff))),
        step_ns=duration / ((samples - 1) * base * 2**k),
        unitarity_defect=defect,
        refinement_change=change,
    )


def rwa_deviation(
    q1: TransmonSpec,
    q2: TransmonSpec,
    c: CouplingSpec,
    mod: ModulationSpec,
    duration: float | None = None,
    samples: int = 201,
) -> float:
    """Max over sampled times of ``|p_full(t) - p_eff(t)|`` for the transfer ``|10> -> |01>``."""
    if c.g == 0:
        return 0.0
    return rwa_curves(q1, q2, c, mod, duration, samples).deviation


def resonant_pair(
    g_mhz: float, detuning_mhz: float, beta: float, f1_ghz: float = 4.5, phase: float = 0.0
) -> tuple[TransmonSpec, TransmonSpec, CouplingSpec, ModulationSpec]:
    """Pair with qubit 2 above qubit 1 by ``detuning_mhz`` and ``nu = -Delta``."""
    two_pi = 2 * math.pi
    w1 = two_pi * f1_ghz
    w2 = w1 + two_pi * detuning_mhz * 1e-3
    nu = w2 - w1
    return (
        TransmonSpec(w1),
        TransmonSpec(w2),
        CouplingSpec(two_pi * g_mhz * 1e-3),
        ModulationSpec.from_beta(beta, nu, phase),
    )
