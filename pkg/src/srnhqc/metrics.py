"""Gate and channel fidelities.

"Gate fidelity" everywhere in this package means the average gate fidelity
over Haar-random pure inputs, evaluated with the closed-form trace formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .open_system import unitary_super
from .qdyn import dag, is_unitary, vec


@dataclass(frozen=True)
class FidelityReport:
    avg_gate_fidelity: float
    process_fidelity: float
    leakage: float


def avg_fidelity_unitary(u: np.ndarray, v: np.ndarray) -> float:
    """``(|Tr(U^dag V)|^2 + d) / (d (d + 1))``; insensitive to global phase."""
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch {u.shape} vs {v.shape}")
    if not (is_unitary(u, 1e-8) and is_unitary(v, 1e-8)):
        raise ValueError("avg_fidelity_unitary needs unitary inputs")
    d = u.shape[0]
    return float((abs(np.trace(dag(u) @ v)) ** 2 + d) / (d * (d + 1)))


def avg_fidelity_channel(sup: np.ndarray, u_ideal: np.ndarray) -> FidelityReport:
    """Fidelity of a (possibly trace-decreasing) channel against a unitary.

    For a map with Kraus operators ``K_k`` this is
    ``(sum |Tr U^dag K_k|^2 + sum Tr K_k^dag K_k) / (d (d+1))``, which equals
    ``(d F_pro + 1 - leakage) / (d + 1)``. Leaked population lowers the
    result; nothing is renormalised.
    """
    d = u_ideal.shape[0]
    if sup.shape != (d * d, d * d):
        raise DimensionError(f"superoperator of shape {sup.shape} for a {d}-dim target")
    if not is_unitary(u_ideal, 1e-8):
        raise ValueError("target must be unitary")
    ideal = unitary_super(u_ideal)
    f_pro = float(np.real(np.trace(dag(ideal) @ sup))) / d**2
    vi = vec(np.eye(d))
    kept = float(np.real(vi.conj() @ sup @ vi)) / d
    leakage = max(0.0, 1.0 - kept)
    avg = (d * f_pro + kept) / (d + 1)
    return FidelityReport(
        avg_gate_fidelity=float(np.clip(avg, 0.0, 1.0)),
        process_fidelity=float(np.clip(f_pro, 0.0, 1.0)),
        leakage=leakage,
    )


def channel_leakage(sup: np.ndarray) -> float:
    """``1 - (vec I)^dag S (vec I) / d``: population lost by a trace-decreasing block."""
    d = int(round(np.sqrt(sup.shape[0])))
    vi = vec(np.eye(d))
    return max(0.0, 1.0 - float(np.real(vi.conj() @ sup @ vi)) / d)


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    return float(np.clip(np.real(psi.conj() @ rho @ psi), 0.0, 1.0))


def depolarizing_super(d: int, p: float = 1.0) -> np.ndarray:
    """``rho -> (1-p) rho + p Tr(rho) I/d``."""
    vi = vec(np.eye(d))
    return (1 - p) * np.eye(d * d, dtype=complex) + p * np.outer(vi, vi.conj()) / d
