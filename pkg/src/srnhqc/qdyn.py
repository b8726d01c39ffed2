"""Dense linear algebra over factored Hilbert spaces and exact propagation of
piecewise-constant Hamiltonians.

Operators, kets and density matrices are plain complex ``numpy`` arrays; a
:class:`HilbertSpace` records how the total dimension factors into
subsystems. Subsystem ordering follows ``numpy.kron``: the first factor is
the most significant index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .constants import TOL
from .errors import DimensionError, IntegrityError, NotHermitianError, NotOrthonormalError


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor-product space with ``factor_dims[j]`` levels on subsystem ``j``."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims:
            raise DimensionError("a Hilbert space needs at least one factor")
        if any(d < 2 for d in dims):
            raise DimensionError(f"every factor needs >= 2 levels, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def index(self, levels: Sequence[int]) -> int:
        """Flat index of the product state ``|levels[0], levels[1], ...>``."""
        if len(levels) != len(self.factor_dims):
            raise DimensionError(f"expected {len(self.factor_dims)} levels, got {len(levels)}")
        return int(np.ravel_multi_index(tuple(levels), self.factor_dims))

    def ket(self, levels: Sequence[int]) -> np.ndarray:
        psi = np.zeros(self.total_dim, dtype=complex)
        psi[self.index(levels)] = 1.0
        return psi

    def levels(self, index: int) -> tuple[int, ...]:
        return tuple(int(n) for n in np.unravel_index(index, self.factor_dims))

    def excitation_number(self) -> np.ndarray:
        """Diagonal of the total excitation-number operator (|2> counts 2)."""
        return np.array(
            [sum(self.levels(i)) for i in range(self.total_dim)], dtype=float
        )


def basis_ket(dim: int, n: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def ketbra(i: int, j: int, dim: int) -> np.ndarray:
    """Matrix unit ``|i><j|`` on a ``dim``-level system."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |0><1| lowers, |1><0| raises; basis order (|0>, |1>)
SIGMA_MINUS = ketbra(0, 1, 2)
SIGMA_PLUS = ketbra(1, 0, 2)


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dag(h)))) if h.size else 0.0


def require_hermitian(h: np.ndarray, what: str = "operator", tol: float = TOL.hermitian) -> None:
    defect = hermitian_defect(h)
    if defect > tol:
        raise NotHermitianError(what, defect)


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))))


def is_unitary(u: np.ndarray, tol: float = TOL.unitary) -> bool:
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_defect(u) < tol


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of square operators in the listed order."""
    if len(factors) == 1 and not isinstance(factors[0], np.ndarray):
        factors = tuple(factors[0])
    for f in factors:
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise DimensionError(f"tensor factors must be square, got shape {f.shape}")
    return reduce(np.kron, factors)


def embed(op: np.ndarray, site: int, space: HilbertSpace) -> np.ndarray:
    """Place a single-subsystem operator on ``site``, identity elsewhere."""
    mats = [np.eye(d, dtype=complex) for d in space.factor_dims]
    if op.shape != mats[site].shape:
        raise DimensionError(f"operator of shape {op.shape} does not fit factor {site}")
    mats[site] = op
    return tensor(*mats)


def expm_generator(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H`` via its spectral decomposition."""
    require_hermitian(h, "generator")
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * t)) @ dag(evecs)


@dataclass(frozen=True)
class Segment:
    hamiltonian: np.ndarray
    duration: float


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered constant-Hamiltonian segments, earliest first."""

    space: HilbertSpace
    segments: tuple[Segment, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        segs = tuple(
            s if isinstance(s, Segment) else Segment(np.asarray(s[0], dtype=complex), float(s[1]))
            for s in self.segments
        )
        d = self.space.total_dim
        for k, s in enumerate(segs):
            if not s.duration > 0:
                raise ValueError(f"segment {k} has non-positive duration {s.duration}")
            if s.hamiltonian.shape != (d, d):
                raise DimensionError(
                    f"segment {k} Hamiltonian has shape {s.hamiltonian.shape}, space needs {(d, d)}"
                )
        object.__setattr__(self, "segments", segs)

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Segment start times followed by the final time."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def __len__(self) -> int:
        return len(self.segments)

    def scaled(self, factor: float) -> "PulseSchedule":
        """Every Hamiltonian multiplied by ``factor``, e.g. ``1 + delta``."""
        return PulseSchedule(
            self.space,
            tuple(Segment(factor * s.hamiltonian, s.duration) for s in self.segments),
            self.label,
        )

    def stretched(self, factor: float) -> "PulseSchedule":
        """Every duration multiplied by ``factor``."""
        return PulseSchedule(
            self.space,
            tuple(Segment(s.hamiltonian, factor * s.duration) for s in self.segments),
            self.label,
        )

    def refined(self, pieces: int) -> "PulseSchedule":
        """Each segment split into ``pieces`` equal parts."""
        return PulseSchedule(
            self.space,
            tuple(
                Segment(s.hamiltonian, s.duration / pieces)
                for s in self.segments
                for _ in range(pieces)
            ),
            self.label,
        )

    def hamiltonian_at(self, t: float) -> np.ndarray:
        """Hamiltonian active at time ``t``; a boundary belongs to the earlier segment."""
        edges = self.boundaries
        k = int(np.searchsorted(edges, t, side="left")) - 1
        k = min(max(k, 0), len(self.segments) - 1)
        return self.segments[k].hamiltonian


def propagator(schedule: PulseSchedule) -> np.ndarray:
    """``U(tau, 0)``: per-segment exponentials multiplied right to left."""
    u = np.eye(schedule.space.total_dim, dtype=complex)
    for seg in schedule.segments:
        u = expm_generator(seg.hamiltonian, seg.duration) @ u
    defect = unitarity_defect(u)
    if defect > TOL.propagator_unitary:
        raise IntegrityError(f"propagator lost unitarity: defect {defect:.3e}")
    return u


def evolve_piecewise(schedule: PulseSchedule, psi0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Final state and total propagator for a piecewise-constant schedule."""
    if not schedule.segments:
        raise ValueError("empty schedule")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (schedule.space.total_dim,):
        raise DimensionError(
            f"state of shape {psi0.shape} does not live in a space of dim {schedule.space.total_dim}"
        )
    u = propagator(schedule)
    return u @ psi0, u


def states_at(schedule: PulseSchedule, psi0: np.ndarray, times: Iterable[float]) -> np.ndarray:
    """Closed-system states at each requested time (times sorted ascending).

    Each segment is diagonalised once and reused for every sample inside it.
    """
    times = np.asarray(list(times), dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted")
    out = np.empty((len(times), schedule.space.total_dim), dtype=complex)
    psi = np.asarray(psi0, dtype=complex)
    t0 = 0.0
    i = 0
    n_seg = len(schedule.segments)
    for k, seg in enumerate(schedule.segments):
        evals, evecs = np.linalg.eigh(seg.hamiltonian)
        coeffs = dag(evecs) @ psi
        t1 = t0 + seg.duration
        last = k == n_seg - 1
        while i < len(times) and (times[i] <= t1 or last):
            dt = min(times[i], t1) - t0
            out[i] = evecs @ (np.exp(-1j * evals * max(dt, 0.0)) * coeffs)
            i += 1
        psi = evecs @ (np.exp(-1j * evals * seg.duration) * coeffs)
        t0 = t1
    return out


def projector(basis: Sequence[np.ndarray]) -> np.ndarray:
    """Orthogonal projector onto the span of an orthonormal list of kets."""
    vecs = np.column_stack([np.asarray(b, dtype=complex) for b in basis])
    gram = dag(vecs) @ vecs
    err = float(np.max(np.abs(gram - np.eye(len(basis)))))
    if err > TOL.orthonormal:
        raise NotOrthonormalError(f"basis is not orthonormal (max Gram defect {err:.3e})")
    return vecs @ dag(vecs)


def check_state(psi: np.ndarray, tol: float = TOL.state_norm) -> None:
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm!r} differs from 1")


def check_density(rho: np.ndarray) -> None:
    """Raise if ``rho`` is not a valid density matrix."""
    herm = hermitian_defect(rho)
    if herm > TOL.density_hermitian:
        raise ValueError(f"density matrix not Hermitian ({herm:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TOL.density_trace:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lo = float(np.linalg.eigvalsh((rho + dag(rho)) / 2).min())
    if lo < -TOL.density_eig:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorisation."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((dim, dim), order="F")
