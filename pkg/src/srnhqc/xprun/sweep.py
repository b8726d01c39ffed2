"""Parameter sweeps over control-error amplitude for each protocol."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .. import two
from ..metrics import avg_fidelity_channel
from ..open_system import NoiseSpec
from ..single import GateParams, ProtocolKind, compile_gate, run_gate, target_unitary
from .config import ConfigError, SweepConfig

GATE_ANGLES = {
    "not": (math.pi / 2, 0.0, math.pi),
    "hadamard": (math.pi / 4, 0.0, math.pi),
    "cnot": (math.pi / 2, 0.0, math.pi),
}


@dataclass(frozen=True)
class SweepRow:
    protocol: str
    gate: str
    delta: float
    t2_us: float
    fidelity: float
    leakage: float
    wall_time_ms: float = 0.0

    @property
    def avg_gate_fidelity(self) -> float:
        return self.fidelity


def gate_angles(cfg: SweepConfig) -> tuple[float, float, float]:
    """``(theta, phi, gamma)`` of the configured gate, with any overrides."""
    theta, phi, gamma = GATE_ANGLES[cfg.gate]
    return (
        theta if cfg.theta is None else cfg.theta,
        phi if cfg.phi is None else cfg.phi,
        gamma if cfg.gamma is None else cfg.gamma,
    )


def noise_for(cfg: SweepConfig, delta: float) -> NoiseSpec:
    return NoiseSpec(delta=delta, t2_us=cfg.t2_us, topology=cfg.noise_topology)


def run_point(cfg: SweepConfig, protocol: ProtocolKind, delta: float) -> SweepRow:
    """Fidelity and leakage of one (protocol, delta) point."""
    protocol = ProtocolKind(protocol)
    theta, phi, gamma = gate_angles(cfg)
    noise = noise_for(cfg, delta)
    start = time.perf_counter()
    if cfg.gate == "cnot":
        if protocol not in two.TWO_QUBIT_KINDS:
            raise ConfigError(f"cnot does not support {protocol.value}")
        sched = two.compile_two_qubit(protocol, theta, phi, gamma, cfg.tau_ns)
        ch = two.run_two_qubit_gate(sched, noise)
        report = avg_fidelity_channel(ch.superop, two.two_qubit_target(theta, phi, gamma))
    else:
        params = GateParams(theta, phi, gamma, cfg.tau_ns)
        ch = run_gate(compile_gate(protocol, params), protocol, noise)
        report = avg_fidelity_channel(ch.superop, target_unitary(theta, phi, gamma))
    elapsed = (time.perf_counter() - start) * 1e3 if cfg.record_timing else 0.0
    return SweepRow(
        protocol.value, cfg.gate, float(delta), float(cfg.t2_us),
        report.avg_gate_fidelity, report.leakage, elapsed,
    )


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[SweepRow]:
    """One row per (protocol, delta), sorted by protocol name then delta.

    Points are independent, so the worker count never changes the output.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    points = [(p, d) for p in cfg.protocols for d in cfg.delta_grid]
    if threads == 1:
        rows = [run_point(cfg, p, d) for p, d in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda pd: run_point(cfg, *pd), points))
    return sorted(rows, key=lambda r: (r.protocol, r.delta))
