"""INI experiment configuration.

A file has up to four sections::

    [gate]
    name = not              # not | hadamard | cnot
    tau_ns = 100
    # theta, phi, gamma override the named gate's angles

    [noise]
    t2_us = 40              # or inf
    topology = collective   # collective | independent

    [sweep]
    protocols = SR_NHQC_DFS, NHQC_DFS, DG_BARE
    delta = 0.0, 0.01, 0.02
    trace_points = 201
    record_timing = false

    [device]
    g_mhz = 5
    detuning_mhz = 500
    beta = 1.0

Every problem is reported as a :class:`ConfigError` naming the file, line
and field.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..single import ProtocolKind

GATES = ("not", "hadamard", "cnot")
TWO_QUBIT_PROTOCOLS = (ProtocolKind.SR_NHQC_DFS, ProtocolKind.NHQC_DFS)
KNOWN = {
    "gate": {"name", "tau_ns", "theta", "phi", "gamma"},
    "noise": {"t2_us", "topology"},
    "sweep": {"protocols", "delta", "trace_points", "record_timing"},
    "device": {"g_mhz", "detuning_mhz", "beta", "f1_ghz", "phase", "samples", "duration_ns"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message carries file/line/field context."""


@dataclass(frozen=True)
class SweepConfig:
    gate: str = "not"
    protocols: tuple[ProtocolKind, ...] = (ProtocolKind.SR_NHQC_DFS,)
    delta_grid: tuple[float, ...] = (0.0,)
    t2_us: float = math.inf
    noise_topology: str = "collective"
    tau_ns: float = 100.0
    trace_points: int = 201
    record_timing: bool = False
    theta: float | None = None
    phi: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.gate not in GATES:
            raise ConfigError(f"gate must be one of {GATES}, got {self.gate!r}")
        if not self.protocols:
            raise ConfigError("at least one protocol is required")
        object.__setattr__(self, "protocols", tuple(ProtocolKind(p) for p in self.protocols))
        if not self.delta_grid:
            raise ConfigError("delta grid is empty")
        if any(b < a for a, b in zip(self.delta_grid, self.delta_grid[1:])):
            raise ConfigError("delta grid must be sorted ascending")
        if self.gate == "cnot":
            bad = [p.value for p in self.protocols if p not in TWO_QUBIT_PROTOCOLS]
            if bad:
                raise ConfigError(f"cnot supports only SR_NHQC_DFS and NHQC_DFS, not {bad}")
        if not self.t2_us > 0:
            raise ConfigError("t2_us must be positive or inf")
        if self.noise_topology not in ("collective", "independent"):
            raise ConfigError(f"unknown noise topology {self.noise_topology!r}")
        if not self.tau_ns > 0:
            raise ConfigError("tau_ns must be positive")
        if self.trace_points < 2:
            raise ConfigError("trace_points must be at least 2")


@dataclass(frozen=True)
class DeviceConfig:
    """Two-transmon parametric-coupling check; frequencies in MHz/GHz as labelled."""

    g_mhz: float = 5.0
    detuning_mhz: float = 500.0
    beta: float = 1.0
    f1_ghz: float = 4.5
    phase: float = 0.0
    samples: int = 201
    duration_ns: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    sweep: SweepConfig = field(default_factory=SweepConfig)
    device: DeviceConfig = field(default_factory=DeviceConfig)
    source: str = "<string>"


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip().lower()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", line, re.I):
            return n
    return None


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, text: str, source: str):
        self.parser, self.text, self.source = parser, text, source

    def where(self, section: str, key: str) -> str:
        line = _line_of(self.text, section, key)
        loc = f"{self.source}:{line}" if line else self.source
        return f"{loc}: [{section}] {key}"

    def raw(self, section: str, key: str):
        if not self.parser.has_section(section) or not self.parser.has_option(section, key):
            return None
        return self.parser.get(section, key).strip()

    def number(self, section: str, key: str, default, cast=float):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            return cast(value)
        except ValueError:
            raise ConfigError(f"{self.where(section, key)}: cannot read {value!r} as {cast.__name__}") from None

    def floats(self, section: str, key: str, default):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            return tuple(float(v) for v in re.split(r"[,\s]+", value) if v)
        except ValueError:
            raise ConfigError(f"{self.where(section, key)}: expected a list of numbers, got {value!r}") from None

    def boolean(self, section: str, key: str, default: bool) -> bool:
        if self.raw(section, key) is None:
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise ConfigError(f"{self.where(section, key)}: expected true/false") from None


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    for section in parser.sections():
        if section not in KNOWN:
            raise ConfigError(f"{source}:{_line_of(text, section.lower(), '') or '?'}: unknown section [{section}]")
        for key in parser.options(section):
            if key not in KNOWN[section]:
                raise ConfigError(f"{source}:{_line_of(text, section, key) or '?'}: unknown field [{section}] {key}")
    r = _Reader(parser, text, source)

    protocols_raw = r.raw("sweep", "protocols")
    protocols: tuple[ProtocolKind, ...] = (ProtocolKind.SR_NHQC_DFS,)
    if protocols_raw is not None:
        try:
            protocols = tuple(ProtocolKind.parse(p) for p in re.split(r"[,\s]+", protocols_raw) if p)
        except ValueError as exc:
            raise ConfigError(f"{r.where('sweep', 'protocols')}: {exc}") from None

    topology = (r.raw("noise", "topology") or "collective").lower()
    gate = (r.raw("gate", "name") or "not").lower()
    try:
        sweep = SweepConfig(
            gate=gate,
            protocols=protocols,
            delta_grid=r.floats("sweep", "delta", (0.0,)),
            t2_us=r.number("noise", "t2_us", math.inf),
            noise_topology=topology,
            tau_ns=r.number("gate", "tau_ns", 100.0),
            trace_points=r.number("sweep", "trace_points", 201, int),
            record_timing=r.boolean("sweep", "record_timing", False),
            theta=r.number("gate", "theta", None),
            phi=r.number("gate", "phi", None),
            gamma=r.number("gate", "gamma", None),
        )
        device = DeviceConfig(
            g_mhz=r.number("device", "g_mhz", 5.0),
            detuning_mhz=r.number("device", "detuning_mhz", 500.0),
            beta=r.number("device", "beta", 1.0),
            f1_ghz=r.number("device", "f1_ghz", 4.5),
            phase=r.number("device", "phase", 0.0),
            samples=r.number("device", "samples", 201, int),
            duration_ns=r.number("device", "duration_ns", None),
        )
    except ConfigError as exc:
        if str(exc).startswith(source):
            raise
        raise ConfigError(f"{source}: {exc}") from None
    return ExperimentConfig(sweep, device, source)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, str(path))
