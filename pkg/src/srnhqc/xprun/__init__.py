"""Experiment runner: configuration files, parameter sweeps, CSV datasets and the CLI."""

from .config import ConfigError, DeviceConfig, ExperimentConfig, SweepConfig, load_config, parse_config
from .csvio import SWEEP_HEADER, TRACE_HEADER, emit_csv, emit_trace_csv, read_csv
from .sweep import SweepRow, gate_angles, run_point, run_sweep

__all__ = [
    "ConfigError",
    "DeviceConfig",
    "ExperimentConfig",
    "SweepConfig",
    "load_config",
    "parse_config",
    "SWEEP_HEADER",
    "TRACE_HEADER",
    "emit_csv",
    "emit_trace_csv",
    "read_csv",
    "SweepRow",
    "gate_angles",
    "run_point",
    "run_sweep",
]
