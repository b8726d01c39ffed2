"""Command-line entry point.

Exit status: 0 on success, 1 for configuration errors, 2 when a numerical
integrity check fails (trace drift, lost complete positivity, leakage,
unconverged integration).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .. import two
from ..device import effective_coupling, resonant_pair, rwa_curves
from ..errors import SimulationError
from ..single import GateParams, ProtocolKind, compile_gate, population_trace, profile_for, verify_conditions
from .config import ConfigError, ExperimentConfig, load_config
from .csvio import _render, _write, fmt, sweep_csv_text, trace_csv_text
from .sweep import gate_angles, run_point, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRITY = 0, 1, 2


def _emit(text: str, out) -> None:
    if out:
        _write(text, out)
    else:
        sys.stdout.write(text)


def _protocol(args, cfg: ExperimentConfig) -> ProtocolKind:
    if args.protocol:
        try:
            return ProtocolKind.parse(args.protocol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg.sweep.protocols[0]


def cmd_run(args, cfg: ExperimentConfig) -> int:
    rows = [run_point(cfg.sweep, p, args.delta) for p in cfg.sweep.protocols]
    _emit(sweep_csv_text(sorted(rows, key=lambda r: r.protocol)), args.out)
    return EXIT_OK


def cmd_sweep(args, cfg: ExperimentConfig) -> int:
    _emit(sweep_csv_text(run_sweep(cfg.sweep, args.threads)), args.out)
    return EXIT_OK


def cmd_trace(args, cfg: ExperimentConfig) -> int:
    sw = cfg.sweep
    if sw.gate == "cnot":
        raise ConfigError("population traces cover single-qubit gates (not, hadamard)")
    kind = _protocol(args, cfg)
    params = GateParams(*gate_angles(sw), sw.tau_ns)
    series = population_trace(compile_gate(kind, params), kind, np.array([1.0, 0.0]), sw.trace_points)
    _emit(trace_csv_text(series), args.out)
    return EXIT_OK


def verify_report(gate: str, protocol: ProtocolKind, angles, tau: float) -> dict:
    protocol = ProtocolKind(protocol)
    if not protocol.is_dfs:
        raise ConfigError(f"verify covers DFS protocols only, not {protocol.value}")
    theta, phi, gamma = angles
    if gate == "cnot":
        params = two.TwoQubitGateParams(theta, phi, tau)
        rep = two.verify_two_qubit_conditions(params, two.two_qubit_profile(protocol, gamma, tau, params.G))
    else:
        params = GateParams(theta, phi, gamma, tau)
        rep = verify_conditions(params, profile_for(protocol, params))
    out = rep.as_dict()
    out.update(gate=gate, protocol=protocol.value)
    return out


def cmd_verify(args, cfg: ExperimentConfig) -> int:
    sw = cfg.sweep
    rep = verify_report(sw.gate, _protocol(args, cfg), gate_angles(sw), sw.tau_ns)
    if args.json:
        text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    else:
        ok = rep["pass"]
        text = (
            f"gate {rep['gate']} protocol {rep['protocol']}\n"
            f"cyclicity defect     {rep['cyclicity_defect']:.3e}  {'PASS' if ok['cyclicity'] else 'FAIL'}\n"
            f"transport defect     {rep['transport_defect']:.3e}  {'PASS' if ok['parallel_transport'] else 'FAIL'}\n"
            f"SR defect ({rep['grid']})   {rep['sr_defect']:.3e}  {'PASS' if ok['super_robust'] else 'FAIL'}\n"
            f"SR defect ({rep['fine_grid']})  {rep['sr_defect_fine']:.3e}\n"
        )
    _emit(text, args.out)
    return EXIT_OK


def cmd_rwa_check(args, cfg: ExperimentConfig) -> int:
    dev = cfg.device
    q1, q2, c, mod = resonant_pair(dev.g_mhz, dev.detuning_mhz, dev.beta, dev.f1_ghz, dev.phase)
    if c.g == 0:
        print("rwa_deviation 0 (no coupling)")
        return EXIT_OK
    res = rwa_curves(q1, q2, c, mod, dev.duration_ns, dev.samples)
    g_eff = abs(effective_coupling(c.g, mod))
    print(
        f"rwa_deviation {fmt(res.deviation)}  g_eff/2pi {fmt(g_eff / (2 * math.pi) * 1e3)} MHz  "
        f"step {fmt(res.step_ns)} ns",
        file=sys.stderr if not args.out else sys.stdout,
    )
    text = _render(("t_ns", "p_full", "p_eff"), zip(res.times, res.p_full, res.p_eff))
    _emit(text, args.out)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--config", default=default(None), help="INI experiment file")
    p.add_argument("--out", default=default(None), help="output file (stdout when omitted)")
    p.add_argument("--threads", type=int, default=default(1), help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srnhqc", description="Holonomic gate simulations")
    _add_common(parser, lambda v: v)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        # suppressed defaults let the flags go before or after the subcommand
        _add_common(p, lambda v: argparse.SUPPRESS)
        return p

    add("run", "one gate per configured protocol").add_argument("--delta", type=float, default=0.0)
    add("sweep", "fidelity versus control error")
    add("trace", "logical populations during the gate").add_argument("--protocol")
    p = add("verify", "holonomy condition defects")
    p.add_argument("--protocol")
    p.add_argument("--json", action="store_true")
    add("rwa-check", "effective coupling against the full model")
    return parser


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "trace": cmd_trace,
    "verify": cmd_verify,
    "rwa-check": cmd_rwa_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
