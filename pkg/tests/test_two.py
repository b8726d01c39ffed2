from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from srnhqc import two
from srnhqc.loop import PhaseProfile
from srnhqc.metrics import avg_fidelity_channel, avg_fidelity_unitary
from srnhqc.open_system import NoiseSpec, apply_super, collective_z
from srnhqc.qdyn import propagator
from srnhqc.single import ProtocolKind
from srnhqc.two import (
    CNOT, ENC, SPACE, TwoQubitGateParams, bright_dark, cnot_fidelity, cnot_schedule,
    compile_two_qubit, run_two_qubit_gate, two_qubit_hamiltonian, two_qubit_profile,
    two_qubit_target, verify_two_qubit_conditions,
)

# Frozen from an independent Lindblad ODE on hand-indexed 24-level matrices
# (solve_ivp DOP853, rtol 1e-12).
SR_CNOT_INFID_D05 = 2.292201136122607e-05
SR_CNOT_F_D10_T2_40 = 0.9996292429845484
NHQC_CNOT_F_D10_T2_40 = 0.9757678046074798


def test_encoding():
    kets = ENC.logical_kets + [ENC.aux]
    v = np.column_stack(kets)
    assert np.allclose(v.conj().T @ v, np.eye(5))
    n = SPACE.excitation_number()
    assert all(n[np.flatnonzero(k)[0]] == 2 for k in kets)
    assert SPACE.total_dim == 24


@given(st.floats(0.0, math.pi), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_hamiltonian_structure(theta, varphi, phase):
    params = TwoQubitGateParams(theta, varphi)
    prof = PhaseProfile.uniform((phase,), 100.0, params.G)
    h = two_qubit_hamiltonian(params, prof, 3.0)
    b, d = bright_dark(theta, varphi)
    assert np.allclose(h, h.conj().T)
    assert np.vdot(ENC.aux, h @ b) == pytest.approx(params.G * np.exp(1j * phase))
    k = ENC.logical_kets
    assert np.allclose(h @ k[0], 0) and np.allclose(h @ k[1], 0)
    assert np.allclose(h @ d, 0, atol=1e-14)
    n = np.diag(SPACE.excitation_number())
    assert np.max(np.abs(h @ n - n @ h)) == 0


def test_cnot_schedule_shape():
    s = cnot_schedule(100.0)
    assert len(s) == 4 and all(seg.duration == 25.0 for seg in s.segments)
    prof = two_qubit_profile("SR_NHQC_DFS", math.pi, 100.0)
    params = TwoQubitGateParams()
    assert params.G * 100.0 == pytest.approx(2 * math.pi)
    c23, c24 = params.couplings
    assert abs(c23) == pytest.approx(1 / math.sqrt(2)) and abs(c24) == pytest.approx(1 / math.sqrt(2))
    assert prof.value_at(30.0) != 0.0 and prof.value_at(60.0) == 0.0


def test_target_examples():
    assert np.allclose(CNOT, np.eye(4)[[0, 1, 3, 2]])
    assert np.allclose(two_qubit_target(0.7, 1.1, 0.0), np.eye(4))


@pytest.mark.parametrize("kind", two.TWO_QUBIT_KINDS)
def test_ideal_cnot(kind):
    ch = run_two_qubit_gate(cnot_schedule(kind=kind), NoiseSpec())
    assert avg_fidelity_channel(ch.superop, CNOT).avg_gate_fidelity >= 1 - 1e-6
    u = propagator(cnot_schedule(kind=kind))
    v = np.column_stack(ENC.logical_kets)
    block = v.conj().T @ u @ v
    # truth table: |10> <-> |11>, |00>, |01> fixed
    assert np.allclose(np.abs(block), np.eye(4)[[0, 1, 3, 2]], atol=1e-9)


def test_bell_state():
    ch = run_two_qubit_gate(cnot_schedule(), NoiseSpec())
    psi = np.array([1, 0, 1, 0]) / math.sqrt(2)
    rho = apply_super(ch.superop, np.outer(psi, psi).astype(complex))
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert (bell @ rho @ bell).real == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kind", two.TWO_QUBIT_KINDS)
def test_target_grid(kind):
    worst = 1.0
    for theta in (0.4, math.pi / 2, 2.6):
        for varphi in (-2.0, 0.0, 1.3):
            for gamma in (-1.2, 0.8, math.pi):
                ch = run_two_qubit_gate(compile_two_qubit(kind, theta, varphi, gamma), NoiseSpec())
                worst = min(worst, avg_fidelity_channel(ch.superop, two_qubit_target(theta, varphi, gamma)).avg_gate_fidelity)
    assert worst >= 1 - 1e-6


def test_collective_dephasing_degenerate():
    z = np.diag(collective_z(SPACE)).real
    for k in ENC.logical_kets + [ENC.aux]:
        assert z[np.flatnonzero(k)[0]] == 0.0


@given(st.floats(0.0, 0.5))
def test_dfs_immunity(rate):
    s = cnot_schedule()
    clean = run_two_qubit_gate(s, NoiseSpec(delta=0.04)).superop
    noisy = run_two_qubit_gate(s, NoiseSpec.with_rate(rate, delta=0.04)).superop
    assert np.max(np.abs(clean - noisy)) < 1e-9


def test_sector_reduction_is_exact():
    s = cnot_schedule(kind="NHQC_DFS")
    noise = NoiseSpec(delta=0.06, t2_us=40, topology="independent")
    red = run_two_qubit_gate(s, noise).superop
    full = run_two_qubit_gate(s, noise, reduce=False).superop
    assert np.max(np.abs(red - full)) < 1e-12


def test_against_lindblad_oracle():
    assert 1 - cnot_fidelity("SR_NHQC_DFS", NoiseSpec(0.05)).avg_gate_fidelity == pytest.approx(SR_CNOT_INFID_D05, rel=1e-6)
    assert cnot_fidelity("SR_NHQC_DFS", NoiseSpec(0.1, 40)).avg_gate_fidelity == pytest.approx(SR_CNOT_F_D10_T2_40, abs=1e-10)
    assert cnot_fidelity("NHQC_DFS", NoiseSpec(0.1, 40)).avg_gate_fidelity == pytest.approx(NHQC_CNOT_F_D10_T2_40, abs=1e-10)


def test_dark_state_stationary():
    u = propagator(cnot_schedule())
    _, d = bright_dark(math.pi / 2, 0.0)
    assert np.linalg.norm(u @ d - d) < 1e-8


def test_aux_bright_phase_relation():
    ga, gb = two.aux_bright_phases(cnot_schedule())
    assert abs(math.remainder(ga + gb, 2 * math.pi)) < 1e-8


@given(st.floats(-0.1, 0.1))
def test_control_error_covariance(delta):
    s = cnot_schedule()
    assert np.max(np.abs(propagator(s.scaled(1 + delta)) - propagator(s.stretched(1 + delta)))) < 1e-12


def test_robustness_order():
    ds = np.array([0.001, 0.002, 0.005, 0.01, 0.02, 0.05])
    sr = [1 - cnot_fidelity("SR_NHQC_DFS", NoiseSpec(d)).avg_gate_fidelity for d in ds]
    nh = [1 - cnot_fidelity("NHQC_DFS", NoiseSpec(d)).avg_gate_fidelity for d in ds]
    assert np.polyfit(np.log(ds), np.log(sr), 1)[0] >= 3.5
    assert abs(np.polyfit(np.log(ds), np.log(nh), 1)[0] - 2) <= 0.4


def test_conditions():
    params = TwoQubitGateParams()
    sr = verify_two_qubit_conditions(params, two_qubit_profile("SR_NHQC_DFS", math.pi, 100.0))
    assert all(sr.checks().values())
    assert sr.transport_defect < 1e-12
    const = PhaseProfile.uniform((0.0,), 100.0, params.G / 2)
    assert verify_two_qubit_conditions(params, const).sr_defect > 0.1


def test_rejects_unsupported():
    with pytest.raises(ValueError):
        two_qubit_profile(ProtocolKind.DG_BARE, math.pi, 100.0)
    with pytest.raises(ValueError):
        TwoQubitGateParams(theta=-0.1)
