from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import ode_evolve
from srnhqc import single
from srnhqc.errors import IntegrityError
from srnhqc.loop import PhaseProfile, geometric_phase as loop_phase
from srnhqc.metrics import avg_fidelity_channel, avg_fidelity_unitary
from srnhqc.open_system import NoiseSpec, apply_super, restrict_channel
from srnhqc.qdyn import SIGMA_X, SIGMA_Z, propagator, states_at
from srnhqc.single import (
    DFS, HADAMARD_PARAMS, NOT_PARAMS, GateParams, ProtocolKind, ancillary_states, compile_gate,
    control_hamiltonian, dg_schedule, dressed_basis, gate_fidelity, geometric_phase,
    nhqc_phase_profile, population_trace, profile_for, realized_unitary, run_gate,
    sr_phase_profile, target_unitary, verify_conditions,
)

NOT = GateParams(**NOT_PARAMS)
HAD = GateParams(**HADAMARD_PARAMS)
angles = st.tuples(st.floats(0.0, math.pi), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))

# Frozen from an independent solve_ivp integration of hand-built Hamiltonians
# (DOP853, rtol 1e-13), 1 - F_avg against the ideal NOT.
SR_NOT_INFID_D01 = 4.0620488639397934e-08
SR_NOT_INFID_D05 = 2.588105158363163e-05
NHQC_NOT_INFID_D01 = 4.933584733781693e-04
DG_NOT_INFID_D01 = 1.6447987809142806e-04
# bare SR NOT at T2 = 40 us, input |0>: final <1|rho|1> from a Lindblad ODE oracle
BARE_SR_NOT_POP1_T2_40 = 0.9952534506278224


def test_encoding_kets():
    assert np.array_equal(DFS.zero_L, DFS.space.ket((0, 1, 0)))
    assert np.array_equal(DFS.one_L, DFS.space.ket((0, 0, 1)))
    s1 = np.column_stack(DFS.s1)
    s2 = np.column_stack(DFS.s2)
    assert np.allclose(s1.conj().T @ s2, 0)
    assert abs(np.vdot(DFS.zero_L, DFS.one_L)) == 0


def test_dressed_basis_examples():
    b = dressed_basis(math.pi / 2, 0.0)
    assert np.allclose(b["b1"], (DFS.zero_L + DFS.one_L) / math.sqrt(2))
    b = dressed_basis(0.0, 0.0)
    assert np.allclose(b["b1"], DFS.zero_L) and np.allclose(b["d1"], DFS.one_L)
    assert np.array_equal(b["a1"], DFS.space.ket((1, 0, 0)))
    assert np.array_equal(b["a2"], DFS.space.ket((0, 1, 1)))


@given(st.floats(0.0, math.pi), st.floats(-math.pi, math.pi))
def test_dressed_basis_orthonormal(theta, phi):
    v = np.column_stack(list(dressed_basis(theta, phi).values()))
    assert np.max(np.abs(v.conj().T @ v - np.eye(6))) < 1e-12


@given(angles, st.floats(-math.pi, math.pi))
def test_control_hamiltonian_structure(ang, p1):
    theta, phi, _ = ang
    params = GateParams(theta, phi, 1.0)
    prof = PhaseProfile.uniform((p1,), 100.0, 0.07)
    h = control_hamiltonian(params, prof, 10.0)
    b = dressed_basis(theta, phi)
    assert np.allclose(h, h.conj().T)
    assert np.vdot(b["a1"], h @ b["b1"]) == pytest.approx(0.07 * np.exp(1j * p1))
    assert np.vdot(b["a2"], h @ b["b2"]) == pytest.approx(0.07 * np.exp(-1j * p1))
    assert np.allclose(h @ DFS.space.ket((0, 0, 0)), 0)
    assert np.allclose(h @ b["d1"], 0, atol=1e-14) and np.allclose(h @ b["d2"], 0, atol=1e-14)
    n = np.diag(DFS.space.excitation_number())
    assert np.max(np.abs(h @ n - n @ h)) == 0
    p1_, p2_ = (np.column_stack(s) @ np.column_stack(s).conj().T for s in (DFS.s1, DFS.s2))
    assert np.max(np.abs(p1_ @ h @ p2_)) == 0
    # S1 block equals g e^{-i phi'} |b1><a1| + h.c.
    h1 = 0.07 * np.exp(-1j * p1) * np.outer(b["b1"], b["a1"].conj())
    assert np.max(np.abs(p1_ @ h @ p1_ - h1 - h1.conj().T)) < 1e-14


def test_sr_profile_values():
    prof = sr_phase_profile(1.1, 100.0)
    assert prof.value_at(30.0) == 1.1
    assert prof.value_at(60.0) == 0.0
    assert prof.value_at(25.0) == 0.0  # boundary belongs to the earlier quarter
    assert set(sr_phase_profile(0.0, 100.0).values) == {0.0}
    with pytest.raises(ValueError):
        sr_phase_profile(1.0, 0.0)


def test_nhqc_profile():
    assert nhqc_phase_profile(0.0, 100.0).values == (0.0, math.pi)
    assert nhqc_phase_profile(0.4, 100.0).values[1] == pytest.approx(0.4 + math.pi)


def test_dg_schedule_examples():
    u = propagator(dg_schedule(math.pi / 2, 0.0, math.pi, 50.0))
    assert np.allclose(u, -1j * SIGMA_X, atol=1e-12)
    assert np.allclose(propagator(dg_schedule(math.pi / 2, 0.3, 2 * math.pi, 50.0)), -np.eye(2), atol=1e-12)
    half = dg_schedule(math.pi / 2, 0.3, math.pi / 2, 25.0)
    assert np.allclose(propagator(half) @ propagator(half), propagator(dg_schedule(math.pi / 2, 0.3, math.pi, 50.0)))
    with pytest.raises(ValueError):
        dg_schedule(math.pi / 2, 0.0, 0.0, 10.0)


def test_compiled_segment_counts_and_durations():
    sr = compile_gate(ProtocolKind.SR_NHQC_DFS, NOT)
    assert len(sr) == 4 and all(s.duration == 25.0 for s in sr.segments)
    nh = compile_gate(ProtocolKind.NHQC_DFS, NOT)
    assert len(nh) == 2 and all(s.duration == 50.0 for s in nh.segments)
    dg = compile_gate(ProtocolKind.DG_BARE, NOT)
    assert len(dg) == 1 and dg.total_duration == pytest.approx(50.0)


def test_target_unitary_examples():
    assert avg_fidelity_unitary(target_unitary(math.pi / 2, 0, math.pi), SIGMA_X) == pytest.approx(1.0)
    h_paper = (SIGMA_Z * -1 - SIGMA_X) / math.sqrt(2)  # (sigma_z^L - sigma_x^L)/sqrt 2
    assert avg_fidelity_unitary(target_unitary(math.pi / 4, 0, math.pi), h_paper) == pytest.approx(1.0)
    assert np.allclose(target_unitary(1.0, 2.0, 0.0), np.eye(2))


@pytest.mark.parametrize("kind", list(ProtocolKind))
@pytest.mark.parametrize("params", [NOT, HAD], ids=["not", "hadamard"])
def test_ideal_gates(kind, params):
    assert gate_fidelity(kind, params).avg_gate_fidelity >= 1 - 1e-6


@pytest.mark.parametrize("kind", [ProtocolKind.SR_NHQC_DFS, ProtocolKind.NHQC_DFS])
def test_holonomy_target_grid(kind):
    worst = 1.0
    for theta in (0.4, math.pi / 2, 2.6):
        for phi in (-2.0, 0.0, 1.3):
            for gamma in (-1.2, 0.8, math.pi):
                worst = min(worst, gate_fidelity(kind, GateParams(theta, phi, gamma)).avg_gate_fidelity)
    assert worst >= 1 - 1e-6


@given(angles)
def test_every_kind_hits_target(ang):
    params = GateParams(*ang)
    for kind in ProtocolKind:
        assert gate_fidelity(kind, params).avg_gate_fidelity >= 1 - 1e-9


def test_sr_not_channel_is_x():
    ch = run_gate(compile_gate("SR_NHQC_DFS", NOT), "SR_NHQC_DFS", NoiseSpec())
    assert np.max(np.abs(ch.superop - np.kron(SIGMA_X, SIGMA_X))) < 1e-9
    assert ch.leakage < 1e-12


@pytest.mark.parametrize(
    "kind,delta,frozen",
    [
        ("SR_NHQC_DFS", 0.01, SR_NOT_INFID_D01),
        ("SR_NHQC_DFS", 0.05, SR_NOT_INFID_D05),
        ("NHQC_DFS", 0.01, NHQC_NOT_INFID_D01),
        ("DG_BARE", 0.01, DG_NOT_INFID_D01),
    ],
)
def test_control_error_against_ode_oracle(kind, delta, frozen):
    infid = 1 - gate_fidelity(kind, NOT, NoiseSpec(delta=delta)).avg_gate_fidelity
    assert infid == pytest.approx(frozen, rel=1e-6)


def test_bare_dephasing_against_lindblad_oracle():
    ch = run_gate(compile_gate("SR_NHQC_BARE", NOT), "SR_NHQC_BARE", NoiseSpec(t2_us=40))
    rho = apply_super(ch.superop, np.diag([1.0, 0.0]).astype(complex))
    assert rho[1, 1].real == pytest.approx(BARE_SR_NOT_POP1_T2_40, abs=1e-9)


def test_propagation_against_ode():
    sched = compile_gate("SR_NHQC_DFS", HAD).scaled(1.04)
    psi0 = DFS.embed(np.array([0.6, 0.8j]))
    ref = ode_evolve([(s.hamiltonian, s.duration) for s in sched.segments], psi0)
    assert np.max(np.abs(propagator(sched) @ psi0 - ref)) < 1e-9


@given(angles, st.floats(0.0, 0.5))
def test_dfs_immunity(ang, rate):
    params = GateParams(*ang)
    sched = compile_gate("SR_NHQC_DFS", params)
    clean = run_gate(sched, "SR_NHQC_DFS", NoiseSpec(delta=0.03)).superop
    noisy = run_gate(sched, "SR_NHQC_DFS", NoiseSpec.with_rate(rate, delta=0.03)).superop
    assert np.max(np.abs(clean - noisy)) < 1e-9


def test_independent_dephasing_breaks_immunity():
    sched = compile_gate("SR_NHQC_DFS", NOT)
    clean = run_gate(sched, "SR_NHQC_DFS", NoiseSpec()).superop
    local = run_gate(sched, "SR_NHQC_DFS", NoiseSpec(t2_us=40, topology="independent")).superop
    assert np.max(np.abs(clean - local)) > 1e-4


@given(st.floats(-0.1, 0.1), st.sampled_from([ProtocolKind.SR_NHQC_DFS, ProtocolKind.NHQC_DFS]))
def test_control_error_covariance(delta, kind):
    sched = compile_gate(kind, HAD)
    assert np.max(np.abs(propagator(sched.scaled(1 + delta)) - propagator(sched.stretched(1 + delta)))) < 1e-12


def test_block_independence():
    u = propagator(compile_gate("SR_NHQC_DFS", HAD).scaled(1.07))
    for k in range(4):
        sector = np.flatnonzero(DFS.space.excitation_number() == k)
        rest = np.setdiff1d(np.arange(8), sector)
        assert np.max(np.abs(u[np.ix_(rest, sector)]), initial=0) < 1e-12


def test_geometric_phase_constant_profile():
    prof = PhaseProfile.uniform((0.7,), 100.0, 0.1)
    assert all(geometric_phase(NOT, prof, t) == 0 for t in (0, 33.0, 100.0))


@given(st.floats(-math.pi, math.pi), st.floats(0.0, math.pi), st.floats(-math.pi, math.pi))
def test_geometric_phase_matches_propagation(step, theta, phi):
    # with full swaps per quarter mu_b1(tau) = b1, so <b1|U|b1> = exp(i gamma_b1(tau))
    params = GateParams(theta, phi, 0.0)
    prof = sr_phase_profile(step, 100.0)
    sched = single.schedule_from_profile(DFS.space, lambda t: control_hamiltonian(params, prof, t), prof, "x")
    b1 = dressed_basis(theta, phi)["b1"]
    amp = np.vdot(b1, propagator(sched) @ b1)
    assert abs(amp - np.exp(1j * geometric_phase(params, prof, 100.0))) < 1e-10


@given(st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=6), st.floats(0.05, 0.3))
def test_geometric_phase_reparametrisation(values, g):
    prof = PhaseProfile.uniform(values, 50.0, g)
    fast = prof.scaled_time(0.5)
    for frac in (0.3, 0.71, 1.0):
        assert abs(loop_phase(prof, 50.0 * frac) - loop_phase(fast, 25.0 * frac)) < 1e-8


def test_ancillary_states_examples():
    prof = sr_phase_profile(math.pi / 2, 100.0)
    b = dressed_basis(NOT.theta, NOT.phi)
    mu = ancillary_states(NOT, prof, 0.0)
    assert np.allclose(mu["mu_b1"], b["b1"])
    # Omega = pi after the first quarter: full transfer to the auxiliary state
    mu = ancillary_states(NOT, prof, 25.0)
    assert np.allclose(mu["mu_b1"], -1j * b["a1"], atol=1e-12)
    v = np.column_stack(list(ancillary_states(NOT, prof, 61.3).values()))
    assert np.max(np.abs(v.conj().T @ v - np.eye(6))) < 1e-12
    one_loop = nhqc_phase_profile(0.0, 100.0)
    assert np.allclose(ancillary_states(NOT, one_loop, 100.0)["mu_b1"], -b["b1"], atol=1e-12)


def test_ancillary_states_follow_dynamics():
    # inside each segment the evolved state stays on the ancillary ray
    prof = sr_phase_profile(math.pi / 2, 100.0)
    sched = compile_gate("SR_NHQC_DFS", NOT)
    b1 = dressed_basis(NOT.theta, NOT.phi)["b1"]
    times = np.linspace(0.0, 100.0, 37)
    for t, psi in zip(times, states_at(sched, b1, times)):
        assert abs(abs(np.vdot(ancillary_states(NOT, prof, t)["mu_b1"], psi)) - 1) < 1e-10


def test_verify_conditions():
    sr = verify_conditions(NOT, profile_for("SR_NHQC_DFS", NOT))
    assert sr.sr_defect < 1e-6 and sr.sr_defect_fine < 1e-6
    assert sr.cyclicity_defect < 1e-9 and sr.transport_defect < 1e-9
    assert all(sr.checks().values())
    nh = verify_conditions(NOT, profile_for("NHQC_DFS", NOT))
    assert nh.sr_defect > 0.1
    assert nh.cyclicity_defect < 1e-9 and nh.transport_defect < 1e-9
    zero = GateParams(NOT.theta, NOT.phi, 0.0)
    z = verify_conditions(zero, profile_for("SR_NHQC_DFS", zero))
    assert max(z.sr_defect, z.cyclicity_defect, z.transport_defect) < 1e-9
    assert avg_fidelity_unitary(realized_unitary(compile_gate("SR_NHQC_DFS", zero), "SR_NHQC_DFS"), np.eye(2)) == pytest.approx(1.0)


def test_sr_integral_against_propagated_states():
    # int <psi_a|H|psi_b> dt along the actual evolution vanishes for the SR path
    prof = sr_phase_profile(math.pi / 2, 100.0)
    sched = compile_gate("SR_NHQC_DFS", NOT)
    b = dressed_basis(NOT.theta, NOT.phi)
    n = 2048
    times = (np.arange(n) + 0.5) * 100.0 / n
    pb = states_at(sched, b["b1"], times)
    pa = states_at(sched, b["a1"], times)
    total = sum(np.vdot(a, control_hamiltonian(NOT, prof, t) @ v) for t, a, v in zip(times, pa, pb)) * 100.0 / n
    assert abs(total) / (NOT.g_peak * 100.0) < 1e-9


def test_population_trace():
    tr = population_trace(compile_gate("SR_NHQC_DFS", NOT), "SR_NHQC_DFS", np.array([1, 0]), 101)
    assert tr.pop_0L[0] == pytest.approx(1.0) and tr.times[-1] == pytest.approx(100.0)
    assert tr.pop_1L[-1] >= 1 - 1e-6
    hd = population_trace(compile_gate("SR_NHQC_DFS", HAD), "SR_NHQC_DFS", np.array([1, 0]), 101)
    assert abs(hd.pop_0L[-1] - 0.5) < 1e-6 and abs(hd.pop_1L[-1] - 0.5) < 1e-6
    with pytest.raises(ValueError):
        population_trace(compile_gate("SR_NHQC_DFS", NOT), "SR_NHQC_DFS", np.array([1, 1]), 10)


def test_population_deficit_is_ancilla_occupancy():
    sched = compile_gate("SR_NHQC_DFS", HAD)
    tr = population_trace(sched, "SR_NHQC_DFS", np.array([1, 0]), 64)
    states = states_at(sched, DFS.zero_L, tr.times)
    anc = np.abs(states @ DFS.space.ket((1, 0, 0))) ** 2
    assert np.all(tr.pop_0L + tr.pop_1L <= 1 + 1e-12)
    assert np.max(np.abs(1 - tr.pop_0L - tr.pop_1L - anc)) < 1e-12


def test_trace_endpoint_matches_channel():
    sched = compile_gate("SR_NHQC_DFS", HAD)
    tr = population_trace(sched, "SR_NHQC_DFS", np.array([1, 0]), 11)
    rho = apply_super(run_gate(sched, "SR_NHQC_DFS", NoiseSpec()).superop, np.diag([1.0, 0]).astype(complex))
    assert rho[0, 0].real == pytest.approx(tr.pop_0L[-1], abs=1e-12)


def test_leakage_reported_and_guarded(monkeypatch):
    # a partial swap parks sin^2(Omega/2) of the bright state on the ancilla
    prof = PhaseProfile.uniform((0.0,), 20.0, 2 * math.pi / 100)
    sched = single.schedule_from_profile(DFS.space, lambda t: control_hamiltonian(NOT, prof, t), prof, "part")
    ch = run_gate(sched, "SR_NHQC_DFS", NoiseSpec())
    expected = 0.5 * math.sin(0.4 * math.pi) ** 2
    assert ch.leakage == pytest.approx(expected)
    rep = avg_fidelity_channel(ch.superop, np.eye(2))
    assert rep.leakage == pytest.approx(expected)
    monkeypatch.setattr(single, "LEAKAGE_ABORT", 0.4)
    with pytest.raises(IntegrityError):
        run_gate(sched, "SR_NHQC_DFS", NoiseSpec())


def test_bad_inputs():
    with pytest.raises(ValueError):
        GateParams(4.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ProtocolKind.parse("holonomic")
    assert ProtocolKind.parse("sr-nhqc-dfs") is ProtocolKind.SR_NHQC_DFS
    with pytest.raises(ValueError):
        run_gate(compile_gate("DG_BARE", NOT), "SR_NHQC_DFS", NoiseSpec())
    with pytest.raises(ValueError):
        profile_for("DG_BARE", NOT)
