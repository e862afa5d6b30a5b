import math
from dataclasses import replace

import numpy as np
import pytest

from field_profiles.calibration import calibrate_g0, coupling_trace, tail_fraction
from field_profiles.models import AnalyticCavity, CouplingTrace, PhysicalParams
from field_profiles.profiles import eval_profile, render_model
from quantum_core.errors import ImpossibleOutcomeError, ModelParameterError
from quantum_core.models import BlochAngles, JointState, QubitState
from quantum_core.states import bloch_to_qubit, project_joint, tensor_qubit
from teleport_engine.dynamics import evolve_stage1, evolve_stage2, evolve_stage2_ode
from teleport_engine.engine import build_timeline, calibrate_couplings, run_teleport
from teleport_engine.models import TeleportConfig

SQRT2 = math.sqrt(2.0)


def _success_probability(q: QubitState, g: float) -> float:
    p0, p1 = abs(q.c0) ** 2, abs(q.c1) ** 2
    return (p0 * math.sin(g) ** 2 + p1 * math.cos(g) ** 2 + p1 * math.cos(SQRT2 * g) ** 2) / 2


def _entangled(teleport_config, calibration):
    p = teleport_config.params
    return evolve_stage1(teleport_config.cavity_profile, p.v_B, calibration.g0_b, calibration.timeline.t1)


# ---------------------------------------------------------------------------
# Calibration and timeline
# ---------------------------------------------------------------------------
def test_timeline_matches_reference_instants(calibration):
    t = calibration.timeline
    assert t.t1 == pytest.approx(51.6e-6, rel=5e-3)
    assert t.detection_time == pytest.approx(88.9e-6, rel=5e-3)
    assert t.t4 == pytest.approx(51.6e-6, rel=5e-3)


def test_atom_b_reaches_31a_at_detection(teleport_config, calibration):
    p = teleport_config.params
    x = teleport_config.handoff_b + p.v_B * calibration.timeline.t2 / p.lattice_a
    assert x == pytest.approx(31.0, abs=0.05)


def test_calibrated_pulse_areas(calibration):
    assert calibration.calibrated
    assert calibration.area_b == pytest.approx(9 * math.pi / 4, abs=1e-6)
    assert calibration.area_a == pytest.approx(7 * math.pi / 4, abs=1e-6)
    assert calibration.g0_mismatch < 0.01


def test_explicit_g0_disables_calibration(cavity_profile, calibration):
    params = PhysicalParams(g0=calibration.g0_b)
    fixed = calibrate_couplings(TeleportConfig(params, cavity_profile))
    assert not fixed.calibrated
    assert fixed.g0_a == fixed.g0_b == calibration.g0_b
    assert fixed.area_b == pytest.approx(calibration.area_b)


def test_atom_b_is_uncoupled_after_handoff(teleport_config):
    later = np.linspace(teleport_config.handoff_b, 31.0, 50)
    assert np.all(eval_profile(teleport_config.cavity_profile, later) < 0.01)
    assert tail_fraction(teleport_config.cavity_profile, teleport_config.handoff_b) < 0.01


def test_detector_inside_cavity_is_rejected(reference_params, cavity_profile):
    with pytest.raises(ModelParameterError):
        TeleportConfig(reference_params, cavity_profile, detector_a=10.0)


def test_injection_time_must_match_transit(reference_params, cavity_profile):
    TeleportConfig(reference_params, cavity_profile, injection_time=51.63e-6)
    with pytest.raises(ModelParameterError):
        TeleportConfig(reference_params, cavity_profile, injection_time=40e-6)


# ---------------------------------------------------------------------------
# Stage 1
# ---------------------------------------------------------------------------
def test_stage1_at_entry_is_untouched(teleport_config, calibration):
    p = teleport_config.params
    s = evolve_stage1(teleport_config.cavity_profile, p.v_B, calibration.g0_b, 0.0)
    assert s.amplitude(B=1, n=0) == 1.0
    assert abs(s.amplitude(B=0, n=1)) == 0.0


def test_stage1_entangles_atom_b_with_cavity(teleport_config, calibration):
    s = _entangled(teleport_config, calibration)
    assert abs(s.amplitude(B=1, n=0)) ** 2 == pytest.approx(0.5, abs=1e-6)
    assert abs(s.amplitude(B=0, n=1)) ** 2 == pytest.approx(0.5, abs=1e-6)
    assert s.amplitude(B=1, n=0) == pytest.approx(1 / SQRT2, abs=1e-6)
    assert s.amplitude(B=0, n=1) == pytest.approx(-1j / SQRT2, abs=1e-6)


def test_stage1_quarter_period_transfers_excitation(teleport_config, calibration):
    p = teleport_config.params
    g0 = calibrate_g0(teleport_config.cavity_profile, p.v_B, math.pi / 2, 0.0, 18.0)
    s = evolve_stage1(teleport_config.cavity_profile, p.v_B, g0, calibration.timeline.t1)
    assert s.amplitude(B=1, n=0) == pytest.approx(0.0, abs=1e-9)
    assert s.amplitude(B=0, n=1) == pytest.approx(-1j, abs=1e-9)


# ---------------------------------------------------------------------------
# Stage 2
# ---------------------------------------------------------------------------
def test_stage2_with_zero_time_is_product_state(teleport_config, calibration, reference_input):
    entangled = _entangled(teleport_config, calibration)
    joint = evolve_stage2(reference_input, entangled, teleport_config.cavity_profile,
                          teleport_config.params.v_A, calibration.g0_a, 0.0)
    assert np.allclose(joint.amps, tensor_qubit(reference_input, entangled).amps)


def test_stage2_ground_input_never_reaches_two_photons(teleport_config, calibration):
    entangled = _entangled(teleport_config, calibration)
    joint = evolve_stage2(QubitState.ground(), entangled, teleport_config.cavity_profile,
                          teleport_config.params.v_A, calibration.g0_a, calibration.timeline.t2,
                          entry_x=teleport_config.entry_a)
    assert np.all(joint.amps[:, :, 2] == 0)
    assert np.all(joint.amps[1, :, 1] == 0)


def test_stage2_worked_example_amplitudes(teleport_config, calibration, reference_input):
    entangled = _entangled(teleport_config, calibration)
    joint = evolve_stage2(reference_input, entangled, teleport_config.cavity_profile,
                          teleport_config.params.v_A, calibration.g0_a, calibration.timeline.t2,
                          entry_x=teleport_config.entry_a)
    g = 7 * math.pi / 4
    c0, c1 = reference_input.c0, reference_input.c1
    assert math.cos(g) == pytest.approx(SQRT2 / 2)
    assert math.sin(g) == pytest.approx(-SQRT2 / 2)
    expected = {
        (1, 0, 0): -c0 * math.sin(g) / SQRT2,
        (1, 1, 0): c1 * math.cos(g) / SQRT2,
        (1, 0, 1): -1j * c1 * math.cos(SQRT2 * g) / SQRT2,
        (0, 0, 2): -c1 * math.sin(SQRT2 * g) / SQRT2,
        (0, 1, 0): c0 / SQRT2,
    }
    for key, value in expected.items():
        assert joint.amps[key] == pytest.approx(value, abs=1e-6), key
    assert joint.norm == pytest.approx(1.0, abs=1e-9)


def test_probability_identity_for_random_inputs(teleport_config, calibration):
    rng = np.random.default_rng(7)
    entangled = _entangled(teleport_config, calibration)
    for _ in range(100):
        theta, phi = rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi)
        q = bloch_to_qubit(BlochAngles(theta, phi))
        joint = evolve_stage2(q, entangled, teleport_config.cavity_profile, teleport_config.params.v_A,
                              calibration.g0_a, calibration.timeline.t2, entry_x=teleport_config.entry_a)
        assert joint.norm == pytest.approx(1.0, abs=1e-9)
        _, p = project_joint(joint, 'A', 1)
        assert p == pytest.approx(_success_probability(q, calibration.area_a), abs=1e-9)


def test_stage2_rejects_two_photon_input(teleport_config, calibration, reference_input):
    bad = JointState.from_dict(('B', 'n'), {(0, 2): 1.0})
    with pytest.raises(ModelParameterError):
        evolve_stage2(reference_input, bad, teleport_config.cavity_profile, 987.0, calibration.g0_a, 1e-6)


# ---------------------------------------------------------------------------
# ODE oracle
# ---------------------------------------------------------------------------
def test_ode_with_zero_coupling_is_identity(teleport_config, calibration, reference_input):
    entangled = _entangled(teleport_config, calibration)
    trace = CouplingTrace(np.array([0.0, 1e-5]), np.zeros(2))
    joint = evolve_stage2_ode(reference_input, entangled, trace, 1e-5)
    assert np.allclose(joint.amps, tensor_qubit(reference_input, entangled).amps, atol=1e-12)


def test_ode_constant_coupling_quarter_period():
    vacuum = JointState.from_dict(('B', 'n'), {(0, 0): 1.0})
    t = 10e-6
    g = (math.pi / 2) / t
    trace = CouplingTrace(np.array([0.0, t]), np.array([g, g]))
    joint = evolve_stage2_ode(QubitState.excited(), vacuum, trace, t)
    assert joint.amps[1, 0, 0] == pytest.approx(0.0, abs=1e-8)
    assert joint.amps[0, 0, 1] == pytest.approx(-1j, abs=1e-8)


def test_ode_matches_closed_form_for_reference_configuration(teleport_config, calibration, reference_input):
    p = teleport_config.params
    entangled = _entangled(teleport_config, calibration)
    closed = evolve_stage2(reference_input, entangled, teleport_config.cavity_profile, p.v_A, calibration.g0_a,
                           calibration.timeline.t2, entry_x=teleport_config.entry_a)
    trace = coupling_trace(teleport_config.cavity_profile, p.v_A, calibration.g0_a,
                           teleport_config.entry_a, teleport_config.detector_a)
    ode = evolve_stage2_ode(reference_input, entangled, trace, calibration.timeline.t2)
    assert np.max(np.abs(ode.amps - closed.amps)) < 1e-6


def test_ode_matches_closed_form_for_random_configurations():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        sigma = rng.uniform(1.2, 2.0)
        profile = render_model(AnalyticCavity(width_sigma=sigma, center=9.0, half_span=8.35, samples_per_a=24))
        v_a = rng.uniform(600.0, 1200.0)
        area = rng.uniform(0.5, 3.0) * math.pi
        g0 = calibrate_g0(profile, v_a, area)
        q = bloch_to_qubit(BlochAngles(rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi)))
        angle = rng.uniform(0, 2 * math.pi)
        entangled = JointState.from_dict(('B', 'n'), {(1, 0): math.cos(angle), (0, 1): -1j * math.sin(angle)})
        t2 = (profile.x_max - profile.x_min) * PhysicalParams().lattice_a / v_a
        closed = evolve_stage2(q, entangled, profile, v_a, g0, t2, entry_x=profile.x_min)
        trace = coupling_trace(profile, v_a, g0, profile.x_min, profile.x_max)
        ode = evolve_stage2_ode(q, entangled, trace, t2)
        assert np.max(np.abs(ode.amps - closed.amps)) < 1e-6


# ---------------------------------------------------------------------------
# Full teleportation
# ---------------------------------------------------------------------------
def test_worked_example_success_and_fidelity(teleport_config, calibration, reference_input):
    out = run_teleport(teleport_config, reference_input, calibration=calibration, with_traces=False)
    assert 0.24 <= out.success_probability <= 0.26
    assert out.success_probability == pytest.approx(_success_probability(reference_input, calibration.area_a), abs=1e-9)
    assert out.outcome_probability == pytest.approx(out.success_probability, abs=1e-12)
    assert out.detected_outcome == 1
    assert out.conditional_state.norm == pytest.approx(1.0, abs=1e-9)
    assert out.fidelity_vs_input >= 0.99
    assert out.fidelity_loss <= out.fidelity_vs_input <= 1.0
    assert out.fidelity_discard == pytest.approx(1.0, abs=1e-9)


def test_ideal_two_photon_limit_is_exact(teleport_config, calibration, reference_input):
    ideal = replace(teleport_config, ideal_two_photon=True)
    out = run_teleport(ideal, reference_input, calibration=calibration, with_traces=False)
    assert out.fidelity_vs_input == pytest.approx(1.0, abs=1e-9)
    assert out.fidelity_loss == pytest.approx(1.0, abs=1e-9)
    assert out.success_probability == pytest.approx(0.25, abs=1e-9)
    b = out.b_qubit
    phase = b.c0 / abs(b.c0)
    assert b.c0 / phase == pytest.approx(reference_input.c0, abs=1e-9)
    assert b.c1 / phase == pytest.approx(reference_input.c1, abs=1e-9)


def test_excited_input_at_quarter_period(teleport_config, calibration):
    p = teleport_config.params
    g0 = calibrate_g0(teleport_config.cavity_profile, p.v_A, math.pi / 2,
                      teleport_config.entry_a, teleport_config.detector_a)
    joint = evolve_stage2(QubitState.excited(), _entangled(teleport_config, calibration),
                          teleport_config.cavity_profile, p.v_A, g0, calibration.timeline.t2,
                          entry_x=teleport_config.entry_a)
    rest, prob = project_joint(joint, 'A', 1)
    assert prob == pytest.approx(math.cos(SQRT2 * math.pi / 2) ** 2 / 2, abs=1e-9)
    assert abs(rest.amplitude(B=0, n=1)) == pytest.approx(1.0, abs=1e-9)
    phase = rest.amplitude(B=0, n=1) / abs(rest.amplitude(B=0, n=1))
    expected = -1j * math.copysign(1.0, math.cos(SQRT2 * math.pi / 2))
    assert phase == pytest.approx(expected, abs=1e-9)


def test_forced_outcome_zero(teleport_config, calibration, reference_input):
    out = run_teleport(teleport_config, reference_input, forced_outcome=0, calibration=calibration,
                       with_traces=False)
    assert out.detected_outcome == 0
    assert out.outcome_probability == pytest.approx(1 - out.success_probability, abs=1e-9)


def test_impossible_outcome_propagates(reference_params, cavity_profile):
    config = TeleportConfig(reference_params, cavity_profile, target_area_a=math.pi)
    with pytest.raises(ImpossibleOutcomeError):
        run_teleport(config, QubitState.ground(), with_traces=False)


def test_stage_traces_for_figures(teleport_config, calibration, reference_input):
    out = run_teleport(teleport_config, reference_input, calibration=calibration)
    stage1, stage2 = out.stage_traces
    assert stage1.labels == ('B1_n0', 'B0_n1')
    assert np.abs(stage1.values[-1]) ** 2 == pytest.approx([0.5, 0.5], abs=1e-6)
    assert np.all(np.diff(stage1.trace.times) <= teleport_config.trace_resolution + 1e-15)
    assert stage2.trace.times[0] == pytest.approx(calibration.timeline.t1)
    numerator = np.sum(np.abs(stage2.values[-1]) ** 2)
    assert numerator == pytest.approx(out.success_probability, abs=1e-6)


def test_build_timeline_rejects_readout_behind_atom(reference_params, cavity_profile):
    config = TeleportConfig(reference_params, cavity_profile, readout_entry_b=20.0)
    with pytest.raises(ModelParameterError):
        build_timeline(config)
