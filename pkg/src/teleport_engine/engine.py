"""
Teleportation circuit: calibrate the cavity coupling, entangle atom B with
the cavity, send atom A through, and condition on atom A's detector click.

Conditioned on atom A found excited, atom B and the cavity are left in

    [-c0 sin G_A |0>_B|0> + c1 cos G_A |1>_B|0> - i c1 cos(sqrt2 G_A) |0>_B|1>] / (2 sqrt P)

which, at G_A = 7pi/4, is the input qubit carried by atom B up to the small
one-photon leak proportional to cos(sqrt2 G_A).
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from field_profiles.calibration import calibrate_g0, coupling_trace, pulse_area, transit_time
from field_profiles.models import SampledProfile, Timeline
from quantum_core.errors import ModelParameterError
from quantum_core.models import JointState, QubitState
from quantum_core.states import project_joint
from .dynamics import evolve_stage1, evolve_stage2
from .models import AmplitudeSeries, Calibration, TeleportConfig, TeleportOutcome

logger = logging.getLogger(__name__)

G0_MISMATCH_WARN = 0.01
STAGE1_LABELS = ('B1_n0', 'B0_n1')
STAGE2_LABELS = ('B0_n0', 'B1_n0', 'B0_n1')


def build_timeline(config: TeleportConfig) -> Timeline:
    """t1: B's hand-off; t2: A's transit to its detector; t3: B's flight to the
    readout entry; t4: one readout zone."""
    p = config.params
    t1 = transit_time(config.handoff_b - config.entry_b, p.v_B, p.lattice_a)
    t2 = transit_time(config.detector_a - config.entry_a, p.v_A, p.lattice_a)
    b_at_detection = config.handoff_b + p.v_B * t2 / p.lattice_a
    if config.readout_entry_b < b_at_detection:
        raise ModelParameterError(
            f"readout entry {config.readout_entry_b}a lies behind atom B's position "
            f"{b_at_detection:.4g}a at detection"
        )
    t3 = transit_time(config.readout_entry_b - b_at_detection, p.v_B, p.lattice_a)
    t4 = transit_time(config.zone_length, p.v_B, p.lattice_a)
    return Timeline(t1, t2, t3, t4)


def calibrate_couplings(config: TeleportConfig) -> Calibration:
    p = config.params
    profile = config.cavity_profile
    b_window = (config.entry_b, config.handoff_b)
    a_window = (config.entry_a, config.detector_a)
    if p.g0 is not None:
        g0_b = g0_a = p.g0
        calibrated = False
    else:
        g0_b = calibrate_g0(profile, p.v_B, config.target_area_b, *b_window, lattice_a=p.lattice_a)
        g0_a = calibrate_g0(profile, p.v_A, config.target_area_a, *a_window, lattice_a=p.lattice_a)
        calibrated = True
    area_b = pulse_area(profile, p.v_B, g0_b, *b_window, lattice_a=p.lattice_a)
    area_a = pulse_area(profile, p.v_A, g0_a, *a_window, lattice_a=p.lattice_a)
    calibration = Calibration(g0_b, g0_a, area_b, area_a, build_timeline(config), calibrated)
    logger.info("coupling g0: atom B %.9g rad/s (G_B=%.9g), atom A %.9g rad/s (G_A=%.9g)",
                g0_b, area_b, g0_a, area_a)
    if calibrated and calibration.g0_mismatch > G0_MISMATCH_WARN:
        logger.warning("per-atom couplings differ by %.2f%%; the cavity profile does not "
                       "reproduce both pulse areas with one g0", 100.0 * calibration.g0_mismatch)
    return calibration


def _cumulative_areas(profile: SampledProfile, v: float, g0: float, x_start: float,
                      xs: np.ndarray, lattice_a: float) -> np.ndarray:
    return np.array([
        pulse_area(profile, v, g0, x_start, x, lattice_a) if x > x_start else 0.0
        for x in xs
    ])


def _positions(times: np.ndarray, t_offset: float, x_start: float, v: float, lattice_a: float) -> np.ndarray:
    return x_start + v * (times - t_offset) / lattice_a


def stage1_series(config: TeleportConfig, calibration: Calibration) -> AmplitudeSeries:
    p = config.params
    trace = coupling_trace(config.cavity_profile, p.v_B, calibration.g0_b, config.entry_b,
                           config.handoff_b, dt=config.trace_resolution, lattice_a=p.lattice_a)
    xs = _positions(trace.times, 0.0, config.entry_b, p.v_B, p.lattice_a)
    areas = _cumulative_areas(config.cavity_profile, p.v_B, calibration.g0_b, config.entry_b,
                              xs, p.lattice_a)
    values = np.column_stack([np.cos(areas), -1j * np.sin(areas)])
    return AmplitudeSeries('stage1', trace, STAGE1_LABELS, values)


def stage2_series(config: TeleportConfig, calibration: Calibration, input_A: QubitState) -> AmplitudeSeries:
    """Unnormalized outcome-1 amplitudes of atom B and the cavity while atom A crosses."""
    p = config.params
    t1 = calibration.timeline.t1
    trace = coupling_trace(config.cavity_profile, p.v_A, calibration.g0_a, config.entry_a,
                           config.detector_a, dt=config.trace_resolution, lattice_a=p.lattice_a,
                           t_offset=t1)
    xs = _positions(trace.times, t1, config.entry_a, p.v_A, p.lattice_a)
    areas = _cumulative_areas(config.cavity_profile, p.v_A, calibration.g0_a, config.entry_a,
                              xs, p.lattice_a)
    if config.ideal_two_photon and areas[-1] > 0.0:
        two_photon = 0.5 * math.pi * areas / areas[-1]
    else:
        two_photon = math.sqrt(2.0) * areas
    c0, c1 = input_A.c0, input_A.c1
    scale = 1.0 / math.sqrt(2.0)
    values = scale * np.column_stack([
        -c0 * np.sin(areas),
        c1 * np.cos(areas),
        -1j * c1 * np.cos(two_photon),
    ])
    return AmplitudeSeries('stage2', trace, STAGE2_LABELS, values)


def teleport_fidelities(input_A: QubitState, conditional: JointState) -> Tuple[float, float, float]:
    """(traced, discard, loss) fidelities of atom B against the input qubit."""
    psi = input_A.as_array()
    overlaps = [abs(np.vdot(psi, conditional.sector(n))) ** 2 for n in range(conditional.amps.shape[-1])]
    traced = float(sum(overlaps))
    v0 = conditional.sector(0)
    weight0 = float(np.sum(np.abs(v0) ** 2))
    discard = float(overlaps[0] / weight0) if weight0 > 0.0 else 0.0
    loss = float(overlaps[0])
    return min(traced, 1.0), min(discard, 1.0), min(loss, 1.0)


def pre_measurement_state(config: TeleportConfig, calibration: Calibration, input_A: QubitState) -> JointState:
    p = config.params
    t = calibration.timeline
    entangled = evolve_stage1(config.cavity_profile, p.v_B, calibration.g0_b, t.t1,
                              entry_x=config.entry_b, lattice_a=p.lattice_a)
    two_photon = 0.5 * math.pi if config.ideal_two_photon else None
    return evolve_stage2(input_A, entangled, config.cavity_profile, p.v_A, calibration.g0_a, t.t2,
                         entry_x=config.entry_a, lattice_a=p.lattice_a, two_photon_area=two_photon)


def run_teleport(config: TeleportConfig, input_A: QubitState, forced_outcome: Optional[int] = None,
                 calibration: Optional[Calibration] = None, with_traces: bool = True) -> TeleportOutcome:
    """Run the full teleportation circuit for one input qubit.

    The reported state is conditioned on `forced_outcome` (1, atom A excited,
    when not given). `success_probability` is always the probability of
    atom A being found excited.
    """
    input_A = QubitState.normalized(input_A.c0, input_A.c1)
    calibration = calibration or calibrate_couplings(config)
    joint = pre_measurement_state(config, calibration, input_A)
    success = float(np.sum(np.abs(joint.amps[1]) ** 2))
    outcome = 1 if forced_outcome is None else forced_outcome
    conditional, outcome_probability = project_joint(joint, 'A', outcome)
    traced, discard, loss = teleport_fidelities(input_A, conditional)
    logger.info("teleport: P(A excited)=%.9g, outcome %d (p=%.9g), fidelity %.9g",
                success, outcome, outcome_probability, traced)
    traces: List[AmplitudeSeries] = []
    if with_traces:
        traces = [stage1_series(config, calibration), stage2_series(config, calibration, input_A)]
    return TeleportOutcome(
        conditional_state=conditional,
        success_probability=min(max(success, 0.0), 1.0),
        detected_outcome=outcome,
        outcome_probability=outcome_probability,
        fidelity_vs_input=traced,
        fidelity_discard=discard,
        fidelity_loss=loss,
        input_state=input_A,
        pre_measurement=joint,
        calibration=calibration,
        stage_traces=traces,
    )
