"""
Pipeline commands. Each command takes a validated RunConfig, writes its files
into the output directory and returns a CommandResult; `run_command` maps
library errors onto process exit codes.
"""
from dataclasses import dataclass, field
from functools import cached_property
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from field_profiles.models import AnalyticCavity, AnalyticWaveguide, FromFile, ProfileModel, SampledProfile
from field_profiles.profiles import render_model
from quantum_core.errors import SimulationError
from quantum_core.models import BlochAngles, QubitState
from quantum_core.state_dump import format_state_dump
from quantum_core.states import bloch_to_qubit
from readout_engine.circuit import ReadoutCircuit, build_readout_circuit, p1_curve
from readout_engine.propagator import excitation_probability
from readout_engine.tomography import choose_detunings
from reporting.report import (
    calibration_json, generate_report, shots_json, teleport_json, tomography_json,
)
from reporting.tables import (
    curve_frame, estimates_frame, profile_frame, read_measurements, records_frame, series_frame,
    write_table,
)
from shot_sim.estimator import estimate, estimate_from_p1
from shot_sim.models import ShotSettings
from shot_sim.simulator import simulate_shots
from teleport_engine.engine import calibrate_couplings, run_teleport
from teleport_engine.models import Calibration, TeleportConfig, TeleportOutcome
from . import __version__
from .config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0


@dataclass
class CommandResult:
    name: str
    files: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


class RunContext:
    """Lazily built pieces shared by the commands of one run."""

    def __init__(self, config: RunConfig, command: str):
        self.config = config
        self.command = command
        self.out_dir = Path(config.output.out_dir)

    @cached_property
    def provenance(self) -> Dict[str, str]:
        return {'config_hash': self.config.config_hash(), 'version': __version__}

    @cached_property
    def params(self):
        return self.config.physical_params()

    @cached_property
    def cavity_profile(self) -> SampledProfile:
        c = self.config.cavity
        model: ProfileModel = FromFile(c.path) if c.model == 'file' else AnalyticCavity(
            width_sigma=c.width_sigma, center=c.center, half_span=c.half_span, samples_per_a=c.samples_per_a)
        return render_model(model)

    @cached_property
    def waveguide_model(self) -> ProfileModel:
        w = self.config.waveguide
        if w.model == 'file':
            return FromFile(w.path)
        return AnalyticWaveguide(lobe_period=w.lobe_period, envelope_sigma=w.envelope_sigma,
                                 zone_start=w.zone_start, zone_length=w.zone_length,
                                 samples_per_a=w.samples_per_a)

    @cached_property
    def teleport_config(self) -> TeleportConfig:
        t = self.config.teleport
        return TeleportConfig(
            params=self.params, cavity_profile=self.cavity_profile,
            entry_b=t.entry_b, handoff_b=t.handoff_b, entry_a=t.entry_a, detector_a=t.detector_a,
            readout_entry_b=t.readout_entry_b, zone_length=self.config.waveguide.zone_length,
            target_area_b=t.target_area_b, target_area_a=t.target_area_a,
            trace_resolution=t.trace_resolution, ideal_two_photon=t.ideal_two_photon,
            injection_time=t.injection_time,
        )

    @cached_property
    def calibration(self) -> Calibration:
        return calibrate_couplings(self.teleport_config)

    @cached_property
    def input_angles(self) -> BlochAngles:
        t = self.config.teleport
        phi = t.phi if t.phi > -np.pi else np.pi
        return BlochAngles(t.theta, phi)

    @cached_property
    def input_state(self) -> QubitState:
        return bloch_to_qubit(self.input_angles)

    @cached_property
    def teleport(self) -> TeleportOutcome:
        return run_teleport(self.teleport_config, self.input_state, self.config.teleport.outcome,
                            calibration=self.calibration)

    @cached_property
    def circuit(self) -> ReadoutCircuit:
        r, w = self.config.readout, self.config.waveguide
        return build_readout_circuit(self.params, self.waveguide_model,
                                     entry_time=self.calibration.timeline.readout_entry_time,
                                     zone_count=w.zone_count, zone_area=w.zone_area, step=r.step,
                                     omega_m=r.omega_m, peak_rabi=w.peak_rabi, lab_frame=r.lab_frame,
                                     sampling=r.sampling)

    @cached_property
    def deltas(self) -> Tuple[float, ...]:
        t = self.config.tomography
        if t.deltas is not None:
            return tuple(t.deltas)
        span = t.search_span * self.circuit.mean_rabi
        return choose_detunings(self.circuit, search_range=(-span, span), grid_points=t.grid_points,
                                max_condition=t.max_condition)

    @cached_property
    def transfers(self):
        return self.circuit.transfers(self.deltas)

    def readout_state(self, which: Optional[str] = None):
        which = which or self.config.readout.readout_input
        return self.input_state if which == 'ideal' else self.teleport.conditional_state

    def write(self, name: str, frame) -> Path:
        path = write_table(frame, self.out_dir / name, self.provenance)
        logger.info("wrote %s", path)
        return path

    def base_summary(self) -> Dict[str, Any]:
        return {'provenance': self.provenance, 'input': self.input_angles,
                'warnings': list(self.config.warnings)}


# ---------------------------------------------------------------------------
# Steps shared between commands
# ---------------------------------------------------------------------------
def _noiseless_tomography(ctx: RunContext, which: str) -> Dict[str, Any]:
    state = ctx.readout_state(which)
    p1 = [excitation_probability(state, m) for m in ctx.transfers]
    result = estimate_from_p1(ctx.deltas, p1, ctx.transfers, max_condition=ctx.config.tomography.max_condition)
    return tomography_json(result, list(ctx.deltas))


def _sweep(ctx: RunContext) -> Dict[str, np.ndarray]:
    r = ctx.config.readout
    span = r.sweep_span * ctx.circuit.mean_rabi
    return p1_curve(ctx.readout_state(), ctx.circuit, np.linspace(-span, span, r.sweep_points))


def _finish(ctx: RunContext, result: CommandResult) -> CommandResult:
    report = generate_report(result.summary)
    path = ctx.out_dir / 'report.txt'
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report['text'], encoding='utf-8')
    result.files.append(path)
    return result


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
def cmd_calibrate(config: RunConfig) -> CommandResult:
    ctx = RunContext(config, 'calibrate')
    result = CommandResult('calibrate', summary=ctx.base_summary())
    result.summary['calibration'] = calibration_json(ctx.calibration)
    result.files.append(ctx.write('fig4.csv', profile_frame(ctx.circuit.profile)))
    return _finish(ctx, result)


def cmd_teleport(config: RunConfig) -> CommandResult:
    ctx = RunContext(config, 'teleport')
    result = CommandResult('teleport', summary=ctx.base_summary())
    result.summary['calibration'] = calibration_json(ctx.calibration)
    result.summary['teleport'] = teleport_json(ctx.teleport)
    stage1, stage2 = ctx.teleport.stage_traces
    result.files.append(ctx.write('fig2.csv', series_frame(stage1)))
    result.files.append(ctx.write('fig3.csv', series_frame(stage2)))
    dump = ctx.out_dir / 'teleported_state.txt'
    dump.write_text(format_state_dump(ctx.teleport.conditional_state), encoding='utf-8')
    result.files.append(dump)
    return _finish(ctx, result)


def cmd_readout(config: RunConfig) -> CommandResult:
    ctx = RunContext(config, 'readout')
    result = CommandResult('readout', summary=ctx.base_summary())
    result.files.append(ctx.write('fig4.csv', profile_frame(ctx.circuit.profile)))
    result.files.append(ctx.write('fig5.csv', curve_frame(_sweep(ctx))))
    return _finish(ctx, result)


def cmd_tomo(config: RunConfig) -> CommandResult:
    """Invert a measurement file if one is configured, else the noiseless forward model."""
    ctx = RunContext(config, 'tomo')
    result = CommandResult('tomo', summary=ctx.base_summary())
    t = config.tomography
    if t.measurements:
        table = read_measurements(t.measurements)
        deltas = table['delta'].tolist()
        transfers = ctx.circuit.transfers(deltas)
        tomo = estimate_from_p1(deltas, table['p1'].tolist(), transfers, max_condition=t.max_condition)
        result.summary['tomography'] = tomography_json(tomo, deltas)
    else:
        result.summary['tomography_ideal'] = _noiseless_tomography(ctx, 'ideal')
        result.summary['tomography_teleported'] = _noiseless_tomography(ctx, 'teleported')
    return _finish(ctx, result)


def _run_shots(ctx: RunContext, result: CommandResult) -> None:
    s = ctx.config.shots
    settings = ShotSettings(detector_efficiency=s.detector_efficiency, emission_loss=s.emission_loss,
                            zone_count=len(ctx.circuit.zones))
    batches = simulate_shots(ctx.teleport_config, ctx.circuit, ctx.input_state, ctx.deltas, s.n_per_delta,
                             s.seed, settings=settings, workers=s.workers, teleport=ctx.teleport)
    report = estimate(batches, ctx.transfers, z=s.z, max_condition=ctx.config.tomography.max_condition)
    result.summary['shots'] = shots_json(report)
    result.files.append(ctx.write('estimates.csv', estimates_frame(report)))
    if ctx.config.output.write_records:
        result.files.append(ctx.write('records.csv', records_frame(batches)))


def cmd_shots(config: RunConfig) -> CommandResult:
    ctx = RunContext(config, 'shots')
    result = CommandResult('shots', summary=ctx.base_summary())
    result.summary['teleport'] = teleport_json(ctx.teleport)
    _run_shots(ctx, result)
    return _finish(ctx, result)


def cmd_full(config: RunConfig) -> CommandResult:
    ctx = RunContext(config, 'full')
    result = CommandResult('full', summary=ctx.base_summary())
    result.summary['calibration'] = calibration_json(ctx.calibration)
    result.summary['teleport'] = teleport_json(ctx.teleport)
    stage1, stage2 = ctx.teleport.stage_traces
    result.files.append(ctx.write('fig2.csv', series_frame(stage1)))
    result.files.append(ctx.write('fig3.csv', series_frame(stage2)))
    result.files.append(ctx.write('fig4.csv', profile_frame(ctx.circuit.profile)))
    result.files.append(ctx.write('fig5.csv', curve_frame(_sweep(ctx))))
    result.summary['tomography_ideal'] = _noiseless_tomography(ctx, 'ideal')
    result.summary['tomography_teleported'] = _noiseless_tomography(ctx, 'teleported')
    _run_shots(ctx, result)
    return _finish(ctx, result)


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'calibrate': cmd_calibrate,
    'teleport': cmd_teleport,
    'readout': cmd_readout,
    'tomo': cmd_tomo,
    'shots': cmd_shots,
    'full': cmd_full,
}


def run_command(name: str, config: RunConfig) -> int:
    """Run one command and return its exit status."""
    try:
        result = COMMANDS[name](config)
    except SimulationError as exc:
        logger.error("%s failed: %s", name, exc)
        return exc.exit_code
    logger.info("%s finished: %d file(s) in %s", name, len(result.files), config.output.out_dir)
    return EXIT_OK
