import math
from typing import Any, Dict, List, Mapping, Optional

from quantum_core.models import BlochAngles
from readout_engine.models import TomographyResult
from shot_sim.models import EstimationReport
from teleport_engine.models import Calibration, TeleportOutcome


def _g(value: float) -> str:
    return '%.12g' % value


def _in_pi(value: float) -> str:
    return f"{_g(value)} ({_g(value / math.pi)} pi)"


def calibration_json(calibration: Calibration) -> Dict[str, Any]:
    t = calibration.timeline
    return {
        'g0_b': calibration.g0_b,
        'g0_a': calibration.g0_a,
        'g0_mismatch': calibration.g0_mismatch,
        'area_b': calibration.area_b,
        'area_a': calibration.area_a,
        'calibrated': calibration.calibrated,
        'timeline_us': {
            't1': t.t1 * 1e6, 't2': t.t2 * 1e6, 't3': t.t3 * 1e6, 't4': t.t4 * 1e6,
            'detection': t.detection_time * 1e6,
            'readout_entry': t.readout_entry_time * 1e6,
        },
    }


def teleport_json(outcome: TeleportOutcome) -> Dict[str, Any]:
    b = outcome.b_qubit
    return {
        'success_probability': outcome.success_probability,
        'detected_outcome': outcome.detected_outcome,
        'outcome_probability': outcome.outcome_probability,
        'fidelity_traced': outcome.fidelity_vs_input,
        'fidelity_discard': outcome.fidelity_discard,
        'fidelity_loss': outcome.fidelity_loss,
        'b_qubit': {'c0': [b.c0.real, b.c0.imag], 'c1': [b.c1.real, b.c1.imag]},
    }


def tomography_json(result: TomographyResult, deltas: Optional[List[float]] = None) -> Dict[str, Any]:
    out = {
        'x': [result.x1, result.x2, result.x3, result.x4],
        'theta_hat': result.theta_hat,
        'phi_hat': result.phi_hat,
        'degenerate_phase': result.degenerate_phase,
        'residual': result.residual,
        'condition_number': result.condition_number,
        'normalization_error': result.normalization_error,
    }
    if deltas is not None:
        out['deltas'] = list(deltas)
    return out


def shots_json(report: EstimationReport) -> Dict[str, Any]:
    return {
        'acceptance_fraction': report.acceptance_fraction,
        'per_delta': [
            {'delta': e.delta, 'n_total': e.n_total, 'n_accepted': e.n_accepted,
             'p1_hat': e.p1_hat, 'standard_error': e.standard_error}
            for e in report.per_delta
        ],
        'tomography': tomography_json(report.tomography),
        'theta_ci': report.theta_ci,
        'phi_ci': report.phi_ci,
        'z': report.z,
    }


def _tomography_lines(title: str, t: Mapping[str, Any]) -> List[str]:
    lines = [f"\n{title}:"]
    if 'deltas' in t:
        lines.append(f" - detunings (rad/s): {', '.join(_g(d) for d in t['deltas'])}")
    lines.append(f" - x1..x4: {', '.join(_g(x) for x in t['x'])}")
    lines.append(f" - theta_hat: {_in_pi(t['theta_hat'])}")
    phi = _in_pi(t['phi_hat']) + ('  [undefined at pole]' if t['degenerate_phase'] else '')
    lines.append(f" - phi_hat: {phi}")
    lines.append(f" - condition number: {_g(t['condition_number'])}, residual {_g(t['residual'])}, "
                 f"|x1+x2-1| {_g(t['normalization_error'])}")
    return lines


def generate_report(summary: Mapping[str, Any]) -> Dict[str, Any]:
    """Render a run summary as {'json': ..., 'text': ...}.

    `summary` holds any of: provenance, input, calibration, teleport,
    tomography_ideal, tomography_teleported, tomography, shots, warnings.
    """
    lines: List[str] = []
    prov = summary.get('provenance', {})
    lines.append(f"Run {prov.get('config_hash', '?')} (version {prov.get('version', '?')})")

    if 'input' in summary:
        angles: BlochAngles = summary['input']
        lines.append(f"Input state: theta {_in_pi(angles.theta)}, phi {_in_pi(angles.phi)}")

    if 'calibration' in summary:
        c = summary['calibration']
        lines.append("\nCalibration:")
        mode = 'calibrated' if c['calibrated'] else 'fixed'
        lines.append(f" - g0 atom B: {_g(c['g0_b'])} rad/s ({mode}), G_B = {_in_pi(c['area_b'])}")
        lines.append(f" - g0 atom A: {_g(c['g0_a'])} rad/s ({mode}), G_A = {_in_pi(c['area_a'])}")
        lines.append(f" - relative g0 mismatch: {_g(c['g0_mismatch'])}")
        tl = c['timeline_us']
        lines.append(f" - t1 {_g(tl['t1'])} us, t1+t2 {_g(tl['detection'])} us, "
                     f"readout entry {_g(tl['readout_entry'])} us, t4 {_g(tl['t4'])} us")

    if 'teleport' in summary:
        t = summary['teleport']
        lines.append("\nTeleportation:")
        lines.append(f" - P(atom A excited): {_g(t['success_probability'])}")
        lines.append(f" - conditioned on outcome {t['detected_outcome']} (p = {_g(t['outcome_probability'])})")
        lines.append(f" - fidelity traced {_g(t['fidelity_traced'])}, discard {_g(t['fidelity_discard'])}, "
                     f"loss {_g(t['fidelity_loss'])}")

    for key, title in (('tomography_ideal', 'Noiseless tomography (ideal teleported qubit)'),
                       ('tomography_teleported', 'Noiseless tomography (teleported atom B and cavity)'),
                       ('tomography', 'Tomography from measurements')):
        if key in summary:
            lines.extend(_tomography_lines(title, summary[key]))

    if 'shots' in summary:
        s = summary['shots']
        lines.append("\nShots:")
        lines.append(f" - acceptance fraction: {_g(s['acceptance_fraction'])}")
        for e in s['per_delta']:
            lines.append(f" - delta {_g(e['delta'])}: {e['n_accepted']}/{e['n_total']} accepted, "
                         f"P1 = {_g(e['p1_hat'])} +/- {_g(e['standard_error'])}")
        lines.extend(_tomography_lines('Shot tomography', s['tomography']))
        lines.append(f" - theta CI (z={_g(s['z'])}): +/- {_g(s['theta_ci'])}")
        lines.append(f" - phi CI (z={_g(s['z'])}): +/- {_g(s['phi_ci'])}")

    warnings = summary.get('warnings') or []
    lines.append("\nWarnings:")
    if not warnings:
        lines.append(" - (none)")
    for w in warnings:
        lines.append(f" - {w}")

    payload = {k: v for k, v in summary.items() if k != 'input'}
    if 'input' in summary:
        payload['input'] = {'theta': summary['input'].theta, 'phi': summary['input'].phi}
    return {"json": payload, "text": "\n".join(lines) + "\n"}
