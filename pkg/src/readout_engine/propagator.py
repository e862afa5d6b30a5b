"""Two-level propagation of atom B through the Ramsey waveguide zones.

Within a step of length tau at constant Rabi frequency Omega, with the detuning
delta = omega_m - omega, Lambda = sqrt(delta^2 + Omega^2), cos(Theta) = -delta / Lambda
and sin(Theta) = -Omega / Lambda, the rotating-frame amplitudes evolve as

    b0' = [cos(L tau/2) + i cosT sin(L tau/2)] b0 + i sinT sin(L tau/2) b1
    b1' = i sinT sin(L tau/2) b0 + [cos(L tau/2) - i cosT sin(L tau/2)] b1

The lab-frame amplitudes carry the extra phases c0 = exp(+i omega_m t/2) b0 and
c1 = exp(-i omega_m t/2) b1. Those phases never change populations, and when
zones are composed the phases at each internal boundary cancel.

With the transfer matrix c_ij the excitation probability after the circuit is

    P1 = |c0 c01 + c1 c11|^2
       = |c0|^2 |c01|^2 + |c1|^2 |c11|^2 + 2 x3 Re(c01 c11*) + 2 x4 Im(c01 c11*)

with x3 = Re(c0 c1*) and x4 = c0r c1i - c0i c1r, since c0 c1* = x3 - i x4.
"""
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from field_profiles.calibration import DEFAULT_LATTICE_A
from field_profiles.profiles import eval_profile, running_integral, running_moment
from quantum_core.errors import ModelParameterError
from quantum_core.models import JointState, QubitState
from .models import RamseyZone, TransferMatrix

logger = logging.getLogger(__name__)

DEFAULT_STEP = 44e-9
DURATION_TOL = 1e-6
SAMPLING_MODES = ('moments', 'midpoint')


def _step_matrices(omega0: np.ndarray, delta: float, dt: float,
                   moment: Optional[np.ndarray] = None) -> np.ndarray:
    """Rotating-frame propagators, column convention, one per entry of `omega0`.

    `moment` is the step's integral of Omega(s) (s - dt/2); it adds the
    second Magnus term, a sigma_y rotation of -delta * moment.
    """
    omega0 = np.atleast_1d(np.asarray(omega0, dtype=float))
    rx = omega0 * dt
    ry = np.zeros_like(rx) if moment is None else -delta * np.asarray(moment, dtype=float)
    rz = np.full_like(rx, delta * dt)
    angle = np.sqrt(rx * rx + ry * ry + rz * rz)
    c = np.cos(0.5 * angle)
    s = np.where(angle > 0.0, np.sin(0.5 * angle) / np.where(angle > 0.0, angle, 1.0), 0.0)
    u = np.empty(omega0.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c - 1j * s * rz
    u[..., 0, 1] = -1j * s * rx - s * ry
    u[..., 1, 0] = -1j * s * rx + s * ry
    u[..., 1, 1] = c + 1j * s * rz
    return u


def _frame(omega_m: float, t: float) -> np.ndarray:
    """Diagonal of the rotating-to-lab transformation at time t."""
    half = 0.5 * omega_m * t
    return np.array([np.exp(1j * half), np.exp(-1j * half)])


def step_amplitudes(c0: complex, c1: complex, omega0: float, delta: float, dt: float,
                    t: float = 0.0, omega_m: float = 0.0) -> Tuple[complex, complex]:
    """Propagate (c0, c1) from t to t + dt at constant Rabi frequency.

    With `omega_m` = 0 the amplitudes are rotating-frame ones; otherwise they
    are lab-frame amplitudes and pick up the exp(+/- i omega_m t/2) factors.
    """
    if dt <= 0.0:
        raise ModelParameterError(f"step must be positive, got {dt}")
    u = _step_matrices(np.array([omega0]), delta, dt)[0]
    b = np.array([c0, c1], dtype=complex) / _frame(omega_m, t)
    out = _frame(omega_m, t + dt) * (u @ b)
    return complex(out[0]), complex(out[1])


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """mats[0] @ mats[1] @ ... by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(2, dtype=complex)[None]], axis=0)
        mats = mats[0::2] @ mats[1::2]
    return mats[0]


def _step_rabi(zone: RamseyZone, boundaries: np.ndarray, dt: float,
               sampling: str) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Per-step Rabi frequency and, for `moments`, its first moment in time."""
    if sampling == 'midpoint':
        return zone.peak_rabi * eval_profile(zone.profile, 0.5 * (boundaries[:-1] + boundaries[1:])), None
    origin = zone.profile.x_min
    width = np.diff(boundaries)
    area = np.diff(running_integral(zone.profile, boundaries))
    first = np.diff(running_moment(zone.profile, boundaries, origin))
    centred = first - (0.5 * (boundaries[:-1] + boundaries[1:]) - origin) * area
    omega = zone.peak_rabi * area / width
    moment = zone.peak_rabi * centred * (dt / width) ** 2
    return omega, moment


def propagate_zone(zone: RamseyZone, v: float, step: float = DEFAULT_STEP, entry_time: float = 0.0,
                   lab_frame: bool = False, lattice_a: float = DEFAULT_LATTICE_A,
                   sampling: str = 'moments') -> TransferMatrix:
    """Piecewise propagation across one zone in steps of at most `step`.

    `sampling='midpoint'` holds Omega at its step-midpoint value. The default
    `moments` uses the exact mean of the sampled profile over each step plus
    its first moment, which integrates the kinks at lobe nodes exactly and
    makes each step fourth-order accurate.
    """
    if v <= 0.0:
        raise ModelParameterError(f"velocity must be positive, got {v}")
    if step <= 0.0:
        raise ModelParameterError(f"step must be positive, got {step}")
    if sampling not in SAMPLING_MODES:
        raise ModelParameterError(f"sampling must be one of {SAMPLING_MODES}, got {sampling!r}")
    expected = zone.length * lattice_a / v
    if abs(zone.duration - expected) > DURATION_TOL * expected:
        raise ModelParameterError(
            f"zone duration {zone.duration:.9g}s does not match its {zone.length:.6g}a transit ({expected:.9g}s)"
        )
    n_steps = max(1, int(math.ceil(zone.duration / step - 1e-9)))
    dt = zone.duration / n_steps
    boundaries = zone.profile.x_min + v * np.arange(n_steps + 1) * dt / lattice_a
    omega, moment = _step_rabi(zone, boundaries, dt, sampling)
    steps = _step_matrices(omega, zone.delta, dt, moment)
    m = _ordered_product(np.swapaxes(steps, -1, -2))
    if lab_frame:
        m = np.diag(1.0 / _frame(zone.omega_m, entry_time)) @ m @ np.diag(
            _frame(zone.omega_m, entry_time + zone.duration))
    logger.debug("zone at delta=%.6g: %d steps of %.4g s", zone.delta, n_steps, dt)
    return TransferMatrix(m)


def compose_zones(z1_matrix: TransferMatrix, z2_matrix: TransferMatrix) -> TransferMatrix:
    """Transfer matrix of z1 followed by z2."""
    return TransferMatrix(z1_matrix.matrix @ z2_matrix.matrix)


def design_row(composite: TransferMatrix) -> np.ndarray:
    """Coefficients of (x1, x2, x3, x4) in P1."""
    w = composite.c01 * composite.c11.conjugate()
    return np.array([abs(composite.c01) ** 2, abs(composite.c11) ** 2, 2.0 * w.real, 2.0 * w.imag])


def bloch_unknowns(state: QubitState) -> np.ndarray:
    c0, c1 = state.c0, state.c1
    return np.array([
        abs(c0) ** 2,
        abs(c1) ** 2,
        c0.real * c1.real + c0.imag * c1.imag,
        c0.real * c1.imag - c0.imag * c1.real,
    ])


def expanded_probability(state: QubitState, composite: TransferMatrix) -> float:
    return float(design_row(composite) @ bloch_unknowns(state))


def excitation_probability(state: Union[QubitState, JointState], composite: TransferMatrix) -> float:
    """P1 after the circuit.

    A (B, n) JointState sums over the orthogonal cavity sectors, which the
    readout leaves untouched.
    """
    column = composite.matrix[:, 1]
    if isinstance(state, JointState):
        if state.labels != ('B', 'n'):
            raise ModelParameterError(f"readout expects atom B with the cavity, got {state.labels}")
        p1 = float(np.sum(np.abs(column @ state.amps) ** 2))
        if not state.normalized:
            p1 /= state.norm ** 2
    else:
        p1 = abs(state.c0 * column[0] + state.c1 * column[1]) ** 2 / state.norm ** 2
    return min(1.0, max(0.0, p1))
