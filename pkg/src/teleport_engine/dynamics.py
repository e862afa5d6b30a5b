"""Resonant atom-cavity dynamics in the interaction picture.

For a single atom coupled to the cavity through g(t), the Jaynes-Cummings
Hamiltonian only mixes |1>|n> with |0>|n+1>, at rate sqrt(n+1) g(t). Each
such pair rotates by sqrt(n+1) G with G the pulse area, giving

    |1,n>   -> cos(sqrt(n+1) G)|1,n>   - i sin(sqrt(n+1) G)|0,n+1>
    |0,n+1> -> cos(sqrt(n+1) G)|0,n+1> - i sin(sqrt(n+1) G)|1,n>

The closed form below and the ODE integration of the same generator are
independent routes to the same amplitudes and are used to check each other.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from field_profiles.calibration import DEFAULT_LATTICE_A, pulse_area
from field_profiles.models import CouplingTrace, SampledProfile
from quantum_core.errors import IntegrationError, ModelParameterError
from quantum_core.models import FOCK_DIM, JointState, QubitState
from quantum_core.states import tensor_qubit

logger = logging.getLogger(__name__)

# atom/cavity pair basis index = atom * FOCK_DIM + n
PAIR_DIM = 2 * FOCK_DIM
ODE_NORM_TOL = 1e-6


def _pair(atom: int, n: int) -> int:
    return atom * FOCK_DIM + n


def jc_generator() -> np.ndarray:
    """Coupling operator a^dag sigma_- + a sigma_+ on one atom and the truncated cavity."""
    k = np.zeros((PAIR_DIM, PAIR_DIM), dtype=complex)
    for n in range(FOCK_DIM - 1):
        rate = math.sqrt(n + 1)
        k[_pair(0, n + 1), _pair(1, n)] = rate
        k[_pair(1, n), _pair(0, n + 1)] = rate
    return k


def jc_propagator(area: float, two_photon_area: Optional[float] = None) -> np.ndarray:
    """Closed-form propagator exp(-i area K) on the atom/cavity pair.

    `two_photon_area` overrides the rotation angle of the (|1,1>, |0,2>) pair.
    |1,2> would couple outside the truncation and is left untouched; callers
    guarantee it is never populated.
    """
    u = np.eye(PAIR_DIM, dtype=complex)
    angles = [area, math.sqrt(2.0) * area if two_photon_area is None else two_photon_area]
    for n, angle in enumerate(angles):
        c, s = math.cos(angle), math.sin(angle)
        hi, lo = _pair(1, n), _pair(0, n + 1)
        u[hi, hi] = c
        u[lo, lo] = c
        u[hi, lo] = -1j * s
        u[lo, hi] = -1j * s
    return u


def _area_until(profile: SampledProfile, v: float, g0: float, t: float, entry_x: float,
                lattice_a: float) -> float:
    if t <= 0.0:
        return 0.0
    return pulse_area(profile, v, g0, entry_x, entry_x + v * t / lattice_a, lattice_a)


def evolve_stage1(profile: SampledProfile, v_B: float, g0: float, t: float,
                  entry_x: float = 0.0, lattice_a: float = DEFAULT_LATTICE_A) -> JointState:
    """Atom B, initially excited, crosses the empty cavity for a time t."""
    area = _area_until(profile, v_B, g0, t, entry_x, lattice_a)
    start = np.zeros(PAIR_DIM, dtype=complex)
    start[_pair(1, 0)] = 1.0
    amps = (jc_propagator(area) @ start).reshape(2, FOCK_DIM)
    return JointState(('B', 'n'), amps)


def _check_stage2_input(entangled: JointState) -> None:
    if entangled.labels != ('B', 'n'):
        raise ModelParameterError(f"stage 2 expects a (B, n) state, got {entangled.labels}")
    if np.any(np.abs(entangled.sector(2)) > 0.0):
        raise ModelParameterError("stage 2 input must not populate the two-photon sector")


def apply_pair_propagator(joint: JointState, u: np.ndarray) -> JointState:
    """Apply a (A, n) pair operator to an (A, B, n) state, atom B spectating."""
    u4 = u.reshape(2, FOCK_DIM, 2, FOCK_DIM)
    amps = np.einsum('xyan,abn->xby', u4, joint.amps)
    return JointState(('A', 'B', 'n'), amps, joint.normalized)


def evolve_stage2(input_A: QubitState, entangled: JointState, profile: SampledProfile, v_A: float,
                  g0: float, t2: float, entry_x: float = 0.0, lattice_a: float = DEFAULT_LATTICE_A,
                  two_photon_area: Optional[float] = None) -> JointState:
    """Atom A crosses the cavity while atom B, already far away, is uncoupled."""
    _check_stage2_input(entangled)
    area = _area_until(profile, v_A, g0, t2, entry_x, lattice_a)
    joint = tensor_qubit(input_A, entangled)
    return apply_pair_propagator(joint, jc_propagator(area, two_photon_area))


def evolve_stage2_ode(input_A: QubitState, entangled: JointState, coupling_trace: CouplingTrace,
                      t2: float, rtol: float = 1e-10, atol: float = 1e-12) -> JointState:
    """Integrate i d/dt psi = g(t) K psi over [t_start, t_start + t2].

    t_start is the first time of `coupling_trace`; g is zero outside it.
    """
    _check_stage2_input(entangled)
    joint = tensor_qubit(input_A, entangled)
    if t2 <= 0.0:
        return joint
    k4 = jc_generator().reshape(2, FOCK_DIM, 2, FOCK_DIM)
    shape = joint.amps.shape
    t0 = float(coupling_trace.times[0]) if coupling_trace.times.size else 0.0

    def rhs(t, y):
        psi = y.reshape(shape)
        return (-1j * coupling_trace.at(t) * np.einsum('xyan,abn->xby', k4, psi)).ravel()

    max_step = np.inf
    if coupling_trace.times.size > 1:
        max_step = float(np.median(np.diff(coupling_trace.times)))
    sol = solve_ivp(rhs, (t0, t0 + t2), joint.amps.ravel().astype(complex), method='DOP853',
                    rtol=rtol, atol=atol, max_step=max_step)
    if not sol.success:
        raise IntegrationError(f"stage 2 integration failed: {sol.message}")
    amps = sol.y[:, -1].reshape(shape)
    norm = float(np.sqrt(np.sum(np.abs(amps) ** 2)))
    if abs(norm - 1.0) > ODE_NORM_TOL:
        raise IntegrationError(f"stage 2 integration drifted to norm {norm:.12g}")
    logger.debug("stage 2 ODE: %d steps, norm drift %.3g", sol.t.size, norm - 1.0)
    return JointState(('A', 'B', 'n'), amps / norm)
