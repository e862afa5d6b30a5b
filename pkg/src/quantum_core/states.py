"""Bloch parametrization, overlaps and projective measurement."""
import logging
import math
from typing import Tuple

import numpy as np

from .errors import ImpossibleOutcomeError
from .models import BlochAngles, JointState, QubitState

logger = logging.getLogger(__name__)

DEGENERATE_AMPLITUDE = 1e-12
IMPOSSIBLE_PROBABILITY = 1e-15


def bloch_to_qubit(angles: BlochAngles) -> QubitState:
    """c0 = cos(theta/2), c1 = sin(theta/2) exp(i phi)."""
    half = angles.theta / 2.0
    return QubitState(math.cos(half), math.sin(half) * complex(math.cos(angles.phi), math.sin(angles.phi)))


def qubit_to_bloch(state: QubitState) -> BlochAngles:
    """Inverse of `bloch_to_qubit` up to a global phase.

    At the poles the azimuth is undefined; it is returned as 0 with
    `degenerate_phase` set.
    """
    canonical = QubitState.normalized(state.c0, state.c1).global_phase_canonical()
    r0 = min(1.0, abs(canonical.c0))
    r1 = min(1.0, abs(canonical.c1))
    theta = 2.0 * math.atan2(r1, r0)
    if r1 < DEGENERATE_AMPLITUDE or r0 < DEGENERATE_AMPLITUDE:
        logger.debug("degenerate Bloch phase (|c0|=%.3g, |c1|=%.3g)", r0, r1)
        theta = 0.0 if r1 < DEGENERATE_AMPLITUDE else math.pi
        return BlochAngles(theta, 0.0, degenerate_phase=True)
    phi = math.atan2(canonical.c1.imag, canonical.c1.real)
    if phi <= -math.pi:
        phi = math.pi
    return BlochAngles(theta, phi)


def fidelity(a: QubitState, b: QubitState) -> float:
    overlap = a.c0.conjugate() * b.c0 + a.c1.conjugate() * b.c1
    return float(min(1.0, max(0.0, abs(overlap) ** 2)))


def project_joint(state: JointState, atom: str, outcome: int) -> Tuple[JointState, float]:
    """Project `atom` onto `outcome` and drop that axis.

    Returns the renormalized remainder and the outcome probability.
    """
    if atom not in ('A', 'B') or atom not in state.labels:
        raise ValueError(f"atom must be one of the state's atoms, got {atom!r} for {state.labels}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    axis = state.labels.index(atom)
    block = np.take(state.amps, outcome, axis=axis)
    probability = float(np.sum(np.abs(block) ** 2))
    if state.normalized is False:
        probability /= state.norm ** 2
    if probability <= IMPOSSIBLE_PROBABILITY:
        raise ImpossibleOutcomeError(
            f"outcome {outcome} of atom {atom} has probability {probability:.3g}"
        )
    labels = tuple(l for l in state.labels if l != atom)
    remainder = block / math.sqrt(float(np.sum(np.abs(block) ** 2)))
    return JointState(labels, remainder, True), probability


def tensor_qubit(atom_state: QubitState, rest: JointState) -> JointState:
    """Prepend atom A in `atom_state` to a (B, n) state."""
    if rest.labels != ('B', 'n'):
        raise ValueError(f"expected a (B, n) state, got {rest.labels}")
    amps = np.multiply.outer(atom_state.as_array(), rest.amps)
    return JointState(('A', 'B', 'n'), amps, rest.normalized)
