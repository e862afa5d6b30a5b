"""
Monte Carlo shots of the full experiment.

Each detuning gets its own counter-based generator keyed by (seed, detuning
index), and each shot consumes one fixed row of uniforms, so the outcome of
shot i at detuning k never depends on how the detunings are scheduled.
"""
import logging
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from quantum_core.models import JointState, QubitState
from quantum_core.states import project_joint
from readout_engine.circuit import ReadoutCircuit
from readout_engine.propagator import excitation_probability
from teleport_engine.engine import run_teleport
from teleport_engine.models import TeleportConfig, TeleportOutcome
from .models import ShotBatch, ShotRecord, ShotSettings

logger = logging.getLogger(__name__)

# uniforms per shot: A excitation, A detector, B emission, B excitation, B detector
UNIFORMS_PER_SHOT = 5


def shot_generator(seed: int, delta_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, delta_index])))


def sample_batch(delta: float, delta_index: int, p_a: float, p1: float, n_shots: int, seed: int,
                 settings: ShotSettings) -> ShotBatch:
    u = shot_generator(seed, delta_index).random((n_shots, UNIFORMS_PER_SHOT))
    eff = settings.detector_efficiency
    a_excited = (u[:, 0] < p_a) & (u[:, 1] < eff)
    emitted = u[:, 2] < settings.emission_probability
    b_excited = (u[:, 3] < p1) & ~emitted & (u[:, 4] < eff)
    return ShotBatch(delta, delta_index, a_excited, b_excited & a_excited)


def simulate_shots(teleport_config: TeleportConfig, readout_zones: ReadoutCircuit, input: QubitState,
                   deltas: Sequence[float], n_per_delta: int, seed: int,
                   settings: Optional[ShotSettings] = None, workers: int = 1,
                   teleport: Optional[TeleportOutcome] = None,
                   readout_state: Optional[Union[QubitState, JointState]] = None) -> List[ShotBatch]:
    """Shots per detuning, in the order of `deltas`.

    Atom A clicks with the exact forward-model probability; accepted shots
    read out atom B's (B, cavity) state on the atom-A-excited branch,
    whichever outcome `teleport` was conditioned on, or `readout_state`
    when given.
    """
    if n_per_delta < 1:
        raise ValueError(f"n_per_delta must be >= 1, got {n_per_delta}")
    settings = settings or ShotSettings(zone_count=len(readout_zones.zones))
    teleport = teleport or run_teleport(teleport_config, input, with_traces=False)
    state = readout_state
    if state is None:
        # shots are accepted on atom A excited, so atom B carries the A=1 branch
        state = teleport.conditional_state if teleport.detected_outcome == 1 else \
            project_joint(teleport.pre_measurement, 'A', 1)[0]
    p_a = teleport.success_probability
    p1s = [excitation_probability(state, readout_zones.transfer(float(d))) for d in deltas]
    logger.info("simulating %d shots at %d detunings (P(A excited)=%.6g, %d workers)",
                n_per_delta, len(deltas), p_a, workers)
    batches = Parallel(n_jobs=workers, prefer="threads")(
        delayed(sample_batch)(float(d), k, p_a, p1, n_per_delta, seed, settings)
        for k, (d, p1) in enumerate(zip(deltas, p1s))
    )
    return list(batches)


def all_records(batches: Iterable[ShotBatch]) -> List[ShotRecord]:
    return [record for batch in batches for record in batch.records()]
