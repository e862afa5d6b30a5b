from dataclasses import dataclass, field
import math
from typing import List, Optional, Tuple

import numpy as np

from field_profiles.models import CouplingTrace, PhysicalParams, SampledProfile, Timeline
from quantum_core.errors import ModelParameterError
from quantum_core.models import JointState, QubitState

GEOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class TeleportConfig:
    """Teleportation-circuit geometry and targets.

    Positions are in units of a along each atom's own trajectory. Atom B
    enters at `entry_b` and hands off at `handoff_b` (time t1); atom A crosses
    the cavity from `entry_a` to the detector at `detector_a` (duration t2).
    """
    params: PhysicalParams
    cavity_profile: SampledProfile
    entry_b: float = 0.0
    handoff_b: float = 18.0
    entry_a: float = 0.65
    detector_a: float = 17.35
    readout_entry_b: float = 43.0
    zone_length: float = 18.0
    target_area_b: float = 9.0 * math.pi / 4.0
    target_area_a: float = 7.0 * math.pi / 4.0
    trace_resolution: float = 44e-9
    ideal_two_photon: bool = False
    injection_time: Optional[float] = None

    def __post_init__(self):
        if self.handoff_b <= self.entry_b:
            raise ModelParameterError("handoff_b must lie beyond entry_b")
        if self.detector_a <= self.entry_a:
            raise ModelParameterError("detector_a must lie beyond entry_a")
        if self.detector_a < self.cavity_profile.x_max - GEOMETRY_TOL:
            raise ModelParameterError(
                f"detector at {self.detector_a}a lies inside the cavity profile (ends at {self.cavity_profile.x_max}a)"
            )
        for name in ('target_area_b', 'target_area_a', 'trace_resolution', 'zone_length'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ModelParameterError(f"{name} must be positive, got {value}")
        if self.injection_time is not None:
            expected = (self.handoff_b - self.entry_b) * self.params.lattice_a / self.params.v_B
            if abs(self.injection_time - expected) > 1e-3 * expected:
                raise ModelParameterError(
                    f"injection_time {self.injection_time:.6g}s differs from atom B's transit {expected:.6g}s"
                )


@dataclass(frozen=True)
class Calibration:
    g0_b: float
    g0_a: float
    area_b: float
    area_a: float
    timeline: Timeline
    calibrated: bool = True

    @property
    def g0_mismatch(self) -> float:
        """Relative disagreement between the per-atom coupling scales."""
        return abs(self.g0_a - self.g0_b) / self.g0_b


@dataclass(frozen=True)
class AmplitudeSeries:
    """Coupling trace plus labelled amplitudes sampled at the trace times."""
    name: str
    trace: CouplingTrace
    labels: Tuple[str, ...]
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class TeleportOutcome:
    conditional_state: JointState
    success_probability: float
    detected_outcome: int
    outcome_probability: float
    fidelity_vs_input: float
    fidelity_discard: float
    fidelity_loss: float
    input_state: QubitState
    pre_measurement: JointState
    calibration: Calibration
    stage_traces: List[AmplitudeSeries] = field(default_factory=list)

    @property
    def b_qubit(self) -> QubitState:
        """Atom B's amplitudes in the vacuum sector, renormalized."""
        v0 = self.conditional_state.sector(0)
        return QubitState.normalized(v0[0], v0[1])
