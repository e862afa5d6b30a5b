"""
Readout circuit: two waveguide zones traversed back to back by atom B.
"""
from dataclasses import dataclass, replace
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from field_profiles.calibration import DEFAULT_LATTICE_A, calibrate_g0, transit_time
from field_profiles.models import PhysicalParams, ProfileModel, SampledProfile
from field_profiles.profiles import merge_profiles, render_zone_train
from quantum_core.errors import ModelParameterError
from quantum_core.models import JointState, QubitState
from .models import RamseyZone, TransferMatrix
from .propagator import DEFAULT_STEP, SAMPLING_MODES, compose_zones, excitation_probability, propagate_zone

logger = logging.getLogger(__name__)

DEFAULT_ZONE_AREA = math.pi / 2.0


@dataclass(frozen=True)
class ReadoutCircuit:
    zones: Tuple[RamseyZone, ...]
    v: float
    step: float = DEFAULT_STEP
    entry_time: float = 0.0
    lab_frame: bool = False
    lattice_a: float = DEFAULT_LATTICE_A
    zone_area: float = DEFAULT_ZONE_AREA
    sampling: str = 'moments'

    def __post_init__(self):
        if not self.zones:
            raise ModelParameterError("a readout circuit needs at least one zone")
        object.__setattr__(self, 'zones', tuple(self.zones))

    @property
    def duration(self) -> float:
        return sum(z.duration for z in self.zones)

    @property
    def mean_rabi(self) -> float:
        """Area-average Rabi frequency of one zone."""
        return self.zone_area / self.zones[0].duration

    @property
    def profile(self) -> SampledProfile:
        return merge_profiles(z.profile for z in self.zones)

    def transfer(self, delta: float) -> TransferMatrix:
        composite = TransferMatrix.identity()
        t = self.entry_time
        for zone in self.zones:
            m = propagate_zone(replace(zone, delta=delta), self.v, self.step, t, self.lab_frame,
                               self.lattice_a, self.sampling)
            composite = compose_zones(composite, m)
            t += zone.duration
        return composite

    def transfers(self, deltas: Iterable[float]) -> List[TransferMatrix]:
        return [self.transfer(d) for d in deltas]


def build_readout_circuit(params: PhysicalParams, waveguide: ProfileModel, entry_time: float = 0.0,
                          zone_count: int = 2, zone_area: float = DEFAULT_ZONE_AREA,
                          step: float = DEFAULT_STEP, omega_m: Optional[float] = None,
                          peak_rabi: Optional[float] = None, lab_frame: bool = False,
                          sampling: str = 'moments') -> ReadoutCircuit:
    """Render the zone train and calibrate each zone's peak Rabi frequency to `zone_area`.

    An explicit `peak_rabi` skips the calibration.
    """
    if sampling not in SAMPLING_MODES:
        raise ModelParameterError(f"sampling must be one of {SAMPLING_MODES}, got {sampling!r}")
    omega_m = params.omega if omega_m is None else omega_m
    zones = []
    for k, profile in enumerate(render_zone_train(waveguide, zone_count)):
        span = profile.x_max - profile.x_min
        rabi = peak_rabi
        if rabi is None:
            rabi = calibrate_g0(profile, params.v_B, zone_area, lattice_a=params.lattice_a)
        zones.append(RamseyZone(profile, omega_m, 0.0, rabi,
                                transit_time(span, params.v_B, params.lattice_a)))
        logger.info("readout zone %d: [%.6g, %.6g]a, peak Rabi %.9g rad/s", k + 1,
                    profile.x_min, profile.x_max, rabi)
    return ReadoutCircuit(tuple(zones), params.v_B, step, entry_time, lab_frame,
                          params.lattice_a, zone_area, sampling)


def p1_curve(state: Union[QubitState, JointState], circuit: ReadoutCircuit,
             deltas: Sequence[float]) -> Dict[str, np.ndarray]:
    """Excitation probability and the transfer-matrix terms behind it, per detuning."""
    deltas = np.asarray(deltas, dtype=float)
    rows = {name: np.empty(deltas.size) for name in ('P1', 'c01_abs2', 'c11_abs2', 'cross_re', 'cross_im')}
    for k, delta in enumerate(deltas):
        m = circuit.transfer(float(delta))
        w = m.c01 * m.c11.conjugate()
        rows['P1'][k] = excitation_probability(state, m)
        rows['c01_abs2'][k] = abs(m.c01) ** 2
        rows['c11_abs2'][k] = abs(m.c11) ** 2
        rows['cross_re'][k] = 2.0 * w.real
        rows['cross_im'][k] = 2.0 * w.imag
    return {'delta_rad_per_s': deltas, **rows}
