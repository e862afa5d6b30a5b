from dataclasses import dataclass, field
import math
from typing import Optional, Union

import numpy as np

from quantum_core.errors import ModelParameterError, ProfileOrderError, ProfileRangeError

SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEFAULT_SAMPLES_PER_A = 65
MAGNITUDE_SLACK = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Chip and atom parameters. Lengths in metres, rates in rad/s.

    `g0` is None until calibrated; an explicit value disables calibration.
    """
    lattice_a: float = 2.202e-3
    wavelength: float = 5.9e-3
    omega: Optional[float] = None
    dipole_mu10: float = 2e-26
    g0: Optional[float] = None
    v_B: float = 767.7
    v_A: float = 987.0

    def __post_init__(self):
        if self.omega is None:
            object.__setattr__(self, 'omega', self.omega_from_wavelength())
        for name in ('lattice_a', 'wavelength', 'omega', 'dipole_mu10', 'v_B', 'v_A'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ModelParameterError(f"{name} must be positive, got {value}")
        if self.g0 is not None and not (math.isfinite(self.g0) and self.g0 > 0.0):
            raise ModelParameterError(f"g0 must be positive, got {self.g0}")
        expected = self.omega_from_wavelength()
        if abs(self.omega - expected) > 1e-9 * expected:
            raise ModelParameterError(
                f"omega {self.omega} inconsistent with wavelength {self.wavelength} (expected {expected})"
            )

    def omega_from_wavelength(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength


@dataclass(frozen=True)
class SampledProfile:
    """Normalized field magnitude along a trajectory, positions in units of a."""
    positions: np.ndarray = field(repr=False)
    magnitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        m = np.asarray(self.magnitudes, dtype=float)
        if x.ndim != 1 or m.ndim != 1 or x.shape != m.shape:
            raise ProfileOrderError(f"positions {x.shape} and magnitudes {m.shape} must be equal-length vectors")
        if x.size < 2:
            raise ProfileOrderError("a profile needs at least two samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(m))):
            raise ProfileRangeError("profile contains non-finite values")
        if np.any(np.diff(x) <= 0.0):
            bad = int(np.argmax(np.diff(x) <= 0.0)) + 1
            raise ProfileOrderError(f"positions must be strictly increasing (sample {bad}: {x[bad]})")
        if np.any(m < -MAGNITUDE_SLACK) or np.any(m > 1.0 + MAGNITUDE_SLACK):
            bad = int(np.argmax((m < -MAGNITUDE_SLACK) | (m > 1.0 + MAGNITUDE_SLACK)))
            raise ProfileRangeError(f"magnitude {m[bad]} at x={x[bad]} outside [0, 1]")
        m = np.clip(m, 0.0, 1.0)
        x.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, 'positions', x)
        object.__setattr__(self, 'magnitudes', m)

    @property
    def x_min(self) -> float:
        return float(self.positions[0])

    @property
    def x_max(self) -> float:
        return float(self.positions[-1])

    def shifted(self, offset: float) -> 'SampledProfile':
        return SampledProfile(self.positions + offset, self.magnitudes)


# ---------------------------------------------------------------------------
# Profile model variants
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class AnalyticCavity:
    """Gaussian cavity mode, even about `center`, rendered on center +/- half_span."""
    width_sigma: float = 2.2
    center: float = 9.0
    half_span: float = 8.35
    samples_per_a: int = DEFAULT_SAMPLES_PER_A


@dataclass(frozen=True)
class AnalyticWaveguide:
    """|sin(pi x / period)| lobe train under a Gaussian envelope centred on the zone."""
    lobe_period: float = 2.0
    envelope_sigma: float = 5.0
    zone_start: float = 0.0
    zone_length: float = 18.0
    samples_per_a: int = DEFAULT_SAMPLES_PER_A


@dataclass(frozen=True)
class FromFile:
    path: str


ProfileModel = Union[AnalyticCavity, AnalyticWaveguide, FromFile]


@dataclass(frozen=True)
class CouplingTrace:
    times: np.ndarray = field(repr=False)
    g_values: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        g = np.asarray(self.g_values, dtype=float)
        if t.shape != g.shape or t.ndim != 1:
            raise ValueError("times and g_values must be equal-length vectors")
        if t.size > 1 and np.any(np.diff(t) <= 0.0):
            raise ValueError("trace times must be strictly increasing")
        if np.any(g < 0.0):
            raise ValueError("coupling values must be non-negative")
        t.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, 'times', t)
        object.__setattr__(self, 'g_values', g)

    def at(self, t: float) -> float:
        """Linear interpolation; zero outside the sampled window."""
        if self.times.size == 0 or t < self.times[0] or t > self.times[-1]:
            return 0.0
        return float(np.interp(t, self.times, self.g_values))


@dataclass(frozen=True)
class Timeline:
    """Protocol instants in seconds, all measured from atom B's cavity entry."""
    t1: float
    t2: float
    t3: float
    t4: float

    @property
    def detection_time(self) -> float:
        return self.t1 + self.t2

    @property
    def readout_entry_time(self) -> float:
        return self.t1 + self.t2 + self.t3
