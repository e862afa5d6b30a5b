"""Pulse areas, coupling calibration and coupling traces.

An atom moving at speed v through a profile p picks up the pulse area

    G = g0 * (a / v) * integral p(x) dx

between its entry and exit positions (x in units of the lattice constant a).
The integral is a composite Simpson rule over the profile's own sample grid,
clipped to the requested window.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from quantum_core.errors import ModelParameterError, UncalibratableProfileError
from .models import CouplingTrace, SampledProfile
from .profiles import eval_profile

logger = logging.getLogger(__name__)

DEFAULT_LATTICE_A = 2.202e-3


def _window_grid(p: SampledProfile, x_start: float, x_end: float) -> np.ndarray:
    lo = max(x_start, p.x_min)
    hi = min(x_end, p.x_max)
    if hi <= lo:
        return np.empty(0)
    inner = p.positions[(p.positions > lo) & (p.positions < hi)]
    return np.concatenate(([lo], inner, [hi]))


def profile_integral(p: SampledProfile, x_start: Optional[float] = None,
                     x_end: Optional[float] = None) -> float:
    """Integral of the profile over [x_start, x_end] in units of a."""
    x_start = p.x_min if x_start is None else x_start
    x_end = p.x_max if x_end is None else x_end
    grid = _window_grid(p, x_start, x_end)
    if grid.size < 2:
        return 0.0
    return float(simpson(eval_profile(p, grid), x=grid))


def pulse_area(p: SampledProfile, v: float, g0: float, x_start: Optional[float] = None,
               x_end: Optional[float] = None, lattice_a: float = DEFAULT_LATTICE_A) -> float:
    if v <= 0.0:
        raise ModelParameterError(f"velocity must be positive, got {v}")
    if x_start is not None and x_end is not None and x_start >= x_end:
        raise ModelParameterError(f"empty window [{x_start}, {x_end}]")
    return max(0.0, g0 * lattice_a / v * profile_integral(p, x_start, x_end))


def calibrate_g0(p: SampledProfile, v: float, target_area: float, x_start: Optional[float] = None,
                 x_end: Optional[float] = None, lattice_a: float = DEFAULT_LATTICE_A) -> float:
    """Coupling scale that makes `pulse_area` over the window equal `target_area`."""
    if not (math.isfinite(target_area) and target_area > 0.0):
        raise ModelParameterError(f"target pulse area must be positive, got {target_area}")
    unit_area = pulse_area(p, v, 1.0, x_start, x_end, lattice_a)
    if unit_area <= 0.0:
        raise UncalibratableProfileError(
            f"profile has zero integral over [{x_start}, {x_end}]; cannot reach area {target_area}"
        )
    g0 = target_area / unit_area
    logger.debug("calibrated coupling %.9g rad/s for area %.9g at v=%g m/s", g0, target_area, v)
    return g0


def tail_fraction(p: SampledProfile, x: float) -> float:
    """Share of the profile's total area lying beyond position `x`."""
    total = profile_integral(p)
    if total <= 0.0:
        raise UncalibratableProfileError("profile has zero integral")
    if x >= p.x_max:
        return 0.0
    return profile_integral(p, max(x, p.x_min), p.x_max) / total


def transit_time(distance_a: float, v: float, lattice_a: float = DEFAULT_LATTICE_A) -> float:
    return distance_a * lattice_a / v


def coupling_trace(p: SampledProfile, v: float, g0: float, x_start: float, x_end: float,
                   dt: Optional[float] = None, lattice_a: float = DEFAULT_LATTICE_A,
                   t_offset: float = 0.0) -> CouplingTrace:
    """g(t) = g0 * p(x_start + v t / a) for an atom crossing [x_start, x_end].

    Without `dt` the trace is sampled on the profile knots inside the window,
    so linear interpolation in time reproduces the profile exactly.
    """
    if x_end <= x_start:
        raise ModelParameterError(f"empty window [{x_start}, {x_end}]")
    if dt is None:
        inner = p.positions[(p.positions > x_start) & (p.positions < x_end)]
        x = np.concatenate(([x_start], inner, [x_end]))
    else:
        if dt <= 0.0:
            raise ModelParameterError(f"trace resolution must be positive, got {dt}")
        duration = transit_time(x_end - x_start, v, lattice_a)
        steps = max(1, int(math.ceil(duration / dt - 1e-9)))
        x = np.linspace(x_start, x_end, steps + 1)
    times = t_offset + (x - x_start) * lattice_a / v
    return CouplingTrace(times, g0 * eval_profile(p, x))
