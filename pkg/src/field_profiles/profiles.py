"""Evaluate and render normalized field-magnitude profiles.

Profiles are dimensionless and peak at 1; the physical scale lives in the
coupling constant (g0 for the cavity, the peak Rabi frequency for the
waveguides). Outside the sampled window a profile evaluates to exactly zero,
which is how mode tails are truncated.
"""
import logging
import math
from typing import Iterable, List, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import minimize_scalar

from quantum_core.errors import ModelParameterError
from .data_loader import load_profile
from .models import AnalyticCavity, AnalyticWaveguide, FromFile, ProfileModel, SampledProfile

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def eval_profile(p: SampledProfile, x: ArrayLike) -> ArrayLike:
    """Linear interpolation inside [x_min, x_max], 0 outside."""
    values = np.interp(x, p.positions, p.magnitudes, left=0.0, right=0.0)
    if np.ndim(values) == 0:
        return float(values)
    return values


def running_integral(p: SampledProfile, x: ArrayLike) -> ArrayLike:
    """Exact integral of the linearly interpolated profile from x_min to x."""
    xs = np.clip(np.asarray(x, dtype=float), p.x_min, p.x_max)
    knots, values = p.positions, p.magnitudes
    cumulative = np.concatenate(([0.0], cumulative_trapezoid(values, knots)))
    k = np.clip(np.searchsorted(knots, xs, side='right') - 1, 0, knots.size - 2)
    h = knots[k + 1] - knots[k]
    u = xs - knots[k]
    out = cumulative[k] + values[k] * u + 0.5 * (values[k + 1] - values[k]) * u * u / h
    if np.ndim(out) == 0:
        return float(out)
    return out


def running_moment(p: SampledProfile, x: ArrayLike, origin: float = 0.0) -> ArrayLike:
    """Exact integral of (y - origin) * p(y) for the interpolated profile, from x_min to x."""
    xs = np.clip(np.asarray(x, dtype=float), p.x_min, p.x_max)
    knots, values = p.positions, p.magnitudes
    y = knots - origin
    h = np.diff(knots)
    slope = np.diff(values) / h

    def segment(k, u):
        return values[k] * y[k] * u + 0.5 * (values[k] + slope[k] * y[k]) * u * u + slope[k] * u ** 3 / 3.0

    full = segment(np.arange(h.size), h)
    cumulative = np.concatenate(([0.0], np.cumsum(full)))
    k = np.clip(np.searchsorted(knots, xs, side='right') - 1, 0, knots.size - 2)
    out = cumulative[k] + segment(k, xs - knots[k])
    if np.ndim(out) == 0:
        return float(out)
    return out


def _grid(start: float, length: float, samples_per_a: int) -> np.ndarray:
    count = int(math.ceil(round(length * samples_per_a, 9))) + 1
    return np.linspace(start, start + length, count)


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0.0):
            raise ModelParameterError(f"{name} must be positive, got {value}")


def _render_cavity(m: AnalyticCavity) -> SampledProfile:
    _require_positive(width_sigma=m.width_sigma, half_span=m.half_span)
    if not math.isfinite(m.center):
        raise ModelParameterError(f"center must be finite, got {m.center}")
    if m.samples_per_a < 2:
        raise ModelParameterError(f"samples_per_a must be >= 2, got {m.samples_per_a}")
    x = _grid(m.center - m.half_span, 2.0 * m.half_span, m.samples_per_a)
    return SampledProfile(x, np.exp(-0.5 * ((x - m.center) / m.width_sigma) ** 2))


def _waveguide_shape(m: AnalyticWaveguide, local: ArrayLike) -> ArrayLike:
    lobes = np.abs(np.sin(math.pi * local / m.lobe_period))
    return lobes * np.exp(-0.5 * ((local - 0.5 * m.zone_length) / m.envelope_sigma) ** 2)


def _waveguide_peak(m: AnalyticWaveguide) -> float:
    """Maximum of the unnormalized shape over the zone, independent of the rendering grid."""
    coarse = np.linspace(0.0, m.zone_length, int(math.ceil(64 * m.zone_length / m.lobe_period)) + 1)
    k = int(np.argmax(_waveguide_shape(m, coarse)))
    h = coarse[1] - coarse[0]
    lo, hi = max(0.0, coarse[k] - h), min(m.zone_length, coarse[k] + h)
    best = minimize_scalar(lambda s: -_waveguide_shape(m, s), bounds=(lo, hi), method='bounded',
                           options={'xatol': 1e-12 * max(1.0, m.zone_length)})
    return max(float(-best.fun), float(_waveguide_shape(m, coarse[k])))


def _render_waveguide(m: AnalyticWaveguide) -> SampledProfile:
    _require_positive(lobe_period=m.lobe_period, envelope_sigma=m.envelope_sigma,
                      zone_length=m.zone_length)
    if not math.isfinite(m.zone_start):
        raise ModelParameterError(f"zone_start must be finite, got {m.zone_start}")
    if m.samples_per_a < 2:
        raise ModelParameterError(f"samples_per_a must be >= 2, got {m.samples_per_a}")
    peak = _waveguide_peak(m)
    if peak <= 0.0:
        raise ModelParameterError("waveguide model renders to an all-zero profile")
    x = _grid(m.zone_start, m.zone_length, m.samples_per_a)
    return SampledProfile(x, _waveguide_shape(m, x - m.zone_start) / peak)


def render_model(m: ProfileModel) -> SampledProfile:
    if isinstance(m, AnalyticCavity):
        return _render_cavity(m)
    if isinstance(m, AnalyticWaveguide):
        return _render_waveguide(m)
    if isinstance(m, FromFile):
        return load_profile(m.path)
    raise ModelParameterError(f"unknown profile model {m!r}")


def render_zone_train(template: ProfileModel, count: int = 2) -> List[SampledProfile]:
    """Render `count` back-to-back waveguide zones starting at the template's start."""
    if count < 1:
        raise ModelParameterError(f"zone count must be >= 1, got {count}")
    if isinstance(template, AnalyticWaveguide):
        return [
            _render_waveguide(AnalyticWaveguide(
                lobe_period=template.lobe_period,
                envelope_sigma=template.envelope_sigma,
                zone_start=template.zone_start + k * template.zone_length,
                zone_length=template.zone_length,
                samples_per_a=template.samples_per_a,
            ))
            for k in range(count)
        ]
    base = render_model(template)
    span = base.x_max - base.x_min
    return [base.shifted(k * span) for k in range(count)]


def merge_profiles(profiles: Iterable[SampledProfile]) -> SampledProfile:
    """Pointwise maximum of several profiles on the union of their grids."""
    profiles = list(profiles)
    if not profiles:
        raise ModelParameterError("nothing to merge")
    grid = np.unique(np.concatenate([p.positions for p in profiles]))
    stacked = np.vstack([eval_profile(p, grid) for p in profiles])
    return SampledProfile(grid, stacked.max(axis=0))
