"""Linear inversion of excitation probabilities to Bloch angles.

Each detuning gives one row of A x = P1 with x = (x1, x2, x3, x4) and the row
taken from that detuning's transfer matrix. Four rows are solved exactly;
more are fitted by (optionally weighted) least squares. Then

    theta = 2 atan2(sqrt x2, sqrt x1),   phi = atan2(x4, x3)

which follows from c0 c1* = cos(theta/2) sin(theta/2) exp(-i phi) = x3 - i x4.
"""
from itertools import combinations
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from quantum_core.errors import (
    DegenerateDetuningsError, InconsistentMeasurementsError, NoWellConditionedSetError,
)
from .models import Measurement, TomographyResult
from .propagator import design_row

logger = logging.getLogger(__name__)

DEFAULT_MAX_CONDITION = 1e6
DEFAULT_TOL = 1e-6
DEFAULT_GRID_POINTS = 25
SEARCH_SPAN_IN_MEAN_RABI = 4.0
PHASE_DEGENERATE = 1e-24


def design_matrix(measurements: Sequence[Measurement]) -> np.ndarray:
    return np.vstack([design_row(m.transfer) for m in measurements])


def angles_from_unknowns(x: np.ndarray) -> Tuple[float, float, bool]:
    """(theta, phi, degenerate_phase) from (x1, x2, x3, x4)."""
    x1, x2, x3, x4 = (float(v) for v in x)
    theta = 2.0 * math.atan2(math.sqrt(max(x2, 0.0)), math.sqrt(max(x1, 0.0)))
    if x3 * x3 + x4 * x4 < PHASE_DEGENERATE:
        return theta, 0.0, True
    phi = math.atan2(x4, x3)
    if phi <= -math.pi:
        phi = math.pi
    return theta, phi, False


def angle_covariance(x: np.ndarray, cov_x: np.ndarray) -> np.ndarray:
    """Propagate the covariance of (x1..x4) linearly to (theta, phi)."""
    x1, x2, x3, x4 = (float(v) for v in x)
    x1, x2 = max(x1, 1e-15), max(x2, 1e-15)
    r1, r2 = math.sqrt(x1), math.sqrt(x2)
    total = x1 + x2
    rho2 = max(x3 * x3 + x4 * x4, 1e-30)
    jac = np.array([
        [-r2 / (r1 * total), r1 / (r2 * total), 0.0, 0.0],
        [0.0, 0.0, -x4 / rho2, x3 / rho2],
    ])
    return jac @ np.asarray(cov_x, dtype=float) @ jac.T


def tomography_invert(measurements: Sequence[Measurement], max_condition: float = DEFAULT_MAX_CONDITION,
                      tol: float = DEFAULT_TOL, weights: Optional[Sequence[float]] = None) -> TomographyResult:
    deltas = [m.delta for m in measurements]
    if len(set(deltas)) < 4:
        raise DegenerateDetuningsError(
            f"need at least 4 distinct detunings, got {len(set(deltas))} of {len(deltas)} measurements"
        )
    a = design_matrix(measurements)
    p = np.array([m.p1 for m in measurements], dtype=float)
    condition = float(np.linalg.cond(a))
    if not math.isfinite(condition) or condition > max_condition:
        raise DegenerateDetuningsError(
            f"detunings give an ill-conditioned system (condition number {condition:.3g} > {max_condition:.3g})"
        )
    covariance = None
    if len(measurements) == 4 and weights is None:
        x = np.linalg.solve(a, p)
    else:
        w = np.ones(len(measurements)) if weights is None else np.asarray(weights, dtype=float)
        sw = np.sqrt(w)
        x = np.linalg.lstsq(a * sw[:, None], p * sw, rcond=None)[0]
        if weights is not None:
            covariance = np.linalg.inv(a.T @ (a * w[:, None]))
    residual = float(np.linalg.norm(a @ x - p))
    x1, x2, x3, x4 = (float(v) for v in x)
    for name, value in (('x1', x1), ('x2', x2)):
        if value < -tol or value > 1.0 + tol:
            raise InconsistentMeasurementsError(f"{name} = {value:.9g} is not a probability")
    if x3 * x3 + x4 * x4 > x1 * x2 + tol:
        logger.warning("coherences exceed populations: x3^2+x4^2 = %.6g > x1*x2 = %.6g",
                       x3 * x3 + x4 * x4, x1 * x2)
    theta, phi, degenerate = angles_from_unknowns(x)
    logger.info("tomography: theta=%.9g phi=%.9g (cond %.4g, residual %.3g)", theta, phi, condition, residual)
    return TomographyResult(
        x1=x1, x2=x2, x3=x3, x4=x4,
        theta_hat=theta, phi_hat=phi,
        residual=residual,
        condition_number=condition,
        normalization_error=abs(x1 + x2 - 1.0),
        degenerate_phase=degenerate,
        covariance=covariance,
    )


def choose_detunings(circuit, count: int = 4, search_range: Optional[Tuple[float, float]] = None,
                     grid_points: int = DEFAULT_GRID_POINTS,
                     max_condition: float = DEFAULT_MAX_CONDITION) -> Tuple[float, ...]:
    """Exhaustive grid search for the `count` detunings with the best-conditioned system.

    The default range is +/- 4 times the zone's mean Rabi frequency. Ties keep
    the first set in grid order.
    """
    if search_range is None:
        span = SEARCH_SPAN_IN_MEAN_RABI * circuit.mean_rabi
        search_range = (-span, span)
    lo, hi = float(search_range[0]), float(search_range[1])
    if not hi > lo:
        raise NoWellConditionedSetError(f"detuning search range [{lo}, {hi}] is empty")
    if count < 4:
        raise NoWellConditionedSetError(f"at least 4 detunings are needed, asked for {count}")
    grid = np.linspace(lo, hi, max(grid_points, count))
    rows = np.vstack([design_row(circuit.transfer(float(d))) for d in grid])
    sets = np.array(list(combinations(range(grid.size), count)))
    mats = rows[sets]
    if count == 4:
        conds = np.linalg.cond(mats)
    else:
        conds = np.array([np.linalg.cond(m) for m in mats])
    conds = np.where(np.isfinite(conds), conds, np.inf)
    best = int(np.argmin(conds))
    if not conds[best] <= max_condition:
        raise NoWellConditionedSetError(
            f"no {count}-detuning set in [{lo:.6g}, {hi:.6g}] has condition number below {max_condition:.3g}"
        )
    chosen = tuple(float(grid[i]) for i in sets[best])
    logger.info("chose detunings %s (condition number %.4g)", ", ".join(f"{d:.6g}" for d in chosen), conds[best])
    return chosen
