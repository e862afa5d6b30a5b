"""Per-detuning P1 estimates and the weighted tomography fit built on them."""
from collections import OrderedDict
import logging
import math
from typing import Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from quantum_core.errors import InsufficientDataError
from readout_engine.models import Measurement, TomographyResult, TransferMatrix
from readout_engine.tomography import DEFAULT_MAX_CONDITION, angle_covariance, tomography_invert
from .models import DeltaEstimate, EstimationReport, ShotBatch, ShotRecord

logger = logging.getLogger(__name__)

DEFAULT_Z = 1.96


def standard_error(p_hat: float, n: int) -> float:
    """Binomial standard error, floored at the p = 1/2 variance over n for p_hat at 0 or 1."""
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.25 / n) / n)


def batches_from_records(records: Iterable[ShotRecord]) -> List[ShotBatch]:
    """Regroup records by detuning, keeping first-seen detuning order."""
    grouped: 'OrderedDict[float, list]' = OrderedDict()
    for r in records:
        grouped.setdefault(r.delta, []).append(r)
    batches = []
    for k, (delta, rows) in enumerate(grouped.items()):
        rows.sort(key=lambda r: r.seed_index)
        a = np.array([r.atom_a_excited for r in rows], dtype=bool)
        b = np.array([bool(r.atom_b_excited) for r in rows], dtype=bool)
        batches.append(ShotBatch(delta, k, a, b))
    return batches


def summarize(batch: ShotBatch) -> DeltaEstimate:
    if batch.n_accepted == 0:
        raise InsufficientDataError(f"no accepted shots at detuning {batch.delta:.9g} rad/s", batch.delta)
    p_hat = batch.n_b_excited / batch.n_accepted
    return DeltaEstimate(batch.delta, batch.n_total, batch.n_accepted, p_hat,
                         standard_error(p_hat, batch.n_accepted))


def _transfer_for(transfers: Union[Mapping[float, TransferMatrix], Sequence[TransferMatrix]],
                  k: int, delta: float) -> TransferMatrix:
    if isinstance(transfers, Mapping):
        return transfers[delta]
    return transfers[k]


def estimate(records: Iterable[Union[ShotBatch, ShotRecord]],
             transfers: Union[Mapping[float, TransferMatrix], Sequence[TransferMatrix]],
             z: float = DEFAULT_Z, max_condition: float = DEFAULT_MAX_CONDITION) -> EstimationReport:
    """Estimate P1 per detuning and invert with inverse-variance weights.

    `transfers` is either keyed by detuning or aligned with the batches.
    Confidence half-widths are z times the linearly propagated standard
    deviations of theta and phi.
    """
    items = list(records)
    if items and isinstance(items[0], ShotRecord):
        batches = batches_from_records(items)
    else:
        batches = items
    if len(batches) < 4:
        raise InsufficientDataError(f"need shots at 4 or more detunings, got {len(batches)}")
    per_delta = [summarize(b) for b in batches]
    measurements = [
        Measurement(e.delta, e.p1_hat, _transfer_for(transfers, k, e.delta))
        for k, e in enumerate(per_delta)
    ]
    weights = [1.0 / e.standard_error ** 2 for e in per_delta]
    tomo = tomography_invert(measurements, max_condition=max_condition, tol=_consistency_tol(per_delta),
                             weights=weights)
    cov = angle_covariance(tomo.unknowns, tomo.covariance)
    theta_ci = z * math.sqrt(max(cov[0, 0], 0.0))
    phi_ci = z * math.sqrt(max(cov[1, 1], 0.0))
    logger.info("shot estimate: theta=%.6g +/- %.3g, phi=%.6g +/- %.3g",
                tomo.theta_hat, theta_ci, tomo.phi_hat, phi_ci)
    return EstimationReport(per_delta, tomo, theta_ci, phi_ci, z)


def _consistency_tol(per_delta: Sequence[DeltaEstimate]) -> float:
    # sampling noise moves x1, x2 by a few standard errors
    return max(1e-6, 10.0 * max(e.standard_error for e in per_delta))


def estimate_from_p1(deltas: Sequence[float], p1_values: Sequence[float],
                     transfers: Sequence[TransferMatrix], max_condition: float = DEFAULT_MAX_CONDITION,
                     weights: Optional[Sequence[float]] = None) -> TomographyResult:
    """Tomography from given P1 values, bypassing the shot statistics."""
    measurements = [Measurement(float(d), float(p), t) for d, p, t in zip(deltas, p1_values, transfers)]
    return tomography_invert(measurements, max_condition=max_condition, weights=weights)
