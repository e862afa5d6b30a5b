"""
CSV tables behind the figures and estimates.

Every file starts with '#' provenance lines followed by a header row; numbers
are written with 12 significant digits so identical runs give identical bytes.
"""
from pathlib import Path
from typing import Dict, Iterable, Mapping, Union

import numpy as np
import pandas as pd

from field_profiles.models import SampledProfile
from quantum_core.errors import ConfigError, InsufficientDataError
from shot_sim.models import EstimationReport, ShotBatch
from teleport_engine.models import AmplitudeSeries

FLOAT_FORMAT = '%.12g'


def write_table(frame: pd.DataFrame, path: Union[str, Path], provenance: Mapping[str, str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for key, value in provenance.items():
            fh.write(f"# {key}: {value}\n")
        frame.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def series_frame(series: AmplitudeSeries) -> pd.DataFrame:
    """Long format: one row per (time, amplitude label)."""
    n_times, n_labels = series.values.shape
    values = series.values.ravel()
    return pd.DataFrame({
        't_us': np.repeat(series.trace.times * 1e6, n_labels),
        'g_rad_per_s': np.repeat(series.trace.g_values, n_labels),
        'amp_label': np.tile(np.array(series.labels, dtype=object), n_times),
        're': values.real,
        'im': values.imag,
        'abs2': np.abs(values) ** 2,
    })


def profile_frame(profile: SampledProfile) -> pd.DataFrame:
    return pd.DataFrame({'x_in_a': profile.positions, 'magnitude': profile.magnitudes})


def curve_frame(curve: Mapping[str, np.ndarray]) -> pd.DataFrame:
    columns = ['delta_rad_per_s', 'P1', 'c01_abs2', 'c11_abs2', 'cross_re', 'cross_im']
    return pd.DataFrame({c: curve[c] for c in columns})


def estimates_frame(report: EstimationReport) -> pd.DataFrame:
    return pd.DataFrame([
        {
            'delta_rad_per_s': e.delta,
            'n_total': e.n_total,
            'n_accepted': e.n_accepted,
            'P1_hat': e.p1_hat,
            'standard_error': e.standard_error,
        }
        for e in report.per_delta
    ])


def records_frame(batches: Iterable[ShotBatch]) -> pd.DataFrame:
    frames = []
    for batch in batches:
        frames.append(pd.DataFrame({
            'delta': np.full(batch.n_total, batch.delta),
            'accepted': batch.a_excited.astype(int),
            'b_excited': np.where(batch.a_excited, batch.b_excited.astype(int), -1),
            'shot_index': np.arange(batch.n_total),
        }))
    if not frames:
        return pd.DataFrame(columns=['delta', 'accepted', 'b_excited', 'shot_index'])
    return pd.concat(frames, ignore_index=True)


def read_measurements(path: Union[str, Path]) -> pd.DataFrame:
    """Measurement table with a detuning column and a P1 column.

    Accepted headers: delta / delta_rad_per_s and P1 / p1 / P1_hat.
    """
    try:
        frame = pd.read_csv(path, comment='#', skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise ConfigError(f"unreadable measurement file {path}: {exc}") from exc
    columns: Dict[str, str] = {}
    for col in frame.columns:
        key = str(col).strip().lower()
        if key in ('delta', 'delta_rad_per_s'):
            columns[col] = 'delta'
        elif key in ('p1', 'p1_hat'):
            columns[col] = 'p1'
    frame = frame.rename(columns=columns)
    missing = [c for c in ('delta', 'p1') if c not in frame.columns]
    if missing:
        raise ConfigError(f"measurement file {path} lacks column(s) {', '.join(missing)}")
    try:
        frame = frame[['delta', 'p1']].astype(float)
    except ValueError as exc:
        raise ConfigError(f"measurement file {path} has non-numeric entries: {exc}") from exc
    if len(frame) < 4:
        raise InsufficientDataError(f"measurement file {path} has {len(frame)} rows; 4 are needed")
    return frame
