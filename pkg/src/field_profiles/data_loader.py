"""Text loader for externally computed field profiles.

Profile files hold two whitespace-separated columns::

    # x_in_a  magnitude
    0.0   0.0
    1.0   1.0

Lines starting with '#' are comments. Each kind of defect raises its own
error so callers can tell a broken file from a badly sampled one.
"""
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from quantum_core.errors import ProfileParseError
from .models import SampledProfile

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _parse_rows(path: Path) -> List[tuple]:
    rows = []
    with open(path, encoding='utf-8') as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            parts = line.replace(',', ' ').split()
            if len(parts) != 2:
                raise ProfileParseError(f"{path}:{lineno}: expected 2 columns, found {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ProfileParseError(f"{path}:{lineno}: {exc}") from exc
    return rows


def load_profile(path: PathLike) -> SampledProfile:
    path = Path(path)
    if not path.exists():
        raise ProfileParseError(f"profile file not found: {path}")
    rows = _parse_rows(path)
    if len(rows) < 2:
        raise ProfileParseError(f"{path}: need at least two samples, found {len(rows)}")
    data = np.array(rows, dtype=float)
    profile = SampledProfile(data[:, 0], data[:, 1])
    logger.info("loaded profile %s (%d samples, x in [%g, %g])",
                path, data.shape[0], profile.x_min, profile.x_max)
    return profile


def save_profile(profile: SampledProfile, path: PathLike, comment: Optional[str] = None) -> Path:
    """Write `profile` so that `load_profile` returns identical arrays."""
    path = Path(path)
    with open(path, 'w', encoding='utf-8') as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write("# x_in_a magnitude\n")
        for x, m in zip(profile.positions, profile.magnitudes):
            fh.write(f"{float(x)!r} {float(m)!r}\n")
    return path
