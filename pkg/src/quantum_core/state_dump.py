"""Plain-text dump of joint states.

One line per basis ket, zeros included, in fixed (A, B, n) order::

    # labels: A B n
    0 1 0 0.707106781187 0
    ...

Absent subsystems are simply left out of the columns; the header names them.
"""
from typing import List

import numpy as np

from .models import AXIS_DIMS, JointState

NUMBER_FORMAT = '%.12g'


def _fmt(value: float) -> str:
    text = NUMBER_FORMAT % value
    return '0' if text == '-0' else text


def format_state_dump(state: JointState) -> str:
    lines: List[str] = [f"# labels: {' '.join(state.labels)}"]
    for key, amp in state.items():
        indices = ' '.join(str(i) for i in key)
        lines.append(f"{indices} {_fmt(amp.real)} {_fmt(amp.imag)}")
    return '\n'.join(lines) + '\n'


def parse_state_dump(text: str, normalized: bool = True) -> JointState:
    labels = None
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            body = line.lstrip('#').strip()
            if body.startswith('labels:'):
                labels = tuple(body[len('labels:'):].split())
            continue
        rows.append(line.split())
    if labels is None:
        raise ValueError("state dump has no '# labels:' header")
    unknown = [l for l in labels if l not in AXIS_DIMS]
    if unknown:
        raise ValueError(f"state dump names unknown subsystem(s) {' '.join(unknown)}")
    shape = tuple(AXIS_DIMS[l] for l in labels)
    amps = np.zeros(shape, dtype=complex)
    for parts in rows:
        if len(parts) != len(labels) + 2:
            raise ValueError(f"malformed state dump row: {' '.join(parts)}")
        try:
            key = tuple(int(p) for p in parts[:len(labels)])
            value = complex(float(parts[-2]), float(parts[-1]))
        except ValueError:
            raise ValueError(f"malformed state dump row: {' '.join(parts)}") from None
        if any(not 0 <= k < d for k, d in zip(key, shape)):
            raise ValueError(f"state dump row out of range for {' '.join(labels)}: {' '.join(parts)}")
        amps[key] = value
    return JointState(labels, amps, normalized)
