"""State value types: single-qubit amplitudes, Bloch angles and joint
atom/cavity amplitude tensors.

Amplitudes are Python/numpy complex numbers. A `JointState` keeps one tensor
axis per subsystem, in the fixed order atom A, atom B, cavity Fock index.
"""
from dataclasses import dataclass, field
import math
from typing import Dict, Iterator, Tuple

import numpy as np

NORM_TOL = 1e-9
FOCK_DIM = 3  # n in {0, 1, 2}
AXIS_DIMS = {'A': 2, 'B': 2, 'n': FOCK_DIM}
AXIS_ORDER = ('A', 'B', 'n')


@dataclass(frozen=True)
class QubitState:
    c0: complex
    c1: complex

    def __post_init__(self):
        for name in ('c0', 'c1'):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"QubitState.{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def normalized(cls, c0: complex, c1: complex) -> 'QubitState':
        norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(c0 / norm, c1 / norm)

    @classmethod
    def ground(cls) -> 'QubitState':
        return cls(1.0, 0.0)

    @classmethod
    def excited(cls) -> 'QubitState':
        return cls(0.0, 1.0)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.c0) ** 2 + abs(self.c1) ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)

    def global_phase_canonical(self) -> 'QubitState':
        """Return the same ray with c0 real and non-negative.

        When c0 vanishes the phase of c1 is removed instead.
        """
        if abs(self.c0) > 1e-12:
            phase = self.c0 / abs(self.c0)
        elif abs(self.c1) > 0.0:
            phase = self.c1 / abs(self.c1)
        else:
            return self
        return QubitState(self.c0 / phase, self.c1 / phase)


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float
    degenerate_phase: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("Bloch angles must be finite")
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (-math.pi < self.phi <= math.pi):
            raise ValueError(f"phi must lie in (-pi, pi], got {self.phi}")
        if self.theta in (0.0, math.pi):
            object.__setattr__(self, 'phi', 0.0)
            object.__setattr__(self, 'degenerate_phase', True)


@dataclass(frozen=True)
class JointState:
    """Amplitude tensor over the labelled subsystems.

    `labels` is an ordered subset of ('A', 'B', 'n'); `amps` has one axis per
    label with dimension 2 for atoms and 3 for the cavity.
    """
    labels: Tuple[str, ...]
    amps: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self):
        labels = tuple(self.labels)
        if list(labels) != [l for l in AXIS_ORDER if l in labels]:
            raise ValueError(f"labels must follow the order {AXIS_ORDER}, got {labels}")
        amps = np.array(self.amps, dtype=complex)
        expected = tuple(AXIS_DIMS[l] for l in labels)
        if amps.shape != expected:
            raise ValueError(f"amplitude shape {amps.shape} does not match labels {labels} {expected}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("JointState amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'amps', amps)
        if self.normalized and abs(self.norm - 1.0) > NORM_TOL:
            raise ValueError(f"JointState marked normalized has norm {self.norm:.12g}")

    @classmethod
    def from_dict(cls, labels: Tuple[str, ...], amps: Dict[Tuple[int, ...], complex],
                  normalized: bool = True) -> 'JointState':
        shape = tuple(AXIS_DIMS[l] for l in labels)
        tensor = np.zeros(shape, dtype=complex)
        for index, value in amps.items():
            tensor[index] = value
        return cls(tuple(labels), tensor, normalized)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def renormalized(self) -> 'JointState':
        norm = self.norm
        if norm == 0.0:
            raise ValueError("cannot renormalize the zero state")
        return JointState(self.labels, self.amps / norm, True)

    def amplitude(self, **index: int) -> complex:
        key = tuple(index[l] for l in self.labels)
        return complex(self.amps[key])

    def items(self) -> Iterator[Tuple[Tuple[int, ...], complex]]:
        """Iterate (basis label, amplitude) in fixed (A, B, n) order."""
        for key in np.ndindex(*self.amps.shape):
            yield key, complex(self.amps[key])

    def sector(self, n: int) -> np.ndarray:
        """Atom amplitudes in the cavity Fock sector `n` (unnormalized)."""
        if 'n' not in self.labels:
            raise ValueError("state carries no cavity axis")
        return np.take(self.amps, n, axis=self.labels.index('n'))
