from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from field_profiles.models import SampledProfile
from quantum_core.errors import ModelParameterError
from quantum_core.models import QubitState

UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class RamseyZone:
    """One waveguide zone of the readout circuit.

    Omega(x) = peak_rabi * profile(x); `delta` is omega_m - omega. `duration`
    is the transit time through the profile's support.
    """
    profile: SampledProfile
    omega_m: float
    delta: float
    peak_rabi: float
    duration: float

    def __post_init__(self):
        for name in ('omega_m', 'delta', 'peak_rabi', 'duration'):
            if not math.isfinite(getattr(self, name)):
                raise ModelParameterError(f"RamseyZone.{name} must be finite")
        if self.peak_rabi < 0.0:
            raise ModelParameterError(f"peak Rabi frequency must be non-negative, got {self.peak_rabi}")
        if self.duration <= 0.0:
            raise ModelParameterError(f"zone duration must be positive, got {self.duration}")

    @property
    def length(self) -> float:
        return self.profile.x_max - self.profile.x_min


@dataclass(frozen=True)
class TransferMatrix:
    """c'_j = sum_i c_i c_ij for an atom entering in |i> and leaving in |j>.

    Stored as `matrix[i, j] = c_ij`, so zones compose left to right in
    traversal order.
    """
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"transfer matrix must be 2x2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("transfer matrix must be finite")
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)
        error = self.unitarity_error()
        if error > UNITARY_TOL:
            raise ValueError(f"transfer matrix is not unitary (deviation {error:.3g})")

    @classmethod
    def identity(cls) -> 'TransferMatrix':
        return cls(np.eye(2, dtype=complex))

    @property
    def c00(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def c01(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def c10(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def c11(self) -> complex:
        return complex(self.matrix[1, 1])

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))

    def inverse(self) -> 'TransferMatrix':
        return TransferMatrix(self.matrix.conj().T)

    def apply(self, state: QubitState) -> QubitState:
        out = state.as_array() @ self.matrix
        return QubitState(out[0], out[1])


@dataclass(frozen=True)
class Measurement:
    delta: float
    p1: float
    transfer: TransferMatrix


@dataclass(frozen=True)
class TomographyResult:
    x1: float
    x2: float
    x3: float
    x4: float
    theta_hat: float
    phi_hat: float
    residual: float
    condition_number: float
    normalization_error: float
    degenerate_phase: bool = False
    covariance: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def unknowns(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])
