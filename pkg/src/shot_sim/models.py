from dataclasses import dataclass, field
import math
from typing import Iterator, List, Optional, Tuple

import numpy as np

from quantum_core.errors import ModelParameterError
from readout_engine.models import TomographyResult


@dataclass(frozen=True)
class ShotSettings:
    """Detector and loss knobs. Defaults are the ideal experiment."""
    detector_efficiency: float = 1.0
    emission_loss: float = 0.0  # per zone
    zone_count: int = 2

    def __post_init__(self):
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ModelParameterError(f"detector_efficiency must lie in (0, 1], got {self.detector_efficiency}")
        if not 0.0 <= self.emission_loss < 1.0:
            raise ModelParameterError(f"emission_loss must lie in [0, 1), got {self.emission_loss}")

    @property
    def emission_probability(self) -> float:
        """Probability that atom B emits in at least one zone."""
        return 1.0 - (1.0 - self.emission_loss) ** self.zone_count


@dataclass(frozen=True)
class ShotRecord:
    delta: float
    atom_a_excited: bool
    atom_b_excited: Optional[bool]
    seed_index: int


@dataclass(frozen=True)
class ShotBatch:
    """All shots at one detuning, stored column-wise.

    `b_excited` is meaningless where `a_excited` is False.
    """
    delta: float
    delta_index: int
    a_excited: np.ndarray = field(repr=False)
    b_excited: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.a_excited, dtype=bool)
        b = np.asarray(self.b_excited, dtype=bool)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("shot columns must be equal-length vectors")
        object.__setattr__(self, 'a_excited', a)
        object.__setattr__(self, 'b_excited', b)

    @property
    def n_total(self) -> int:
        return int(self.a_excited.size)

    @property
    def n_accepted(self) -> int:
        return int(np.count_nonzero(self.a_excited))

    @property
    def n_b_excited(self) -> int:
        return int(np.count_nonzero(self.a_excited & self.b_excited))

    def records(self) -> Iterator[ShotRecord]:
        for i, (a, b) in enumerate(zip(self.a_excited.tolist(), self.b_excited.tolist())):
            yield ShotRecord(self.delta, a, b if a else None, i)


@dataclass(frozen=True)
class DeltaEstimate:
    delta: float
    n_total: int
    n_accepted: int
    p1_hat: float
    standard_error: float


@dataclass(frozen=True)
class EstimationReport:
    per_delta: List[DeltaEstimate]
    tomography: TomographyResult
    theta_ci: float
    phi_ci: float
    z: float = 1.96

    @property
    def acceptance_fraction(self) -> float:
        total = sum(e.n_total for e in self.per_delta)
        return sum(e.n_accepted for e in self.per_delta) / total if total else math.nan

    def interval(self, which: str) -> Tuple[float, float]:
        centre = self.tomography.theta_hat if which == 'theta' else self.tomography.phi_hat
        half = self.theta_ci if which == 'theta' else self.phi_ci
        return centre - half, centre + half
