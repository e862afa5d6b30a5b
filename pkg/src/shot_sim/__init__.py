"""
Shot simulation package: sampled detector clicks and the estimates built on them.
"""
from .estimator import estimate, estimate_from_p1, standard_error
from .models import DeltaEstimate, EstimationReport, ShotBatch, ShotRecord, ShotSettings
from .simulator import all_records, simulate_shots
