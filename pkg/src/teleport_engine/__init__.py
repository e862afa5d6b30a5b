"""
Teleport engine package: conditional teleportation through a photonic-crystal cavity.
"""
from .dynamics import evolve_stage1, evolve_stage2, evolve_stage2_ode, jc_propagator
from .engine import build_timeline, calibrate_couplings, run_teleport, teleport_fidelities
from .models import AmplitudeSeries, Calibration, TeleportConfig, TeleportOutcome
