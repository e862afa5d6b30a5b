"""
Readout engine package: Ramsey-zone propagation and Bloch-angle tomography.
"""
from .circuit import ReadoutCircuit, build_readout_circuit, p1_curve
from .models import Measurement, RamseyZone, TomographyResult, TransferMatrix
from .propagator import (
    bloch_unknowns, compose_zones, design_row, excitation_probability, expanded_probability,
    propagate_zone, step_amplitudes,
)
from .tomography import angle_covariance, choose_detunings, tomography_invert
