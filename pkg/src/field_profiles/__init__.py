"""
Field profile package: load, render and calibrate normalized mode profiles.
"""
from .calibration import calibrate_g0, coupling_trace, pulse_area, tail_fraction, transit_time
from .data_loader import load_profile, save_profile
from .models import (
    AnalyticCavity, AnalyticWaveguide, CouplingTrace, FromFile, PhysicalParams,
    SampledProfile, Timeline,
)
from .profiles import eval_profile, merge_profiles, render_model, render_zone_train, running_integral, running_moment
