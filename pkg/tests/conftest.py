import math
import sys
from pathlib import Path

import pytest

# Ensure `src` is on sys.path so tests can import project packages
ROOT = Path(__file__).resolve().parents[1]
SRC = str(ROOT / 'src')
if SRC not in sys.path:
    sys.path.insert(0, SRC)

from field_profiles.models import AnalyticCavity, AnalyticWaveguide, PhysicalParams  # noqa: E402
from field_profiles.profiles import render_model  # noqa: E402
from quantum_core.models import BlochAngles  # noqa: E402
from quantum_core.states import bloch_to_qubit  # noqa: E402
from readout_engine.circuit import build_readout_circuit  # noqa: E402
from readout_engine.tomography import choose_detunings  # noqa: E402
from teleport_engine.engine import calibrate_couplings  # noqa: E402
from teleport_engine.models import TeleportConfig  # noqa: E402

REFERENCE_THETA = math.pi / 4
REFERENCE_PHI = -math.pi / 6


@pytest.fixture(scope='session')
def reference_params():
    return PhysicalParams()


@pytest.fixture(scope='session')
def cavity_profile():
    return render_model(AnalyticCavity())


@pytest.fixture(scope='session')
def teleport_config(reference_params, cavity_profile):
    return TeleportConfig(reference_params, cavity_profile)


@pytest.fixture(scope='session')
def calibration(teleport_config):
    return calibrate_couplings(teleport_config)


@pytest.fixture(scope='session')
def reference_input():
    return bloch_to_qubit(BlochAngles(REFERENCE_THETA, REFERENCE_PHI))


@pytest.fixture(scope='session')
def readout_circuit(reference_params, calibration):
    return build_readout_circuit(reference_params, AnalyticWaveguide(),
                                 entry_time=calibration.timeline.readout_entry_time)


@pytest.fixture(scope='session')
def detunings(readout_circuit):
    return choose_detunings(readout_circuit)


@pytest.fixture(scope='session')
def detuning_transfers(readout_circuit, detunings):
    return readout_circuit.transfers(detunings)
