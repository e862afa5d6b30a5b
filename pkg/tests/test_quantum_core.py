import math

import numpy as np
import pytest

from quantum_core.errors import ImpossibleOutcomeError
from quantum_core.models import BlochAngles, JointState, QubitState
from quantum_core.state_dump import format_state_dump, parse_state_dump
from quantum_core.states import bloch_to_qubit, fidelity, project_joint, qubit_to_bloch, tensor_qubit


def test_bloch_parametrization_of_worked_example():
    q = bloch_to_qubit(BlochAngles(math.pi / 4, -math.pi / 6))
    assert q.c0 == pytest.approx(math.cos(math.pi / 8))
    assert abs(q.c1) == pytest.approx(math.sin(math.pi / 8))
    assert math.atan2(q.c1.imag, q.c1.real) == pytest.approx(-math.pi / 6)


def test_qubit_to_bloch_ignores_global_phase():
    q = bloch_to_qubit(BlochAngles(1.1, 2.3))
    phase = complex(math.cos(0.7), math.sin(0.7))
    angles = qubit_to_bloch(QubitState(q.c0 * phase, q.c1 * phase))
    assert angles.theta == pytest.approx(1.1, abs=1e-12)
    assert angles.phi == pytest.approx(2.3, abs=1e-12)
    assert not angles.degenerate_phase


def test_poles_have_degenerate_phase():
    north = qubit_to_bloch(QubitState.ground())
    south = qubit_to_bloch(QubitState(0.0, 1j))
    assert (north.theta, north.phi, north.degenerate_phase) == (0.0, 0.0, True)
    assert (south.theta, south.phi, south.degenerate_phase) == (math.pi, 0.0, True)


def test_invalid_values_are_rejected():
    with pytest.raises(ValueError):
        QubitState(float('nan'), 0.0)
    with pytest.raises(ValueError):
        BlochAngles(4.0, 0.0)
    with pytest.raises(ValueError):
        JointState(('B', 'n'), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        JointState(('n', 'B'), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        JointState(('B', 'n'), np.ones((2, 3)))


def test_fidelity_of_orthogonal_and_identical_states():
    q = bloch_to_qubit(BlochAngles(0.4, 0.9))
    assert fidelity(q, q) == pytest.approx(1.0)
    assert fidelity(QubitState.ground(), QubitState.excited()) == 0.0


def test_project_joint_returns_probability_and_remainder():
    s = 1 / math.sqrt(2)
    state = JointState.from_dict(('A', 'B', 'n'), {(1, 0, 0): 0.5, (1, 1, 0): 0.5, (0, 0, 1): s})
    rest, p = project_joint(state, 'A', 1)
    assert p == pytest.approx(0.5)
    assert rest.labels == ('B', 'n')
    assert rest.amplitude(B=0, n=0) == pytest.approx(s)
    assert rest.norm == pytest.approx(1.0)


def test_project_joint_impossible_outcome():
    state = JointState.from_dict(('A', 'B', 'n'), {(0, 1, 0): 1.0})
    with pytest.raises(ImpossibleOutcomeError):
        project_joint(state, 'A', 1)


def test_tensor_qubit_places_atom_a_first():
    rest = JointState.from_dict(('B', 'n'), {(1, 0): 1.0})
    joint = tensor_qubit(QubitState.excited(), rest)
    assert joint.labels == ('A', 'B', 'n')
    assert joint.amplitude(A=1, B=1, n=0) == 1.0
    assert joint.amps.shape == (2, 2, 3)


def test_sector_extracts_fock_slice():
    state = JointState.from_dict(('B', 'n'), {(1, 0): 0.6, (0, 1): 0.8j})
    assert np.allclose(state.sector(0), [0.0, 0.6])
    assert np.allclose(state.sector(1), [0.8j, 0.0])


def test_state_dump_round_trip():
    state = JointState.from_dict(('B', 'n'), {(1, 0): 1 / math.sqrt(2), (0, 1): -1j / math.sqrt(2)})
    text = format_state_dump(state)
    assert text.splitlines()[0] == '# labels: B n'
    assert '0 1 0 -0.707106781187' in text
    back = parse_state_dump(text, normalized=False)
    assert np.allclose(back.amps, state.amps, atol=1e-12)


def test_state_dump_writes_plain_zero():
    state = JointState.from_dict(('B', 'n'), {(1, 0): complex(1.0, -0.0), (0, 0): complex(-0.0, 0.0)})
    text = format_state_dump(state)
    assert '-0' not in text
    assert '1 0 1 0' in text.splitlines()


def test_bloch_round_trip_over_random_angles():
    rng = np.random.default_rng(17)
    for _ in range(200):
        theta = rng.uniform(1e-3, math.pi - 1e-3)
        phi = rng.uniform(-math.pi + 1e-9, math.pi)
        angles = qubit_to_bloch(bloch_to_qubit(BlochAngles(theta, phi)))
        assert angles.theta == pytest.approx(theta, abs=1e-12)
        assert angles.phi == pytest.approx(phi, abs=1e-9)


def test_projection_outcomes_are_complete():
    rng = np.random.default_rng(23)
    for _ in range(50):
        raw = rng.normal(size=(2, 2, 3)) + 1j * rng.normal(size=(2, 2, 3))
        state = JointState(('A', 'B', 'n'), raw / np.linalg.norm(raw))
        for atom in ('A', 'B'):
            _, p0 = project_joint(state, atom, 0)
            _, p1 = project_joint(state, atom, 1)
            assert p0 + p1 == pytest.approx(1.0, abs=1e-9)


def test_fidelity_of_ground_and_equal_superposition():
    s = 1 / math.sqrt(2)
    assert fidelity(QubitState.ground(), QubitState(s, s)) == pytest.approx(0.5)


def test_state_dump_lists_every_ket_in_basis_order():
    state = JointState.from_dict(('A', 'B', 'n'), {(1, 0, 0): 1.0})
    rows = format_state_dump(state).splitlines()[1:]
    assert len(rows) == 2 * 2 * 3
    assert [tuple(int(p) for p in r.split()[:3]) for r in rows] == list(np.ndindex(2, 2, 3))
    assert rows[6] == '1 0 0 1 0'


def test_state_dump_rejects_bad_rows():
    with pytest.raises(ValueError, match='out of range'):
        parse_state_dump('# labels: B n\n0 3 1 0\n')
    with pytest.raises(ValueError, match='malformed'):
        parse_state_dump('# labels: B n\n0 x 1 0\n')
    with pytest.raises(ValueError, match='malformed'):
        parse_state_dump('# labels: B n\n0 1 1\n')
    with pytest.raises(ValueError):
        parse_state_dump('# labels: B m\n0 0 1 0\n')
    with pytest.raises(ValueError):
        parse_state_dump('0 0 1 0\n')
