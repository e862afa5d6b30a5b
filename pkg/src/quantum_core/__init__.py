"""
Quantum core package: state types and the operations every engine shares.
"""
from .models import BlochAngles, JointState, QubitState
from .states import bloch_to_qubit, fidelity, project_joint, qubit_to_bloch, tensor_qubit

__all__ = [
    'BlochAngles', 'JointState', 'QubitState',
    'bloch_to_qubit', 'fidelity', 'project_joint', 'qubit_to_bloch', 'tensor_qubit',
]
