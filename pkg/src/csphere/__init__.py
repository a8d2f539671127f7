"""Real forms of holomorphic Hamiltonian systems on the complex 2-sphere."""

__version__ = "0.1.0"

from .algebra import Biquaternion, pauli_basis, trace_pairing
from .orbit import (CotangentPoint, OrbitPoint, bundle_map, coords_to_matrix,
                    kinetic_calibration, kks_bracket, matrix_to_coords, phi,
                    reduce_to_cotangent, reduce_to_sphere, structure_constant)
from .phase import (PhasePoint, biquat_to_phase, gl1_action, momentum_P, mu123,
                    mu_trace, omega, phase_to_biquat, su2_action)
from .dynamics import (FlowControls, ProductPoint, SingularityError, Trajectory,
                       flow, hamiltonian_H, hamiltonian_J, compensated_J,
                       product_bracket, hamiltonian_vector_field)

__all__ = [
    "Biquaternion", "pauli_basis", "trace_pairing",
    "CotangentPoint", "OrbitPoint", "bundle_map", "coords_to_matrix",
    "kinetic_calibration", "kks_bracket", "matrix_to_coords", "phi",
    "reduce_to_cotangent", "reduce_to_sphere", "structure_constant",
    "PhasePoint", "biquat_to_phase", "gl1_action", "momentum_P", "mu123",
    "mu_trace", "omega", "phase_to_biquat", "su2_action",
    "FlowControls", "ProductPoint", "SingularityError", "Trajectory",
    "flow", "hamiltonian_H", "hamiltonian_J", "compensated_J",
    "product_bracket", "hamiltonian_vector_field",
]
