"""Gate-level construction, counting and execution of the algorithm's circuits."""

from .blocks import (
    build_dipole_circuit,
    build_kinetic_circuit,
    build_potential_circuit,
    build_state_prep,
    build_timestep_circuit,
    format_report,
    resource_report,
)
from .decompose import decompose_multicontrolled
from .gates import Circuit, Gate, Layout, embed_system, execute, split_ancillas, unitary
from .phase import build_phase_polynomial, closed_form_count, key_count, phase_on_grid
from .qft import build_qft, qft_count

__all__ = [
    "Circuit", "Gate", "Layout", "build_dipole_circuit", "build_kinetic_circuit",
    "build_phase_polynomial", "build_potential_circuit", "build_qft", "build_state_prep",
    "build_timestep_circuit", "closed_form_count", "decompose_multicontrolled", "embed_system",
    "execute", "format_report", "key_count", "phase_on_grid", "qft_count", "resource_report",
    "split_ancillas", "unitary",
]
