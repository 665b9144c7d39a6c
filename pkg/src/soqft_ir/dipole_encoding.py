"""Applying the (non-unitary) dipole operator to a wavefunction.

``apply_dipole_exact`` multiplies by ``mu(Q)`` on the grid.  The
probabilistic path block-encodes ``mu~ = mu/beta`` with one ancilla: after
the ancilla circuit the |0> branch holds ``sin(theta_1) psi``.  With
``theta_1 = -mu~`` (first-order phase) this is ``-mu~ psi + O(mu~^3)``; with
``theta_1 = -arcsin(mu~)`` (exact phase) it is ``-mu~ psi`` exactly.  The
overall sign is a global phase and drops out of every overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits.blocks import build_dipole_circuit
from .circuits.decompose import decompose_multicontrolled
from .circuits.gates import Layout, embed_system, execute, split_ancillas
from .forcefield import ForceField
from .grid import GridSpec, Wavefunction
from .hamiltonian import dipole_on_grid

TAYLOR_THRESHOLD = 0.25


@dataclass(frozen=True)
class DipoleApplication:
    axis: str
    truncation_order: int
    beta: float
    success_probability: float
    failure_probability: float
    overlap_with_exact: float
    norm_mu_sq: float  # beta^2 * success probability
    theta: str = "taylor"
    backend: str = "grid"

    def as_dict(self):
        return dict(self.__dict__)


def apply_dipole_exact(psi: Wavefunction, ff: ForceField, g: GridSpec, axis: str, order: int = 3):
    """Return ``(mu psi / |mu psi|, |mu psi|^2)``."""
    if psi.space != "position":
        raise ValueError("dipole acts on position-space states")
    mu = dipole_on_grid(ff, g, axis, order).values
    chi = mu * psi.amplitudes
    nsq = float(np.vdot(chi, chi).real)
    if nsq == 0.0:
        raise ValueError(f"dipole on axis {axis!r} vanishes for this state")
    return Wavefunction(g, chi / math.sqrt(nsq), "position", True), nsq


def choose_beta(ff: ForceField, g: GridSpec, axis: str, order: int = 3, margin: float = 20.0) -> float:
    """``beta = margin * max|mu|`` over the grid, so ``max|mu/beta| = 1/margin``."""
    if margin < 1:
        raise ValueError("margin must be at least 1 so that |mu/beta| <= 1")
    peak = float(np.abs(dipole_on_grid(ff, g, axis, order).values).max())
    if peak == 0.0:
        raise ValueError(f"dipole on axis {axis!r} is identically zero")
    return margin * peak


def ancilla_branches(mu_tilde, psi, theta="taylor"):
    """Grid emulation of the ancilla circuit: (|0> branch, |1> branch)."""
    if theta == "taylor":
        t1 = -mu_tilde
    elif theta == "exact":
        t1 = -np.arcsin(mu_tilde)
    else:
        raise ValueError(f"theta mode must be 'taylor' or 'exact', got {theta!r}")
    return np.sin(t1) * psi, np.cos(t1) * psi


def apply_dipole_probabilistic(
    psi: Wavefunction,
    ff: ForceField,
    g: GridSpec,
    axis: str,
    order: int = 3,
    beta: float | None = None,
    theta: str = "taylor",
    backend: str = "grid",
    threshold: float = TAYLOR_THRESHOLD,
):
    """Post-selected ancilla-|0> branch (normalized) and a :class:`DipoleApplication`.

    ``backend="circuit"`` builds the gate sequence, reduces it to one- and
    two-qubit gates and executes it on the joint statevector; ``"grid"``
    evaluates the same branch amplitudes directly.  The exact-phase mode has
    no polynomial circuit and is grid-only.
    """
    if beta is None:
        beta = choose_beta(ff, g, axis, order)
    mu = dipole_on_grid(ff, g, axis, order).values
    mu_t = mu / beta
    peak = float(np.abs(mu_t).max())
    limit = 1.0 if theta == "exact" else threshold
    if peak > limit:
        raise ValueError(f"max|mu/beta| = {peak:.3g} exceeds {limit}; increase beta")
    if backend == "grid":
        b0, b1 = ancilla_branches(mu_t, psi.amplitudes, theta)
    elif backend == "circuit":
        if theta != "taylor":
            raise ValueError("the circuit backend implements the first-order phase only")
        layout = Layout.from_grid(g, ancillas=("dipole",))
        circ = decompose_multicontrolled(build_dipole_circuit(ff, g, axis, order, beta, layout, threshold))
        out = split_ancillas(layout, execute(circ, embed_system(layout, psi.flat())))
        b0, b1 = out[:, 0].reshape(g.shape), out[:, 1].reshape(g.shape)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    p0 = float(np.vdot(b0, b0).real)
    p1 = float(np.vdot(b1, b1).real)
    if abs(p0 + p1 - psi.norm_sq()) > 1e-10:
        raise RuntimeError(f"ancilla circuit lost norm: {p0 + p1:.15g}")
    if p0 == 0.0:
        raise ValueError("post-selection probability is zero")
    branch = Wavefunction(g, b0 / math.sqrt(p0), "position", True)
    exact, _ = apply_dipole_exact(psi, ff, g, axis, order)
    ov = min(1.0, abs(np.vdot(exact.amplitudes, branch.amplitudes)))
    rec = DipoleApplication(axis, order, float(beta), p0, p1, float(ov), beta * beta * p0, theta, backend)
    return branch, rec
