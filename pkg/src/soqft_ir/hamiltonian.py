"""Diagonal operators on the grid: potential, dipole, kinetic phases, energies.

In dimensionless normal coordinates the vibrational Hamiltonian is
``H/hc = sum_i (omega_i/2) p_i**2 + V(Q)``, so every quantity here is in
cm^-1 and no hbar or mass appears.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C_CM_PER_FS
from .forcefield import ForceField
from .grid import GridSpec, Wavefunction


@dataclass(frozen=True)
class DiagonalOperator:
    grid: GridSpec
    values: object  # ndarray of grid.shape, or tuple of per-mode arrays (momentum)
    space: str = "position"

    def __post_init__(self):
        arrays = self.values if isinstance(self.values, tuple) else (self.values,)
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise ValueError("diagonal operator has non-finite entries")

    def apply(self, psi: Wavefunction) -> Wavefunction:
        if psi.space != self.space or psi.grid != self.grid:
            raise ValueError("operator and state disagree on grid or space")
        if isinstance(self.values, tuple):
            out = psi.amplitudes.copy()
            for m, v in enumerate(self.values):
                s = [1] * self.grid.d
                s[m] = -1
                out = out * v.reshape(s)
        else:
            out = psi.amplitudes * self.values
        return Wavefunction(self.grid, out, self.space)


def polynomial_on_grid(terms, g: GridSpec) -> np.ndarray:
    """Evaluate ``sum_key c_key * prod_{i in key} Q_i`` on every grid point.

    Terms are summed in canonical key order, so the result does not depend
    on the order the coefficients were supplied in.
    """
    mesh = g.mesh()
    out = np.zeros(g.shape)
    for key, c in sorted(terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        if c == 0.0:
            continue
        term = np.full((1,) * g.d, float(c))
        for i in key:
            term = term * mesh[i]
        out += term
    return out


def potential_on_grid(ff: ForceField, g: GridSpec) -> DiagonalOperator:
    _check(ff, g)
    return DiagonalOperator(g, polynomial_on_grid(ff.potential_terms(), g))


def dipole_on_grid(ff: ForceField, g: GridSpec, axis: str, order: int = 3) -> DiagonalOperator:
    _check(ff, g)
    return DiagonalOperator(g, polynomial_on_grid(ff.dipole_terms(axis, order), g))


def kinetic_diagonal(g: GridSpec, omega, order="centred"):
    """Per-mode kinetic energies ``(omega_i/2) p**2`` in cm^-1."""
    p = g.p if order == "centred" else g.p_fft
    return tuple(0.5 * w * p**2 for w in omega)


def kinetic_phase(g: GridSpec, omega, dt, half=False, order="centred"):
    """Per-mode ``exp(-i 2 pi c (omega/2) p^2 dt_eff)`` arrays, ``dt_eff = dt/2`` if half."""
    dt_eff = 0.5 * dt if half else dt
    return tuple(np.exp(-2j * np.pi * C_CM_PER_FS * dt_eff * k) for k in kinetic_diagonal(g, omega, order))


def kinetic_operator(g: GridSpec, omega, dt, half=False) -> DiagonalOperator:
    return DiagonalOperator(g, kinetic_phase(g, omega, dt, half), "momentum")


def kinetic_energy_array(g: GridSpec, omega, order="fft") -> np.ndarray:
    """Dense separable kinetic energy over the full momentum grid."""
    out = np.zeros(g.shape)
    for m, k in enumerate(kinetic_diagonal(g, omega, order)):
        s = [1] * g.d
        s[m] = -1
        out = out + k.reshape(s)
    return out


def expectation_energy(psi: Wavefunction, ff: ForceField, V=None) -> float:
    """``<psi|K+V|psi>`` in cm^-1 for a normalized position-space state."""
    if psi.space != "position":
        raise ValueError("expectation_energy needs a position-space state")
    nsq = psi.norm_sq()
    if abs(nsq - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized (norm^2 = {nsq:.12g})")
    g = psi.grid
    _check(ff, g)
    if V is None:
        V = potential_on_grid(ff, g).values
    prob = np.abs(psi.amplitudes) ** 2
    phi = np.fft.fftn(psi.amplitudes, norm="ortho")
    kin = float(np.sum(np.abs(phi) ** 2 * kinetic_energy_array(g, ff.omega)))
    return kin + float(np.sum(prob * V))


def _check(ff, g):
    if ff.n_modes != g.d:
        raise ValueError(f"force field has {ff.n_modes} modes but grid has {g.d}")
