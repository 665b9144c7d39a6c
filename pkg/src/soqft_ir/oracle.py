"""Exact grid Hamiltonian, its eigenpairs, and stick spectra.

The dense matrix uses the same diagonals as the propagator, so eigenvalue
differences are the exact line positions the split-operator spectrum must
converge to as ``dt -> 0`` and ``T -> inf``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .constants import C_CM_PER_FS
from .forcefield import ForceField
from .grid import GridSpec, Wavefunction
from .hamiltonian import dipole_on_grid, kinetic_diagonal, potential_on_grid

DEFAULT_CAP = 4096


@dataclass(frozen=True)
class Eigenpairs:
    grid: GridSpec
    energies: np.ndarray  # cm^-1, ascending
    vectors: np.ndarray  # columns, flat C-order grid index

    @property
    def e0(self):
        return float(self.energies[0])

    def ground_state(self) -> Wavefunction:
        v = self.vectors[:, 0]
        # fix the sign so the ground state is mostly positive
        v = v * np.sign(v.sum())
        return Wavefunction(self.grid, v, "position")


def _dft_matrix(N):
    k = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)


def mode_kinetic_matrix(g: GridSpec, omega_m: float) -> np.ndarray:
    """``F^dagger diag(omega/2 p^2) F`` for one mode; real symmetric."""
    F = _dft_matrix(g.N)
    (k,) = kinetic_diagonal(g, [omega_m], order="fft")
    T = (F.conj().T @ (k[:, None] * F)).real
    return 0.5 * (T + T.T)


def dense_hamiltonian(ff: ForceField, g: GridSpec, cap: int = DEFAULT_CAP) -> np.ndarray:
    if g.size > cap:
        raise ValueError(f"grid has {g.size} points, above the dense cap of {cap}")
    if ff.n_modes != g.d:
        raise ValueError("mode count mismatch between force field and grid")
    H = np.diag(potential_on_grid(ff, g).values.reshape(-1))
    for m, w in enumerate(ff.omega):
        T = mode_kinetic_matrix(g, w)
        before, after = g.N**m, g.N ** (g.d - m - 1)
        H += np.kron(np.kron(np.eye(before), T), np.eye(after))
    return H


def diagonalize(ff: ForceField, g: GridSpec, cap: int = DEFAULT_CAP) -> Eigenpairs:
    w, v = eigh(dense_hamiltonian(ff, g, cap))
    return Eigenpairs(g, w, v)


def transition_amplitudes(eig: Eigenpairs, ff: ForceField, axis: str, order: int = 3, ground=None):
    """``<k|mu|0>`` for every eigenvector k."""
    mu = dipole_on_grid(ff, eig.grid, axis, order).values.reshape(-1)
    psi0 = eig.vectors[:, 0] if ground is None else ground
    return eig.vectors.T @ (mu * psi0)


def stick_spectrum(eig: Eigenpairs, ff: ForceField, axis: str, order: int = 3, floor: float = 1e-12):
    """Return ``(dE, strength)`` arrays for transitions out of the ground state."""
    amp = transition_amplitudes(eig, ff, axis, order)
    strength = np.abs(amp) ** 2
    dE = eig.energies - eig.energies[0]
    keep = (strength > floor) & (np.arange(len(dE)) > 0)
    return dE[keep], strength[keep]


def exact_autocorrelation(eig: Eigenpairs, weights, times, e_ref=0.0):
    """``sum_k w_k exp(-i 2 pi c (E_k - e_ref) t)`` evaluated at ``times``.

    ``weights`` are ``|<k|chi>|^2`` for the (unnormalized) initial state chi.
    """
    times = np.asarray(times, dtype=float)
    out = np.zeros(times.shape, dtype=complex)
    sel = np.flatnonzero(np.asarray(weights) > 0)
    w = np.asarray(weights)[sel]
    e = eig.energies[sel] - e_ref
    chunk = 2048
    for s in range(0, len(times), chunk):
        t = times[s : s + chunk]
        out[s : s + chunk] = np.exp(-2j * np.pi * C_CM_PER_FS * np.outer(t, e)) @ w
    return out


def evolve_exact(eig: Eigenpairs, psi: np.ndarray, t: float) -> np.ndarray:
    c = eig.vectors.T.conj() @ psi.reshape(-1)
    c = c * np.exp(-2j * np.pi * C_CM_PER_FS * eig.energies * t)
    return (eig.vectors @ c).reshape(psi.shape)
