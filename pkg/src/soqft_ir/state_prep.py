"""Initial states: harmonic product Gaussian, imaginary-time relaxation, and
the rotation angles that load a real non-negative amplitude vector."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_CM_PER_FS
from .forcefield import ForceField
from .grid import GridSpec, Wavefunction
from .hamiltonian import expectation_energy, kinetic_energy_array, potential_on_grid


class ConvergenceError(RuntimeError):
    pass


def harmonic_mode_amplitudes(g: GridSpec) -> np.ndarray:
    """Normalized ``exp(-Q^2/2)`` on one mode."""
    a = np.exp(-0.5 * g.q**2)
    return a / np.linalg.norm(a)


def harmonic_ground_state(g: GridSpec) -> Wavefunction:
    a1 = harmonic_mode_amplitudes(g)
    psi = a1
    for _ in range(g.d - 1):
        psi = np.multiply.outer(psi, a1)
    psi = psi / np.linalg.norm(psi)
    return Wavefunction(g, psi.astype(complex), "position", True)


@dataclass
class ITEResult:
    psi: Wavefunction
    energy: float
    iterations: int
    converged: bool
    dtau: float
    history: np.ndarray

    def as_dict(self):
        return {"E0": self.energy, "iterations": self.iterations, "converged": self.converged, "dtau": self.dtau}


def imaginary_time_evolve(
    ff: ForceField,
    g: GridSpec,
    dtau: float = 0.1,
    tol: float = 1e-8,
    max_iter: int = 1_000_000,
    psi0: Wavefunction | None = None,
    refine: int = 4,
) -> ITEResult:
    """Relax towards the ground state with ``exp(-K/2) exp(-V) exp(-K/2)`` steps.

    Iterates until successive energies differ by less than ``tol`` (cm^-1).
    ``refine`` extra passes each halve ``dtau`` and restart from the previous
    result, shrinking the O(dtau^2) splitting bias of the fixed point.
    """
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    if psi0 is None:
        psi0 = harmonic_ground_state(g)
    V = potential_on_grid(ff, g).values
    K = kinetic_energy_array(g, ff.omega, order="fft")
    psi = psi0.amplitudes.copy()
    history = []
    total = 0
    for level in range(refine + 1):
        s = 2.0 * math.pi * C_CM_PER_FS * dtau
        v_op = np.exp(-s * (V - V.min()))
        k_half = np.exp(-0.5 * s * K)
        e_prev = e_low = math.inf
        converged = False
        for it in range(1, max_iter + 1):
            phi = np.fft.fftn(psi, norm="ortho") * k_half
            psi = np.fft.ifftn(phi, norm="ortho") * v_op
            phi = np.fft.fftn(psi, norm="ortho") * k_half
            # energy is available from the momentum-space half
            nrm = math.sqrt(float(np.vdot(phi, phi).real))
            phi /= nrm
            psi = np.fft.ifftn(phi, norm="ortho")
            e = float(np.sum(np.abs(phi) ** 2 * K) + np.sum(np.abs(psi) ** 2 * V))
            history.append(e)
            total += 1
            # a fixed point of the split step may sit marginally above a good
            # starting guess; only sustained growth counts as divergence
            e_low = min(e_low, e)
            if e > e_low + max(1.0, 1e-4 * abs(e_low)):
                raise ConvergenceError(f"imaginary-time energy is diverging (iteration {total}, {e:.6g} cm^-1)")
            if abs(e - e_prev) < tol:
                converged = True
                break
            e_prev = e
        if not converged:
            raise ConvergenceError(f"no convergence after {max_iter} iterations at dtau={dtau}")
        if level < refine:
            dtau *= 0.5
    out = Wavefunction(g, psi / np.linalg.norm(psi), "position", True)
    return ITEResult(out, expectation_energy(out, ff, V), total, True, dtau, np.array(history))


def ucr_angles(amplitudes) -> list:
    """Ry angles for the uniformly controlled rotation cascade.

    Returns a list with one array per qubit level, most significant first;
    level ``l`` holds ``2**l`` angles indexed by the values of the ``l``
    already-prepared higher qubits.  A rotation ``Ry(a)`` sends ``|0>`` to
    ``cos(a/2)|0> + sin(a/2)|1>``.
    """
    a = np.asarray(amplitudes, dtype=float)
    N = a.size
    n = N.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError("amplitude count must be a power of two >= 2")
    if np.any(a < 0):
        raise ValueError("only non-negative real amplitudes are supported")
    norms = [a**2]
    for _ in range(n):
        norms.append(norms[-1].reshape(-1, 2).sum(axis=1))
    angles = []
    for level in range(n):
        child = np.sqrt(norms[n - level - 1]).reshape(-1, 2)
        angles.append(2.0 * np.arctan2(child[:, 1], child[:, 0]))
    return angles


def ucr_state(angles) -> np.ndarray:
    """Amplitudes produced by the cascade, computed directly (no circuit)."""
    amp = np.ones(1)
    for level in angles:
        c, s = np.cos(level / 2), np.sin(level / 2)
        amp = np.stack([amp * c, amp * s], axis=1).reshape(-1)
    return amp
