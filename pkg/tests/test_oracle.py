import numpy as np
import pytest

from soqft_ir.constants import stick_intensity
from soqft_ir.forcefield import ForceField
from soqft_ir.grid import make_grid
from soqft_ir.hamiltonian import dipole_on_grid
from soqft_ir.oracle import dense_hamiltonian, diagonalize, evolve_exact, stick_spectrum, transition_amplitudes
from soqft_ir.propagator import SplitOperator


def test_tiny_harmonic():
    # four points, spacing matched to the oscillator width (L = sqrt(2 pi N))
    g = make_grid(2, 1, 5.0)
    ff = ForceField(1, (1600.0,), dipole={"x": {(0,): 0.1}})
    H = dense_hamiltonian(ff, g)
    assert H.shape == (4, 4)
    e = diagonalize(ff, g).energies
    assert e[0] == pytest.approx(800.0, rel=0.02)
    assert e[1] == pytest.approx(2400.0, rel=0.1)


def test_fine_harmonic_ladder():
    g = make_grid(6, 1, 14.0)
    ff = ForceField(1, (1600.0,), dipole={"x": {(0,): 0.1}})
    e = diagonalize(ff, g).energies[:5]
    assert np.allclose(e, 800.0 + 1600.0 * np.arange(5), atol=1e-6)


def test_hermitian_and_orthonormal(ff, g16, oracle):
    H = dense_hamiltonian(ff, g16)
    assert np.max(np.abs(H - H.conj().T)) < 1e-12
    V = oracle.vectors
    assert np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))) < 1e-10
    assert np.all(np.diff(oracle.energies) >= 0)


def test_ground_energy_matches_ite(oracle, ite):
    assert abs(oracle.e0 - ite.energy) < 1e-4


def test_harmonic_selection_rule():
    g = make_grid(5, 2)
    ff = ForceField(2, (1600.0, 2300.0), dipole={"x": {(0,): 0.3}})
    eig = diagonalize(ff, g)
    dE, f = stick_spectrum(eig, ff, "x", 1)
    strong = f > 1e-8 * f.max()
    assert strong.sum() == 1
    assert dE[strong][0] == pytest.approx(1600.0, abs=1e-3)
    assert f[strong][0] == pytest.approx(0.3**2 / 2, rel=1e-6)


def test_mixing_lights_up_overtones(ff, oracle):
    lin = ForceField(ff.n_modes, ff.omega, ff.cubic, ff.quartic, {"z": {(1,): 0.1}})
    dE, f = stick_spectrum(oracle, lin, "z", 1)
    fund = f.max()
    over = f[(dE > 2500) & (dE < 8500)]
    assert over.max() > 1e-6 * fund


@pytest.mark.parametrize("axis", ["x", "z"])
def test_sum_rule(ff, g16, oracle, axis):
    amp = transition_amplitudes(oracle, ff, axis, 3)
    mu = dipole_on_grid(ff, g16, axis, 3).values.reshape(-1)
    psi0 = oracle.vectors[:, 0]
    assert np.sum(np.abs(amp) ** 2) == pytest.approx(np.sum(np.abs(mu * psi0) ** 2), abs=1e-10)


def test_stick_intensity_linear_in_strength():
    assert stick_intensity(1600.0, 2e-3) == pytest.approx(2 * stick_intensity(1600.0, 1e-3))
    assert stick_intensity(3200.0, 1e-3) == pytest.approx(2 * stick_intensity(1600.0, 1e-3))


def test_size_cap(ff):
    with pytest.raises(ValueError, match="cap"):
        dense_hamiltonian(ff, make_grid(5, 3))
    with pytest.raises(ValueError):
        dense_hamiltonian(ff, make_grid(3, 2))


def test_propagator_consistency(ff, g16, oracle, dipole_states):
    dt = 3950 / 60000
    chi = dipole_states["z"][0].amplitudes
    op = SplitOperator(ff, g16, dt)
    x = chi
    for _ in range(100):
        x = op.step(x)
    ref = evolve_exact(oracle, chi, 100 * dt)
    assert abs(np.vdot(ref, x)) ** 2 > 1 - 1e-6
