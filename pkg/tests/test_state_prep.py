import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from soqft_ir.circuits import Circuit, Layout, execute
from soqft_ir.circuits.blocks import state_prep_count, state_prep_gates
from soqft_ir.forcefield import ForceField
from soqft_ir.grid import make_grid
from soqft_ir.oracle import diagonalize
from soqft_ir.state_prep import (
    ConvergenceError, harmonic_ground_state, harmonic_mode_amplitudes, imaginary_time_evolve, ucr_angles, ucr_state,
)


def test_harmonic_single_mode_shape():
    g = make_grid(4, 1)
    a = harmonic_ground_state(g).amplitudes.real
    assert np.argmax(a) == g.N // 2 and g.q[g.N // 2] == 0.0
    # mirror pairs Q <-> -Q are x <-> N - x; x = 0 has no partner
    assert np.allclose(a[1:], a[1:][::-1], rtol=0, atol=1e-15)
    assert np.all(a > 0)
    assert abs(np.sum(a**2) - 1) < 1e-12


def test_harmonic_matches_dense_ground_state():
    g = make_grid(4, 2)
    ff = ForceField(2, (1600.0, 2100.0), dipole={"x": {(0,): 0.1}})
    ov = abs(np.vdot(diagonalize(ff, g).ground_state().flat(), harmonic_ground_state(g).flat()))
    assert ov > 0.999999


def test_ite_harmonic_fixed_point():
    g = make_grid(4, 2)
    ff = ForceField(2, (1600.0, 2100.0), dipole={"x": {(0,): 0.1}})
    res = imaginary_time_evolve(ff, g)
    assert res.converged
    assert abs(res.energy - 1850.0) < 0.05
    assert abs(np.vdot(res.psi.flat(), harmonic_ground_state(g).flat())) > 0.999999


def test_ite_matches_oracle(ite, oracle):
    assert abs(ite.energy - oracle.e0) < 1e-4


def test_ite_energy_monotone(ite):
    h = ite.history
    # each refinement level restarts with a smaller step, which can only lower E further
    assert np.all(np.diff(h[1:]) <= 1e-10)


def test_ite_invariant_under_halving_dtau(ff, g16, ite):
    half = imaginary_time_evolve(ff, g16, dtau=0.05)
    assert abs(np.vdot(half.psi.flat(), ite.psi.flat())) > 1 - 1e-8


def test_ite_nonconvergence():
    g = make_grid(3, 1)
    ff = ForceField(1, (1600.0,), cubic={(0, 0, 0): 50.0}, quartic={(0, 0, 0, 0): 20.0}, dipole={"x": {(0,): 1.0}})
    with pytest.raises(ConvergenceError):
        imaginary_time_evolve(ff, g, max_iter=3)
    with pytest.raises(ValueError):
        imaginary_time_evolve(ff, g, dtau=0)


def test_ucr_examples():
    for a in ucr_angles(np.full(8, 1 / math.sqrt(8))):
        assert np.allclose(a, np.pi / 2)
    delta = np.zeros(8)
    delta[0] = 1
    for a in ucr_angles(delta):
        assert np.all(a == 0)
    with pytest.raises(ValueError):
        ucr_angles([0.5, -0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        ucr_angles([1, 0, 0])


_amps = st.integers(1, 5).flatmap(
    lambda n: arrays(float, 1 << n, elements=st.floats(0, 1)).filter(lambda v: v.sum() > 1e-3)
)


@given(_amps)
@settings(max_examples=60, deadline=None)
def test_ucr_reproduces_random_vectors(v):
    v = v / np.linalg.norm(v)
    assert np.max(np.abs(ucr_state(ucr_angles(v)) - v)) < 1e-12
    n = v.size.bit_length() - 1
    if n >= 1:
        lay = Layout(n, 1, ())
        c = Circuit.on(lay).extend(state_prep_gates(lay, 0, v))
        start = np.zeros(v.size)
        start[0] = 1
        assert np.max(np.abs(execute(c, start) - v)) < 1e-10


def test_harmonic_mode_circuit_depth_29():
    # counting rule: one Ry plus one CNOT per angle of each uniformly
    # controlled level, the unconditioned top level being a lone Ry:
    # 1 + sum_{l=1}^{n-1} 2 * 2^l = 2^(n+1) - 3
    g = make_grid(4, 1)
    lay = Layout(4, 1, ())
    amps = harmonic_mode_amplitudes(g)
    c = Circuit.on(lay).extend(state_prep_gates(lay, 0, amps))
    assert len(c) == c.count() == state_prep_count(4) == 29
    start = np.zeros(16)
    start[0] = 1
    assert np.max(np.abs(execute(c, start) - amps)) < 1e-10
