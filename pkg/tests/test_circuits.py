import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from soqft_ir.circuits import (
    Circuit, Gate, Layout, build_dipole_circuit, build_kinetic_circuit, build_phase_polynomial,
    build_potential_circuit, build_qft, build_timestep_circuit, closed_form_count,
    decompose_multicontrolled, embed_system, execute, resource_report, split_ancillas, unitary,
)
from soqft_ir.circuits.blocks import table_one
from soqft_ir.circuits.decompose import ccu1_gates, cccu1_gates
from soqft_ir.circuits.phase import CASES, EXAMPLE_KEYS, phase_gates, phase_on_grid
from soqft_ir.circuits.qft import lsb_flip_gates, qft_gates
from soqft_ir.constants import C_CM_PER_FS
from soqft_ir.forcefield import ForceField
from soqft_ir.grid import Wavefunction, make_grid, to_momentum, to_position
from soqft_ir.hamiltonian import kinetic_phase, potential_on_grid
from soqft_ir.propagator import SplitOperator

DEC = ("dec0", "dec1")


def random_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def small_field():
    return ForceField(
        2, (1000.0, 1500.0), {(0, 0, 1): -50.0, (0, 1, 1): 30.0}, {(0, 0, 0, 0): 10.0, (0, 0, 1, 1): -4.0},
        {"x": {(0,): 0.1, (0, 1): 0.02}},
    )


def run_system(c, lay, v):
    out = split_ancillas(lay, execute(c, embed_system(lay, v)))
    return out[:, 0], out[:, 1:]


# --- phase polynomials -------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(
    part=st.sampled_from(sorted(CASES)),
    n=st.sampled_from([2, 3]),
    b=st.floats(-3.0, 3.0, allow_nan=False),
    seed=st.integers(0, 2**31 - 1),
)
def test_phase_polynomial_matches_diagonal(part, n, b, seed):
    key = EXAMPLE_KEYS[part]
    d = max(max(key, default=0) + 1, 1)
    lay = Layout(n, d, DEC)
    v = random_vector(np.random.default_rng(seed), 1 << (n * d))
    c = decompose_multicontrolled(build_phase_polynomial(key, b, None, lay))
    sys, anc = run_system(c, lay, v)
    target = phase_on_grid(key, b, (1 << n,) * d).reshape(-1) * v
    assert np.max(np.abs(sys - target)) < 1e-12
    assert np.max(np.abs(anc)) < 1e-12


@pytest.mark.parametrize("key", [(1, 0), (2, 0, 1), (1, 1, 0), (2, 2, 0, 2), (0, 2, 1, 0)])
def test_coinciding_indices_in_any_order(key, rng):
    lay = Layout(2, 3, DEC)
    v = random_vector(rng, 64)
    b = rng.uniform(-2, 2)
    sys, _ = run_system(decompose_multicontrolled(build_phase_polynomial(key, b, None, lay)), lay, v)
    assert np.max(np.abs(sys - phase_on_grid(key, b, (4, 4, 4)).reshape(-1) * v)) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("part", sorted(CASES))
def test_counting_matches_closed_form(part, n):
    lay = Layout(n, 4, DEC)
    built = build_phase_polynomial(EXAMPLE_KEYS[part], 0.3, None, lay)
    dec = decompose_multicontrolled(built)
    assert dec.max_width() <= 2
    assert len(dec) == closed_form_count(part, n)
    assert built.count() == closed_form_count(part, n)


@pytest.mark.parametrize("label,n,expected", [
    ("U0", 4, 4), ("i", 4, 4), ("i=j", 4, 16), ("i!=j", 4, 16),
    ("i=j=k", 4, 160), ("i!=j!=k!=l", 4, 5376), ("i=j=k=l", 4, 1312),
])
def test_table_examples(label, n, expected):
    assert closed_form_count(label, n) == expected
    assert table_one(n)[label] == {"closed_form": expected, "measured": expected}


def test_diagonal_square_costs_n_squared_like_distinct_pair():
    # one register or two, the pair term expands into n^2 gate applications
    assert table_one(4)["i=j"]["measured"] == table_one(4)["i!=j"]["measured"] == 16


def test_phase_errors():
    lay = Layout(2, 4, DEC)
    with pytest.raises(ValueError):
        build_phase_polynomial((0, 1, 2, 3, 0), 0.1, None, lay)
    with pytest.raises(KeyError):
        closed_form_count("i=j=k=l=m", 4)
    with pytest.raises(ValueError):
        closed_form_count("i", 1)


def test_zero_angle_is_identity(rng):
    lay = Layout(3, 3, DEC)
    v = random_vector(rng, 512)
    for part in sorted(CASES):
        key = EXAMPLE_KEYS[part]
        if max(key, default=0) > 2:
            continue
        sys, _ = run_system(decompose_multicontrolled(build_phase_polynomial(key, 0.0, None, lay)), lay, v)
        assert np.max(np.abs(sys - v)) < 1e-12


def test_empty_circuit_and_dimension_check(rng):
    c = Circuit(3)
    v = random_vector(rng, 8)
    assert np.array_equal(execute(c, v), v)
    with pytest.raises(ValueError):
        execute(c, np.ones(4))
    with pytest.raises(ValueError):
        c.append(Gate("H", (3,)))


# --- decompositions --------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.7, -2.3, math.pi])
def test_ccu1_five_gates(theta):
    c = Circuit(3)
    c.extend(ccu1_gates(0, 1, 2, theta))
    assert len(c) == 5 and all(len(g.qubits) == 2 for g in c.gates)
    want = np.ones(8, dtype=complex)
    want[7] = np.exp(1j * theta)
    assert np.max(np.abs(unitary(c) - np.diag(want))) < 1e-12


@pytest.mark.parametrize("theta", [0.4, -1.9])
def test_cccu1_twenty_one_gates_and_clean_ancillas(theta):
    c = Circuit(6)
    c.extend(cccu1_gates(0, 1, 2, 3, theta, 4, 5))
    assert len(c) == 21 and all(len(g.qubits) == 2 for g in c.gates)
    U = unitary(c)
    for x in range(16):
        col = U[:, x << 2].reshape(16, 4)
        assert np.max(np.abs(col[:, 1:])) < 1e-12
        expect = np.exp(1j * theta) if x == 15 else 1.0
        assert abs(col[x, 0] - expect) < 1e-12
        assert np.sum(np.abs(col[:, 0]) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_decompose_needs_ancillas_and_keeps_simple_circuits():
    c = Circuit(4, {"mode0": (0, 1, 2, 3)})
    c.append(Gate("CCCU1", (0, 1, 2, 3), 0.2))
    with pytest.raises(ValueError, match="ancillas"):
        decompose_multicontrolled(c)
    plain = Circuit(2)
    plain.extend([Gate("H", (0,)), Gate("CU1", (0, 1), 0.3)])
    assert decompose_multicontrolled(plain).gates == plain.gates


def test_ancilla_hygiene_exhaustive():
    lay = Layout(2, 2, DEC)
    c = decompose_multicontrolled(build_phase_polynomial((0, 0, 1, 1), 0.37, None, lay))
    want = phase_on_grid((0, 0, 1, 1), 0.37, (4, 4)).reshape(-1)
    for x in range(16):
        e = np.zeros(16)
        e[x] = 1.0
        sys, anc = run_system(c, lay, e)
        assert np.max(np.abs(anc)) < 1e-12
        assert abs(sys[x] - want[x]) < 1e-12


# --- QFT ---------------------------------------------------------------------------

def test_qft_counts():
    # n^2/2 + n per register: 12 at n = 4, so 36 over three registers
    lay = Layout(4, 3, ())
    assert build_qft(lay, 0).count() == 12
    assert build_qft(lay).count() == 36
    assert build_qft(lay, inverse=True).count() == 36


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qft_matrix_and_inverse(n):
    lay = Layout(n, 1, ())
    N = 1 << n
    j = np.arange(N)
    F = np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)
    U = unitary(build_qft(lay, 0))
    assert np.max(np.abs(U - F)) < 1e-12
    both = build_qft(lay, 0)
    both.add(build_qft(lay, 0, inverse=True))
    assert np.max(np.abs(unitary(both) - np.eye(N))) < 1e-12
    assert np.allclose(U[:, 0], np.full(N, 1 / math.sqrt(N)), atol=1e-12)


def _to_momentum_frame(lay):
    return lsb_flip_gates(lay) + [x for m in range(lay.d) for x in qft_gates(lay.register(m), True)]


def _from_momentum_frame(lay):
    return [x for m in range(lay.d) for x in qft_gates(lay.register(m), False)] + lsb_flip_gates(lay)


def test_kinetic_step_circuit_matches_fft(rng):
    g = make_grid(4, 1, 9.0)
    ff = ForceField(1, (1700.0,), dipole={"x": {(0,): 0.1}})
    lay = Layout.from_grid(g, DEC)
    dt = 0.8
    v = random_vector(rng, g.size)
    c = Circuit.on(lay)
    c.extend(_to_momentum_frame(lay))
    c.add(build_kinetic_circuit(ff, g, dt, lay))
    c.extend(_from_momentum_frame(lay))
    sys, anc = run_system(c, lay, v)
    phi = to_momentum(Wavefunction(g, v))
    ref = to_position(Wavefunction(g, phi.amplitudes * kinetic_phase(g, ff.omega, dt), "momentum"))
    assert np.max(np.abs(sys - ref.flat())) < 1e-10
    assert np.max(np.abs(anc)) < 1e-12


def test_timestep_circuit_matches_fft(rng):
    g = make_grid(3, 2, 8.0)
    ff = small_field()
    lay = Layout.from_grid(g, DEC)
    dt = 0.5
    v = random_vector(rng, g.size)
    step_c = decompose_multicontrolled(build_timestep_circuit(ff, g, dt, lay))
    c = Circuit.on(lay)
    c.extend(_to_momentum_frame(lay))
    for _ in range(3):
        c.add(step_c)
    c.extend(_from_momentum_frame(lay))
    sys, anc = run_system(c, lay, v)
    op = SplitOperator(ff, g, dt)
    ref = v.reshape(g.shape)
    for _ in range(3):
        ref = op.step(ref)
    assert np.max(np.abs(sys - ref.reshape(-1))) < 1e-10
    assert np.max(np.abs(anc)) < 1e-12


def test_grouped_potential_equals_term_by_term():
    g = make_grid(3, 2, 8.0)
    ff = small_field()
    lay = Layout.from_grid(g, DEC)
    dt = 0.3
    ones = np.ones(g.size)
    grouped, _ = run_system(build_potential_circuit(ff, g, dt, lay), lay, ones)
    prod = np.ones(g.shape, dtype=complex)
    Q = g.mesh()
    for key, coef in ff.potential_terms().items():
        mono = np.ones(g.shape)
        for m in key:
            mono = mono * Q[m]
        prod = prod * np.exp(-2j * np.pi * C_CM_PER_FS * dt * coef * mono)
    assert np.max(np.abs(grouped - prod.reshape(-1))) < 1e-11
    direct = np.exp(-2j * np.pi * C_CM_PER_FS * dt * potential_on_grid(ff, g).values)
    assert np.max(np.abs(grouped - direct.reshape(-1))) < 1e-11


# --- resource accounting ----------------------------------------------------------------

def test_resource_report_reproduces_reference_tables(ff):
    r = resource_report(ff, make_grid(4, 3), n_t=60000, axes=("x", "z"), order=3)
    assert r["dipole"]["x"]["one_sided"] == 1104
    assert r["dipole"]["z"]["one_sided"] == 1456
    assert r["U_V"]["total"] == 26800
    assert r["U_K"] == {"per_register": 24, "total": 72}
    assert r["QFT"] == {"per_register": 12, "total": 36}
    assert r["step"] == 27016
    assert r["evolution_total"] == 1_620_960_000
    assert r["qubits"]["total"] == 16
    assert r["state_prep"]["per_mode"] == 29
    m = r["measured"]
    assert m["step"] == 27016 and m["U_V"] == 26800 and m["U_K"] == 144 and m["QFT"] == 36
    assert m["state_prep_per_mode"] == 29
    assert m["dipole_x_one_sided"] == 1104 and m["dipole_z_one_sided"] == 1456


def test_linear_dipole_cost(ff):
    n = 4
    r = resource_report(ff, make_grid(n, 3), axes=("x",), order=1, measured=False)
    assert r["dipole"]["x"]["both_sides"] == 2 * n + 8


def test_one_mode_harmonic_report_is_structural():
    ff = ForceField(1, (1200.0,), dipole={"x": {(0,): 0.1}})
    r = resource_report(ff, make_grid(4, 1), axes=("x",), order=1)
    keys = [tuple(k) for ks in r["U_V"]["keys"].values() for k in ks]
    assert set(keys) <= {(), (0,), (0, 0)}
    assert (0, 0) in keys
    assert r["U_V"]["total"] == 4 + 4 + 16
    assert r["qubits"]["total"] == 4 + 4


def test_dipole_circuit_rejects_small_beta(ff):
    g = make_grid(2, 3)
    with pytest.raises(ValueError, match="beta"):
        build_dipole_circuit(ff, g, "x", 3, 1e-6)
