import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from soqft_ir.forcefield import (
    ForceField, ForceFieldError, bundled, parse_forcefield, serialize_forcefield, validate,
)
from soqft_ir.grid import make_grid
from soqft_ir.hamiltonian import potential_on_grid

MINIMAL = "modes 1\nomega 0 1600.0\nmu x 0 0.1\n"


def test_minimal_document():
    ff = parse_forcefield(MINIMAL)
    assert ff.n_modes == 1
    assert ff.omega == (1600.0,)
    assert ff.dipole["x"] == {(0,): 0.1}
    assert ff.dipole["y"] == {} and ff.dipole["z"] == {}


def test_duplicate_omega_rejected_with_line_number():
    with pytest.raises(ForceFieldError) as err:
        parse_forcefield(MINIMAL + "omega 0 1650.0\n")
    assert err.value.line == 4


@pytest.mark.parametrize("doc, needle", [
    ("modes 1\nomega 0 -5\nmu x 0 1\n", "positive"),
    ("modes 1\nomega 0 1600\ncubic 0 0 1 3\nmu x 0 1\n", "range"),
    ("modes 1\nomega 0 1600\nfrobnicate 1\n", "line 3"),
    ("modes 2\nomega 0 1600\nmu x 0 1\n", "omega"),
    ("modes 1\nomega 0 abc\n", "line 2"),
])
def test_parse_errors(doc, needle):
    with pytest.raises(ForceFieldError, match=needle):
        parse_forcefield(doc)


def test_permuted_keys_are_one_key():
    base = "modes 3\nomega 0 1000\nomega 1 1100\nomega 2 1200\nmu z 0 0.1\n"
    ff = parse_forcefield(base + "cubic 2 0 1 5.0\n")
    assert ff.cubic == {(0, 1, 2): 5.0}
    with pytest.raises(ForceFieldError, match="duplicate"):
        parse_forcefield(base + "cubic 2 0 1 5.0\ncubic 0 1 2 5.0\n")


def test_bundled_field():
    ff = bundled()
    assert ff.omega == (3830.0, 1650.0, 3940.0)
    assert ff.active_axes() == ["x", "z"]
    assert validate(ff, make_grid(4, 3, 10.0)) == []


def test_validate_negative_quartic():
    ff = ForceField(2, (1000.0, 1200.0), quartic={(1, 1, 1, 1): -10.0}, dipole={"x": {(0,): 0.1}})
    diags = validate(ff)
    assert [d.level for d in diags] == ["warning"]
    assert "potential unbounded below on grid edge" in diags[0].message


def test_validate_harmonic_clean_and_no_dipole_error():
    assert validate(ForceField(1, (1600.0,), dipole={"x": {(0,): 0.1}})) == []
    diags = validate(ForceField(1, (1600.0,)))
    assert diags and diags[0].level == "error"


def test_bundled_potential_floor_on_grid():
    # every grid point, corners included, stays at or above the minimum at Q = 0
    V = potential_on_grid(bundled(), make_grid(4, 3, 10.0)).values
    assert V.min() >= -1e-9


_idx = st.integers(0, 2)
_coef = st.floats(-500, 500, allow_nan=False, allow_infinity=False).filter(lambda v: v != 0)


@st.composite
def forcefields(draw):
    omega = draw(st.lists(st.floats(100, 5000), min_size=3, max_size=3))
    cubic = draw(st.dictionaries(st.tuples(_idx, _idx, _idx).map(lambda k: tuple(sorted(k))), _coef, max_size=6))
    quartic = draw(st.dictionaries(st.tuples(_idx, _idx, _idx, _idx).map(lambda k: tuple(sorted(k))), _coef, max_size=6))
    mu = {}
    for axis in draw(st.sets(st.sampled_from("xyz"), min_size=1)):
        keys = st.one_of(st.tuples(_idx), st.tuples(_idx, _idx), st.tuples(_idx, _idx, _idx)).map(lambda k: tuple(sorted(k)))
        mu[axis] = draw(st.dictionaries(keys, _coef, min_size=1, max_size=5))
    return ForceField(3, tuple(omega), cubic, quartic, mu, name="hyp")


@given(forcefields())
@settings(max_examples=60, deadline=None)
def test_round_trip(ff):
    again = parse_forcefield(serialize_forcefield(ff))
    assert again == ff
    assert serialize_forcefield(again) == serialize_forcefield(ff)


@given(forcefields(), st.randoms(use_true_random=False))
@settings(max_examples=25, deadline=None)
def test_potential_invariant_under_line_order(ff, rnd):
    lines = serialize_forcefield(ff).splitlines()
    head, body = lines[:2], lines[2:]
    rnd.shuffle(body)
    shuffled = parse_forcefield("\n".join(head + body))
    g = make_grid(2, 3, 6.0)
    assert np.array_equal(potential_on_grid(ff, g).values, potential_on_grid(shuffled, g).values)


def test_key_canonicalisation_over_all_permutations():
    for perm in itertools.permutations((0, 1, 2)):
        ff = ForceField(3, (1, 1, 1), cubic={perm: 2.0}, dipole={"x": {(0,): 1}})
        assert dict(ff.cubic) == {(0, 1, 2): 2.0}
