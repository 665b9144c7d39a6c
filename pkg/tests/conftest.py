"""Shared fixtures.  Expensive objects (dense eigenpairs, long propagations)
are session-scoped so the unit and acceptance modules reuse them."""

from __future__ import annotations

import numpy as np
import pytest

from soqft_ir.dipole_encoding import apply_dipole_exact
from soqft_ir.forcefield import bundled
from soqft_ir.grid import make_grid
from soqft_ir.oracle import diagonalize, exact_autocorrelation, stick_spectrum, transition_amplitudes
from soqft_ir.constants import stick_intensity
from soqft_ir.propagator import AutocorrelationSeries, PropagationConfig, propagate
from soqft_ir.spectrum import cross_section, damp
from soqft_ir.state_prep import imaginary_time_evolve

T_REF, NT_REF = 3950.0, 60000
AXES = ("x", "z")


@pytest.fixture(scope="session")
def ff():
    return bundled()


@pytest.fixture(scope="session")
def g16():
    return make_grid(4, 3, 10.0)


@pytest.fixture(scope="session")
def oracle(ff, g16):
    return diagonalize(ff, g16)


@pytest.fixture(scope="session")
def sticks(oracle, ff):
    """Oracle transitions of both axes as rows (dE, strength, km/mol, axis)."""
    rows = []
    for axis in AXES:
        dE, s = stick_spectrum(oracle, ff, axis, 3)
        rows += [(float(e), float(v), float(stick_intensity(e, v)), axis) for e, v in zip(dE, s)]
    return sorted(rows)


@pytest.fixture(scope="session")
def fundamentals(sticks):
    """Oracle positions of the three strongest lines below 4200 cm^-1 (nu2, nu1, nu3)."""
    low = sorted((r for r in sticks if r[0] < 4200.0), key=lambda r: -r[2])[:3]
    return sorted(r[0] for r in low)


@pytest.fixture(scope="session")
def ite(ff, g16):
    return imaginary_time_evolve(ff, g16)


@pytest.fixture(scope="session")
def dipole_states(ite, ff, g16):
    return {axis: apply_dipole_exact(ite.psi, ff, g16, axis, 3) for axis in AXES}


def run_series(states, ff, g, T, n_t, splitting="kinetic-half", E0=None):
    return propagate(states, PropagationConfig(T, n_t, splitting), ff, g, E0=E0)


def exact_series(eig, ff, T, n_t, axes=AXES, order=3, floor=1e-14):
    """Autocorrelations of mu|0> from the eigenpairs: no Trotter error, same time grid."""
    times = PropagationConfig(T, n_t).times()
    out = {}
    for axis in axes:
        w = np.abs(transition_amplitudes(eig, ff, axis, order)) ** 2
        w = np.where(w > floor * w.max(), w, 0.0)
        out[axis] = AutocorrelationSeries(times, exact_autocorrelation(eig, w, times), axis, float(w.sum()), eig.e0)
    return out


@pytest.fixture(scope="session")
def ref_series(dipole_states, ff, g16, ite):
    """Both axes at the reference (T, n_t) with kinetic-half splitting."""
    return run_series(dipole_states, ff, g16, T_REF, NT_REF, E0=ite.energy)


@pytest.fixture(scope="session")
def ref_spectrum(ref_series, ite):
    return cross_section([damp(s) for s in ref_series.values()], ite.energy)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance verdict lines --------------------------------------------------

_VERDICTS = []


@pytest.fixture
def verdict(request):
    """Call ``verdict(label, ok, detail)``; prints one PASS/FAIL line and keeps it for the summary."""
    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
        print(line)
        _VERDICTS.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
