"""Hadamard-test readout of the autocorrelation.

For the real part the ancilla is prepared in |+>, controls the evolution,
and is measured after a Hadamard: ``P(0) = |ref + ev|^2 / 4`` and
``Re<ref|ev> = P(0) - P(1)``.  Inserting S after the first Hadamard gives
``P(0) = |ref + i ev|^2 / 4`` and ``Im<ref|ev> = P(1) - P(0)``.
"""

from __future__ import annotations

import numpy as np

from .grid import Wavefunction


def _ancilla_probabilities(ref, ev):
    """(P0, P1) for the real test and the S-variant."""
    p0_re = float(np.vdot(ref + ev, ref + ev).real) / 4.0
    p1_re = float(np.vdot(ref - ev, ref - ev).real) / 4.0
    p0_im = float(np.vdot(ref + 1j * ev, ref + 1j * ev).real) / 4.0
    p1_im = float(np.vdot(ref - 1j * ev, ref - 1j * ev).real) / 4.0
    return (p0_re, p1_re), (p0_im, p1_im)


def _check(ref: Wavefunction, ev: Wavefunction):
    if ref.grid != ev.grid or ref.space != ev.space:
        raise ValueError("reference and evolved states live on different grids")


def hadamard_exact(ref: Wavefunction, evolved: Wavefunction, norm_mu_sq: float = 1.0) -> complex:
    _check(ref, evolved)
    (p0r, p1r), (p0i, p1i) = _ancilla_probabilities(ref.amplitudes, evolved.amplitudes)
    return complex(p0r - p1r, p1i - p0i) * norm_mu_sq


def sample_overlaps(values, shots: int, seed: int, t_offset: int = 0):
    """Finite-shot estimates for normalized overlaps ``values[k]``.

    Each time index ``k`` draws from its own stream ``default_rng([seed, k])``
    so any subset of points reproduces bit-identically.  Returns
    ``(estimates, standard_errors)`` as complex arrays (real and imaginary
    parts estimated independently).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    p_re = np.clip(0.5 * (1.0 + values.real), 0.0, 1.0)
    p_im = np.clip(0.5 * (1.0 - values.imag), 0.0, 1.0)  # P(0) of the S-variant
    est = np.empty(values.shape, dtype=complex)
    for k in range(values.size):
        rng = np.random.default_rng([seed, t_offset + k])
        n0r, n0i = rng.binomial(shots, [p_re[k], p_im[k]])
        est[k] = complex(2.0 * n0r / shots - 1.0, 1.0 - 2.0 * n0i / shots)
    se = np.sqrt(np.clip(1.0 - est.real**2, 0, None) / shots) + 1j * np.sqrt(np.clip(1.0 - est.imag**2, 0, None) / shots)
    return est, se


def hadamard_sampled(ref: Wavefunction, evolved: Wavefunction, norm_mu_sq: float, shots: int, seed: int, t_index: int = 0):
    """``(estimate, standard error)`` of ``A = <ref|evolved> * norm_mu_sq`` from ``shots`` per test."""
    _check(ref, evolved)
    exact = hadamard_exact(ref, evolved, 1.0)
    est, se = sample_overlaps([exact], shots, seed, t_index)
    return complex(est[0]) * norm_mu_sq, complex(se[0]) * norm_mu_sq


def binomial_rms(values, shots: int) -> float:
    """Predicted RMS error per component of the shot estimate of unit-normalized overlaps."""
    v = np.asarray(values, dtype=complex)
    var = np.concatenate([(1.0 - v.real**2), (1.0 - v.imag**2)]) / shots
    return float(np.sqrt(var.mean()))


def sample_series(series, shots: int, seed: int):
    """Replace a series' values by finite-shot estimates (same time grid)."""
    from dataclasses import replace

    est, _ = sample_overlaps(series.normalized, shots, seed)
    return replace(series, values=est * series.norm_mu_sq, meta={**series.meta, "shots": shots, "seed": seed})
