"""Second-order split-operator propagation and autocorrelation recording.

Two splittings are supported:

``kinetic-half``   U = K(dt/2) V(dt) K(dt/2)
``potential-half`` U = V(dt/2) K(dt) V(dt/2)

Propagation keeps the state in the frame where adjacent half-steps merge,
so each step costs one full V, one full K and two FFTs.  For kinetic-half,
with ``phi = F psi`` and ``xi = K(dt/2)^dagger phi``::

    xi_{k+1} = F V F^-1 K xi_k,     <psi_0|psi_k> = <xi_0|xi_k>

and the potential-half variant is the same construction in position space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .constants import C_CM_PER_FS
from .forcefield import ForceField
from .grid import GridSpec, Wavefunction
from .hamiltonian import kinetic_energy_array, potential_on_grid

SPLITTINGS = ("kinetic-half", "potential-half")


@dataclass(frozen=True)
class PropagationConfig:
    T: float
    n_t: int
    splitting: str = "kinetic-half"
    record_every: int = 1

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("total time T must be positive")
        if int(self.n_t) != self.n_t or self.n_t < 1:
            raise ValueError("n_t must be a positive integer")
        if self.splitting not in SPLITTINGS:
            raise ValueError(f"splitting must be one of {SPLITTINGS}")
        if self.record_every < 1 or self.n_t % self.record_every:
            raise ValueError("record_every must divide n_t")

    @property
    def dt(self):
        return self.T / self.n_t

    def times(self):
        k = np.arange(0, self.n_t + 1, self.record_every)
        return k * self.dt


@dataclass
class AutocorrelationSeries:
    times: np.ndarray
    values: np.ndarray  # A(t) scaled by norm_mu_sq
    axis: str
    norm_mu_sq: float
    E0: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values differ in length")
        if self.times.size and (self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")

    @property
    def normalized(self):
        return self.values / self.norm_mu_sq

    @property
    def T(self):
        return float(self.times[-1])

    def write_csv(self, path):
        data = np.column_stack([self.times, self.values.real, self.values.imag])
        np.savetxt(path, data, delimiter=",", header="t_fs,re,im", comments="", fmt="%.17g")

    @classmethod
    def read_csv(cls, path, axis="?", norm_mu_sq=None, E0=None):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        vals = data[:, 1] + 1j * data[:, 2]
        if norm_mu_sq is None:
            norm_mu_sq = float(vals[0].real)
        return cls(data[:, 0], vals, axis, norm_mu_sq, E0)


class SplitOperator:
    """Precomputed phase arrays for one (force field, grid, dt)."""

    def __init__(self, ff: ForceField, g: GridSpec, dt: float, V=None):
        if ff.n_modes != g.d:
            raise ValueError("force field and grid disagree on mode count")
        self.ff, self.grid, self.dt = ff, g, float(dt)
        self.V = potential_on_grid(ff, g).values if V is None else V
        self.K = kinetic_energy_array(g, ff.omega, order="fft")
        s = -2j * math.pi * C_CM_PER_FS * self.dt
        self.v_full = np.exp(s * self.V)
        self.v_half = np.exp(0.5 * s * self.V)
        self.k_full = np.exp(s * self.K)
        self.k_half = np.exp(0.5 * s * self.K)
        self.axes = tuple(range(-g.d, 0))

    def fft(self, a):
        return sfft.fftn(a, axes=self.axes, norm="ortho", overwrite_x=True)

    def ifft(self, a):
        return sfft.ifftn(a, axes=self.axes, norm="ortho", overwrite_x=True)

    def step(self, psi: np.ndarray, splitting="kinetic-half") -> np.ndarray:
        if splitting == "kinetic-half":
            phi = self.fft(np.array(psi, dtype=complex)) * self.k_half
            phi = self.fft(self.ifft(phi) * self.v_full) * self.k_half
            return self.ifft(phi)
        if splitting == "potential-half":
            return self.ifft(self.fft(psi * self.v_half) * self.k_full) * self.v_half
        raise ValueError(f"unknown splitting {splitting!r}")

    def autocorrelation(self, psi0: np.ndarray, n_t: int, splitting="kinetic-half", record_every=1):
        """Normalized ``<psi0|psi(k dt)>`` for a batch of states.

        ``psi0`` has shape ``batch + grid.shape``; returns ``(batch..., n_rec)``.
        """
        psi0 = np.asarray(psi0, dtype=complex)
        batch = psi0.shape[: psi0.ndim - self.grid.d]
        flat = psi0.reshape((-1,) + self.grid.shape)
        if splitting == "kinetic-half":
            x = self.fft(flat.copy()) * np.conj(self.k_half)
            a_op, b_op, to_a, to_b = self.k_full, self.v_full, self.ifft, self.fft
        elif splitting == "potential-half":
            x = flat * np.conj(self.v_half)
            a_op, b_op, to_a, to_b = self.v_full, self.k_full, self.fft, self.ifft
        else:
            raise ValueError(f"unknown splitting {splitting!r}")
        ref = np.conj(x.reshape(x.shape[0], -1))
        n_rec = n_t // record_every + 1
        out = np.empty((x.shape[0], n_rec), dtype=complex)
        out[:, 0] = np.einsum("bi,bi->b", ref, x.reshape(x.shape[0], -1))
        for r in range(1, n_rec):
            for _ in range(record_every):
                x = to_b(to_a(x * a_op) * b_op)
            out[:, r] = np.einsum("bi,bi->b", ref, x.reshape(x.shape[0], -1))
            if r % 1000 == 0 and not np.all(np.isfinite(out[:, r])):
                bad = int(np.flatnonzero(~np.isfinite(out[:, : r + 1]).all(axis=0))[0])
                raise FloatingPointError(f"non-finite amplitude at step {bad * record_every}")
        if not np.all(np.isfinite(out)):
            bad = int(np.flatnonzero(~np.isfinite(out).all(axis=0))[0])
            raise FloatingPointError(f"non-finite amplitude at step {bad * record_every}")
        return out.reshape(batch + (n_rec,))


def step(psi: Wavefunction, ff: ForceField, g: GridSpec, dt: float, splitting="kinetic-half") -> Wavefunction:
    """One symmetric split-operator step of a position-space state."""
    if psi.space != "position":
        raise ValueError("step expects a position-space state")
    op = SplitOperator(ff, g, dt)
    return Wavefunction(g, op.step(psi.amplitudes.copy(), splitting), "position")


def propagate(psi0_mu, config: PropagationConfig, ff: ForceField, g: GridSpec, norm_mu_sq=1.0, E0=None, axis="?", op=None):
    """Record ``A(t) = <psi0|psi(t)> * norm_mu_sq`` for one state or a dict of states.

    ``psi0_mu`` may be a normalized :class:`Wavefunction` or a mapping
    ``axis -> (Wavefunction, norm_mu_sq)``; the mapping form propagates all
    axes together in one batched array and returns a dict of series.
    """
    op = op or SplitOperator(ff, g, config.dt)
    times = config.times()
    echo = {"T": config.T, "n_t": config.n_t, "dt": config.dt, "splitting": config.splitting, "record_every": config.record_every}
    if isinstance(psi0_mu, Wavefunction):
        a = op.autocorrelation(psi0_mu.amplitudes, config.n_t, config.splitting, config.record_every)
        return AutocorrelationSeries(times, a * norm_mu_sq, axis, float(norm_mu_sq), E0, dict(echo))
    axes = list(psi0_mu)
    stack = np.stack([psi0_mu[ax][0].amplitudes for ax in axes])
    a = op.autocorrelation(stack, config.n_t, config.splitting, config.record_every)
    out = {}
    for i, ax in enumerate(axes):
        nsq = float(psi0_mu[ax][1])
        out[ax] = AutocorrelationSeries(times, a[i] * nsq, ax, nsq, E0, dict(echo))
    return out


def compare_splittings(states, config: PropagationConfig, ff: ForceField, g: GridSpec, E0, windows, **spec_kw):
    """Largest centroid difference (cm^-1) between the two splittings.

    ``states`` maps axis -> (normalized Wavefunction, norm_mu_sq); ``windows``
    lists the fundamental band windows to compare.
    """
    from .spectrum import centroid, cross_section, damp

    cents = []
    for splitting in SPLITTINGS:
        cfg = PropagationConfig(config.T, config.n_t, splitting, config.record_every)
        series = propagate(states, cfg, ff, g, E0=E0)
        spec = cross_section([damp(s) for s in series.values()], **spec_kw)
        cents.append([centroid(spec, w)[0] for w in windows])
    return float(np.max(np.abs(np.subtract(*cents))))
