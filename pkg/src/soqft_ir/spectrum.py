"""Cross sections from autocorrelation series, and band centroids/intensities.

``sigma(E) = prefactor(E) * Re sum_alpha int_0^T exp(i 2 pi c (E+E0) t) A_alpha(t) dt``

with ``E`` measured from the ground state.  The time integral uses the
trapezoid rule on the recorded samples and is evaluated for all energies at
once with a zero-padded FFT.  The unpadded (native) energy spacing is
``1/(c * dt_rec * n_rec)``; padding by ``pad`` inserts ``pad - 1`` points
between native samples without changing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .constants import C_CM_PER_FS, intensity_scale, sigma_prefactor


def damp(series):
    """Multiply by ``cos^2(pi t / 2T)``; returns a new series."""
    from dataclasses import replace

    T = series.T
    d = np.cos(0.5 * np.pi * series.times / T) ** 2
    d[-1] = 0.0  # cos(pi/2) is not exactly zero in floating point
    return replace(series, values=series.values * d, meta={**series.meta, "damped": True})


@dataclass
class Spectrum:
    energies: np.ndarray  # cm^-1 above the ground state, padded grid
    sigma: dict  # axis -> m^2
    pad: int
    resolution: float  # native spacing, cm^-1
    E0: float
    meta: dict = field(default_factory=dict)

    @property
    def total(self):
        out = np.zeros_like(self.energies)
        for s in self.sigma.values():
            out = out + s
        return out

    def native_mask(self):
        m = np.zeros(self.energies.size, dtype=bool)
        m[self.meta.get("native_offset", 0) :: self.pad] = True
        return m

    def scaled(self, factor):
        return Spectrum(self.energies, {a: s * factor for a, s in self.sigma.items()}, self.pad, self.resolution, self.E0, dict(self.meta))

    def write_csv(self, path):
        axes = sorted(self.sigma)
        cols = [self.energies] + [self.sigma[a] for a in axes] + [self.total]
        header = ",".join(["E_cm-1"] + [f"sigma_{a}" for a in axes] + ["sigma_total"])
        np.savetxt(path, np.column_stack(cols), delimiter=",", header=header, comments="", fmt="%.10g")


@dataclass(frozen=True)
class BandReport:
    window: tuple
    centroid: float
    ci95: float
    intensity: float  # km/mol
    n_points: int

    def as_dict(self):
        return {"window": list(self.window), "centroid": self.centroid, "ci95": self.ci95, "intensity_km_mol": self.intensity, "n_points": self.n_points}


def _half_range_transform(values, dt, P):
    w = values.copy()
    w[0] *= 0.5
    w[-1] *= 0.5
    # sum_k w_k exp(+i 2 pi j k / P) = P * ifft
    return np.fft.ifft(w, n=P) * P * dt


def cross_section(series, E0=None, pad: int = 4, e_min: float = 0.0, e_max: float | None = None) -> Spectrum:
    """Cross section summed over the given series (one per dipole axis).

    ``series`` is an AutocorrelationSeries or a list/dict of them sharing the
    same time grid.
    """
    if isinstance(series, dict):
        series = list(series.values())
    elif not isinstance(series, (list, tuple)):
        series = [series]
    if E0 is None:
        E0 = series[0].E0
    if E0 is None:
        raise ValueError("ground-state energy E0 is required")
    times = series[0].times
    for s in series[1:]:
        if s.times.shape != times.shape or not np.allclose(s.times, times, rtol=0, atol=1e-9):
            raise ValueError("series do not share a time grid")
    if pad < 1:
        raise ValueError("pad must be >= 1")
    dt = float(times[1] - times[0])
    n_rec = times.size
    P = pad * n_rec
    de = 1.0 / (C_CM_PER_FS * dt * P)
    j = np.arange(P)
    e_rel = j * de - E0
    hi = 0.5 / (C_CM_PER_FS * dt) - E0 if e_max is None else e_max
    sel = (e_rel >= e_min) & (e_rel <= hi) & (j <= P // 2)
    energies = e_rel[sel]
    first = int(np.flatnonzero(sel)[0]) if sel.any() else 0
    pref = sigma_prefactor(energies)
    sig = {}
    for s in series:
        F = _half_range_transform(s.values, dt, P)[sel]
        key = s.axis
        while key in sig:
            key = key + "'"
        sig[key] = pref * F.real
    meta = {"native_offset": (-first) % pad, "dt": dt, "n_rec": n_rec, "T": float(times[-1])}
    return Spectrum(energies, sig, pad, pad * de, float(E0), meta)


def _window_mask(spec: Spectrum, window):
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"bad window {window}")
    return (spec.energies >= lo) & (spec.energies <= hi)


def centroid(spec: Spectrum, window, axis=None):
    """Intensity-weighted mean wavenumber, its 95% CI, and the sample count.

    ``s^2 = sum sigma (nu - nu_c)^2 / sum sigma`` and
    ``ci95 = t_{0.975, n-1} * s / sqrt(n)`` over the padded samples in the
    window.  A window holding one sample returns that wavenumber with ci 0.
    """
    m = _window_mask(spec, window)
    nu = spec.energies[m]
    sig = (spec.total if axis is None else spec.sigma[axis])[m]
    n = int(nu.size)
    if n == 0:
        raise ValueError(f"window {window} contains no samples")
    if n == 1:
        return float(nu[0]), 0.0, 1
    wsum = sig.sum()
    if not wsum > 0:
        raise ValueError(f"window {window} carries no positive intensity")
    nz = np.flatnonzero(sig != 0)
    if nz.size == 1:
        return float(nu[nz[0]]), 0.0, 1
    nu_c = float(np.dot(nu, sig) / wsum)
    var = float(np.dot(sig, (nu - nu_c) ** 2) / wsum)
    s = math.sqrt(max(var, 0.0))
    ci = float(stats.t.ppf(0.975, n - 1) * s / math.sqrt(n))
    return nu_c, ci, n


def integrate_intensity(spec: Spectrum, window, axis=None) -> float:
    """``N_A * int sigma dE`` over the window on the native grid, in km/mol."""
    m = _window_mask(spec, window) & spec.native_mask()
    nu = spec.energies[m]
    if nu.size == 0:
        raise ValueError(f"window {window} contains no native samples")
    sig = (spec.total if axis is None else spec.sigma[axis])[m]
    if nu.size == 1:
        return float(sig[0] * spec.resolution * intensity_scale())
    return float(np.trapezoid(sig, nu) * intensity_scale())


def band_report(spec: Spectrum, window, axis=None) -> BandReport:
    c, ci, n = centroid(spec, window, axis)
    return BandReport((float(window[0]), float(window[1])), c, ci, integrate_intensity(spec, window, axis), n)


def auto_window(spec: Spectrum, threshold: float = 1e-3, axis=None, merge_gap: float | None = None, min_half_width: float | None = None):
    """Contiguous regions where sigma exceeds ``threshold * max(sigma)``.

    Each region is widened to at least ``min_half_width`` either side of its
    peak so the native-grid trapezoid sees the whole line (default
    ``2/(c T)``, main lobe plus first sidelobes).  Regions closer than
    ``merge_gap`` cm^-1 are then joined; the default gap is ``2/(c T)``.
    Both defaults are 0 when T is unknown.
    """
    sig = spec.total if axis is None else spec.sigma[axis]
    peak = sig.max()
    if not peak > 0:
        return []
    above = sig > threshold * peak
    edges = np.diff(above.astype(np.int8))
    starts = list(np.flatnonzero(edges == 1) + 1)
    stops = list(np.flatnonzero(edges == -1))
    if above[0]:
        starts.insert(0, 0)
    if above[-1]:
        stops.append(sig.size - 1)
    T = spec.meta.get("T")
    lobe = 2.0 / (C_CM_PER_FS * T) if T else 0.0
    merge_gap = lobe if merge_gap is None else merge_gap
    min_half_width = lobe if min_half_width is None else min_half_width
    e = spec.energies
    out = []
    for a, b in zip(starts, stops):
        lo = e[a - 1] if a > 0 else e[a]
        hi = e[b + 1] if b + 1 < e.size else e[b]
        top = e[a + int(np.argmax(sig[a : b + 1]))]
        lo = max(min(lo, top - min_half_width), e[0])
        hi = min(max(hi, top + min_half_width), e[-1])
        if lo < hi:
            out.append((float(lo), float(hi)))
    merged = []
    for w in out:
        if merged and w[0] - merged[-1][1] < merge_gap:
            merged[-1] = (merged[-1][0], max(w[1], merged[-1][1]))
        else:
            merged.append(w)
    return merged


def lobe_window(center, T, lobes: float = 2.0):
    """Window of ``lobes / (c T)`` cm^-1 either side of ``center``.

    The damped transform of a single line has its main lobe within
    ``1/(c T)`` of the line, so the default keeps main lobe and first sidelobes.
    """
    half = lobes / (C_CM_PER_FS * T)
    return (center - half, center + half)
