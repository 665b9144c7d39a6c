"""Tensor-product coordinate grid and the wavefunction container.

Each mode is sampled on ``N = 2**n`` points ``Q(x) = -L/2 + x*dQ`` with
``dQ = L/N`` (half-open interval, periodic under the FFT).  Amplitude arrays
have shape ``(N,)*d`` and flatten in C order, so mode 0 is the slowest index
and its most significant bit is the most significant bit of the flat index.

Momentum-space amplitudes are stored in centred order: slot ``k`` holds
``p(k) = 2*pi*(k - N/2)/L``.  The transform is the unitary DFT, so the inner
product is the plain l2 sum in either space (no ``dQ`` weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    n: int
    d: int
    L: float = 10.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need at least 2 qubits per mode, got n={self.n}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"need at least one mode, got d={self.d}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"grid extent must be positive, got L={self.L}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def N(self):
        return 1 << self.n

    @property
    def dQ(self):
        return self.L / self.N

    @property
    def dP(self):
        return 2.0 * math.pi / self.L

    @property
    def shape(self):
        return (self.N,) * self.d

    @property
    def size(self):
        return self.N**self.d

    @property
    def q(self):
        """Coordinate samples of one mode."""
        return -0.5 * self.L + self.dQ * np.arange(self.N)

    @property
    def p(self):
        """Centred momentum samples of one mode."""
        return self.dP * (np.arange(self.N) - self.N // 2)

    @property
    def p_fft(self):
        """Momentum samples in numpy FFT order."""
        return 2.0 * math.pi * np.fft.fftfreq(self.N, self.dQ)

    def mesh(self):
        """Per-mode coordinate arrays broadcastable to ``shape``."""
        q = self.q
        out = []
        for m in range(self.d):
            s = [1] * self.d
            s[m] = self.N
            out.append(q.reshape(s))
        return out


def make_grid(n: int, d: int, L: float = 10.0) -> GridSpec:
    return GridSpec(n, d, L)


@dataclass
class Wavefunction:
    grid: GridSpec
    amplitudes: np.ndarray
    space: str = "position"
    normalized: bool = field(default=False)

    def __post_init__(self):
        if self.space not in ("position", "momentum"):
            raise ValueError(f"unknown space tag {self.space!r}")
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} amplitudes, got {a.size}")
        a = a.reshape(self.grid.shape)
        if not np.all(np.isfinite(a)):
            raise ValueError("wavefunction contains non-finite amplitudes")
        self.amplitudes = a
        if self.normalized and abs(self.norm_sq() - 1.0) > 1e-12:
            raise ValueError(f"flagged normalized but norm^2 = {self.norm_sq():.15g}")

    def norm_sq(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self):
        nsq = self.norm_sq()
        if nsq == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Wavefunction(self.grid, self.amplitudes / math.sqrt(nsq), self.space, True)

    def flat(self):
        return self.amplitudes.reshape(-1)

    def copy(self):
        return Wavefunction(self.grid, self.amplitudes.copy(), self.space, self.normalized)


def inner_product(a: Wavefunction, b: Wavefunction) -> complex:
    """``<a|b> = sum conj(a) * b`` over all grid points."""
    if a.grid != b.grid:
        raise ValueError("wavefunctions live on different grids")
    if a.space != b.space:
        raise ValueError(f"space mismatch: {a.space} vs {b.space}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def to_momentum(psi: Wavefunction, axes=None) -> Wavefunction:
    if psi.space != "position":
        raise ValueError("state is already in momentum space")
    axes = tuple(range(psi.grid.d)) if axes is None else tuple(axes)
    phi = np.fft.fftshift(np.fft.fftn(psi.amplitudes, axes=axes, norm="ortho"), axes=axes)
    return Wavefunction(psi.grid, phi, "momentum", psi.normalized and abs(np.vdot(phi, phi).real - 1) <= 1e-12)


def to_position(phi: Wavefunction, axes=None) -> Wavefunction:
    if phi.space != "momentum":
        raise ValueError("state is already in position space")
    axes = tuple(range(phi.grid.d)) if axes is None else tuple(axes)
    psi = np.fft.ifftn(np.fft.ifftshift(phi.amplitudes, axes=axes), axes=axes, norm="ortho")
    return Wavefunction(phi.grid, psi, "position", phi.normalized and abs(np.vdot(psi, psi).real - 1) <= 1e-12)


# --- snapshot I/O -----------------------------------------------------------

def write_snapshot(psi: Wavefunction, path):
    g = psi.grid
    flat = psi.flat()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n} d={g.d} L={g.L!r} space={psi.space}\n")
        fh.write("index,re,im\n")
        for i, c in enumerate(flat):
            fh.write(f"{i},{float(c.real)!r},{float(c.imag)!r}\n")


def read_snapshot(path) -> Wavefunction:
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    k, _, v = tok.partition("=")
                    meta[k] = v
                continue
            if line.startswith("index"):
                continue
            i, re, im = line.split(",")
            rows.append((int(i), float(re), float(im)))
    try:
        g = GridSpec(int(meta["n"]), int(meta["d"]), float(meta["L"]))
    except KeyError as exc:
        raise ValueError(f"snapshot header missing {exc.args[0]!r}") from None
    amps = np.zeros(g.size, dtype=complex)
    seen = np.zeros(g.size, dtype=bool)
    for i, re, im in rows:
        amps[i] = complex(re, im)
        seen[i] = True
    if not seen.all():
        raise ValueError(f"snapshot has {seen.sum()} of {g.size} amplitudes")
    return Wavefunction(g, amps, meta.get("space", "position"))
