"""Sum-of-products potential and dipole surfaces in dimensionless normal coordinates.

Coefficients are keyed by sorted index tuples and each key stores the *total*
coefficient of its monomial, e.g. ``cubic[(0, 0, 2)]`` multiplies
``Q_0 * Q_0 * Q_2`` exactly once.  Published force fields often quote
derivatives (``phi_ijk``) or restricted sums instead; convert before writing
a ``.ff`` file.

File format (``.ff``), one datum per line, 0-based indices, cm^-1 and debye::

    # comment
    name water-like
    modes 3
    omega 0 3830.0
    cubic 0 0 2 -120.0
    quartic 0 0 2 2 15.0
    mu z 1 0.19
    mu x 0 2 -0.01
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from types import MappingProxyType
from typing import Mapping

AXES = ("x", "y", "z")


class ForceFieldError(ValueError):
    """Raised for malformed or inconsistent force-field input."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" | "error"
    message: str


def _freeze(mapping):
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class ForceField:
    n_modes: int
    omega: tuple
    cubic: Mapping = field(default_factory=dict)
    quartic: Mapping = field(default_factory=dict)
    dipole: Mapping = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.n_modes < 1:
            raise ForceFieldError("n_modes must be positive")
        omega = tuple(float(w) for w in self.omega)
        if len(omega) != self.n_modes:
            raise ForceFieldError(f"expected {self.n_modes} harmonic wavenumbers, got {len(omega)}")
        for i, w in enumerate(omega):
            if not (w > 0 and math.isfinite(w)):
                raise ForceFieldError(f"omega[{i}] must be positive, got {w}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "cubic", _freeze(self._canon(self.cubic, 3, "cubic")))
        object.__setattr__(self, "quartic", _freeze(self._canon(self.quartic, 4, "quartic")))
        dip = {}
        for axis, terms in dict(self.dipole).items():
            if axis not in AXES:
                raise ForceFieldError(f"unknown dipole axis {axis!r}")
            canon = {}
            for key, value in terms.items():
                key = (key,) if isinstance(key, int) else tuple(key)
                if not 1 <= len(key) <= 3:
                    raise ForceFieldError(f"dipole term {key} must have 1 to 3 indices")
                canon.update(self._canon({key: value}, len(key), f"mu {axis}", existing=canon))
            dip[axis] = _freeze(canon)
        for axis in AXES:
            dip.setdefault(axis, _freeze({}))
        object.__setattr__(self, "dipole", _freeze(dip))

    def _canon(self, terms, order, label, existing=None):
        out = {}
        seen = set(existing or ())
        for key, value in dict(terms).items():
            key = tuple(sorted(int(i) for i in key))
            if len(key) != order:
                raise ForceFieldError(f"{label} key {key} needs {order} indices")
            if any(i < 0 or i >= self.n_modes for i in key):
                raise ForceFieldError(f"{label} index out of range in {key}")
            if key in seen or key in out:
                raise ForceFieldError(f"duplicate {label} key {key}")
            value = float(value)
            if not math.isfinite(value):
                raise ForceFieldError(f"{label} {key} is not finite")
            out[key] = value
        return out

    def potential_terms(self):
        """All PES monomials as ``{sorted index tuple: cm^-1 coefficient}``."""
        terms = {(i, i): w / 2.0 for i, w in enumerate(self.omega)}
        terms.update(self.cubic)
        terms.update(self.quartic)
        return terms

    def dipole_terms(self, axis, order=3):
        if axis not in AXES:
            raise ForceFieldError(f"unknown dipole axis {axis!r}")
        if order not in (1, 2, 3):
            raise ForceFieldError(f"dipole truncation order must be 1, 2 or 3, got {order}")
        return {k: v for k, v in self.dipole[axis].items() if len(k) <= order}

    def active_axes(self):
        return [a for a in AXES if any(v != 0.0 for v in self.dipole[a].values())]


def parse_forcefield(text: str) -> ForceField:
    n_modes = None
    name = ""
    omega = {}
    cubic, quartic = {}, {}
    dipole = {a: {} for a in AXES}

    def put(table, key, value, label, lineno):
        canon = tuple(sorted(key))
        if canon in table:
            raise ForceFieldError(f"duplicate {label} key {canon}", lineno)
        table[canon] = value

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0].lower()
        try:
            if kw == "name":
                name = raw.split("#", 1)[0].strip()[4:].strip()
            elif kw == "modes":
                if len(tok) != 2:
                    raise ForceFieldError("expected 'modes N'", lineno)
                if n_modes is not None:
                    raise ForceFieldError("duplicate 'modes' line", lineno)
                n_modes = int(tok[1])
                if n_modes < 1:
                    raise ForceFieldError("mode count must be positive", lineno)
            elif kw == "omega":
                if len(tok) != 3:
                    raise ForceFieldError("expected 'omega i value'", lineno)
                i, w = int(tok[1]), float(tok[2])
                if i in omega:
                    raise ForceFieldError(f"duplicate omega key ({i},)", lineno)
                if not w > 0:
                    raise ForceFieldError(f"omega must be positive, got {w}", lineno)
                omega[i] = w
            elif kw == "cubic":
                if len(tok) != 5:
                    raise ForceFieldError("expected 'cubic i j k value'", lineno)
                put(cubic, tuple(int(t) for t in tok[1:4]), float(tok[4]), "cubic", lineno)
            elif kw == "quartic":
                if len(tok) != 6:
                    raise ForceFieldError("expected 'quartic i j k l value'", lineno)
                put(quartic, tuple(int(t) for t in tok[1:5]), float(tok[5]), "quartic", lineno)
            elif kw == "mu":
                if not 4 <= len(tok) <= 6:
                    raise ForceFieldError("expected 'mu AXIS i [j [k]] value'", lineno)
                axis = tok[1].lower()
                if axis not in AXES:
                    raise ForceFieldError(f"unknown dipole axis {tok[1]!r}", lineno)
                put(dipole[axis], tuple(int(t) for t in tok[2:-1]), float(tok[-1]), f"mu {axis}", lineno)
            else:
                raise ForceFieldError(f"unknown keyword {tok[0]!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ForceFieldError):
                raise
            raise ForceFieldError(f"cannot parse {line!r}: {exc}", lineno) from None

        if n_modes is not None:
            for key in _last_indices(kw, tok):
                if key < 0 or key >= n_modes:
                    raise ForceFieldError(f"index {key} out of range for {n_modes} modes", lineno)

    if n_modes is None:
        raise ForceFieldError("missing 'modes N' line")
    missing = [i for i in range(n_modes) if i not in omega]
    if missing:
        raise ForceFieldError(f"missing omega for modes {missing}")
    extra = [i for i in omega if i >= n_modes or i < 0]
    if extra:
        raise ForceFieldError(f"omega index out of range: {extra}")
    return ForceField(
        n_modes=n_modes,
        omega=tuple(omega[i] for i in range(n_modes)),
        cubic=cubic,
        quartic=quartic,
        dipole={a: t for a, t in dipole.items() if t},
        name=name,
    )


def _last_indices(kw, tok):
    if kw == "omega":
        return [int(tok[1])]
    if kw in ("cubic", "quartic"):
        return [int(t) for t in tok[1:-1]]
    if kw == "mu":
        return [int(t) for t in tok[2:-1]]
    return []


def serialize_forcefield(ff: ForceField) -> str:
    lines = []
    if ff.name:
        lines.append(f"name {ff.name}")
    lines.append(f"modes {ff.n_modes}")
    lines += [f"omega {i} {w!r}" for i, w in enumerate(ff.omega)]
    lines += [f"cubic {' '.join(map(str, k))} {v!r}" for k, v in sorted(ff.cubic.items())]
    lines += [f"quartic {' '.join(map(str, k))} {v!r}" for k, v in sorted(ff.quartic.items())]
    for axis in AXES:
        for k, v in sorted(ff.dipole[axis].items(), key=lambda kv: (len(kv[0]), kv[0])):
            lines.append(f"mu {axis} {' '.join(map(str, k))} {v!r}")
    return "\n".join(lines) + "\n"


def load_forcefield(path) -> ForceField:
    with open(path, encoding="utf-8") as fh:
        return parse_forcefield(fh.read())


def bundled(name="synthetic_h2o_like.ff") -> ForceField:
    """Load a force field shipped in ``soqft_ir/data``."""
    text = resources.files("soqft_ir.data").joinpath(name).read_text(encoding="utf-8")
    return parse_forcefield(text)


def validate(ff: ForceField, grid=None) -> list:
    """Return diagnostics; an empty list means the field is clean.

    With ``grid`` given, the potential is also checked on every grid point
    against a floor of ``-1`` cm^-1 below the equilibrium value.
    """
    out = []
    for i in range(ff.n_modes):
        k4 = ff.quartic.get((i, i, i, i), 0.0)
        k3 = ff.cubic.get((i, i, i), 0.0)
        if k4 < 0 or (k4 == 0 and k3 != 0):
            out.append(Diagnostic(
                "warning",
                f"mode {i}: diagonal quartic k_{i}{i}{i}{i} = {k4:g} <= 0; "
                "potential unbounded below on grid edge",
            ))
    if not ff.active_axes():
        out.append(Diagnostic("error", "no non-zero dipole coefficient on any axis; spectrum is identically zero"))
    if grid is not None:
        from .hamiltonian import potential_on_grid

        vmin = float(potential_on_grid(ff, grid).values.min())
        if vmin < -1.0:
            out.append(Diagnostic("warning", f"potential reaches {vmin:.1f} cm^-1 on the grid (below equilibrium)"))
    return out
