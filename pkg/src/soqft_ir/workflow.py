"""End-to-end pipeline: initial state, dipole, propagation, spectrum, bands."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .dipole_encoding import apply_dipole_exact, apply_dipole_probabilistic, choose_beta
from .forcefield import ForceField, bundled, load_forcefield
from .grid import make_grid
from .measurement import sample_series
from .propagator import PropagationConfig, propagate
from .spectrum import auto_window, band_report, cross_section, damp
from .state_prep import harmonic_ground_state, imaginary_time_evolve


@dataclass
class PipelineConfig:
    ff: str = "synthetic_h2o_like.ff"  # path, or name of a bundled field
    n: int = 4
    L: float = 10.0
    T: float = 3950.0
    n_t: int = 60000
    splitting: str = "kinetic-half"
    record_every: int = 1
    axes: tuple = ("x", "z")
    dipole_order: int = 3
    dipole_mode: str = "exact"  # exact | circuit
    beta_margin: float = 20.0
    initial: str = "ite"  # ite | harmonic
    ite_dtau: float = 0.1
    ite_tol: float = 1e-8
    ite_refine: int = 4
    damping: bool = True
    pad: int = 4
    e_max: float = 16000.0
    windows: tuple = ()  # ((lo, hi), ...) overrides auto windows
    auto_threshold: float = 1e-3
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        self.axes = tuple(self.axes)
        self.windows = tuple(tuple(w) for w in self.windows)
        if self.dipole_mode not in ("exact", "circuit"):
            raise ValueError("dipole_mode must be 'exact' or 'circuit'")
        if self.initial not in ("ite", "harmonic"):
            raise ValueError("initial must be 'ite' or 'harmonic'")
        PropagationConfig(self.T, self.n_t, self.splitting, self.record_every)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        d = asdict(self)
        d["axes"] = list(self.axes)
        d["windows"] = [list(w) for w in self.windows]
        return d


def resolve_forcefield(spec) -> ForceField:
    if isinstance(spec, ForceField):
        return spec
    try:
        return load_forcefield(spec)
    except FileNotFoundError:
        return bundled(spec)


@dataclass
class PreparedStates:
    E0: float
    psi0: object
    states: dict  # axis -> (Wavefunction, norm_mu_sq)
    records: dict = field(default_factory=dict)
    ite: object = None


def prepare_states(cfg: PipelineConfig, ff: ForceField, g, ite=None) -> PreparedStates:
    """Ground state (ITE or harmonic), E0 and the dipole-operated states per axis.

    E0 always comes from imaginary-time relaxation; ``initial`` only selects
    the state the dipole acts on.
    """
    if ite is None:
        ite = imaginary_time_evolve(ff, g, cfg.ite_dtau, cfg.ite_tol, refine=cfg.ite_refine)
    psi0 = ite.psi if cfg.initial == "ite" else harmonic_ground_state(g)
    states, records = {}, {}
    for axis in cfg.axes:
        if not ff.dipole_terms(axis, cfg.dipole_order):
            continue
        if cfg.dipole_mode == "exact":
            chi, nsq = apply_dipole_exact(psi0, ff, g, axis, cfg.dipole_order)
        else:
            beta = choose_beta(ff, g, axis, cfg.dipole_order, cfg.beta_margin)
            chi, rec = apply_dipole_probabilistic(psi0, ff, g, axis, cfg.dipole_order, beta, backend="circuit")
            nsq = rec.norm_mu_sq
            records[axis] = rec.as_dict()
        states[axis] = (chi, nsq)
    if not states:
        raise ValueError("no requested axis carries a dipole")
    return PreparedStates(ite.energy, psi0, states, records, ite)


@dataclass
class PipelineResult:
    config: PipelineConfig
    prepared: PreparedStates
    series: dict
    spectrum: object
    windows: list
    bands: list
    timings: dict


def run(cfg: PipelineConfig, ff: ForceField | None = None, prepared: PreparedStates | None = None) -> PipelineResult:
    timings = {}
    ff = ff or resolve_forcefield(cfg.ff)
    g = make_grid(cfg.n, ff.n_modes, cfg.L)
    t = time.perf_counter()
    if prepared is None:
        prepared = prepare_states(cfg, ff, g)
    timings["prepare"] = time.perf_counter() - t
    t = time.perf_counter()
    pc = PropagationConfig(cfg.T, cfg.n_t, cfg.splitting, cfg.record_every)
    series = propagate(prepared.states, pc, ff, g, E0=prepared.E0)
    if cfg.shots:
        series = {ax: sample_series(s, cfg.shots, cfg.seed + i) for i, (ax, s) in enumerate(series.items())}
    timings["propagate"] = time.perf_counter() - t
    t = time.perf_counter()
    used = [damp(s) for s in series.values()] if cfg.damping else list(series.values())
    spec = cross_section(used, prepared.E0, pad=cfg.pad, e_max=cfg.e_max)
    windows = list(cfg.windows) or auto_window(spec, cfg.auto_threshold)
    bands = []
    for w in windows:
        try:
            bands.append(band_report(spec, w))
        except ValueError:
            continue
    timings["spectrum"] = time.perf_counter() - t
    return PipelineResult(cfg, prepared, series, spec, windows, bands, timings)


SCHEMES = {
    "order1-harmonic": {"dipole_order": 1, "initial": "harmonic"},
    "order1-ite": {"dipole_order": 1, "initial": "ite"},
    "order3-harmonic": {"dipole_order": 3, "initial": "harmonic"},
    "order3-ite": {"dipole_order": 3, "initial": "ite"},
}


def scan(cfg: PipelineConfig, points, schemes=("order3-ite",), windows=None):
    """Run the pipeline over ``(T, n_t)`` points and approximation schemes.

    Returns rows ``{T, n_t, dt, scheme, band, centroid, ci95, intensity}``;
    ``windows`` (list of (lo, hi)) fixes the bands reported in every row.
    """
    ff = resolve_forcefield(cfg.ff)
    g = make_grid(cfg.n, ff.n_modes, cfg.L)
    ite = imaginary_time_evolve(ff, g, cfg.ite_dtau, cfg.ite_tol, refine=cfg.ite_refine)
    rows = []
    for scheme in schemes:
        sc = replace(cfg, **SCHEMES[scheme])
        prepared = prepare_states(sc, ff, g, ite)
        for T, n_t in points:
            pc = replace(sc, T=float(T), n_t=int(n_t), windows=tuple(windows or sc.windows))
            res = run(pc, ff, prepared)
            for i, b in enumerate(res.bands):
                rows.append({
                    "T": float(T), "n_t": int(n_t), "dt": float(T) / int(n_t), "scheme": scheme, "band": i,
                    "centroid": b.centroid, "ci95": b.ci95, "intensity": b.intensity,
                })
    return rows


def rows_to_csv(rows, path):
    cols = ["T", "n_t", "dt", "scheme", "band", "centroid", "ci95", "intensity"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(f"{r[c]:.10g}" if isinstance(r[c], float) else str(r[c]) for c in cols) + "\n")


def band_table(bands):
    return np.array([[b.centroid, b.ci95, b.intensity] for b in bands])


def read_fixture(path):
    """Rows of a published-values CSV (``fixtures/table*.csv``) as dicts.

    Blank cells (bands not resolved at that T) are dropped from the result.
    """
    import csv

    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            if r.get("centroid_cm-1", "x") == "":
                continue
            out.append(r)
    return out


def fixture_diff(cfg: PipelineConfig, path, tolerance_scale: float = 1.0):
    """Run every (scheme, T, n_t) point named in a fixture and diff against it.

    Each published band is matched to the computed band with the nearest
    centroid.  A row passes when ``|delta| <= scale * (ci_pub + ci_calc)``.
    """
    rows = read_fixture(path)
    ff = resolve_forcefield(cfg.ff)
    g = make_grid(cfg.n, ff.n_modes, cfg.L)
    ite = imaginary_time_evolve(ff, g, cfg.ite_dtau, cfg.ite_tol, refine=cfg.ite_refine)
    cache, prepared, out = {}, {}, []
    for r in rows:
        scheme = r.get("scheme", "order3-ite")
        T = float(r["T_fs"])
        n_t = int(r["n_t"]) if r.get("n_t") else int(round(T / (cfg.T / cfg.n_t)))
        key = (scheme, T, n_t)
        if key not in cache:
            sc = replace(cfg, **SCHEMES[scheme])
            if scheme not in prepared:
                prepared[scheme] = prepare_states(sc, ff, g, ite)
            cache[key] = run(replace(sc, T=T, n_t=n_t), ff, prepared[scheme]).bands
        bands = cache[key]
        pub, ci_pub = float(r["centroid_cm-1"]), float(r["ci95_cm-1"])
        best = min(bands, key=lambda b: abs(b.centroid - pub)) if bands else None
        delta = best.centroid - pub if best else float("nan")
        ok = best is not None and abs(delta) <= tolerance_scale * (ci_pub + best.ci95)
        out.append({
            "scheme": scheme, "T": T, "n_t": n_t, "published": pub, "ci_published": ci_pub,
            "computed": best.centroid if best else float("nan"), "ci_computed": best.ci95 if best else float("nan"),
            "delta": delta, "intensity_published": float(r["intensity_km_mol"]) if r.get("intensity_km_mol") else float("nan"),
            "intensity_computed": best.intensity if best else float("nan"), "pass": bool(ok),
        })
    return out
