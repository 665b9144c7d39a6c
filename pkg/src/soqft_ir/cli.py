"""Command-line entry point: ``soqft-ir <command> [options]``.

Commands: prepare, dipole, propagate, spectrum, oracle, resources, scan,
pipeline.  ``pipeline`` and ``scan`` read an optional key-value config file
(``key = value`` per line, keys as in :class:`PipelineConfig`, lists comma
separated, windows as ``lo:hi``); command-line flags override the file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time

import numpy as np

from . import __version__

SCHEMA = 1


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        self.stage = stage
        super().__init__(f"[{stage}] {exc}")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"schema": SCHEMA, **obj}, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"not serializable: {type(x)}")


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _sidecar(path):
    return os.path.splitext(path)[0] + ".json"


# --- config ------------------------------------------------------------------

def _coerce(key, raw):
    from .workflow import PipelineConfig

    default = PipelineConfig.__dataclass_fields__[key].default
    raw = raw.strip()
    if key == "windows":
        out = []
        for part in raw.split(","):
            if part.strip():
                lo, hi = part.split(":")
                out.append((float(lo), float(hi)))
        return tuple(out)
    if key == "axes":
        return tuple(a.strip() for a in raw.split(",") if a.strip())
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def read_config(path):
    from .workflow import PipelineConfig

    names = set(PipelineConfig.field_names())
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in names:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _coerce(key, val)
    return out


def _config_from(args):
    from .workflow import PipelineConfig

    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key in PipelineConfig.field_names():
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _coerce(key, v) if isinstance(v, str) and key in ("windows", "axes") else v
    return PipelineConfig(**values)


def _add_pipeline_flags(p):
    p.add_argument("--config")
    p.add_argument("--ff")
    p.add_argument("--n", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--n-t", dest="n_t", type=int)
    p.add_argument("--splitting", choices=["kinetic-half", "potential-half"])
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--axes")
    p.add_argument("--dipole-order", dest="dipole_order", type=int, choices=[1, 2, 3])
    p.add_argument("--dipole-mode", dest="dipole_mode", choices=["exact", "circuit"])
    p.add_argument("--beta-margin", dest="beta_margin", type=float)
    p.add_argument("--initial", choices=["ite", "harmonic"])
    p.add_argument("--pad", type=int)
    p.add_argument("--e-max", dest="e_max", type=float)
    p.add_argument("--windows", help="comma-separated lo:hi pairs")
    p.add_argument("--auto-threshold", dest="auto_threshold", type=float)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)


def _versions():
    import scipy

    return {"soqft_ir": __version__, "python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def _manifest(out_dir, cfg_dict, files, timings, seeds):
    blob = json.dumps(cfg_dict, sort_keys=True).encode()
    _write_json(os.path.join(out_dir, "manifest.json"), {
        "config": cfg_dict,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "versions": _versions(),
        "timings_s": timings,
        "seeds": seeds,
        "files": [{"path": os.path.relpath(f, out_dir), "sha256": _sha256(f)} for f in files],
    })


# --- commands ----------------------------------------------------------------

def _grid_for(ff, args):
    from .grid import make_grid

    return make_grid(args.n, ff.n_modes, args.L)


def cmd_prepare(args):
    from .forcefield import validate
    from .grid import write_snapshot
    from .state_prep import harmonic_ground_state, imaginary_time_evolve
    from .workflow import resolve_forcefield

    ff = resolve_forcefield(args.ff)
    g = _grid_for(ff, args)
    diags = validate(ff, g)
    for d in diags:
        print(f"[prepare] {d.level}: {d.message}", file=sys.stderr)
    if any(d.level == "error" for d in diags):
        raise ValueError("force field failed validation")
    ite = imaginary_time_evolve(ff, g, args.dtau, args.tol, refine=args.refine)
    psi = ite.psi if args.initial == "ite" else harmonic_ground_state(g)
    write_snapshot(psi, args.out)
    _write_json(_sidecar(args.out), {**ite.as_dict(), "initial": args.initial, "n": g.n, "L": g.L, "ff": str(args.ff)})
    print(f"E0 = {ite.energy:.6f} cm^-1 after {ite.iterations} iterations -> {args.out}")


def cmd_dipole(args):
    from .dipole_encoding import apply_dipole_exact, apply_dipole_probabilistic, choose_beta
    from .grid import read_snapshot, write_snapshot
    from .workflow import resolve_forcefield

    ff = resolve_forcefield(args.ff)
    psi = read_snapshot(args.state)
    meta = _read_json(_sidecar(args.state)) if os.path.exists(_sidecar(args.state)) else {}
    extra = {}
    if args.dipole_mode == "exact":
        chi, nsq = apply_dipole_exact(psi, ff, psi.grid, args.axis, args.dipole_order)
    else:
        beta = choose_beta(ff, psi.grid, args.axis, args.dipole_order, args.beta_margin)
        chi, rec = apply_dipole_probabilistic(psi, ff, psi.grid, args.axis, args.dipole_order, beta, backend="circuit")
        nsq = rec.norm_mu_sq
        extra = rec.as_dict()
    write_snapshot(chi, args.out)
    _write_json(_sidecar(args.out), {"axis": args.axis, "norm_mu_sq": nsq, "E0": meta.get("E0"), "dipole_order": args.dipole_order, "dipole_mode": args.dipole_mode, **extra})
    print(f"|mu psi|^2 = {nsq:.8g} -> {args.out}")


def cmd_propagate(args):
    from .grid import read_snapshot
    from .measurement import sample_series
    from .propagator import PropagationConfig, propagate
    from .workflow import resolve_forcefield

    ff = resolve_forcefield(args.ff)
    chi = read_snapshot(args.state)
    meta = _read_json(_sidecar(args.state))
    E0 = args.E0 if args.E0 is not None else meta.get("E0")
    cfg = PropagationConfig(args.T, args.n_t, args.splitting, args.record_every)
    series = propagate(chi.normalize(), cfg, ff, chi.grid, meta["norm_mu_sq"], E0, meta.get("axis", "?"))
    if args.shots:
        series = sample_series(series, args.shots, args.seed)
    series.write_csv(args.out)
    _write_json(_sidecar(args.out), {"axis": series.axis, "E0": E0, "norm_mu_sq": series.norm_mu_sq, "config": series.meta, "shots": args.shots, "seed": args.seed})
    print(f"{len(series.times)} samples -> {args.out}")


def _write_spectrum_outputs(spec, bands, prefix):
    files = [prefix + ".csv", prefix + "_bands.json", prefix + ".dat"]
    spec.write_csv(files[0])
    _write_json(files[1], {"E0": spec.E0, "bands": [b.as_dict() for b in bands]})
    np.savetxt(files[2], np.column_stack([spec.energies, spec.total]), fmt="%.10g", header="E_cm-1 sigma_total_m2")
    return files


def cmd_spectrum(args):
    from .propagator import AutocorrelationSeries
    from .spectrum import auto_window, band_report, cross_section, damp

    series = []
    E0 = args.E0
    for path in args.acf:
        meta = _read_json(_sidecar(path)) if os.path.exists(_sidecar(path)) else {}
        s = AutocorrelationSeries.read_csv(path, meta.get("axis", os.path.basename(path)), meta.get("norm_mu_sq"), meta.get("E0"))
        E0 = E0 if E0 is not None else s.E0
        series.append(damp(s) if not args.no_damping else s)
    spec = cross_section(series, E0, pad=args.pad, e_max=args.e_max)
    windows = [tuple(map(float, w.split(":"))) for w in args.window] or auto_window(spec, args.auto_threshold)
    bands = [band_report(spec, w) for w in windows]
    _write_spectrum_outputs(spec, bands, args.out)
    for b in bands:
        print(f"{b.centroid:10.2f} +- {b.ci95:5.2f} cm^-1  {b.intensity:9.3f} km/mol")


def cmd_oracle(args):
    from .oracle import diagonalize, stick_spectrum
    from .constants import stick_intensity
    from .workflow import resolve_forcefield

    ff = resolve_forcefield(args.ff)
    g = _grid_for(ff, args)
    eig = diagonalize(ff, g, cap=args.cap)
    os.makedirs(args.out_dir, exist_ok=True)
    np.savetxt(os.path.join(args.out_dir, "eigenvalues.csv"), np.column_stack([np.arange(eig.energies.size), eig.energies, eig.energies - eig.e0]), delimiter=",", header="k,E_cm-1,dE_cm-1", comments="", fmt=["%d", "%.10f", "%.10f"])
    rows = []
    for axis in args.axes.split(","):
        if not ff.dipole_terms(axis, args.dipole_order):
            continue
        dE, s = stick_spectrum(eig, ff, axis, args.dipole_order)
        rows += [(axis, e, v, stick_intensity(e, v)) for e, v in zip(dE, s)]
    with open(os.path.join(args.out_dir, "sticks.csv"), "w", encoding="utf-8") as fh:
        fh.write("axis,dE_cm-1,strength_D2,intensity_km_mol\n")
        for axis, e, v, inten in sorted(rows, key=lambda r: r[1]):
            fh.write(f"{axis},{e:.10f},{v:.10e},{inten:.10e}\n")
    print(f"E0 = {eig.e0:.6f} cm^-1; {len(rows)} sticks -> {args.out_dir}")


def cmd_resources(args):
    from .circuits.blocks import format_report, resource_report
    from .workflow import resolve_forcefield

    ff = resolve_forcefield(args.ff)
    g = _grid_for(ff, args)
    rep = resource_report(ff, g, args.n_t, tuple(args.axes.split(",")), args.dipole_order, measured=not args.no_measure)
    sys.stdout.write(format_report(rep))
    if args.json:
        _write_json(args.json, rep)


def _parse_points(args):
    Ts = [float(x) for x in args.T_list.split(",")]
    nts = [int(x) for x in args.nt_list.split(",")]
    if len(nts) == 1:
        nts = nts * len(Ts)
    if len(Ts) == 1:
        Ts = Ts * len(nts)
    if len(Ts) != len(nts):
        raise ValueError("--T-list and --nt-list must have equal length (or one of them a single value)")
    return list(zip(Ts, nts))


def cmd_scan(args):
    from .workflow import fixture_diff, rows_to_csv, scan

    cfg = _config_from(args)
    if args.compare:
        diff = fixture_diff(cfg, args.compare)
        cols = list(diff[0]) if diff else []
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(",".join(cols) + "\n")
            for r in diff:
                fh.write(",".join(f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c]) for c in cols) + "\n")
        bad = sum(not r["pass"] for r in diff)
        print(f"{len(diff) - bad}/{len(diff)} published bands reproduced within CI -> {args.out}")
        if bad:
            raise ValueError(f"{bad} band(s) outside the published confidence intervals")
        return
    schemes = args.schemes.split(",")
    rows = scan(cfg, _parse_points(args), schemes, cfg.windows or None)
    rows_to_csv(rows, args.out)
    print(f"{len(rows)} rows -> {args.out}")


def cmd_pipeline(args):
    from .workflow import run

    cfg = _config_from(args)
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        res = run(cfg)
    except Exception as exc:  # stage-tagged for the caller
        raise StageError("pipeline", exc) from exc
    files = []
    for axis, s in res.series.items():
        path = os.path.join(args.out_dir, f"acf_{axis}.csv")
        s.write_csv(path)
        files.append(path)
    files += _write_spectrum_outputs(res.spectrum, res.bands, os.path.join(args.out_dir, "spectrum"))
    state_json = os.path.join(args.out_dir, "states.json")
    _write_json(state_json, {"E0": res.prepared.E0, "norm_mu_sq": {a: v[1] for a, v in res.prepared.states.items()}, "dipole_records": res.prepared.records})
    files.append(state_json)
    _manifest(args.out_dir, cfg.as_dict(), files, res.timings, {"seed": cfg.seed, "shots": cfg.shots})
    for b in res.bands:
        print(f"{b.centroid:10.2f} +- {b.ci95:5.2f} cm^-1  {b.intensity:9.3f} km/mol")


def build_parser():
    p = argparse.ArgumentParser(prog="soqft-ir", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def grid_flags(q):
        q.add_argument("--ff", default="synthetic_h2o_like.ff")
        q.add_argument("--n", type=int, default=4)
        q.add_argument("--L", type=float, default=10.0)

    q = sub.add_parser("prepare", help="ground state snapshot and E0")
    grid_flags(q)
    q.add_argument("--initial", choices=["ite", "harmonic"], default="ite")
    q.add_argument("--dtau", type=float, default=0.1)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--refine", type=int, default=4)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_prepare)

    q = sub.add_parser("dipole", help="apply the dipole operator to a snapshot")
    q.add_argument("--ff", default="synthetic_h2o_like.ff")
    q.add_argument("--state", required=True)
    q.add_argument("--axis", required=True, choices=["x", "y", "z"])
    q.add_argument("--dipole-order", type=int, default=3, choices=[1, 2, 3])
    q.add_argument("--dipole-mode", choices=["exact", "circuit"], default="exact")
    q.add_argument("--beta-margin", type=float, default=20.0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_dipole)

    q = sub.add_parser("propagate", help="record the autocorrelation of a dipole-operated state")
    q.add_argument("--ff", default="synthetic_h2o_like.ff")
    q.add_argument("--state", required=True)
    q.add_argument("--T", type=float, default=3950.0)
    q.add_argument("--n-t", type=int, default=60000)
    q.add_argument("--splitting", choices=["kinetic-half", "potential-half"], default="kinetic-half")
    q.add_argument("--record-every", type=int, default=1)
    q.add_argument("--E0", type=float)
    q.add_argument("--shots", type=int, default=0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_propagate)

    q = sub.add_parser("spectrum", help="cross section and band reports from autocorrelation CSVs")
    q.add_argument("--acf", action="append", required=True)
    q.add_argument("--E0", type=float)
    q.add_argument("--pad", type=int, default=4)
    q.add_argument("--e-max", type=float, default=16000.0)
    q.add_argument("--window", action="append", default=[], help="lo:hi, repeatable")
    q.add_argument("--auto-threshold", type=float, default=1e-3)
    q.add_argument("--no-damping", action="store_true")
    q.add_argument("--out", required=True, help="output prefix")
    q.set_defaults(func=cmd_spectrum)

    q = sub.add_parser("oracle", help="dense diagonalization and stick spectrum")
    grid_flags(q)
    q.add_argument("--axes", default="x,z")
    q.add_argument("--dipole-order", type=int, default=3)
    q.add_argument("--cap", type=int, default=4096)
    q.add_argument("--out-dir", required=True)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("resources", help="gate counts per block and totals")
    grid_flags(q)
    q.add_argument("--n-t", type=int, default=60000)
    q.add_argument("--axes", default="x,z")
    q.add_argument("--dipole-order", type=int, default=3)
    q.add_argument("--no-measure", action="store_true", help="closed forms only, skip building circuits")
    q.add_argument("--json")
    q.set_defaults(func=cmd_resources)

    q = sub.add_parser("scan", help="time-parameter and approximation-scheme scan")
    _add_pipeline_flags(q)
    q.add_argument("--T-list", default="3950")
    q.add_argument("--nt-list", default="60000")
    q.add_argument("--schemes", default="order3-ite")
    q.add_argument("--compare", help="published-values fixture CSV; runs its points and diffs")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_scan)

    q = sub.add_parser("pipeline", help="prepare -> dipole -> propagate -> spectrum with a manifest")
    _add_pipeline_flags(q)
    q.add_argument("--out-dir", required=True)
    q.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    t = time.perf_counter()
    try:
        args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 1
    print(f"[{args.command}] done in {time.perf_counter() - t:.2f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
