"""Diff a user-supplied water force field against the published-value fixtures.

The water coefficients are not bundled; pass the force-field file with --ff.
Runs the long reference propagation (19750 fs, 300000 steps) and the scan
points named in fixtures/table*.csv, then writes one diff CSV per table.
"""

import argparse
import csv
import os

from soqft_ir.workflow import PipelineConfig, fixture_diff, run

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ff", required=True)
    ap.add_argument("--tables", default="tableB.csv,tableC1.csv,tableC2.csv")
    ap.add_argument("--skip-long", action="store_true", help="skip the 300000-step reference run")
    ap.add_argument("--out-dir", default="water_diff")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    if not args.skip_long:
        res = run(PipelineConfig(ff=args.ff, T=19750.0, n_t=300000))
        print(f"E0 = {res.prepared.E0:.2f} cm^-1")
        with open(os.path.join(HERE, "tableV.csv"), newline="") as fh:
            for row in csv.DictReader(fh):
                if not row["ci95_cm-1"]:
                    continue
                c = float(row["centroid_cm-1"])
                b = min(res.bands, key=lambda x: abs(x.centroid - c))
                print(f"{row['band']:8s} published {c:8.1f} +- {row['ci95_cm-1']:>4s}  computed {b.centroid:8.1f} +- {b.ci95:4.1f}  {b.intensity:7.2f} km/mol")
    for name in args.tables.split(","):
        diff = fixture_diff(PipelineConfig(ff=args.ff), os.path.join(HERE, name))
        path = os.path.join(args.out_dir, name.replace(".csv", "_diff.csv"))
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(diff[0]))
            w.writeheader()
            w.writerows(diff)
        ok = sum(r["pass"] for r in diff)
        print(f"{name}: {ok}/{len(diff)} within CI -> {path}")


if __name__ == "__main__":
    main()
