"""Print the gate-count tables for a force field and grid size and optionally save JSON."""

import argparse
import json

from soqft_ir.circuits import format_report, resource_report
from soqft_ir.grid import make_grid
from soqft_ir.workflow import resolve_forcefield


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ff", default="synthetic_h2o_like.ff")
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--n-t", type=int, default=60000)
    ap.add_argument("--json")
    args = ap.parse_args()
    ff = resolve_forcefield(args.ff)
    reports = {}
    for n in args.n:
        r = resource_report(ff, make_grid(n, ff.n_modes), args.n_t, measured=n <= 4)
        reports[n] = r
        print(format_report(r))
        print()
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=1)


if __name__ == "__main__":
    main()
