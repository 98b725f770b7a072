#!/usr/bin/env python3
"""Run the cotangent-bundle-of-S^2 example and print the report.

The bundled su2_ts2 config declares the small closed workflow: generate the
nine-item dictionary, print both dimension tables, tabulate differentials up
to degree two, verify the triple with symbolic k, and express d(det(b,b)).
The text report goes to stdout; pass --json to archive the machine-readable
version as well.
"""

import argparse
import sys

from equiform import cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", metavar="PATH", help="also write a JSON report")
    ap.add_argument(
        "--max-degree",
        type=int,
        help="override the differential table cutoff from the config",
    )
    args = ap.parse_args(argv)

    base = ["--config", "su2_ts2"]
    if args.max_degree is not None:
        base += ["--max-degree", str(args.max_degree)]

    code = cli.main(["run", *base, "--format", "text"])
    if args.json:
        code = max(code, cli.main(
            ["run", *base, "--format", "json", "--output", args.json]
        ))
    return code


if __name__ == "__main__":
    sys.exit(main())
