#!/usr/bin/env python3
"""Sweep a range of admissible targets and compare the exact count with
the main-term prediction.

Usage:
    python scripts/compare_sweep.py [start] [stop] [out.csv]

Defaults reproduce the desk-scale sanity sweep: k = 2, s = 5, theta = 0.9
over [10^5, 1.1*10^5].  The emitted CSV is plot-ready.
"""

import sys

from kglab.cli import ExperimentConfig, run


def main(argv):
    start = int(argv[1]) if len(argv) > 1 else 10**5
    stop = int(argv[2]) if len(argv) > 2 else 11 * 10**4
    out = argv[3] if len(argv) > 3 else "compare_sweep.csv"
    config = ExperimentConfig(
        subcommand="compare",
        range_spec=f"{start}:{stop}:1",
        k=2,
        s=5,
        theta=0.9,
        qmax=1000,
        fmt="csv",
    )
    status, text = run(config)
    if status != 0:
        sys.stderr.write(text)
        return status
    with open(out, "w") as handle:
        handle.write(text)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
