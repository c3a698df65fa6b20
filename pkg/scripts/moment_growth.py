#!/usr/bin/env python3
"""Track the growth of the fourth moment of |f(., 1)| against the window
half-width for k = 2 and report the fitted log2 slope.

The diagonal alone contributes ~y^2; the measured slope staying below
s - 1 + 0.3 = 3.3 is the desk-scale shadow of the mean-value bound.

Usage:
    python scripts/moment_growth.py [x1 x2 ...]
"""

import math
import sys

import numpy as np

from kglab import build_interval, moment_enumeration, unit_weight


def main(argv):
    xs = [int(a) for a in argv[1:]] or [2000, 4000, 8000, 16000]
    logs_y = []
    logs_m = []
    print(f"{'x':>8} {'y':>12} {'|window|':>10} {'I_4':>16}")
    for x in xs:
        interval = build_interval(5 * x**2, 2, 5, 0.85)
        moment = moment_enumeration(interval, 2, unit_weight(interval))
        logs_y.append(math.log2(interval.y))
        logs_m.append(math.log2(moment))
        print(f"{x:>8} {interval.y:>12.2f} {interval.size:>10} {moment:>16.0f}")
    slope = np.polyfit(logs_y, logs_m, 1)[0]
    print(f"fitted log2 slope of I_4 against y: {slope:.4f} (gate: < 3.3)")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
