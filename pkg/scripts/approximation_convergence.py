"""Sup-norm gap between original and nilpotent extremals as the horizon shrinks.

Prints horizon, gap and the ratio to the previous row. With nonzero theta
velocity the gap is second order, so halving the horizon should at least
halve it.

    python scripts/approximation_convergence.py [--h3 20] [--levels 6]
"""

import argparse
import math

from discgeo.cli import compare_curves


def sweep(h, levels, base):
    rows, prev = [], None
    for k in range(levels):
        T = base / 2**k
        gap = compare_curves(h, T, 201)[2]
        rows.append((T, gap, prev / gap if prev else float("nan")))
        prev = gap
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--h1", type=float, default=0.5)
    ap.add_argument("--h2", type=float, default=math.sqrt(3) / 2)
    ap.add_argument("--h3", type=float, default=20.0)
    ap.add_argument("--levels", type=int, default=6)
    ap.add_argument("--base", type=float, default=math.pi / 5)
    a = ap.parse_args()
    print(f"{'horizon':>12} {'gap':>12} {'ratio':>8}")
    for T, gap, r in sweep((a.h1, a.h2, a.h3), a.levels, a.base):
        print(f"{T:12.6f} {gap:12.4e} {r:8.3f}")
