"""Fidelity and efficiency of all three gates over coupling strength and side leakage.

Writes the plot-ready CSV and prints, for each gate and cavity convention,
how often the curves fail to be monotone along each axis.

    python3 scripts/sweep_coupling_leakage.py --out sweep.csv
"""
import argparse
import time

import numpy as np

from qdgates.cavity import CONVENTIONS, SIGNED_MODULI
from qdgates.metrics import Axis, SweepGrid, sweep, write_csv


def monotonicity(records, grid):
    shape = (grid.g_axis.steps, grid.ks_axis.steps)
    for kind in grid.kinds:
        rows = [r for r in records if r.kind is kind]
        for col in ("F_sim", "eta_sim"):
            a = np.array([getattr(r, col) for r in rows]).reshape(shape)
            down_g = int((np.diff(a, axis=0) < -1e-12).sum())
            up_ks = int((np.diff(a, axis=1) > 1e-12).sum())
            yield kind.value, col, down_g, up_ks


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--g-steps", type=int, default=31)
    p.add_argument("--ks-steps", type=int, default=27)
    p.add_argument("--gamma", type=float, default=0.1)
    args = p.parse_args()

    grid = SweepGrid(Axis(0, 2.4, args.g_steps), Axis(0, 1.3, args.ks_steps), gamma_ratio=args.gamma)
    for conv in CONVENTIONS:
        start = time.perf_counter()
        records = sweep(grid, convention=conv)
        print(f"{conv}: {len(records)} points in {time.perf_counter() - start:.1f} s")
        if conv == SIGNED_MODULI:
            with open(args.out, "w", newline="") as fh:
                write_csv(records, fh)
        print(f"  {'gate':8s} {'metric':8s} {'drops along g':>14s} {'rises along ks':>15s}")
        for kind, col, dg, uk in monotonicity(records, grid):
            print(f"  {kind:8s} {col:8s} {dg:14d} {uk:15d}")
    print(f"CSV ({SIGNED_MODULI}) written to {args.out}")


if __name__ == "__main__":
    main()
