"""Tabulate relative heralding probability from the two-mode simulation next to its closed form."""

import argparse

import numpy as np

from pacs import heralding, io


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="relative_heralding.csv")
    ap.add_argument("--alpha-max", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--lam", type=float, default=0.02)
    args = ap.parse_args()
    rows = []
    for n in (1, 2, 3):
        for a in np.linspace(0.0, args.alpha_max, args.points):
            rows.append([n, float(a), heralding.simulated_relative_heralding(float(a), n, lam=args.lam),
                         heralding.relative_heralding(float(a), n)])
    io.write_csv(args.out, ["n", "alpha", "P_R_sim", "P_R_closed"], rows)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
