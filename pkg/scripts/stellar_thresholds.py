"""Compute stellar-rank fidelity thresholds for every n and rank on an amplitude grid."""

import argparse

import numpy as np

from pacs import io, stellar


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="stellar_thresholds.csv")
    ap.add_argument("--alpha-max", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--starts", type=int, default=stellar.N_STARTS)
    args = ap.parse_args()
    grid = np.linspace(0.0, args.alpha_max, args.points)
    rows = []
    for n in (1, 2, 3):
        for k in range(1, n + 1):
            curve = stellar.threshold_curve(n, k, grid, n_starts=args.starts)
            rows.extend([n, k, float(a), float(f)] for a, f in zip(grid, curve.thresholds))
            print(f"n={n} k={k}: {curve.thresholds[0]:.4f} .. {curve.thresholds[-1]:.4f}")
    io.write_csv(args.out, ["n", "k", "alpha", "F_threshold"], rows)


if __name__ == "__main__":
    main()
