"""Reconstruct one simulated dataset under a grid of assumed efficiencies and report the fidelity profile."""

import argparse

import numpy as np

from pacs import analytics, heralding, homodyne, io, tomography
from pacs.analytics import PacsSpec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--eta", type=float, default=0.57, help="true homodyne efficiency")
    ap.add_argument("--lam", type=float, default=0.05)
    ap.add_argument("--samples", type=int, default=20000, help="records per phase")
    ap.add_argument("--dim", type=int, default=12, help="reconstruction dimension")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="loss_sweep.csv")
    args = ap.parse_args()

    dim_s, dim_i = heralding.default_dims(args.alpha, args.n)
    two_mode = heralding.opa_apply(heralding.OpaParams(args.lam, args.alpha), dim_s, dim_i)
    psi, _ = heralding.herald_n(two_mode, args.n)
    phases = homodyne.default_phases(12)
    edges = homodyne.default_bin_edges()
    data = homodyne.sample_dataset(np.outer(psi, psi.conj()), phases, args.samples, eta=args.eta, seed=args.seed)
    binned = tomography.bin_records(data, phases, edges)
    grid = np.round(np.arange(0.45, 1.0001, 0.05), 10)
    ideal = analytics.pacs_state(PacsSpec(args.alpha, args.n))
    fids, best = tomography.loss_sweep_fidelity(binned, ideal, grid, args.dim)
    io.write_csv(args.out, ["eta", "F"], [[float(e), float(f)] for e, f in zip(grid, fids)])
    for e, f in zip(grid, fids):
        print(f"eta={e:.2f}  F={f:.4f}")
    print(f"best eta {best:.2f} (true {args.eta:.2f})")


if __name__ == "__main__":
    main()
