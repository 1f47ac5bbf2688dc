"""Simulate every reference row end to end and write the resulting table as CSV."""

import argparse
import logging

from pacs import pipeline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="table_emulation.csv")
    ap.add_argument("--eta-hd", type=float, default=0.57)
    ap.add_argument("--eta-spd", type=float, default=0.6)
    ap.add_argument("--samples", type=int, default=20000, help="records per phase")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    rows = pipeline.measured_configs(eta_spd=args.eta_spd, eta_hd=args.eta_hd,
                                     samples_per_phase=args.samples, seed=args.seed)
    print(pipeline.table_one_emulation(rows, args.out), end="")


if __name__ == "__main__":
    main()
