"""Command-line entry point; errors go to stderr as JSON with a nonzero exit code."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import analysis, analytics, engineering, heralding, homodyne, io, pipeline, stellar, tomography
from .errors import PacsError, UndefinedFano, UndefinedGain


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv(header: list[str], rows) -> str:
    fmt = lambda v: "" if v is None else (repr(float(v)) if isinstance(v, float) else str(v))
    return "\n".join([",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args) -> None:
    cfg = pipeline.ExperimentConfig.from_dict(io.read_json(args.config))
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    _emit(_json(pipeline.run_pipeline(cfg).to_dict()), args.out)


def cmd_pacs_table(args) -> None:
    rows = []
    for n in _ints(args.n):
        for a in _floats(args.alpha):
            spec = analytics.PacsSpec(a, n)
            try:
                g = analytics.gain(spec)
            except UndefinedGain:
                g = None
            try:
                f = analytics.fano(spec)
            except UndefinedFano:
                f = None
            q = analytics.quad_stats(spec)
            rows.append([a, n, g, q.Vx, q.Vp, f, analytics.beta_opt(spec).real])
    _emit(_csv(["alpha", "n", "g", "Vx", "Vp", "F_N", "beta_opt"], rows), args.out)


def cmd_herald_scan(args) -> None:
    model = heralding.PnrdModel(args.eta)
    rows = []
    for n in _ints(args.n):
        accept = heralding.pnrd_accept_prob(model, n)
        for lam in _floats(args.lam):
            for a in _floats(args.alpha):
                p_h = heralding.heralding_probability(a, lam, n)
                rows.append([a, n, lam, p_h, heralding.relative_heralding(a, n), accept, p_h * accept])
    _emit(_csv(["alpha", "n", "lam", "P_H", "P_R", "accept", "rate"], rows), args.out)


def cmd_wigner(args) -> None:
    rho = io.read_density(args.rho)
    axis = np.linspace(-args.extent, args.extent, args.points)
    grid = analysis.wigner(rho, axis, axis)
    if args.out is None:
        rows = [[x, p, float(grid.values[i, j])] for i, x in enumerate(axis.tolist()) for j, p in enumerate(axis.tolist())]
        _emit(_csv(["x", "p", "W"], rows), None)
    else:
        io.write_wigner(args.out, grid)


def cmd_analyze(args) -> None:
    rho = io.read_density(args.rho)
    rho_in = io.read_density(args.seed_rho) if args.seed_rho else None
    alpha = complex(args.alpha, args.alpha_im)
    report = pipeline.analyze_state(rho, alpha, args.n, rho_in, witness=not args.no_witness)
    _emit(_json(report), args.out)


def cmd_stellar_thresholds(args) -> None:
    grid = np.linspace(0.0, args.alpha_max, args.points)
    ranks = range(1, 4)
    curves = {k: stellar.threshold_curve(args.n, k, grid, n_starts=args.starts) for k in ranks if k <= args.n}
    rows = [[a] + [float(curves[k].thresholds[i]) if k in curves else None for k in ranks]
            for i, a in enumerate(grid.tolist())]
    header = ["alpha", "F_th_k1", "F_th_k2", "F_th_k3"]
    _emit(_csv(header, rows), args.out)


def cmd_stellar_witness(args) -> None:
    report = io.read_json(args.analysis)
    alpha = report["alpha"]
    a = abs(complex(alpha[0], alpha[1])) if isinstance(alpha, list) else abs(complex(alpha))
    n, fid = int(report["n"]), float(report["fidelity"])
    curves = [stellar.threshold_curve(n, k, [a], n_starts=args.starts) for k in range(1, n + 1)]
    out = {
        "alpha": a,
        "n": n,
        "fidelity": fid,
        "thresholds": {f"k{c.rank}": float(c.thresholds[0]) for c in curves},
        "exact": [c.exact for c in curves],
        "certified_rank": stellar.witness(fid, curves, a),
    }
    _emit(_json(out), args.out)


def _parse_coeff(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def cmd_engineer(args) -> None:
    spec = io.read_json(args.input)
    unknown = set(spec) - {"s_k", "gamma", "psi"}
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")
    target = engineering.DiagonalPolynomial(tuple(_parse_coeff(v) for v in spec["s_k"]))
    dec = engineering.decompose(target, float(spec.get("gamma", 1.0)))
    out = {"N": dec.N, "gamma": dec.gamma, "b_j": dec.as_floats().tolist(), "b_j_exact": [str(b) for b in dec.b]}
    if "psi" in spec:
        psi = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in spec["psi"]])
        after = engineering.apply_sequence(dec, psi)
        out["before"] = [[z.real, z.imag] for z in psi.tolist()]
        out["after"] = [[z.real, z.imag] for z in after.tolist()]
    _emit(_json(out), args.out)


def cmd_tomo(args) -> None:
    data = io.read_dataset(args.data)
    phases = np.unique(data.theta)
    edges = homodyne.default_bin_edges(args.bins, args.x_max)
    rho, report = tomography.reconstruct(data, args.eta, args.dim, phases=phases, bin_edges=edges,
                                         max_iter=args.max_iter, tol=args.tol)
    io.write_density(args.out, rho)
    summary = report.to_dict()
    if args.report:
        io.write_json(args.report, summary)
    sys.stdout.write(_json(summary))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pacs", description="Photon-added coherent state simulation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="end-to-end simulated experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--output-dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pacs-table", help="closed-form gains, variances and Fano factors")
    p.add_argument("--alpha", default="0.25,0.5,0.75,1.0,1.25,1.5,1.75,2.0")
    p.add_argument("--n", default="1,2,3")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pacs_table)

    p = sub.add_parser("herald-scan", help="heralding and relative heralding probabilities")
    p.add_argument("--alpha", default="0,0.5,1.0,1.5")
    p.add_argument("--n", default="1,2,3")
    p.add_argument("--lam", default="0.02,0.05,0.1")
    p.add_argument("--eta", type=float, default=0.6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_herald_scan)

    p = sub.add_parser("wigner", help="Wigner function of a density-matrix JSON on a square grid")
    p.add_argument("rho")
    p.add_argument("--extent", type=float, default=6.0)
    p.add_argument("--points", type=int, default=121)
    p.add_argument("--out")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("analyze", help="figures of merit of a density matrix against the ideal state")
    p.add_argument("rho")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed-rho", help="reconstructed seed coherent state, for the gain")
    p.add_argument("--no-witness", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stellar-thresholds", help="fidelity thresholds for stellar ranks 1..n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--starts", type=int, default=stellar.N_STARTS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stellar_thresholds)

    p = sub.add_parser("stellar-witness", help="certified stellar rank from an analysis JSON")
    p.add_argument("analysis")
    p.add_argument("--starts", type=int, default=stellar.N_STARTS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stellar_witness)

    p = sub.add_parser("engineer", help="decompose a diagonal polynomial into addition/subtraction sequences")
    p.add_argument("input", help='JSON {"s_k": [...], "gamma": g, "psi": [...]}')
    p.add_argument("--out")
    p.set_defaults(func=cmd_engineer)

    p = sub.add_parser("tomo", help="maximum-likelihood reconstruction of a dataset CSV")
    p.add_argument("data")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=tomography.DEFAULT_DIM)
    p.add_argument("--bins", type=int, default=201)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--max-iter", type=int, default=tomography.DEFAULT_MAX_ITER)
    p.add_argument("--tol", type=float, default=tomography.DEFAULT_TOL)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_tomo)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (PacsError, ValueError, KeyError, OSError, RuntimeError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
