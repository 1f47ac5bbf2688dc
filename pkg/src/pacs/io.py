"""File formats: density-matrix JSON, quadrature-dataset CSV, Wigner-grid CSV."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import WignerGrid
from .homodyne import QuadratureData


def density_to_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": int(rho.shape[0]), "re": rho.real.tolist(), "im": rho.imag.tolist()}


def density_from_dict(obj: dict) -> np.ndarray:
    dim = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(f"density matrix JSON: expected {dim}x{dim} arrays")
    return re + 1j * im


def write_density(path, rho: np.ndarray) -> None:
    Path(path).write_text(json.dumps(density_to_dict(rho)) + "\n", encoding="utf-8")


def read_density(path) -> np.ndarray:
    return density_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_dataset(path, data: QuadratureData) -> None:
    """CSV with header ``theta,x`` (plus ``herald_n`` when present); floats via ``repr``."""
    header = ["theta", "x"] + (["herald_n"] if data.herald_n is not None else [])
    lines = [",".join(header)]
    if data.herald_n is None:
        lines += [f"{t!r},{x!r}" for t, x in zip(data.theta.tolist(), data.x.tolist())]
    else:
        lines += [f"{t!r},{x!r},{h}" for t, x, h in zip(data.theta.tolist(), data.x.tolist(), data.herald_n.tolist())]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path) -> QuadratureData:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["theta", "x"] or len(header) > 3 or (len(header) == 3 and header[2] != "herald_n"):
            raise ValueError(f"unexpected dataset header {header}")
        rows = [row for row in reader if row]
    theta = np.array([float(r[0]) for r in rows])
    x = np.array([float(r[1]) for r in rows])
    herald = np.array([int(r[2]) for r in rows]) if len(header) == 3 else None
    return QuadratureData(theta, x, herald)


def write_wigner(path, grid: WignerGrid) -> None:
    """Long-format CSV ``x,p,W``, ``p`` varying fastest."""
    lines = ["x,p,W"]
    for i, x in enumerate(grid.x_axis.tolist()):
        for j, p in enumerate(grid.p_axis.tolist()):
            lines.append(f"{x!r},{p!r},{float(grid.values[i, j])!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_wigner(path) -> WignerGrid:
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(table[:, 0])
    ps = np.unique(table[:, 1])
    return WignerGrid(xs, ps, table[:, 2].reshape(xs.size, ps.size))


def write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
