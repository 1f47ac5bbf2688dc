"""Maximum-likelihood state reconstruction from binned homodyne data (RrhoR iteration)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import homodyne
from .errors import BadBinning, DimMismatch, PhaseNotOnGrid

log = logging.getLogger(__name__)

DEFAULT_DIM = 15
DEFAULT_MAX_ITER = 2000
DEFAULT_TOL = 1e-9
PROB_FLOOR = 1e-12
# allowed numerical decrease of the per-sample log-likelihood
LOGLIK_SLACK = 1e-12


@dataclass
class BinnedData:
    phases: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray  # (n_phases, n_bins)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class MaxLikReport:
    iterations: int
    loglik: float  # mean log-likelihood per sample
    stop_reason: str  # "converged" | "max_iter"
    trace: list[float] = field(default_factory=list, repr=False)
    floored_bins: int = 0
    diluted_steps: int = 0
    max_hermiticity_defect: float = 0.0
    max_trace_defect: float = 0.0
    min_eigenvalue: float = 0.0

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "loglik": self.loglik,
            "stop_reason": self.stop_reason,
            "floored_bins": self.floored_bins,
            "diluted_steps": self.diluted_steps,
            "max_hermiticity_defect": self.max_hermiticity_defect,
            "max_trace_defect": self.max_trace_defect,
            "min_eigenvalue": self.min_eigenvalue,
        }


def bin_records(data: homodyne.QuadratureData, phases, bin_edges, atol: float = 1e-9) -> BinnedData:
    """Histogram records per grid phase; every record must sit on the phase grid."""
    phases = np.asarray(phases, dtype=float)
    edges = np.asarray(bin_edges, dtype=float)
    counts = np.zeros((phases.size, edges.size - 1), dtype=np.int64)
    if len(data) == 0:
        return BinnedData(phases, edges, counts)
    dist = np.abs(data.theta[:, None] - phases[None, :])
    which = np.argmin(dist, axis=1)
    off = dist[np.arange(which.size), which]
    if np.any(off > atol):
        bad = data.theta[np.argmax(off)]
        raise PhaseNotOnGrid(f"record phase {bad!r} is not within {atol} of any grid phase")
    if np.any(data.x < edges[0]) or np.any(data.x >= edges[-1]):
        raise BadBinning("records fall outside the binning range; add overflow bins")
    b = np.searchsorted(edges, data.x, side="right") - 1
    np.add.at(counts, (which, b), 1)
    return BinnedData(phases, edges, counts)


def _invariant_defects(rho: np.ndarray) -> tuple[float, float, float]:
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = float(abs(np.trace(rho).real - 1.0))
    low = float(np.linalg.eigvalsh(rho).min())
    return herm, tr, low


def maxlik_reconstruct(data: BinnedData, povms: list[homodyne.HomodynePovm], dim: int = DEFAULT_DIM,
                       max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL,
                       dilution: float | None = None, floor: float = PROB_FLOOR,
                       invariant_tol: float = 1e-9) -> tuple[np.ndarray, MaxLikReport]:
    """Iterate ``rho <- N[R rho R]`` with ``R = sum_j (f_j / p_j) Pi_j``.

    ``dilution=eps`` replaces the step by ``N[(1 + eps R) rho (1 + eps R)]``.
    If a plain step would lower the likelihood, diluted steps with halving
    ``eps`` are tried instead, so the trace of log-likelihoods never
    decreases. Stops when the largest relative change of a bin probability
    drops below ``tol``.
    """
    if len(povms) != data.phases.size:
        raise ValueError("need one POVM per phase")
    if data.phases.size < 2:
        raise ValueError("maximum-likelihood tomography needs at least two phases")
    for povm in povms:
        if povm.dim != dim:
            raise DimMismatch(f"POVM dimension {povm.dim} differs from reconstruction dimension {dim}")
        if povm.n_bins != data.counts.shape[1]:
            raise BadBinning("POVM binning does not match the data binning")

    elems = np.concatenate([p.elements for p in povms], axis=0)
    counts = data.counts.reshape(-1)
    keep = counts > 0
    elems = elems[keep]
    freq = counts[keep] / counts.sum()
    # tr(rho Pi) = sum_ab rho_ab Pi_ba
    elems_t = np.ascontiguousarray(np.swapaxes(elems, 1, 2)).reshape(elems.shape[0], -1)

    def probs(rho):
        p = (elems_t @ rho.reshape(-1)).real
        return np.maximum(p, floor)

    def loglik(p):
        return float(freq @ np.log(p))

    eye = np.eye(dim)
    rho = eye.astype(complex) / dim
    p = probs(rho)
    ll = loglik(p)
    report = MaxLikReport(0, ll, "max_iter", trace=[ll])

    def step(rho, r_op, eps):
        if eps is None:
            new = r_op @ rho @ r_op
        else:
            g = eye + eps * r_op
            new = g @ rho @ g
        new = 0.5 * (new + new.conj().T)
        return new / np.trace(new).real

    for it in range(1, max_iter + 1):
        r_op = np.tensordot(freq / p, elems, axes=1)
        cand = step(rho, r_op, dilution)
        p_new = probs(cand)
        ll_new = loglik(p_new)
        if ll_new < ll - LOGLIK_SLACK:
            eps = 0.5 if dilution is None else dilution / 2
            while eps > 1e-8:
                cand = step(rho, r_op, eps)
                p_new = probs(cand)
                ll_new = loglik(p_new)
                if ll_new >= ll - LOGLIK_SLACK:
                    break
                eps /= 2
            else:
                report.stop_reason = "converged"
                report.iterations = it - 1
                break
            report.diluted_steps += 1
        change = float(np.max(np.abs(p_new - p) / p))
        rho, p, ll = cand, p_new, ll_new
        report.trace.append(ll)
        report.iterations = it

        herm, trd, low = _invariant_defects(rho)
        report.max_hermiticity_defect = max(report.max_hermiticity_defect, herm)
        report.max_trace_defect = max(report.max_trace_defect, trd)
        report.min_eigenvalue = min(report.min_eigenvalue, low)
        if herm > invariant_tol or trd > invariant_tol or low < -invariant_tol:
            raise RuntimeError(f"iterate {it} left the state space (herm {herm:.1e}, trace {trd:.1e}, eig {low:.1e})")
        if change < tol:
            report.stop_reason = "converged"
            break

    report.loglik = ll
    report.floored_bins = int(np.count_nonzero((elems_t @ rho.reshape(-1)).real < floor))
    if report.floored_bins:
        log.warning("%d occupied bins have probability below the floor %.0e", report.floored_bins, floor)
    return rho, report


def reconstruct(data: homodyne.QuadratureData, eta: float, dim: int = DEFAULT_DIM, phases=None,
                bin_edges=None, **kwargs) -> tuple[np.ndarray, MaxLikReport]:
    """Bin a dataset and reconstruct it with loss-compensated POVMs."""
    phases = np.unique(data.theta) if phases is None else np.asarray(phases)
    edges = homodyne.default_bin_edges() if bin_edges is None else np.asarray(bin_edges)
    binned = bin_records(data, phases, edges)
    povms = homodyne.build_povm_set(phases, edges, eta, dim)
    return maxlik_reconstruct(binned, povms, dim, **kwargs)


def loss_sweep_fidelity(data: BinnedData, true_state: np.ndarray, eta_grid, dim: int = DEFAULT_DIM,
                        **kwargs) -> tuple[np.ndarray, float]:
    """Fidelity with ``true_state`` of reconstructions assuming each efficiency in ``eta_grid``."""
    eta_grid = np.atleast_1d(np.asarray(eta_grid, dtype=float))
    target = np.zeros(dim, dtype=complex)
    k = min(dim, true_state.size)
    target[:k] = true_state[:k]
    fids = np.empty(eta_grid.size)
    for i, eta in enumerate(eta_grid):
        povms = homodyne.build_povm_set(data.phases, data.bin_edges, eta, dim)
        rho, _ = maxlik_reconstruct(data, povms, dim, **kwargs)
        fids[i] = float(np.vdot(target, rho @ target).real)
    return fids, float(eta_grid[int(np.argmax(fids))])
