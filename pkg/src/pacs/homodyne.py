"""Lossy balanced-homodyne measurement: quadrature densities, binned POVMs, sampling.

The local-oscillator phase ``theta`` selects ``x_theta = a e^{-i theta} +
a^dag e^{i theta}``, so ``<n|x_theta> = e^{i n theta} psi_n(x)`` with
``psi_n`` the Hermite functions of unit vacuum variance.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import BadBinning

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class QuadratureRecord:
    theta: float
    x: float


@dataclass
class QuadratureData:
    """A homodyne dataset stored column-wise: one ``(theta, x)`` pair per sample."""

    theta: np.ndarray
    x: np.ndarray
    herald_n: np.ndarray | None = None

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        if self.theta.shape != self.x.shape:
            raise ValueError("theta and x columns must have equal length")
        if self.herald_n is not None:
            self.herald_n = np.asarray(self.herald_n, dtype=int)

    def __len__(self) -> int:
        return self.x.size

    def records(self):
        return [QuadratureRecord(float(t), float(v)) for t, v in zip(self.theta, self.x)]


@dataclass
class HomodynePovm:
    dim: int
    theta: float
    bin_edges: np.ndarray
    elements: np.ndarray = field(repr=False)  # (B, D, D)
    eta: float = 1.0

    @property
    def n_bins(self) -> int:
        return self.elements.shape[0]


# ---------------------------------------------------------------------------
# wavefunctions and densities


def hermite_functions(dim: int, x) -> np.ndarray:
    """``psi_n(x)`` for ``n < dim``, shape ``(dim,) + x.shape``.

    Normalized recurrence ``psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)``,
    which avoids evaluating large Hermite polynomials.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((dim,) + x.shape)
    out[0] = (2.0 * np.pi) ** -0.25 * np.exp(-0.25 * x * x)
    if dim > 1:
        out[1] = x * out[0]
    for n in range(1, dim - 1):
        out[n + 1] = (x * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def quad_wavefunction(n: int, x):
    """``<x|n> = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt 2) e^{-x^2/4}``."""
    return hermite_functions(n + 1, x)[n]


def _rotated(rho: np.ndarray, theta: float) -> np.ndarray:
    n = np.arange(rho.shape[0])
    return rho * np.exp(-1j * theta * (n[:, None] - n[None, :]))


def quad_pdf(rho: np.ndarray, theta: float, x, eta: float = 1.0):
    """Probability density of outcome ``x`` when measuring ``x_theta`` with efficiency ``eta``."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"homodyne efficiency must lie in (0, 1], got {eta}")
    rho = fock.loss_channel(rho, eta) if eta != 1.0 else np.asarray(rho)
    x = np.asarray(x, dtype=float)
    psi = hermite_functions(rho.shape[0], x.ravel())
    r = _rotated(rho, theta)
    vals = np.einsum("mk,mn,nk->k", psi, r, psi).real
    return vals.reshape(x.shape) if x.ndim else float(vals[0])


def _support_half_width(dim: int) -> float:
    return 2.0 * math.sqrt(dim) + 20.0


def cumulative_overlaps(dim: int, points) -> np.ndarray:
    """``M(c)_{mn} = int_{-inf}^{c} psi_m psi_n dx`` for each point ``c``.

    Gauss-Legendre on pieces of width <= 0.5 from ``-L`` upward, with
    ``M(-inf) = 0`` and ``M(+inf) = 1`` exactly.
    """
    points = np.asarray(points, dtype=float)
    half = _support_half_width(dim)
    order = np.argsort(points)
    out = np.zeros((points.size, dim, dim))
    acc = np.zeros((dim, dim))
    left = -half
    for idx in order:
        c = points[idx]
        if c <= -half:
            out[idx] = 0.0
            continue
        if c >= half:
            out[idx] = np.eye(dim)
            continue
        if c > left:
            acc = acc + _integrate_outer(dim, left, c)
            left = c
        out[idx] = acc
    return out


def _integrate_outer(dim: int, lo: float, hi: float) -> np.ndarray:
    pieces = max(1, int(math.ceil((hi - lo) / 0.5)))
    edges = np.linspace(lo, hi, pieces + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    xs = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    ws = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    psi = hermite_functions(dim, xs)
    return (psi * ws) @ psi.T


def quad_cdf(rho: np.ndarray, theta: float, x, eta: float = 1.0):
    """Cumulative distribution of the (lossy) quadrature outcome."""
    rho = fock.loss_channel(rho, eta) if eta != 1.0 else np.asarray(rho)
    x = np.asarray(x, dtype=float)
    mats = cumulative_overlaps(rho.shape[0], x.ravel())
    r = _rotated(rho, theta)
    vals = np.einsum("kmn,nm->k", mats, r).real
    return vals.reshape(x.shape) if x.ndim else float(vals[0])


# ---------------------------------------------------------------------------
# POVM


def default_bin_edges(n_inner: int = 201, x_max: float = 10.0) -> np.ndarray:
    """Uniform inner bins on ``[-x_max, x_max]`` plus two semi-infinite overflow bins."""
    return np.concatenate([[-np.inf], np.linspace(-x_max, x_max, n_inner + 1), [np.inf]])


def default_phases(count: int = 12) -> np.ndarray:
    return np.arange(count) * np.pi / count


def _check_edges(bin_edges) -> np.ndarray:
    edges = np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise BadBinning("need at least two bin edges")
    if np.any(np.isnan(edges)) or np.any(np.diff(edges) <= 0):
        raise BadBinning("bin edges must be strictly increasing")
    return edges


def _lossy_bin_integrals(edges: np.ndarray, eta: float, dim: int) -> np.ndarray:
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"homodyne efficiency must lie in (0, 1], got {eta}")
    cum = cumulative_overlaps(dim, edges)
    cum[edges == -np.inf] = 0.0
    cum[edges == np.inf] = np.eye(dim)
    # pure loss shifts both Fock indices equally, so it commutes with the
    # phase factor applied afterwards
    return fock.loss_adjoint(np.diff(cum, axis=0), eta)


def _phase_factor(theta: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    return np.exp(1j * theta * (n[:, None] - n[None, :]))


def build_povm(theta: float, bin_edges, eta: float, dim: int) -> HomodynePovm:
    """Binned quadrature POVM at phase ``theta`` with inefficiency folded in.

    Element ``b`` is the adjoint loss map applied to ``int_bin |x_theta><x_theta| dx``.
    """
    edges = _check_edges(bin_edges)
    base = _lossy_bin_integrals(edges, eta, dim)
    return HomodynePovm(dim, float(theta), edges, base * _phase_factor(theta, dim), eta)


def build_povm_set(phases, bin_edges, eta: float, dim: int) -> list[HomodynePovm]:
    """:func:`build_povm` for several phases sharing one set of bin integrals."""
    edges = _check_edges(bin_edges)
    base = _lossy_bin_integrals(edges, eta, dim)
    return [HomodynePovm(dim, float(t), edges, base * _phase_factor(t, dim), eta) for t in phases]


# ---------------------------------------------------------------------------
# sampling


def _inverse_cdf_table(rho: np.ndarray, theta: float, cell: float = 0.01):
    half = _support_half_width(rho.shape[0]) - 10.0
    edges = np.arange(-half, half + cell, cell)
    mid = 0.5 * (edges[1:] + edges[:-1])
    h = 0.5 * cell
    xs = (mid[:, None] + h * _GL_NODES[None, :]).ravel()
    pdf = quad_pdf(rho, theta, xs).reshape(mid.size, -1)
    mass = np.clip(pdf @ (h * _GL_WEIGHTS), 0.0, None)
    cdf = np.concatenate([[0.0], np.cumsum(mass)])
    cdf /= cdf[-1]
    return edges, cdf


def sample_dataset(rho: np.ndarray, phases, counts, eta: float = 1.0,
                   seed: int | Sequence[int] = 0) -> QuadratureData:
    """Draw homodyne samples phase by phase by inverse-CDF sampling.

    Phase ``i`` uses child ``i`` spawned from ``SeedSequence(seed)``, so a
    fixed seed gives an identical dataset. ``seed`` may be a sequence of
    ints to address a substream.
    """
    phases = np.asarray(phases, dtype=float)
    counts = np.broadcast_to(np.asarray(counts, dtype=int), phases.shape)
    if np.any(counts <= 0):
        raise ValueError("every phase needs a positive sample count")
    lossy = fock.loss_channel(rho, eta) if eta != 1.0 else np.asarray(rho, dtype=complex)
    streams = np.random.SeedSequence(seed).spawn(phases.size)
    thetas, xs = [], []
    for theta, count, child in zip(phases, counts, streams):
        rng = np.random.default_rng(child)
        edges, cdf = _inverse_cdf_table(lossy, theta)
        u = rng.random(count)
        xs.append(np.interp(u, cdf, edges))
        thetas.append(np.full(count, theta))
    return QuadratureData(np.concatenate(thetas), np.concatenate(xs))
