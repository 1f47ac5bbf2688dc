"""Observables of reconstructed or simulated density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .analytics import QuadStats
from .errors import DimMismatch, UndefinedGain

GAIN_EPS = 1e-12


@dataclass
class WignerGrid:
    """``values[i, j] = W(x_axis[i], p_axis[j])``."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    @property
    def normalization(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.p_axis, axis=1), self.x_axis))

    @property
    def minimum(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class PhotonStats:
    probabilities: np.ndarray
    mean: float
    variance: float
    fano: float | None  # None for a zero-mean state


def default_axis() -> np.ndarray:
    return np.linspace(-6.0, 6.0, 121)


def _as_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        return fock.dm(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimMismatch(f"density matrix must be square, got shape {rho.shape}")
    return rho


# ---------------------------------------------------------------------------
# Wigner function


def parity_kernel(dim: int, gamma) -> np.ndarray:
    """Lower triangle of ``<m|D(gamma) P D(gamma)^dag|n>``, ``m >= n``, for each ``gamma``.

    ``P = (-1)^n`` is the parity. For ``m = n + k`` the element is
    ``(-1)^n sqrt(n!/m!) (2 gamma)^k e^{-2|gamma|^2} L_n^{(k)}(4|gamma|^2)``.
    Returned with shape ``(dim, dim) + gamma.shape``; the upper triangle is zero.
    """
    gamma = np.asarray(gamma, dtype=complex)
    u = 4.0 * np.abs(gamma) ** 2
    damp = np.exp(-0.5 * u)
    out = np.zeros((dim, dim) + gamma.shape, dtype=complex)
    logf = fock.log_factorial(np.arange(dim))
    for k in range(dim):
        size = dim - k
        lag = np.empty((size,) + gamma.shape)
        lag[0] = 1.0
        if size > 1:
            lag[1] = 1.0 + k - u
        for n in range(1, size - 1):
            lag[n + 1] = ((2 * n + 1 + k - u) * lag[n] - (n + k) * lag[n - 1]) / (n + 1)
        shift = (2.0 * gamma) ** k * damp
        for n in range(size):
            coeff = (-1) ** n * math.exp(0.5 * (logf[n] - logf[n + k]))
            out[n + k, n] = coeff * shift * lag[n]
    return out


def wigner(rho, x_axis=None, p_axis=None) -> WignerGrid:
    """Wigner function ``W(x, p) = Tr[rho D(gamma) P D(gamma)^dag] / (2 pi)``, ``gamma = (x + ip)/2``.

    Normalized to unit integral over ``dx dp``; vacuum peaks at ``1/(2 pi)``.
    The matrix elements are exact for the truncated ``rho``, so no extra
    cutoff enters.
    """
    rho = _as_density(rho)
    x_axis = default_axis() if x_axis is None else np.asarray(x_axis, dtype=float)
    p_axis = default_axis() if p_axis is None else np.asarray(p_axis, dtype=float)
    gamma = 0.5 * (x_axis[:, None] + 1j * p_axis[None, :])
    kern = parity_kernel(rho.shape[0], gamma)
    # Tr[rho K] = sum_mn rho_nm K_mn with K Hermitian
    diag = np.einsum("n,nn...->...", np.diag(rho), kern).real
    lower = np.tril(np.ones(rho.shape, dtype=bool), -1)
    off = np.einsum("mn,mn...->...", np.where(lower, rho.T, 0.0), kern)
    values = (diag + 2.0 * off.real) / (2.0 * np.pi)
    return WignerGrid(x_axis, p_axis, values)


def wigner_point(rho, x: float, p: float) -> float:
    return float(wigner(rho, np.array([x]), np.array([p])).values[0, 0])


# ---------------------------------------------------------------------------
# scalar figures of merit


def fidelity(rho, target: np.ndarray) -> float:
    """``<target|rho|target>``; the shorter of the two is zero-padded."""
    rho = _as_density(rho)
    target = np.asarray(target, dtype=complex)
    if target.ndim != 1:
        raise DimMismatch(f"target must be a state vector, got shape {target.shape}")
    dim = max(rho.shape[0], target.size)
    rho, target = fock.embed(rho, dim), fock.embed(target, dim)
    return float(np.vdot(target, rho @ target).real)


def purity(rho) -> float:
    rho = _as_density(rho)
    return float(np.vdot(rho, rho).real)


def mean_amplitude(rho) -> complex:
    """``Tr[rho a]``."""
    rho = _as_density(rho)
    n = np.arange(1, rho.shape[0])
    return complex(np.sum(np.sqrt(n) * np.diagonal(rho, offset=-1)))


def experimental_gain(rho_out, rho_in) -> complex:
    """``Tr[rho_out a] / Tr[rho_in a]``; a common loss factor cancels."""
    den = mean_amplitude(rho_in)
    if abs(den) < GAIN_EPS:
        raise UndefinedGain("input state has vanishing mean amplitude")
    return mean_amplitude(rho_out) / den


def displaced_localization(rho, alpha: complex, n: int) -> float:
    """Weight of ``D(-alpha) rho D(-alpha)^dag`` outside ``span{|0>..|n>}``.

    Only rows ``0..n`` of the displacement are needed and those are exact,
    so the result carries no truncation error.
    """
    rho = _as_density(rho)
    dim = max(rho.shape[0], n + 1)
    rows = fock.displacement(-alpha, dim, tol=None)[: n + 1, : rho.shape[0]]
    kept = np.einsum("ja,ab,jb->", rows, rho, rows.conj()).real
    return float(max(0.0, np.trace(rho).real - kept))


def photon_stats(rho) -> PhotonStats:
    """Photon-number distribution and moments.

    ``fano`` is ``None`` when the mean vanishes; a Fock state gives ``0``.
    """
    rho = _as_density(rho)
    p = np.clip(np.diagonal(rho).real, 0.0, None)
    n = np.arange(p.size)
    mean = float(p @ n)
    var = float(p @ n**2 - mean**2)
    fano = var / mean if mean > GAIN_EPS else None
    return PhotonStats(p, mean, var, fano)


def quadrature_stats(rho) -> QuadStats:
    """Quadrature moments with the ``x`` axis along ``arg Tr[rho a]``."""
    rho = _as_density(rho)
    a, _ = fock.ladder_ops(max(rho.shape[0], 2))
    rho = fock.embed(rho, a.shape[0])
    m1 = np.trace(rho @ a)
    m2 = np.trace(rho @ a @ a)
    nbar = float(np.diagonal(rho).real @ np.arange(rho.shape[0]))
    phi = float(np.angle(m1)) if abs(m1) > GAIN_EPS else 0.0
    z = m2 * np.exp(-2j * phi)
    mean_x = 2.0 * abs(m1)
    vx = 2.0 * z.real + 2.0 * nbar + 1.0 - mean_x**2
    vp = -2.0 * z.real + 2.0 * nbar + 1.0
    return QuadStats(Vx=float(vx), Vp=float(vp), cov_xp=float(2.0 * z.imag), mean_x=float(mean_x), mean_p=0.0)
