"""Closed-form properties of photon-added coherent states ``N a^dag^n |alpha>``.

All formulas reduce to generalized Laguerre polynomials evaluated at
``-|alpha|^2``, where every term of the finite sum is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import TruncationTooSmall, UndefinedFano, UndefinedGain


@dataclass(frozen=True)
class PacsSpec:
    alpha: complex
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"number of added photons must be >= 0, got {self.n}")

    @property
    def amplitude(self) -> float:
        return abs(self.alpha)


@dataclass(frozen=True)
class QuadStats:
    """Quadrature moments in vacuum-variance-1 units, axis along ``arg <a>``."""

    Vx: float
    Vp: float
    cov_xp: float
    mean_x: float
    mean_p: float


def _lag(n: int, k: int, alpha: complex) -> float:
    return fock.laguerre(n, k, -abs(alpha) ** 2)


# ---------------------------------------------------------------------------
# state construction


def core_superposition(alpha: complex, n: int) -> np.ndarray:
    """Unnormalized Fock superposition ``sum_m n! a*^(n-m) / (sqrt(m!) (n-m)!) |m>``.

    Displacing it by ``D(alpha)`` gives ``a^dag^n |alpha>``.
    """
    m = np.arange(n + 1)
    coeffs = np.array(
        [math.factorial(n) / (math.sqrt(math.factorial(k)) * math.factorial(n - k)) for k in m],
        dtype=complex,
    )
    return coeffs * np.conj(alpha) ** (n - m)


def pacs_state(spec: PacsSpec, dim: int | None = None, method: str = "creation",
               tol: float = fock.TAIL_TOL) -> np.ndarray:
    """Normalized ``|alpha, n>`` truncated to ``dim`` levels.

    ``method="creation"`` applies ``a^dag^n`` to the coherent amplitudes;
    ``method="displaced"`` displaces :func:`core_superposition`. Both produce
    exact truncated amplitudes and are cross-checked in the test-suite.
    """
    alpha, n = spec.alpha, spec.n
    if dim is None:
        dim = fock.default_dim(alpha, n)
    if dim <= n:
        raise TruncationTooSmall(f"D={dim} cannot hold |{n}>")
    norm = normalization(spec)
    if method == "creation":
        coh = fock.coherent_state(alpha, dim, tol=1.0)
        m = np.arange(n, dim)
        lift = np.exp(0.5 * (fock.log_factorial(m) - fock.log_factorial(m - n)))
        psi = np.zeros(dim, dtype=complex)
        psi[n:] = lift * coh[: dim - n]
    elif method == "displaced":
        disp = fock.displacement(alpha, dim, tol=None)
        psi = disp[:, : n + 1] @ core_superposition(alpha, n)
    else:
        raise ValueError(f"unknown construction method {method!r}")
    psi = norm * psi
    tail = fock.tail_mass(psi)
    if tail > tol:
        raise TruncationTooSmall(f"PACS(alpha={alpha}, n={n}): tail mass {tail:.2e} at D={dim}")
    return psi


# ---------------------------------------------------------------------------
# moments


def antinormal_moment(m: int, n: int, alpha: complex) -> complex:
    """``<alpha| a^m a^dag^n |alpha>`` in closed form."""
    if m < 0 or n < 0:
        raise ValueError("moment orders must be non-negative")
    if m < n:
        return complex(np.conj(antinormal_moment(n, m, alpha)))
    return complex(alpha ** (m - n) * math.factorial(n) * _lag(n, m - n, alpha))


def normalization(spec: PacsSpec) -> float:
    """``N_n(alpha) = [n! L_n(-|alpha|^2)]^{-1/2}``."""
    return 1.0 / math.sqrt(math.factorial(spec.n) * _lag(spec.n, 0, spec.alpha))


def mean_photon_number(spec: PacsSpec) -> float:
    n = spec.n
    return (n + 1) * _lag(n + 1, 0, spec.alpha) / _lag(n, 0, spec.alpha) - 1.0


def gain(spec: PacsSpec) -> float:
    """Amplitude gain ``<a> / alpha = L_n^{(1)}(-|alpha|^2) / L_n(-|alpha|^2)``."""
    if spec.alpha == 0:
        raise UndefinedGain("gain is undefined for a vacuum seed (alpha = 0)")
    return _lag(spec.n, 1, spec.alpha) / _lag(spec.n, 0, spec.alpha)


def gain_limit_zero(n: int) -> float:
    """``lim_{alpha -> 0} g_n(alpha) = L_n^{(1)}(0) / L_n(0) = n + 1``."""
    return fock.laguerre(n, 1, 0.0) / fock.laguerre(n, 0, 0.0)


def quad_stats(spec: PacsSpec) -> QuadStats:
    """Quadrature means and variances along/orthogonal to ``arg alpha``.

    Depends on ``|alpha|`` only; the covariance vanishes identically.
    """
    n, a2 = spec.n, abs(spec.alpha) ** 2
    l0 = _lag(n, 0, spec.alpha)
    l1 = _lag(n, 1, spec.alpha)
    l2 = _lag(n, 2, spec.alpha)
    lp = _lag(n + 1, 0, spec.alpha)
    vx = 2.0 / l0 * (a2 * l2 + (n + 1) * lp) - 1.0 - 4.0 * a2 * (l1 / l0) ** 2
    vp = 2.0 / l0 * ((n + 1) * lp - a2 * l2) - 1.0
    return QuadStats(Vx=vx, Vp=vp, cov_xp=0.0, mean_x=2.0 * math.sqrt(a2) * l1 / l0, mean_p=0.0)


def deterministic_amp_variance(g: float) -> float:
    """Output variance ``2 g^2 - 1`` of a phase-insensitive amplifier fed a coherent state."""
    if g < 1:
        raise ValueError(f"amplifier gain must be >= 1, got {g}")
    return 2.0 * g * g - 1.0


def fano(spec: PacsSpec) -> float:
    """Photon-number Fano factor ``Var(n) / <n>``."""
    n = spec.n
    ln, ln1, ln2 = (_lag(n + j, 0, spec.alpha) for j in range(3))
    denom = (n + 1) * ln1 - ln
    if denom <= 0.0:
        raise UndefinedFano("Fano factor is undefined for the vacuum (<n> = 0)")
    return ((n + 2) * (n + 1) * ln2 - 2 * ln) / denom - (n + 1) * ln1 / ln - 2.0


# ---------------------------------------------------------------------------
# coherent-state proximity


def coherent_fidelity(spec: PacsSpec, beta: complex) -> float:
    """``|<beta|alpha, n>|^2 = |beta|^(2n) e^{-|alpha-beta|^2} / (n! L_n(-|alpha|^2))``."""
    n = spec.n
    if n == 0:
        return math.exp(-abs(spec.alpha - beta) ** 2)
    if beta == 0:
        return 0.0
    log_f = (2 * n * math.log(abs(beta)) - abs(spec.alpha - beta) ** 2
             - math.lgamma(n + 1) - math.log(_lag(n, 0, spec.alpha)))
    return math.exp(log_f)


def beta_opt(spec: PacsSpec) -> complex:
    """Coherent amplitude maximizing :func:`coherent_fidelity`.

    For ``alpha = 0`` the phase is undefined and ``sqrt(n)`` is returned.
    """
    a = abs(spec.alpha)
    if a == 0:
        return complex(math.sqrt(spec.n))
    return spec.alpha / 2.0 * (1.0 + math.sqrt(1.0 + 4.0 * spec.n / a**2))
