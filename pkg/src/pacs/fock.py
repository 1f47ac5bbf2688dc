"""Truncated single-mode Fock-space toolbox.

States are plain numpy arrays: a pure state is a complex vector of length
``D`` (amplitudes of ``|0>..|D-1>``), a mixed state is a ``D x D`` complex
density matrix. Quadratures follow ``x = a + a^dag`` so the vacuum variance
is 1 everywhere in the package.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc, gammaln

from .errors import TruncationTooSmall

TAIL_TOL = 1e-10
UNITARY_TOL = 1e-8


# ---------------------------------------------------------------------------
# special functions


def laguerre(n: int, k: int, x: float) -> float:
    """Generalized Laguerre polynomial ``L_n^{(k)}(x)``.

    Evaluated from the finite sum ``sum_j C(n+k, n-j) (-x)^j / j!`` in exact
    rational arithmetic and rounded once at the end, so there is neither
    cancellation for ``x > 0`` nor factorial overflow for large ``n``.
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    if k < -n:
        raise ValueError(f"order k={k} must satisfy k >= -n for n={n}")
    xf = Fraction(x)
    total = Fraction(0)
    term_x = Fraction(1)  # (-x)^j / j!
    for j in range(n + 1):
        total += math.comb(n + k, n - j) * term_x
        term_x = term_x * (-xf) / (j + 1)
    try:
        return float(total)
    except OverflowError:
        return math.copysign(math.inf, total)


def laguerre_table(nmax: int, orders, x: float) -> np.ndarray:
    """Float table ``T[n, i] = L_n^{(orders[i])}(x)`` for ``n = 0..nmax``.

    Forward three-term recurrence, vectorized over the orders. This is the
    fast path used to assemble operator matrices.
    """
    orders = np.asarray(orders, dtype=float)
    table = np.empty((nmax + 1, orders.size))
    table[0] = 1.0
    if nmax >= 1:
        table[1] = 1.0 + orders - x
    for n in range(1, nmax):
        table[n + 1] = ((2 * n + 1 + orders - x) * table[n] - (n + orders) * table[n - 1]) / (n + 1)
    return table


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n`` via the three-term recurrence."""
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return h_prev
    h = 2 * x * h_prev
    for m in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * m * h_prev
    return h


def log_factorial(n):
    return gammaln(np.asarray(n, dtype=float) + 1.0)


# ---------------------------------------------------------------------------
# truncation


def default_dim(alpha: complex = 0.0, n_add: int = 0) -> int:
    """Cutoff ``ceil(mu + 8 sqrt(mu) + 12)`` with ``mu = |alpha|^2 + n_add``."""
    mu = abs(alpha) ** 2 + n_add
    return int(math.ceil(mu + 8.0 * math.sqrt(mu) + 12.0))


def coherent_tail_mass(alpha: complex, dim: int) -> float:
    """Probability that a coherent state has ``>= dim`` photons."""
    mu = abs(alpha) ** 2
    if mu == 0.0:
        return 0.0
    # regularized lower gamma P(dim, mu) = Pr[Poisson(mu) >= dim]
    return float(gammainc(dim, mu))


def tail_mass(psi: np.ndarray) -> float:
    """Norm deficit of a truncated vector that should be normalized."""
    return float(max(0.0, 1.0 - np.vdot(psi, psi).real))


def _require_unitary_block(op: np.ndarray, name: str, tol: float, half: int | None = None) -> None:
    if half is None:
        half = op.shape[0] // 2
    half = max(1, half)
    block = op[:, :half]
    err = np.max(np.abs(block.conj().T @ block - np.eye(half)))
    if err > tol:
        raise TruncationTooSmall(
            f"{name}: unitarity defect {err:.2e} on lowest {half} levels exceeds {tol:.0e}; "
            f"increase the cutoff D={op.shape[0]}"
        )


# ---------------------------------------------------------------------------
# states and operators


def fock_state(n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise TruncationTooSmall(f"|{n}> does not fit into D={dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_state(alpha: complex, dim: int, tol: float = TAIL_TOL) -> np.ndarray:
    """Truncated ``|alpha>`` with amplitudes ``exp(-|a|^2/2) a^n / sqrt(n!)``."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    tail = coherent_tail_mass(alpha, dim)
    if tail > tol:
        raise TruncationTooSmall(f"coherent state alpha={alpha}: tail mass {tail:.2e} > {tol:.0e} at D={dim}")
    n = np.arange(dim)
    if alpha == 0:
        return fock_state(0, dim)
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_factorial(n)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def ladder_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices ``(a, a^dag)`` truncated to ``dim``."""
    if dim < 2:
        raise ValueError("ladder operators need dim >= 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    return a, a.conj().T.copy()


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def displacement(alpha: complex, dim: int, tol: float | None = UNITARY_TOL) -> np.ndarray:
    """Matrix elements ``<m|exp(alpha a^dag - alpha* a)|n>`` for ``m, n < dim``.

    Uses the closed form ``sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2}
    L_n^{(m-n)}(|alpha|^2)`` (``m >= n``; the other triangle follows from
    ``D(alpha)^dag = D(-alpha)``). Every returned element is exact, so
    truncation only removes rows and columns. ``tol=None`` skips the
    unitarity check on the lower half of the space (callers acting on
    low-support vectors check their own tail mass instead).
    """
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    x = abs(alpha) ** 2
    phase = np.exp(1j * np.angle(alpha))
    offsets = np.arange(dim)
    lag = laguerre_table(dim - 1, offsets, x)  # lag[n, k] = L_n^{(k)}(x)
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        n = np.arange(dim - k)
        m = n + k
        mag = np.exp(0.5 * (log_factorial(n) - log_factorial(m)) + k * 0.5 * math.log(x) - 0.5 * x)
        lower = mag * lag[n, k] * phase**k
        out[m, n] = lower
        if k:
            out[n, m] = lower.conj() * (-1) ** k
    if tol is not None:
        _require_unitary_block(out, f"displacement(alpha={alpha})", tol)
    return out


def squeeze(r: float, theta: float, dim: int, tol: float | None = UNITARY_TOL) -> np.ndarray:
    """Squeeze operator ``exp[(e^{-i theta} a^2 - e^{i theta} a^dag^2) r / 2]``.

    The sign convention matches the Hermite-polynomial expansion of a
    squeezed coherent state used by :func:`pacs.stellar.gaussian_fock_expansion`;
    squeezed vacuum has ``<2|S|0> = -e^{i theta} tanh(r) / sqrt(2 cosh r)``.
    Built by exponentiating in a padded space and cropping to ``dim``; the
    unitarity check covers the lowest ``dim e^{-2|r|} / 2`` levels.
    """
    if r == 0:
        return np.eye(dim, dtype=complex)
    pad = 2 * dim + 16
    a, ad = ladder_ops(pad)
    gen = 0.5 * r * (np.exp(-1j * theta) * (a @ a) - np.exp(1j * theta) * (ad @ ad))
    out = expm(gen)[:dim, :dim]
    if tol is not None:
        # squeezing stretches |m> out to roughly m e^{2|r|}, so only the
        # correspondingly shrunk low block can be unitary after cropping
        levels = int(dim * math.exp(-2.0 * abs(r)) / 2)
        _require_unitary_block(out, f"squeeze(r={r})", tol, levels)
    return out


def rotation(phi: float, dim: int) -> np.ndarray:
    """Phase shift ``exp(-i phi n)``."""
    return np.diag(np.exp(-1j * phi * np.arange(dim)))


# ---------------------------------------------------------------------------
# channels


def loss_kraus(eta: float, dim: int) -> np.ndarray:
    """Kraus operators ``A_k`` of a pure-loss channel with transmittance ``eta``.

    ``A_k|n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>``; returned with shape
    ``(dim, dim, dim)`` indexed ``[k, out, in]``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmittance must lie in [0, 1], got {eta}")
    kraus = np.zeros((dim, dim, dim))
    for n in range(dim):
        for k in range(n + 1):
            kraus[k, n - k, n] = math.sqrt(math.comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
    return kraus


def loss_channel(rho: np.ndarray, eta: float) -> np.ndarray:
    """Apply pure loss to a density matrix: ``sum_k A_k rho A_k^dag``."""
    rho = np.asarray(rho, dtype=complex)
    if eta == 1.0:
        return rho.copy()
    out = np.zeros_like(rho)
    for a_k in loss_kraus(eta, rho.shape[0]):
        out += a_k @ rho @ a_k.T
    return out


def loss_adjoint(ops: np.ndarray, eta: float) -> np.ndarray:
    """Heisenberg-picture loss ``sum_k A_k^dag O A_k``; accepts a stack of operators."""
    ops = np.asarray(ops, dtype=complex)
    if eta == 1.0:
        return ops.copy()
    out = np.zeros_like(ops)
    for a_k in loss_kraus(eta, ops.shape[-1]):
        out += a_k.T @ ops @ a_k
    return out


# ---------------------------------------------------------------------------
# helpers


def dm(psi: np.ndarray) -> np.ndarray:
    """Projector ``|psi><psi|``."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def embed(vec_or_rho: np.ndarray, dim: int) -> np.ndarray:
    """Zero-pad a vector or matrix into a larger Fock space."""
    arr = np.asarray(vec_or_rho, dtype=complex)
    if arr.ndim == 1:
        out = np.zeros(dim, dtype=complex)
        out[: arr.size] = arr
        return out
    out = np.zeros((dim, dim), dtype=complex)
    d = arr.shape[0]
    out[:d, :d] = arr
    return out


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10, psd_tol: float = 1e-9,
                         trace_tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, PSD and unit-trace."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"density matrix not Hermitian (defect {herm:.2e})")
    low = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if low < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {low:.2e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
