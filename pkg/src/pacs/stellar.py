"""Fidelity thresholds that witness the stellar rank of photon-added coherent states.

A state with fidelity ``F`` to a rank-``n`` target has stellar rank at least
``k`` when ``F`` exceeds the largest fidelity any state of rank ``< k``
reaches with that target. Because the fidelity is linear in ``rho``, that
supremum is attained on pure states, i.e. on ``U_G (c_0|0> + ... +
c_{k-1}|k-1>)`` with ``U_G = D(b) S(r, theta)`` a Gaussian unitary.
For fixed ``U_G`` the optimal coefficients are a projection, so the
threshold is ``max_{U_G} sum_{m<k} |<m|U_G^dag|psi>|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.stats import qmc

from . import analytics, fock
from .errors import CubicRootStructureViolation, OutOfGrid, TruncationTooSmall, UnsupportedRank

WORK_DIM = 120
N_STARTS = 32
R_MAX = 1.2
B_MAX = 3.0
# below this the cubic's double root at 1/3 is too close to split numerically
CUBIC_CHECK_MIN = 1e-3


@dataclass(frozen=True)
class GaussianParams:
    """Squeezed coherent state parametrized by its Hermite-expansion amplitude ``beta``."""

    beta: complex
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing magnitude must be >= 0, got {self.r}")

    @property
    def displacement(self) -> complex:
        """Amplitude ``b`` with ``|phi_G> = D(b) S(r, theta) |0>``."""
        return self.beta * math.cosh(self.r) - np.conj(self.beta) * np.exp(1j * self.theta) * math.sinh(self.r)


@dataclass
class ThresholdCurve:
    alpha_grid: np.ndarray
    thresholds: np.ndarray
    rank: int
    target_n: int
    exact: bool = False  # False: optimized lower bound
    optimum: list = field(default_factory=list, repr=False)

    def at(self, alpha: float) -> float:
        grid = self.alpha_grid
        if not grid[0] - 1e-12 <= alpha <= grid[-1] + 1e-12:
            raise OutOfGrid(f"|alpha|={alpha} outside the threshold grid [{grid[0]}, {grid[-1]}]")
        return float(np.interp(alpha, grid, self.thresholds))


# ---------------------------------------------------------------------------
# Gaussian states


def gaussian_fock_expansion(g: GaussianParams, dim: int, tol: float = 1e-8) -> np.ndarray:
    """Fock amplitudes of a squeezed coherent state.

    ``c_n = (2^n n! cosh r)^{-1/2} (e^{i theta} tanh r)^{n/2} E H_n(e^{-i theta/2} beta / sqrt(sinh 2r))``
    with ``E = exp(-|beta|^2/2 + e^{-i theta} beta^2 tanh(r) / 2)``, evaluated by
    the equivalent normalized recurrence
    ``u_{n+1} = (beta u_n / cosh r - e^{i theta} tanh(r) sqrt(n) u_{n-1}) / sqrt(n+1)``,
    which stays finite at ``r = 0``.
    """
    beta, r, theta = complex(g.beta), g.r, g.theta
    t = np.exp(1j * theta) * math.tanh(r)
    ch = math.cosh(r)
    u = np.zeros(dim, dtype=complex)
    u[0] = 1.0
    if dim > 1:
        u[1] = beta / ch
    for n in range(1, dim - 1):
        u[n + 1] = (beta / ch * u[n] - t * math.sqrt(n) * u[n - 1]) / math.sqrt(n + 1)
    pref = np.exp(-0.5 * abs(beta) ** 2 + 0.5 * np.exp(-1j * theta) * beta**2 * math.tanh(r)) / math.sqrt(ch)
    psi = pref * u
    tail = fock.tail_mass(psi)
    if tail > tol:
        raise TruncationTooSmall(f"Gaussian state {g}: tail mass {tail:.2e} at D={dim}")
    return psi


def _raise(v: np.ndarray, root: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    out[1:] = root * v[:-1]
    return out


def _lower(v: np.ndarray, root: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    out[:-1] = root * v[1:]
    return out


def squeezed_columns(r: float, theta: float, k: int, dim: int) -> np.ndarray:
    """Columns ``S(r, theta)|m>`` for ``m < k``, shape ``(dim, k)``.

    Uses ``S a^dag S^dag = a^dag cosh r + a e^{-i theta} sinh r`` repeatedly on
    the squeezed vacuum; only the top levels carry truncation error.
    """
    root = np.sqrt(np.arange(1, dim, dtype=float))
    cols = np.zeros((dim, k), dtype=complex)
    cols[:, 0] = gaussian_fock_expansion(GaussianParams(0.0, r, theta), dim, tol=1.0)
    ch, sh = math.cosh(r), np.exp(-1j * theta) * math.sinh(r)
    for m in range(1, k):
        v = cols[:, m - 1]
        cols[:, m] = (ch * _raise(v, root) + sh * _lower(v, root)) / math.sqrt(m)
    return cols


def displaced_rows(b: complex, n: int, dim: int) -> np.ndarray:
    """Rows ``<j|D(b)|l>`` for ``j <= n``, ``l < dim``, shape ``(n + 1, dim)``.

    ``<j|D(b)|l> = conj(<l|D(-b)|j>)`` and ``D(c)|j+1> = (a^dag - c*) D(c)|j> / sqrt(j+1)``.
    """
    root = np.sqrt(np.arange(1, dim, dtype=float))
    c = -complex(b)
    cols = np.zeros((n + 1, dim), dtype=complex)
    cols[0] = fock.coherent_state(c, dim, tol=1.0)
    for j in range(n):
        cols[j + 1] = (_raise(cols[j], root) - np.conj(c) * cols[j]) / math.sqrt(j + 1)
    return cols.conj()


def _overlap_weight(core: np.ndarray, b: complex, r: float, theta: float, k: int, dim: int) -> float:
    """``sum_{m<k} |<core| D(b) S(r, theta) |m>|^2``."""
    rows = displaced_rows(b, core.size - 1, dim)
    amps = core.conj() @ rows @ squeezed_columns(r, theta, k, dim)
    return float(np.sum(np.abs(amps) ** 2))


# ---------------------------------------------------------------------------
# single-photon target: analytic optimum


def _fidelity_n1(a: float, b: float, r: float) -> float:
    return (a * math.cosh(r) + b) ** 2 * math.exp(-(1.0 - math.tanh(r)) * b * b) / ((1.0 + a * a) * math.cosh(r) ** 3)


def gaussian_fidelity_n1(a: float) -> tuple[float, float, float]:
    """Largest fidelity of a Gaussian state with ``(|1> + a|0>) / sqrt(1 + a^2)``.

    Returns ``(F_max, beta_opt, r_opt)`` with ``beta_opt`` the Hermite
    amplitude of :class:`GaussianParams` at ``theta = 0``. Stationarity
    reduces to the cubic ``a^2 z^3 + 9 z^2 - (6 + a^2) z + 1 = 0`` in
    ``z = e^{-2r}``, with ``b = a cosh r (1 - z) / (3 z - 1)``. The cubic is
    ``(3z - 1)^2 = a^2 z (1 - z^2)``, so its two roots in ``(0, 1)`` lie on
    either side of ``1/3`` and ``b = +-cosh r sqrt((1 - z) / (z (1 + z)))``;
    both are bracketed and evaluated and the better one returned.
    """
    a = abs(float(a))
    if a > CUBIC_CHECK_MIN:
        roots = np.roots([a * a, 9.0, -(6.0 + a * a), 1.0])
        real = roots[np.abs(roots.imag) < 1e-9 * max(1.0, np.abs(roots).max())].real
        inside = real[(real > 0.0) & (real < 1.0)]
        if real.size != 3 or inside.size != 2 or np.count_nonzero(real < 0) != 1:
            raise CubicRootStructureViolation(f"unexpected roots {roots} at a={a}")
    best = None
    for sign, lo, hi in ((1.0, 1.0 / 3.0, 1.0), (-1.0, 0.0, 1.0 / 3.0)):
        z = brentq(lambda t: 3.0 * t - 1.0 - sign * a * math.sqrt(t * (1.0 - t * t)), lo, hi, xtol=1e-15, rtol=1e-15)
        r = -0.5 * math.log(z)
        b = sign * math.cosh(r) * math.sqrt((1.0 - z) / (z * (1.0 + z)))
        f = _fidelity_n1(a, b, r)
        if best is None or f > best[0]:
            best = (f, b, r)
    return best


# ---------------------------------------------------------------------------
# general thresholds


def core_target(alpha: float, n: int) -> np.ndarray:
    core = analytics.core_superposition(alpha, n)
    return core / np.linalg.norm(core)


def optimize_threshold(core: np.ndarray, k: int, n_starts: int = N_STARTS, dim: int = WORK_DIM,
                       seed: int = 0) -> tuple[float, tuple[complex, float, float]]:
    """Multi-start maximization of :func:`_overlap_weight` over ``(b, r, theta)``.

    Starts come from a scrambled Sobol sequence; each is refined by L-BFGS-B
    inside ``|Re b|, |Im b| <= 3``, ``0 <= r <= 1.2``. The result is a lower
    bound on the true supremum.
    """
    def loss(v):
        return -_overlap_weight(core, complex(v[0], v[1]), v[2], v[3], k, dim)

    lo = np.array([-B_MAX, -B_MAX, 0.0, -math.pi])
    hi = np.array([B_MAX, B_MAX, R_MAX, math.pi])
    starts = qmc.scale(qmc.Sobol(4, scramble=True, seed=seed).random(n_starts), lo, hi)
    # unsqueezed, undisplaced start covers the small-amplitude regime
    starts = np.vstack([np.zeros(4), starts])
    bounds = list(zip(lo, hi))
    best_val, best_x = -math.inf, starts[0]
    for x0 in starts:
        res = minimize(loss, x0, method="L-BFGS-B", bounds=bounds, options={"ftol": 1e-12, "gtol": 1e-9})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    return best_val, (complex(best_x[0], best_x[1]), float(best_x[2]), float(best_x[3]))


def threshold_curve(n: int, k: int, alpha_grid, n_starts: int = N_STARTS, seed: int = 0) -> ThresholdCurve:
    """Thresholds ``F_th,k(|alpha|)`` for certification with the ``n``-photon-added target.

    ``n = k = 1`` is exact (cubic solution); every other case is a
    multi-start lower bound.
    """
    if not 1 <= k <= n:
        raise UnsupportedRank(f"rank k={k} cannot be certified with an n={n} target (need 1 <= k <= n)")
    grid = np.asarray(alpha_grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("alpha grid must be strictly increasing")
    values = np.empty(grid.size)
    optima = []
    exact = n == 1
    for i, a in enumerate(grid):
        if exact:
            f, beta, r = gaussian_fidelity_n1(a)
            values[i] = f
            optima.append((complex(GaussianParams(beta, r).displacement), r, 0.0))
        else:
            f, opt = optimize_threshold(core_target(a, n), k, n_starts=n_starts, seed=seed)
            values[i] = f
            optima.append(opt)
    return ThresholdCurve(grid, values, k, n, exact, optima)


def witness(f_measured: float, curves: ThresholdCurve | list[ThresholdCurve], alpha: float) -> int:
    """Largest rank ``k`` whose threshold at ``|alpha|`` lies below ``f_measured``; 0 if none."""
    if isinstance(curves, ThresholdCurve):
        curves = [curves]
    rank = 0
    for curve in sorted(curves, key=lambda c: c.rank):
        if f_measured > curve.at(abs(alpha)):
            rank = max(rank, curve.rank)
    return rank
