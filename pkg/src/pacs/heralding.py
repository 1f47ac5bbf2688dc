"""Single-pass OPA with a coherent seed and photon-number heralding on the idler.

A two-mode state is a complex array of shape ``(D_S, D_I)`` holding
``<s, i|psi>``. The interaction ``exp(kappa (a_S^dag a_I^dag - a_S a_I))`` is
parametrized by ``lam = tanh(kappa)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from . import fock
from .errors import IndexOutOfRange, TruncationTooSmall, UnsupportedConfiguration


@dataclass(frozen=True)
class OpaParams:
    lam: float
    alpha: complex = 0.0

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda = tanh(kappa) must lie in [0, 1), got {self.lam}")

    @property
    def kappa(self) -> float:
        return math.atanh(self.lam)


@dataclass(frozen=True)
class PnrdModel:
    """Spatially multiplexed click detector.

    ``channels=None`` reproduces the per-``n`` configurations used for
    heralding: the idler is split evenly over exactly ``n`` detectors.
    """

    eta: float
    channels: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"detector efficiency must lie in [0, 1], got {self.eta}")
        if self.channels is not None and self.channels < 1:
            raise ValueError("a PNRD needs at least one channel")


def default_dims(alpha: complex, n_max: int) -> tuple[int, int]:
    """``(D_S, D_I)`` adequate for ``lam <= 0.3`` and heralding up to ``n_max``."""
    return fock.default_dim(alpha, n_max) + n_max, n_max + 6


def _exp_pair_series(psi: np.ndarray, a_s: np.ndarray, a_i: np.ndarray, coeff: float) -> np.ndarray:
    # exp(coeff * a_s (x) a_i) psi for nilpotent truncated ladder matrices
    out = psi.copy()
    term = psi
    for k in range(1, min(psi.shape) + 1):
        term = coeff / k * (a_s @ term @ a_i.T)
        if not np.any(term):
            break
        out = out + term
    return out


def opa_apply(params: OpaParams, dim_s: int, dim_i: int, method: str = "factored",
              tol: float = 1e-9) -> np.ndarray:
    """Output of the OPA for input ``|alpha>_S |0>_I``.

    ``method="factored"`` uses the normal-ordered decomposition
    ``e^{lam a^dag a^dag} (1-lam^2)^{(n_S+n_I+1)/2} e^{-lam a a}``;
    ``method="dense"`` exponentiates the two-mode generator directly.
    """
    psi0 = np.zeros((dim_s, dim_i), dtype=complex)
    psi0[:, 0] = fock.coherent_state(params.alpha, dim_s, tol=1.0)
    lam = params.lam
    if method == "factored":
        a_s, ad_s = fock.ladder_ops(dim_s)
        a_i, ad_i = fock.ladder_ops(dim_i)
        psi = _exp_pair_series(psi0, a_s, a_i, -lam)
        s = np.arange(dim_s)[:, None]
        i = np.arange(dim_i)[None, :]
        psi = psi * (1.0 - lam**2) ** ((s + i + 1) / 2.0)
        psi = _exp_pair_series(psi, ad_s, ad_i, lam)
    elif method == "dense":
        a_s, ad_s = fock.ladder_ops(dim_s)
        a_i, ad_i = fock.ladder_ops(dim_i)
        gen = params.kappa * (np.kron(ad_s, ad_i) - np.kron(a_s, a_i))
        psi = (expm(gen) @ psi0.reshape(-1)).reshape(dim_s, dim_i)
    else:
        raise ValueError(f"unknown OPA method {method!r}")
    deficit = 1.0 - np.vdot(psi, psi).real
    if abs(deficit) > tol:
        raise TruncationTooSmall(
            f"OPA output norm deficit {deficit:.2e} at D_S={dim_s}, D_I={dim_i}"
        )
    return psi


def herald_n(state: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Signal state conditioned on ``n`` idler photons and its probability."""
    if not 0 <= n < state.shape[1]:
        raise IndexOutOfRange(f"idler level {n} outside 0..{state.shape[1] - 1}")
    slice_ = state[:, n]
    prob = float(np.vdot(slice_, slice_).real)
    if prob == 0.0:
        return slice_.copy(), 0.0
    return slice_ / math.sqrt(prob), prob


def heralding_probability(alpha: complex, lam: float, n: int) -> float:
    """``P_H = (1-lam^2) lam^(2n) L_n(-(1-lam^2)|alpha|^2) exp(-lam^2 |alpha|^2)``."""
    a2 = abs(alpha) ** 2
    t = 1.0 - lam**2
    return t * lam ** (2 * n) * fock.laguerre(n, 0, -t * a2) * math.exp(-(lam**2) * a2)


def relative_heralding(alpha: complex, n: int) -> float:
    """Small-``lam`` limit of ``P_H(alpha, n) / P_H(0, n)``, i.e. ``L_n(-|alpha|^2)``."""
    return fock.laguerre(n, 0, -abs(alpha) ** 2)


def simulated_relative_heralding(alpha: complex, n: int, lam: float = 0.02,
                                 dims: tuple[int, int] | None = None) -> float:
    """``P_H(alpha, n) / P_H(0, n)`` from simulated idler slices."""
    dim_s, dim_i = dims or default_dims(alpha, n)
    _, p_seed = herald_n(opa_apply(OpaParams(lam, alpha), dim_s, dim_i), n)
    _, p_vac = herald_n(opa_apply(OpaParams(lam, 0.0), dim_s, dim_i), n)
    return p_seed / p_vac


def click_probability(photons: int, clicks: int, eta: float, channels: int) -> float:
    """Probability that ``photons`` split evenly over ``channels`` click detectors fire exactly ``clicks`` of them."""
    if clicks > min(channels, photons):
        return 0.0
    # each photon ends in a given detector with prob eta / channels, or is lost
    total = 0.0
    for j in range(clicks + 1):
        miss = (1.0 - eta) + (clicks - j) * eta / channels
        total += (-1) ** j * math.comb(clicks, j) * miss**photons
    return math.comb(channels, clicks) * total


def pnrd_accept_prob(model: PnrdModel, n: int) -> float:
    """Probability that ``n`` idler photons produce an ``n``-fold coincidence.

    With the default per-``n`` configuration this is ``eta``, ``eta^2/2`` and
    ``2 eta^3/9`` for ``n = 1, 2, 3`` (``n! eta^n / n^n`` in general).
    """
    channels = model.channels if model.channels is not None else max(n, 1)
    if n > channels:
        raise UnsupportedConfiguration(f"{n}-fold coincidence impossible with {channels} channels")
    if n == 0:
        return click_probability(0, 0, model.eta, channels)
    return math.comb(channels, n) * math.factorial(n) * (model.eta / channels) ** n


def end_to_end_rate(params: OpaParams, model: PnrdModel, n: int) -> float:
    """Per-pulse heralding rate ``P_H(alpha, n) * accept(n)``; false heralds excluded."""
    return heralding_probability(params.alpha, params.lam, n) * pnrd_accept_prob(model, n)


def false_herald_rate(params: OpaParams, model: PnrdModel, n: int, extra: int = 8) -> float:
    """Rate of ``n``-fold coincidences caused by ``n+1`` or more idler photons."""
    channels = model.channels if model.channels is not None else max(n, 1)
    return sum(
        heralding_probability(params.alpha, params.lam, k) * click_probability(k, n, model.eta, channels)
        for k in range(n + 1, n + 1 + extra)
    )


def calibrate_lambda(target_rate: float, alpha: complex, n: int, model: PnrdModel) -> float:
    """Interaction strength ``lam`` whose :func:`end_to_end_rate` equals ``target_rate``."""
    def excess(lam):
        return math.log(end_to_end_rate(OpaParams(lam, alpha), model, n)) - math.log(target_rate)

    return brentq(excess, 1e-6, 0.9, xtol=1e-14)
