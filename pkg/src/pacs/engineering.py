"""Diagonal operators ``S(n)`` realized as superpositions of addition/subtraction sequences.

The ``N + 1`` sequences ``a^(N-j) a^dag^N a^j`` act on Fock states as the
diagonal polynomials ``Q_j(n) = prod_{k=1-j}^{N-j} (n + k)``. Any degree-``N``
polynomial ``S(n)`` is ``sum_j b_j Q_j(n)``; since ``Q_j(m) = 0`` for
``m < j`` the coefficients follow by forward substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DegenerateLeadingValue

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class DiagonalPolynomial:
    """``S(n) = sum_k coeffs[k] n^k``."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, n):
        return sum(c * n**k for k, c in enumerate(self.coeffs))


@dataclass(frozen=True)
class SequenceDecomposition:
    N: int
    b: tuple
    gamma: float = 1.0

    def __post_init__(self):
        if len(self.b) != self.N + 1:
            raise ValueError(f"need N+1 = {self.N + 1} coefficients, got {len(self.b)}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"attenuation base must lie in (0, 1], got {self.gamma}")

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.b])


def q_poly(j: int, N: int, n: int) -> int:
    """``Q_j(n) = prod_{k=1-j}^{N-j} (n + k)``; vanishes for ``n < j``."""
    if not 0 <= j <= N:
        raise ValueError(f"need 0 <= j <= N, got j={j}, N={N}")
    return math.prod(n + k for k in range(1 - j, N - j + 1))


def _is_exact(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def decompose(target: DiagonalPolynomial, gamma: float = 1.0) -> SequenceDecomposition:
    """Coefficients ``b_j = [S(j) - sum_{k<j} b_k Q_k(j)] / Q_j(j)``.

    Rational (int or ``Fraction``) coefficients give exact ``Fraction``
    results; otherwise the recursion runs in floats and the residual at
    ``m = 0..N`` is checked.
    """
    N = target.degree
    exact = _is_exact(target.coeffs)
    coeffs = [Fraction(c) for c in target.coeffs] if exact else [float(c) for c in target.coeffs]
    poly = DiagonalPolynomial(tuple(coeffs))
    b = []
    for j in range(N + 1):
        lead = q_poly(j, N, j)
        if lead == 0:
            raise DegenerateLeadingValue(f"Q_{j}({j}) vanishes for N={N}")
        rest = poly(j) - sum(b[k] * q_poly(k, N, j) for k in range(j))
        b.append(Fraction(rest, lead) if exact else rest / lead)
    if not exact:
        scale = max(1.0, max(abs(poly(m)) for m in range(N + 1)))
        for m in range(N + 1):
            res = abs(sum(b[j] * q_poly(j, N, m) for j in range(N + 1)) - poly(m))
            if res > RESIDUAL_TOL * scale:
                raise ArithmeticError(f"decomposition residual {res:.2e} at m={m}")
    return SequenceDecomposition(N, tuple(b), gamma)


def _apply_power(vec: np.ndarray, power: int, create: bool) -> np.ndarray:
    root = np.sqrt(np.arange(1, vec.size, dtype=float))
    out = vec
    for _ in range(power):
        nxt = np.zeros_like(out)
        if create:
            nxt[1:] = root * out[:-1]
        else:
            nxt[:-1] = root * out[1:]
        out = nxt
    return out


def apply_sequence(dec: SequenceDecomposition, psi: np.ndarray) -> np.ndarray:
    """``gamma^n sum_j b_j a^(N-j) a^dag^N a^j psi`` (unnormalized), via ladder operators.

    The working space is enlarged by ``N`` levels so the intermediate
    ``a^dag^N`` never drops amplitude.
    """
    psi = np.asarray(psi, dtype=complex)
    N = dec.N
    dim = psi.size
    work = np.zeros(dim + N, dtype=complex)
    work[:dim] = psi
    out = np.zeros_like(work)
    for j, bj in enumerate(dec.as_floats()):
        v = _apply_power(work, j, create=False)
        v = _apply_power(v, N, create=True)
        v = _apply_power(v, N - j, create=False)
        out += bj * v
    # each sequence is diagonal, so nothing lands above the input dimension
    out = out[:dim]
    if dec.gamma != 1.0:
        out = out * dec.gamma ** np.arange(dim)
    return out


def apply_diagonal(target: DiagonalPolynomial, psi: np.ndarray, gamma: float = 1.0) -> np.ndarray:
    """``gamma^n S(n) psi`` evaluated directly on Fock amplitudes."""
    psi = np.asarray(psi, dtype=complex)
    n = np.arange(psi.size)
    values = np.array([float(target(int(m))) for m in n])
    return gamma**n * values * psi


def sign_gate() -> DiagonalPolynomial:
    """``1 + n - n^2``: ``+1`` on ``|0>, |1>`` and ``-1`` on ``|2>``."""
    return DiagonalPolynomial((1, 1, -1))
