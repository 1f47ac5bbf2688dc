import math

import numpy as np
import pytest

from pacs import fock
from pacs.errors import TruncationTooSmall

import oracles


class TestLaguerre:
    def test_linear(self):
        assert fock.laguerre(1, 0, -1.0) == 2.0

    def test_constant(self):
        assert fock.laguerre(0, 0, 5.7) == 1.0

    def test_cubic_at_minus_one(self):
        # frozen from an mpmath evaluation
        assert fock.laguerre(3, 0, -1.0) == pytest.approx(17 / 3, rel=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 5, 12, 30])
    @pytest.mark.parametrize("k", [0, 1, 2, 7])
    @pytest.mark.parametrize("x", [-25.0, -3.3, 0.0, 1.7, 9.0, 25.0])
    def test_matches_recurrence(self, n, k, x):
        ref = oracles.laguerre_recurrence(n, k, x)
        assert fock.laguerre(n, k, x) == pytest.approx(ref, rel=1e-10, abs=1e-10 * max(1.0, abs(ref)))

    def test_negative_order(self):
        # L_2^{(-1)}(x) = x^2/2 - x
        assert fock.laguerre(2, -1, 3.0) == pytest.approx(1.5)

    def test_table_matches_exact(self):
        table = fock.laguerre_table(20, [0, 1, 2], -2.5)
        for n in range(21):
            for i, k in enumerate([0, 1, 2]):
                assert table[n, i] == pytest.approx(fock.laguerre(n, k, -2.5), rel=1e-12)

    def test_large_degree_no_overflow(self):
        assert math.isfinite(fock.laguerre(200, 0, -1.0))

    def test_invalid(self):
        with pytest.raises(ValueError):
            fock.laguerre(-1, 0, 0.0)
        with pytest.raises(ValueError):
            fock.laguerre(2, -3, 0.0)


def test_hermite_low_orders():
    x = np.array([0.3, -1.1])
    assert np.allclose(fock.hermite(2, x), 4 * x**2 - 2)
    assert np.allclose(fock.hermite(3, x), 8 * x**3 - 12 * x)


class TestStates:
    def test_coherent_vacuum(self):
        assert np.array_equal(fock.coherent_state(0, 10), np.eye(10)[0])

    def test_coherent_first_amplitude(self):
        assert fock.coherent_state(1.0, 40)[0] == pytest.approx(math.exp(-0.5))

    def test_coherent_mean_photon(self):
        psi = fock.coherent_state(1.43, 60)
        assert np.sum(np.arange(60) * np.abs(psi) ** 2) == pytest.approx(1.43**2, abs=1e-8)

    def test_coherent_matches_expm(self):
        assert np.allclose(fock.coherent_state(0.8 - 0.6j, 40), oracles.coherent_expm(0.8 - 0.6j, 40), atol=1e-12)

    def test_coherent_truncation_error(self):
        with pytest.raises(TruncationTooSmall):
            fock.coherent_state(3.0, 8)

    def test_default_dim_tail(self):
        for alpha in (0.0, 0.5, 1.0, 1.7):
            for n in range(4):
                assert fock.coherent_tail_mass(alpha, fock.default_dim(alpha, n) - n) < 1e-10

    def test_fock_state_bounds(self):
        with pytest.raises(TruncationTooSmall):
            fock.fock_state(5, 5)


class TestOperators:
    def test_ladder_dim2(self):
        a, ad = fock.ladder_ops(2)
        assert np.array_equal(a, np.array([[0, 1], [0, 0]]))
        assert np.array_equal(ad @ np.eye(2)[0], np.eye(2)[1])

    def test_commutator(self):
        a, ad = fock.ladder_ops(12)
        comm = a @ ad - ad @ a
        assert np.allclose(comm[:11, :11], np.eye(11))
        assert np.allclose(ad @ a, fock.number_op(12))

    def test_displacement_identity(self):
        assert np.array_equal(fock.displacement(0, 7), np.eye(7))

    def test_displacement_vacuum_element(self):
        alpha = 0.7 + 0.2j
        assert fock.displacement(alpha, 40)[0, 0] == pytest.approx(math.exp(-abs(alpha) ** 2 / 2))

    def test_displacement_matches_expm(self):
        alpha = 1.1 - 0.4j
        assert np.allclose(fock.displacement(alpha, 40, tol=None)[:20, :20], oracles.displacement_expm(alpha, 40)[:20, :20], atol=1e-9)

    def test_displacement_undoes_coherent(self):
        psi = fock.displacement(-1.2, 50) @ fock.coherent_state(1.2, 50)
        assert abs(psi[0]) ** 2 > 1 - 1e-8

    def test_displacement_truncation(self):
        with pytest.raises(TruncationTooSmall):
            fock.displacement(3.0, 12)

    def test_squeeze_identity(self):
        assert np.array_equal(fock.squeeze(0.0, 0.3, 5), np.eye(5))

    def test_squeezed_vacuum_parity_and_vacuum_amplitude(self):
        col = fock.squeeze(0.5, 0.0, 80)[:, 0]
        assert np.allclose(col[1::2], 0.0, atol=1e-14)
        assert col[0].real == pytest.approx(0.94171061583167570696, abs=1e-10)

    def test_squeeze_two_photon_amplitude_sign(self):
        r, theta = 0.4, 0.9
        col = fock.squeeze(r, theta, 40)[:, 0]
        expected = -np.exp(1j * theta) * math.tanh(r) / math.sqrt(2 * math.cosh(r))
        assert col[2] == pytest.approx(expected, abs=1e-10)

    def test_squeeze_unitary_low_block(self):
        s = fock.squeeze(0.3, 0.2, 60)
        block = s[:, :10]
        assert np.allclose(block.conj().T @ block, np.eye(10), atol=1e-8)


class TestLoss:
    def test_identity(self):
        rho = fock.dm(fock.coherent_state(0.4, 20))
        assert np.allclose(fock.loss_channel(rho, 1.0), rho)

    def test_single_photon(self):
        out = fock.loss_channel(fock.dm(fock.fock_state(1, 2)), 0.3)
        assert np.allclose(out, np.diag([0.7, 0.3]))

    def test_coherent_stays_coherent(self):
        out = fock.loss_channel(fock.dm(fock.coherent_state(1.0, 40)), 0.6)
        target = fock.coherent_state(math.sqrt(0.6), 40)
        assert np.vdot(target, out @ target).real > 1 - 1e-8

    def test_matches_dilation(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        assert np.allclose(fock.loss_channel(rho, 0.37), oracles.loss_kraus_sum(rho, 0.37), atol=1e-12)

    def test_adjoint_duality(self):
        rng = np.random.default_rng(5)
        rho = fock.dm(rng.normal(size=8) + 1j * rng.normal(size=8))
        op = rng.normal(size=(8, 8))
        lhs = np.trace(fock.loss_channel(rho, 0.5) @ op)
        rhs = np.trace(rho @ fock.loss_adjoint(op, 0.5))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_invalid_eta(self):
        with pytest.raises(ValueError):
            fock.loss_kraus(1.2, 3)


def test_check_density_matrix():
    fock.check_density_matrix(np.eye(3) / 3)
    with pytest.raises(ValueError):
        fock.check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        fock.check_density_matrix(np.array([[0.5, 0.1], [0.3, 0.5]]))


def test_embed():
    assert np.array_equal(fock.embed(np.array([1.0, 2.0]), 4), [1, 2, 0, 0])
    assert fock.embed(np.eye(2), 3).shape == (3, 3)
