import numpy as np
import pytest

from pacs import analysis, fock, homodyne, tomography
from pacs.errors import BadBinning, DimMismatch, PhaseNotOnGrid
from pacs.homodyne import QuadratureData

DIM = 8
EDGES = homodyne.default_bin_edges(81, 8.0)
PHASES = homodyne.default_phases(6)


def _state():
    psi = fock.displacement(0.4, DIM, tol=None)[:, :2] @ np.array([1.0, 1.0j]) / np.sqrt(2)
    return psi / np.linalg.norm(psi)


@pytest.fixture(scope="module")
def sampled():
    rho = fock.dm(fock.embed(_state(), 30))
    return homodyne.sample_dataset(rho, PHASES, 8000, eta=0.8, seed=11)


@pytest.fixture(scope="module")
def solved(sampled):
    rho, report = tomography.reconstruct(sampled, 0.8, DIM, phases=PHASES, bin_edges=EDGES, max_iter=600)
    return rho, report


class TestBinning:
    def test_counts(self, sampled):
        binned = tomography.bin_records(sampled, PHASES, EDGES)
        assert binned.total == len(sampled)
        assert np.all(binned.counts.sum(axis=1) == 8000)

    def test_phase_off_grid(self):
        data = QuadratureData([0.0, 0.123], [0.0, 0.0])
        with pytest.raises(PhaseNotOnGrid):
            tomography.bin_records(data, [0.0, 0.5], EDGES)

    def test_out_of_range(self):
        data = QuadratureData([0.0], [20.0])
        with pytest.raises(BadBinning):
            tomography.bin_records(data, [0.0], np.linspace(-5, 5, 11))

    def test_empty(self):
        binned = tomography.bin_records(QuadratureData([], []), PHASES, EDGES)
        assert binned.total == 0 and not binned.counts.any()

    def test_single_record(self):
        binned = tomography.bin_records(QuadratureData([PHASES[2]], [0.33]), PHASES, EDGES)
        assert binned.total == 1 and binned.counts[2].max() == 1

    def test_vacuum_histogram_chi_square(self):
        from scipy.stats import chisquare

        edges = homodyne.default_bin_edges(21, 4.0)
        data = homodyne.sample_dataset(fock.dm(fock.fock_state(0, 2)), [0.0], 100000, seed=12)
        counts = tomography.bin_records(data, [0.0], edges).counts[0]
        probs = np.einsum("bij,ji->b", homodyne.build_povm(0.0, edges, 1.0, 2).elements, np.diag([1.0, 0.0])).real
        keep = probs * counts.sum() > 5
        expected = probs[keep] * counts.sum()
        stat = chisquare(counts[keep], expected * counts[keep].sum() / expected.sum())
        assert stat.pvalue > 0.01


class TestMaxLik:
    def test_fidelity(self, solved):
        rho, _ = solved
        assert analysis.fidelity(rho, _state()) > 0.97

    def test_invariants(self, solved):
        rho, report = solved
        assert report.max_hermiticity_defect < 1e-9
        assert report.max_trace_defect < 1e-9
        assert report.min_eigenvalue > -1e-9
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)

    def test_monotone_loglik(self, solved):
        _, report = solved
        assert np.all(np.diff(report.trace) >= -1e-12)
        assert report.loglik == report.trace[-1]

    def test_report_dict(self, solved):
        d = solved[1].to_dict()
        assert d["iterations"] == solved[1].iterations
        assert "trace" not in d or isinstance(d["trace"], list)

    def test_converges_on_exact_frequencies(self):
        psi = fock.fock_state(0, 5) * 0.6 + fock.fock_state(2, 5) * 0.8j
        rho_true = fock.dm(psi)
        povms = homodyne.build_povm_set(PHASES, EDGES, 1.0, 5)
        probs = np.array([np.einsum("bij,ji->b", p.elements, rho_true).real for p in povms])
        counts = np.round(probs * 1e9).astype(np.int64)
        data = tomography.BinnedData(PHASES, EDGES, counts)
        rho, report = tomography.maxlik_reconstruct(data, povms, 5, max_iter=3000, tol=1e-10)
        assert analysis.fidelity(rho, psi) > 0.999

    def test_phase_covariance(self, sampled):
        phi = 0.2
        shifted = QuadratureData(sampled.theta + phi, sampled.x)
        kw = dict(bin_edges=EDGES, max_iter=50)
        rho, _ = tomography.reconstruct(sampled, 0.8, DIM, phases=PHASES, **kw)
        rho2, _ = tomography.reconstruct(shifted, 0.8, DIM, phases=PHASES + phi, **kw)
        rot = np.diag(np.exp(1j * phi * np.arange(DIM)))
        assert np.allclose(rho2, rot @ rho @ rot.conj().T, atol=1e-10)

    def test_explicit_dilution(self, sampled):
        rho, report = tomography.reconstruct(sampled, 0.8, DIM, phases=PHASES, bin_edges=EDGES,
                                             max_iter=100, dilution=0.5)
        assert np.all(np.diff(report.trace) >= -1e-12)
        assert analysis.fidelity(rho, _state()) > 0.9

    def test_needs_two_phases(self, sampled):
        binned = tomography.bin_records(QuadratureData([0.0], [0.1]), [0.0], EDGES)
        with pytest.raises(ValueError):
            tomography.maxlik_reconstruct(binned, homodyne.build_povm_set([0.0], EDGES, 1.0, DIM), DIM)

    def test_dim_mismatch(self, sampled):
        binned = tomography.bin_records(sampled, PHASES, EDGES)
        with pytest.raises(DimMismatch):
            tomography.maxlik_reconstruct(binned, homodyne.build_povm_set(PHASES, EDGES, 1.0, DIM + 1), DIM)

    def test_binning_mismatch(self, sampled):
        binned = tomography.bin_records(sampled, PHASES, EDGES)
        other = homodyne.default_bin_edges(21, 8.0)
        with pytest.raises(BadBinning):
            tomography.maxlik_reconstruct(binned, homodyne.build_povm_set(PHASES, other, 1.0, DIM), DIM)

    def test_povm_count_mismatch(self, sampled):
        binned = tomography.bin_records(sampled, PHASES, EDGES)
        with pytest.raises(ValueError):
            tomography.maxlik_reconstruct(binned, homodyne.build_povm_set(PHASES[:3], EDGES, 1.0, DIM), DIM)


def _vacuum_fidelity(total, seed):
    data = homodyne.sample_dataset(fock.dm(fock.fock_state(0, 2)), PHASES, total // PHASES.size, seed=seed)
    rho, _ = tomography.reconstruct(data, 1.0, 6, phases=PHASES, bin_edges=EDGES, max_iter=1000)
    return analysis.fidelity(rho, fock.fock_state(0, 6))


def test_vacuum_reconstruction():
    # positivity biases the estimate by about sqrt(2 / N) in the photon populations
    fids = [_vacuum_fidelity(100000, seed) for seed in range(5)]
    assert np.median(fids) > 0.997
    assert max(fids) > 0.999
    assert np.median([_vacuum_fidelity(1000000, seed) for seed in range(3)]) > np.median(fids)


def test_uncompensated_reconstruction_is_worse(sampled, solved):
    rho, _ = tomography.reconstruct(sampled, 1.0, DIM, phases=PHASES, bin_edges=EDGES, max_iter=600)
    assert analysis.fidelity(rho, _state()) < analysis.fidelity(solved[0], _state())


def test_loss_sweep_single_point(sampled):
    binned = tomography.bin_records(sampled, PHASES, EDGES)
    fids, best = tomography.loss_sweep_fidelity(binned, _state(), [1.0], DIM, max_iter=50)
    assert fids.shape == (1,) and best == 1.0


def test_loss_sweep_prefers_true_efficiency(sampled):
    binned = tomography.bin_records(sampled, PHASES, EDGES)
    fids, best = tomography.loss_sweep_fidelity(binned, _state(), [0.6, 0.8, 1.0], DIM, max_iter=300)
    assert best == 0.8
    assert fids.shape == (3,)
    assert fids[1] >= fids[2]
