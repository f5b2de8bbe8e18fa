import numpy as np
import pytest

import taskgsp as t
from taskgsp.reconstruction import SampleSet
from taskgsp.signals import BandwidthDegeneracyWarning, covariance_factor, load_signal_csv


class TestBandlimitingProjector:
    def test_full_band_is_identity(self, ba30):
        _, _, basis = ba30
        np.testing.assert_allclose(t.bandlimiting_projector(basis, 30), np.eye(30), atol=1e-10)

    def test_idempotent_and_trace(self, ba30):
        _, _, basis = ba30
        for k in (1, 5, 17):
            p = t.bandlimiting_projector(basis, k)
            assert np.abs(p @ p - p).max() <= 1e-8
            assert abs(np.trace(p) - k) <= 1e-8
            np.testing.assert_allclose(p, p.T, atol=1e-12)

    def test_spectrum_is_zero_one(self, ba30):
        _, _, basis = ba30
        vals = np.linalg.eigvalsh(t.bandlimiting_projector(basis, 7))
        assert np.all((np.abs(vals) < 1e-7) | (np.abs(vals - 1) < 1e-7))

    def test_p3_rank_one(self, p3):
        basis = t.eigendecompose(t.laplacian(p3))
        v = np.array([0.5, np.sqrt(2) / 2, 0.5])  # normalized sqrt-degree vector
        np.testing.assert_allclose(t.bandlimiting_projector(basis, 1), np.outer(v, v), atol=1e-12)

    def test_bandwidth_out_of_range(self, ba30):
        _, _, basis = ba30
        with pytest.raises(ValueError):
            t.bandlimiting_projector(basis, 0)
        with pytest.raises(ValueError):
            t.bandlimiting_projector(basis, 31)

    def test_degenerate_bandwidth_warns(self, k3):
        basis = t.eigendecompose(t.laplacian(k3))  # eigenvalues 0, 1.5, 1.5
        with pytest.warns(BandwidthDegeneracyWarning):
            t.bandlimiting_projector(basis, 2)


class TestRealizeCovariance:
    def test_bandlimited_matches_projector(self, ba30):
        _, _, basis = ba30
        spec = t.CovarianceSpec.bandlimited(5)
        np.testing.assert_array_equal(
            t.realize_covariance(spec, basis), t.bandlimiting_projector(basis, 5)
        )

    def test_pseudoinverse_identities(self, ba30):
        _, lap, basis = ba30
        sigma = t.realize_covariance(t.CovarianceSpec.laplacian_pseudoinverse(), basis)
        assert np.abs(sigma @ lap @ sigma - sigma).max() <= 1e-8
        assert np.abs(lap @ sigma @ lap - lap).max() <= 1e-8

    def test_explicit_requires_symmetry(self):
        with pytest.raises(ValueError, match="symmetric"):
            t.CovarianceSpec.explicit(np.array([[1.0, 0.2], [0.0, 1.0]]))

    def test_explicit_requires_psd(self):
        with pytest.raises(ValueError, match="positive semidefinite"):
            t.CovarianceSpec.explicit(np.diag([1.0, -0.5]))

    def test_explicit_pass_through(self, ba30):
        _, _, basis = ba30
        m = np.eye(30) * 0.7
        out = t.realize_covariance(t.CovarianceSpec.explicit(m), basis)
        np.testing.assert_array_equal(out, m)

    def test_explicit_dimension_mismatch(self, ba30):
        _, _, basis = ba30
        with pytest.raises(ValueError, match="nodes"):
            t.realize_covariance(t.CovarianceSpec.explicit(np.eye(4)), basis)


class TestSampleFeatures:
    def test_zero_covariance_gives_zeros(self):
        x = t.sample_features(np.zeros((6, 6)), 3, seed=0)
        assert np.array_equal(x.values, np.zeros((6, 3)))

    def test_bandlimited_support(self, ba30):
        _, _, basis = ba30
        p = t.bandlimiting_projector(basis, 4)
        x = t.sample_features(p, 16, seed=5)
        residual = np.linalg.norm((np.eye(30) - p) @ x.values)
        assert residual <= 1e-8 * np.linalg.norm(x.values)

    def test_empirical_covariance_concentrates(self):
        g = t.generate_ba(200, 3, seed=13)
        basis = t.eigendecompose(t.laplacian(g))
        sigma = t.bandlimiting_projector(basis, 20)
        d = 5000
        x = t.sample_features(sigma, d, seed=17)
        empirical = x.values @ x.values.T / d
        assert np.abs(empirical - sigma).max() <= 5 / np.sqrt(d)

    def test_deterministic(self, ba30):
        _, _, basis = ba30
        p = t.bandlimiting_projector(basis, 4)
        a = t.sample_features(p, 5, seed=9)
        b = t.sample_features(p, 5, seed=9)
        assert np.array_equal(a.values, b.values)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            t.sample_features(np.diag([1.0, -1.0]), 2, seed=0)

    def test_factor_reproduces_covariance(self, ba30):
        _, _, basis = ba30
        sigma = t.bandlimiting_projector(basis, 6)
        f = covariance_factor(sigma)
        assert np.abs(f @ f.T - sigma).max() <= 1e-10


class TestObserve:
    def test_noiseless_returns_exact_rows(self, ba30):
        _, _, basis = ba30
        x = t.sample_features(t.bandlimiting_projector(basis, 4), 3, seed=1)
        s = SampleSet(indices=(4, 0, 9), n=30)
        obs = t.observe(x, s, eta2=0.0, seed=0)
        np.testing.assert_array_equal(obs, x.values[[4, 0, 9], :])

    def test_deterministic(self, ba30):
        _, _, basis = ba30
        x = t.sample_features(t.bandlimiting_projector(basis, 4), 3, seed=1)
        s = SampleSet(indices=(1, 2), n=30)
        a = t.observe(x, s, eta2=1e-3, seed=5)
        b = t.observe(x, s, eta2=1e-3, seed=5)
        assert np.array_equal(a, b)

    def test_snr_is_twenty_db(self):
        # bandlimited prior with k = n/10 puts ~k/n variance per node, so
        # eta2 = 1e-3 lands at 10 log10(0.1 / 1e-3) = 20 dB
        g = t.generate_ba(200, 3, seed=23)
        basis = t.eigendecompose(t.laplacian(g))
        x = t.sample_features(t.bandlimiting_projector(basis, 20), 2000, seed=3)
        s = SampleSet(indices=tuple(range(200)), n=200)
        obs = t.observe(x, s, eta2=1e-3, seed=4)
        noise = obs - x.values
        snr_db = 10 * np.log10(np.mean(x.values**2) / np.mean(noise**2))
        assert 19.0 <= snr_db <= 21.0

    def test_empty_sample_set_rejected(self, ba30):
        _, _, basis = ba30
        x = t.sample_features(t.bandlimiting_projector(basis, 4), 3, seed=1)
        with pytest.raises(ValueError):
            s = SampleSet(indices=(), n=30)
            t.observe(x, s, eta2=0.0, seed=0)


class TestSignalCsv:
    def test_roundtrip(self, tmp_path):
        f = tmp_path / "signals.csv"
        f.write_text("node,sig_0,sig_1\n1,0.5,-1.0\n0,2.0,3.0\n")
        mat = load_signal_csv(f)
        np.testing.assert_array_equal(mat, [[2.0, 3.0], [0.5, -1.0]])

    def test_missing_node_rejected(self, tmp_path):
        f = tmp_path / "signals.csv"
        f.write_text("node,sig_0\n0,1.0\n2,1.0\n")
        with pytest.raises(ValueError, match="cover"):
            load_signal_csv(f)

    def test_bad_header_rejected(self, tmp_path):
        f = tmp_path / "signals.csv"
        f.write_text("id,sig_0\n0,1.0\n")
        with pytest.raises(ValueError, match="header"):
            load_signal_csv(f)

    def test_duplicate_node_rejected(self, tmp_path):
        f = tmp_path / "signals.csv"
        f.write_text("node,sig_0\n0,1.0\n0,2.0\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_signal_csv(f)
