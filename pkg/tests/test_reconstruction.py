import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

import taskgsp as t
from taskgsp.reconstruction import (
    FeaturePropagationReconstructor,
    LeastSquaresReconstructor,
    NumericalConditioningError,
    SampleSet,
    fp_diffusion,
)


class TestSampleSet:
    def test_preserves_order(self):
        s = SampleSet(indices=(5, 1, 3), n=10)
        assert s.indices == (5, 1, 3)
        assert s.complement() == (0, 2, 4, 6, 7, 8, 9)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="distinct"):
            SampleSet(indices=(1, 1), n=5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            SampleSet(indices=(5,), n=5)


class TestLsOperator:
    def test_all_nodes_full_band_recovers_exactly(self, ba30):
        _, _, basis = ba30
        s = SampleSet(indices=tuple(range(30)), n=30)
        op = t.ls_operator(basis, 30, s)
        x = np.sin(np.arange(30.0))
        assert np.abs(t.reconstruct(op, x) - x).max() <= 1e-8

    def test_square_invertible_interpolates(self, ba30):
        _, _, basis = ba30
        k = 5
        s = t.random_sample(30, k, seed=2)
        op = t.ls_operator(basis, k, s)
        assert not op.rank_deficient
        x = basis.vectors[:, :k] @ np.array([1.0, -0.3, 2.0, 0.7, -1.1])
        recon = t.reconstruct(op, x[list(s.indices)])
        assert np.abs(recon - x).max() <= 1e-6

    def test_rank_deficient_flag_and_rank(self, ba30):
        _, _, basis = ba30
        k = 8
        s = t.random_sample(30, 4, seed=3)  # |S| < k forces deficiency
        op = t.ls_operator(basis, k, s)
        assert op.rank_deficient
        u_sk = basis.vectors[list(s.indices), :k]
        rank = np.linalg.matrix_rank(u_sk)
        assert np.linalg.matrix_rank(op.matrix) == rank

    def test_columns_live_in_band(self, ba30):
        _, _, basis = ba30
        k = 6
        p = t.bandlimiting_projector(basis, k)
        for seed in range(5):
            s = t.random_sample(30, 9, seed=seed)
            op = t.ls_operator(basis, k, s)
            leak = np.linalg.norm((np.eye(30) - p) @ op.matrix)
            assert leak <= 1e-8 * np.linalg.norm(op.matrix)

    def test_empty_sample_set_rejected(self, ba30):
        _, _, basis = ba30
        with pytest.raises(ValueError):
            t.ls_operator(basis, 3, SampleSet(indices=(), n=30))


class TestFpOperator:
    def test_all_nodes_is_identity(self, ba30):
        _, lap, _ = ba30
        s = SampleSet(indices=tuple(range(30)), n=30)
        op = t.fp_operator(lap, s)
        np.testing.assert_array_equal(op.matrix, np.eye(30))

    def test_interpolation_rows_exact(self, ba30):
        _, lap, _ = ba30
        s = t.random_sample(30, 7, seed=5)
        op = t.fp_operator(lap, s)
        y = np.arange(7.0) - 3.0
        np.testing.assert_array_equal(t.reconstruct(op, y)[list(s.indices)], y)

    def test_reproduces_sqrt_degree_vector(self, ba30):
        g, lap, _ = ba30
        x = np.sqrt(t.adjacency_matrix(g).sum(axis=1))
        for seed in range(4):
            s = t.random_sample(30, 5, seed=seed)
            recon = t.reconstruct(t.fp_operator(lap, s), x[list(s.indices)])
            assert np.abs(recon - x).max() <= 1e-8

    def test_unsampled_rows_are_harmonic(self, ba30):
        _, lap, _ = ba30
        s = t.random_sample(30, 6, seed=1)
        op = t.fp_operator(lap, s)
        residual = lap[list(s.complement()), :] @ op.matrix
        assert np.abs(residual).max() <= 1e-8

    def test_p3_middle_value(self, p3):
        lap = t.laplacian(p3)
        op = t.fp_operator(lap, SampleSet(indices=(0, 2), n=3))
        recon = t.reconstruct(op, np.array([0.0, 1.0]))
        # grounded 1x1 solve: x_1 = (1/sqrt(2)) * x_2
        assert abs(recon[1] - 1 / np.sqrt(2)) <= 1e-12

    def test_matches_diffusion_oracle(self):
        for seed in range(4):
            g = t.generate_ba(24 + seed, 3, seed=seed)
            lap = t.laplacian(g)
            s = t.random_sample(g.n, 6 + seed, seed=seed + 50)
            x_s = np.cos(np.arange(s.size) * 0.9)
            closed = t.reconstruct(t.fp_operator(lap, s), x_s)
            iterated = fp_diffusion(lap, s, x_s, iterations=10_000)
            assert np.abs(closed - iterated).max() <= 1e-6

    def test_singular_grounded_system_raises(self):
        # a zero "laplacian" has a singular grounded block
        with pytest.raises(NumericalConditioningError, match="pivot"):
            t.fp_operator(np.zeros((4, 4)), SampleSet(indices=(0,), n=4))


class TestReconstruct:
    def test_zero_observations(self, ba30):
        _, _, basis = ba30
        op = t.ls_operator(basis, 3, t.random_sample(30, 5, seed=0))
        assert np.array_equal(t.reconstruct(op, np.zeros((5, 4))), np.zeros((30, 4)))

    def test_dimension_mismatch(self, ba30):
        _, _, basis = ba30
        op = t.ls_operator(basis, 3, t.random_sample(30, 5, seed=0))
        with pytest.raises(ValueError, match="rows"):
            t.reconstruct(op, np.zeros((6, 2)))


class TestEstimators:
    def test_least_squares_matches_functional(self, ba30):
        _, _, basis = ba30
        s = t.random_sample(30, 8, seed=4)
        est = LeastSquaresReconstructor(bandwidth=5).fit(basis, s)
        op = t.ls_operator(basis, 5, s)
        np.testing.assert_array_equal(est.operator_.matrix, op.matrix)
        obs = np.ones((8, 2))
        np.testing.assert_array_equal(est.transform(obs), t.reconstruct(op, obs))

    def test_feature_propagation_matches_functional(self, ba30):
        _, lap, _ = ba30
        s = t.random_sample(30, 8, seed=4)
        est = FeaturePropagationReconstructor().fit(lap, s)
        np.testing.assert_array_equal(est.operator_.matrix, t.fp_operator(lap, s).matrix)

    def test_get_params_and_clone(self):
        est = LeastSquaresReconstructor(bandwidth=7, rcond=1e-10)
        assert est.get_params() == {"bandwidth": 7, "rcond": 1e-10}
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_transform_before_fit_raises(self):
        with pytest.raises(RuntimeError, match="fitted"):
            LeastSquaresReconstructor(bandwidth=2).transform(np.zeros((2, 1)))


@settings(max_examples=15, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    size=st.integers(min_value=1, max_value=20),
)
def test_fp_interpolation_property(seed, size):
    g = t.generate_ba(21, 2, seed=seed % 7)
    s = t.random_sample(21, size, seed=seed)
    op = t.fp_operator(t.laplacian(g), s)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(size)
    recon = t.reconstruct(op, y)
    assert np.array_equal(recon[list(s.indices)], y)
