import numpy as np
import pytest

from commtest.core_matrix import normalize_t, upper_values
from commtest.errors import IndivisibleSize, InvalidModel
from commtest.inference import TestConfig
from commtest.spectra import eigvals_sym, esd_ks_distance, extreme_eigs
from commtest.synthetic import (
    CommunityModel,
    example1_model,
    fig3_model,
    generate,
    permute_nodes,
    power_experiment,
)


class TestModel:
    def test_invalid(self):
        with pytest.raises(InvalidModel):
            CommunityModel((2, 3), [[0, 1], [2, 0]], np.ones((2, 2)))
        with pytest.raises(InvalidModel):
            CommunityModel((2, 3), np.zeros((2, 2)), -np.ones((2, 2)))
        with pytest.raises(InvalidModel):
            CommunityModel((2, 3), np.full((2, 2), 0.7), np.zeros((2, 2)))
        with pytest.raises(InvalidModel):
            CommunityModel((2, 0), np.zeros((2, 2)), np.ones((2, 2)))
        with pytest.raises(InvalidModel):
            CommunityModel((3,), [[0.0]], [[1.0]], base="cauchy")

    def test_dict_roundtrip(self):
        m = fig3_model(1, "mean", 0.3, 4)
        m2 = CommunityModel.from_dict(m.to_dict())
        assert m2.sizes == m.sizes and np.array_equal(m2.mu, m.mu) and np.array_equal(m2.sigma, m.sigma)


class TestGenerate:
    def test_null_moments(self):
        n = 500
        W, labels = generate(CommunityModel((n,), [[0.0]], [[1.0]]), 0)
        vals = upper_values(W)
        assert abs(vals.mean()) <= 4 / np.sqrt(n * (n - 1) / 2)
        assert abs(vals.var() - 1) <= 0.02
        assert np.all(labels == 0)

    @pytest.mark.parametrize("base", ["gaussian", "uniform", "laplace"])
    def test_base_distributions_standardized(self, base):
        n = 400
        vals = upper_values(generate(CommunityModel((n,), [[0.0]], [[1.0]], base), 1)[0])
        assert abs(vals.mean()) <= 4 / np.sqrt(vals.size)
        assert abs(vals.var() - 1) <= 0.03

    def test_block_means(self):
        m = fig3_model(2, "mean", 0.5, 3)
        W, labels = generate(m, 4)
        iu = np.triu_indices(m.n, 1)
        li, lj = labels[iu[0]], labels[iu[1]]
        vals = W[iu]
        for k in range(5):
            for kk in range(k, 5):
                sel = vals[(li == k) & (lj == kk)]
                assert abs(sel.mean() - m.mu[k, kk]) <= 4 * m.sigma[k, kk] / np.sqrt(sel.size)

    def test_noise_free_blocks(self):
        m = CommunityModel((3, 4), [[1.0, -2.0], [-2.0, 0.5]], np.zeros((2, 2)))
        W, labels = generate(m, 0)
        expected = m.mu[np.ix_(labels, labels)]
        np.fill_diagonal(expected, 0)
        assert np.array_equal(W, expected)

    def test_structure_and_determinism(self):
        m = fig3_model(1, "variance", 3.0, 0)
        W, _ = generate(m, 7)
        assert np.array_equal(W, W.T) and np.all(np.diag(W) == 0) and np.all(np.isfinite(W))
        assert np.array_equal(W, generate(m, 7)[0])

    def test_block_error_halves_when_s_doubles(self):
        def rms_error(s):
            errs = []
            for seed in range(20):
                m = fig3_model(s, "mean", 0.4, seed)
                W, labels = generate(m, 100 + seed)
                iu = np.triu_indices(m.n, 1)
                sel = (labels[iu[0]] == 0) & (labels[iu[1]] == 0)
                errs.append(W[iu][sel].mean() - m.mu[0, 0])
            return np.sqrt(np.mean(np.square(errs)))

        # block (0,0) count grows ~4x when s doubles, so the error should roughly halve
        ratio = rms_error(2) / rms_error(1)
        assert 0.3 < ratio < 0.75


class TestDesigns:
    def test_fig3_sizes(self):
        m = fig3_model(5, "mean", 0.2, 0)
        assert m.sizes == (50, 100, 150, 200, 250) and m.n == 750

    def test_fig3_mean_values(self):
        m = fig3_model(1, "mean", 0.3, 1)
        assert set(np.unique(m.mu)) <= {-0.3, 0.3}
        assert np.all(m.sigma == 1) and np.array_equal(m.mu, m.mu.T)

    def test_fig3_null_levels(self):
        assert np.all(fig3_model(5, "mean", 0.0, 2).mu == 0)
        m = fig3_model(5, "variance", 1.0, 2)
        assert np.all(m.sigma == 1) and np.all(m.mu == 0)

    def test_fig3_variance_values(self):
        m = fig3_model(1, "variance", 3.0, 5)
        assert set(np.unique(m.sigma)) <= {1.0, 3.0}

    def test_example1(self):
        m = example1_model(600, 3)
        assert m.sizes == (200, 200, 200)
        assert np.array_equal(m.sigma, np.eye(3)) and np.all(m.mu == 0)
        W, labels = generate(m, 0)
        assert np.all(W[labels[:, None] != labels[None, :]] == 0)

    def test_example1_indivisible(self):
        with pytest.raises(IndivisibleSize):
            example1_model(100, 3)

    def test_example1_semicircle(self):
        W, _ = generate(example1_model(900, 3), 3)
        ev = eigvals_sym(normalize_t(W))
        assert 1.8 < ev[-1] < 2.2
        assert esd_ks_distance(ev) <= 0.08

    def test_permute_nodes(self):
        W, labels = generate(fig3_model(1, "mean", 0.5, 0), 0)
        Wp, lp, perm = permute_nodes(W, 1, labels)
        assert np.array_equal(Wp, W[np.ix_(perm, perm)]) and np.array_equal(lp, labels[perm])
        np.testing.assert_allclose(extreme_eigs(normalize_t(Wp)), extreme_eigs(normalize_t(W)), atol=1e-10)


class TestPowerExperiment:
    def test_size_mean_null(self):
        pc = power_experiment([0.0], "mean", 5, 100, seed=11)
        assert pc.rejection_rate[0] <= 0.10

    def test_mean_effect(self):
        pc = power_experiment([0.5], "mean", 5, 50, seed=12)
        assert pc.rejection_rate[0] >= 0.95

    def test_variance_effect(self):
        pc = power_experiment([3.0], "variance", 5, 50, seed=13)
        assert pc.rejection_rate[0] >= 0.9
        assert pc.family_rate("Te")[0] >= 0.9

    def test_exponential_branch_adds_power(self):
        # at moderate variance contrast the T sub-tests alone miss most of the structure
        pc = power_experiment([1.5], "variance", 5, 30, seed=14)
        assert pc.family_rate("Te")[0] >= pc.family_rate("T")[0] + 0.3

    def test_monotone_and_deterministic(self):
        levels = [0.0, 0.05, 0.1, 0.15, 0.2]
        pc = power_experiment(levels, "mean", 2, 20, seed=15)
        assert np.all(np.diff(pc.rejection_rate) >= -0.1)
        assert np.all((pc.rejection_rate >= 0) & (pc.rejection_rate <= 1))
        pc2 = power_experiment(levels, "mean", 2, 20, seed=15)
        assert np.array_equal(pc.rejection_rate, pc2.rejection_rate)
        assert pc.replicates == 20 and pc.redraw_model_per_replicate

    def test_requires_replicates(self):
        with pytest.raises(ValueError):
            power_experiment([0.0], "mean", 1, 5, cfg=TestConfig())
