import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsebo.embedding import SubspaceDataset
from dsebo.errors import DataError, UsageError
from dsebo.surrogate import (
    KernelParams,
    build_model,
    fit_gp,
    log_marginal_likelihood,
    lml_gradient,
    posterior,
    rbf_kernel,
    standardize,
)


def dataset(Z, y):
    Z = np.atleast_2d(Z)
    data = SubspaceDataset(Z.shape[1])
    for z, v in zip(Z, y):
        data.add(z, v)
    return data


def dense_oracle(X, ys, params, q):
    """Predictive mean/var in standardized space via pairwise kernel calls and np.linalg.solve."""
    n = len(X)
    K = np.array([[rbf_kernel(X[i], X[j], params) for j in range(n)] for i in range(n)])
    K += params.noise_variance * np.eye(n)
    k = np.array([rbf_kernel(X[i], q, params) for i in range(n)])
    mean = k @ np.linalg.solve(K, ys)
    var = rbf_kernel(q, q, params) - k @ np.linalg.solve(K, k)
    return mean, var


class TestRbf:
    p = KernelParams(1.0, 1.0)

    def test_zero_distance(self):
        assert rbf_kernel([1.0, 2.0], [1.0, 2.0], KernelParams(0.7, 2.5)) == 2.5

    def test_unit_distance(self):
        assert rbf_kernel([0.0, 0.0], [1.0, 0.0], self.p) == pytest.approx(0.6065306597126334, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b = rng.normal(size=(2, 4))
            assert rbf_kernel(a, b, self.p) == rbf_kernel(b, a, self.p)

    def test_length_mismatch(self):
        with pytest.raises(UsageError):
            rbf_kernel([0.0], [0.0, 1.0], self.p)

    def test_noise_floor(self):
        with pytest.raises(UsageError):
            KernelParams(1.0, 1.0, 1e-12)


class TestPosterior:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_dense_solve(self, seed):
        rng = np.random.default_rng(seed)
        n, d = rng.integers(1, 9), rng.integers(1, 4)
        X = rng.uniform(-1, 1, size=(n, d))
        y = rng.normal(size=n) * 3 + 1
        params = KernelParams(rng.uniform(0.3, 2.0), rng.uniform(0.5, 2.0), 1e-6)
        model = build_model(X, y, params)
        ys, mu, sd = standardize(y)
        for q in rng.uniform(-1.5, 1.5, size=(5, d)):
            m_ref, v_ref = dense_oracle(X, ys, params, q)
            m, s = posterior(model, q)
            assert m == pytest.approx(mu + sd * m_ref, abs=1e-8 * max(1.0, sd))
            assert s**2 == pytest.approx(sd**2 * max(v_ref, 0.0), abs=1e-8 * max(1.0, sd**2))

    def test_single_point_closed_form(self):
        # a lone target standardizes to 0; the closed form must still hold in standardized units
        params = KernelParams(1.0, 1.5, 1e-6)
        model = build_model(np.array([[0.2, -0.1]]), np.array([4.0]), params)
        ys0 = model.train_targets[0]
        m = (model.predict([[0.2, -0.1]])[0][0] - model.target_mean) / model.target_std
        assert m == pytest.approx(ys0 * 1.5 / (1.5 + 1e-6), abs=1e-12)

    def test_prior_recovery_far_away(self):
        X = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 0.0]])
        model = build_model(X, np.array([1.0, 3.0, 2.0]), KernelParams(0.5, 2.0))
        m, s = posterior(model, [100.0, 100.0])
        assert m == pytest.approx(model.target_mean, abs=1e-12)
        assert s == pytest.approx(model.target_std * np.sqrt(2.0), rel=1e-12)

    def test_near_interpolation(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(-1, 1, size=(6, 2))
        y = rng.normal(size=6)
        model = build_model(X, y, KernelParams(0.8, 1.0, 1e-6))
        for x, v in zip(X, y):
            assert abs(posterior(model, x)[0] - v) <= 1e-2 * model.target_std

    def test_dimension_mismatch(self):
        model = build_model(np.zeros((1, 2)), np.array([0.0]), KernelParams(1.0, 1.0))
        with pytest.raises(UsageError):
            posterior(model, [0.0, 0.0, 0.0])

    def test_factor_and_weights(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(-1, 1, size=(7, 3))
        y = rng.normal(size=7)
        p = KernelParams(0.9, 1.3, 1e-4)
        model = build_model(X, y, p)
        K = np.array([[rbf_kernel(a, b, p) for b in X] for a in X]) + p.noise_variance * np.eye(7)
        L = model.chol
        assert np.linalg.norm(L @ L.T - K) / np.linalg.norm(K) < 1e-8
        assert np.allclose(K @ model.alpha, model.train_targets, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_variance_bounded_and_monotone_in_data(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    X = rng.uniform(-1, 1, size=(6, d))
    y = rng.normal(size=6)
    p = KernelParams(float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.5, 2.0)), 1e-6)
    Q = rng.uniform(-1.5, 1.5, size=(20, d))
    small = build_model(X[:5], y[:5], p)
    big = build_model(X, y, p)
    # compare in standardized units so the two models share a scale
    _, s_small = small.predict(Q)
    _, s_big = big.predict(Q)
    s_small /= small.target_std
    s_big /= big.target_std
    assert np.all(s_small >= 0) and np.all(s_small**2 <= p.signal_variance + 1e-8)
    assert np.all(s_big**2 <= s_small**2 + 1e-8)


class TestLml:
    @pytest.mark.parametrize("seed", range(5))
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.uniform(-1, 1, size=(8, 2))
        ys, _, _ = standardize(rng.normal(size=8))
        p = KernelParams(float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.5, 2.0)), 1e-3)
        grad = lml_gradient(p, X, ys)
        h = 1e-5
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            up = log_marginal_likelihood(p.with_theta(p.theta() + e), X, ys)
            down = log_marginal_likelihood(p.with_theta(p.theta() - e), X, ys)
            fd = (up - down) / (2 * h)
            assert abs(grad[j] - fd) <= 1e-4 * max(1.0, abs(fd))

    @pytest.mark.parametrize("seed", range(5))
    def test_fit_beats_defaults(self, seed):
        rng = np.random.default_rng(seed)
        d = 3
        X = rng.uniform(-np.sqrt(d), np.sqrt(d), size=(15, d))
        y = np.sum(X**2, axis=1)
        model = fit_gp(dataset(X, y), rng=np.random.default_rng(seed), n_restarts=3)
        ys, _, _ = standardize(y)
        assert model.lml >= log_marginal_likelihood(KernelParams.default(d), X, ys) - 1e-9

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(-1, 1, size=(10, 2))
        y = np.sin(X).sum(axis=1)
        a = fit_gp(dataset(X, y), rng=np.random.default_rng(4), n_restarts=3)
        b = fit_gp(dataset(X, y), rng=np.random.default_rng(4), n_restarts=3)
        assert a.params == b.params
        assert np.array_equal(a.alpha, b.alpha)


class TestFitEdgeCases:
    def test_duplicates_need_jitter(self):
        X = np.array([[0.3, 0.3]] * 4 + [[-0.5, 0.2]])
        y = np.array([1.0, 1.0, 1.0, 1.0, -1.0])
        model = fit_gp(dataset(X, y))
        _, s = posterior(model, [0.3, 0.3])
        assert (s / model.target_std) ** 2 <= model.params.noise_variance + 1e-6

    def test_constant_targets(self):
        X = np.random.default_rng(0).uniform(-1, 1, size=(5, 2))
        model = fit_gp(dataset(X, np.full(5, 7.0)))
        assert model.target_std == 1.0
        assert np.isfinite(model.params.lengthscale) and np.isfinite(model.params.signal_variance)
        assert posterior(model, [0.0, 0.0])[0] == pytest.approx(7.0)

    def test_non_finite_targets(self):
        data = SubspaceDataset(1)
        data.points.append(np.zeros(1))
        data.values.append(float("inf"))
        with pytest.raises(DataError):
            fit_gp(data)

    def test_empty(self):
        with pytest.raises(UsageError):
            fit_gp(SubspaceDataset(2))
