import math

import numpy as np
import pytest

from dsebo.acquisition import AcquisitionConfig
from dsebo.baselines import run_fixed_embedding
from dsebo.benchmarks import make_function
from dsebo.controller import (
    ControllerState,
    DseboConfig,
    ExpansionHistory,
    convergence_threshold,
    next_dimension,
    run_dsebo,
)
from dsebo.errors import ConfigurationError, DataError, UsageError
from oracles import oracle_next_dimension, scripted_constant_schedule

FAST = AcquisitionConfig(n_uniform=100, n_local=100)
DEFAULTS = DseboConfig(budget=500).resolved(1000)


class TestConvergenceThreshold:
    def test_initial(self):
        assert convergence_threshold(5, DEFAULTS) == 20 == 500 // 24

    def test_top(self):
        assert convergence_threshold(100, DEFAULTS) == 41

    def test_degenerate_range(self):
        cfg = DseboConfig(budget=500, d_l=10, d_h=10).resolved(1000)
        assert convergence_threshold(10, cfg) == math.floor(500 / 24)

    def test_minimum_one(self):
        cfg = DseboConfig(budget=3, beta=12).resolved(100)
        assert convergence_threshold(5, cfg) == 1

    def test_grows_with_dimension(self):
        T = [convergence_threshold(d, DEFAULTS) for d in range(5, 101)]
        assert T == sorted(T)


class TestNextDimension:
    def test_first_expansion(self):
        hist = ExpansionHistory()
        hist.append(5, 3.0)
        assert next_dimension(hist, ControllerState(5, 0, 20), DEFAULTS) == (12, 7)

    def test_equal_slopes_hold_increment(self):
        recs = [(5, 10.0), (12, 8.0), (19, 6.0)]
        assert next_dimension(recs, ControllerState(19, 7, 20), DEFAULTS) == (26, 7)

    def test_scaled_increment(self):
        recs = [(5, 10.0), (12, 9.5), (19, 6.0)]
        assert next_dimension(recs, ControllerState(19, 7, 20), DEFAULTS) == (29, 10)

    def test_capped_at_d_h(self):
        recs = [(5, 10.0), (90, 1.0)]
        assert next_dimension(recs, ControllerState(97, 7, 20), DEFAULTS) == (100, 7)

    def test_increment_floor_of_one(self):
        # most recent slope is the minimum -> k = 0.5, floor(0.5 * 1) = 0 -> 1
        recs = [(5, 10.0), (6, 0.0), (7, 0.0)]
        assert next_dimension(recs, ControllerState(7, 1, 20), DEFAULTS) == (8, 1)

    def test_at_top_is_usage_error(self):
        with pytest.raises(UsageError):
            next_dimension([(5, 1.0)], ControllerState(100, 7, 20), DEFAULTS)

    def test_history_must_increase(self):
        hist = ExpansionHistory()
        hist.append(5, 1.0)
        with pytest.raises(UsageError):
            hist.append(5, 0.0)

    def test_matches_oracle_on_random_histories(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            d_l = int(rng.integers(1, 10))
            d_h = d_l + int(rng.integers(1, 150))
            beta = float(rng.choice([1.0, 4.0, 12.0, 24.0, 32.0, rng.uniform(0.5, 40)]))
            n = int(rng.integers(1, 8))
            dims = np.sort(rng.choice(np.arange(d_l, d_h), size=min(n, d_h - d_l), replace=False))
            # a small value pool makes equal slopes common
            pool = rng.choice([-2.0, 0.0, 0.5, 1.0, 3.0, 7.25]) if rng.random() < 0.3 else None
            bs = [float(pool * i) if pool is not None else float(rng.normal(0, 50)) for i in range(len(dims))]
            recs = [(int(d), b) for d, b in zip(dims, bs)]
            d_cur = int(rng.integers(recs[-1][0], d_h))
            dd_prev = int(rng.integers(1, 30))
            cfg = DseboConfig(budget=500, d_l=d_l, d_h=d_h, beta=beta).resolved(d_h)
            got = next_dimension(recs, ControllerState(d_cur, dd_prev, 1), cfg)
            assert got == oracle_next_dimension(recs, d_cur, dd_prev, d_l, d_h, beta)


class TestRunDsebo:
    def test_budget_one(self):
        f = make_function("sphere", 60, 10)
        tr = run_dsebo(f, 60, DseboConfig(budget=1, seed=3, acquisition=FAST))
        assert len(tr) == 1 and tr.dims.tolist() == [5] and tr.history == []

    def test_constant_objective_follows_schedule(self):
        tr = run_dsebo(lambda x: 1.0, 200, DseboConfig(budget=200, seed=0, acquisition=FAST))
        expected = scripted_constant_schedule(200, 5, 100, 12.0)
        assert tr.dims.tolist() == expected
        first = next(i for i, d in enumerate(tr.dims, start=1) if d != 5)
        T0 = convergence_threshold(5, DseboConfig(budget=200).resolved(200))
        assert abs(first - (T0 + 1)) <= 1
        assert set(tr.deltas) == {7}

    def test_invariants_on_sphere(self):
        f = make_function("sphere", 80, 10)
        seen = []

        def check(model, data):
            seen.append((len(data), list(data.values)))

        tr = run_dsebo(f, 80, DseboConfig(budget=80, beta=24, seed=1, acquisition=FAST), fit_callback=check)
        assert len(tr) == 80
        dims = tr.dims
        assert np.all(np.diff(dims) >= 0) and dims.min() >= 5 and dims.max() <= 80
        assert np.all(np.diff(tr.best_so_far) <= 0)
        assert np.array_equal(tr.best_so_far, np.minimum.accumulate(tr.values))
        assert all(dd >= 1 for dd in tr.deltas)
        # before the proposal at iteration t the dataset holds all t-1 evaluations, values unchanged
        for t, (n, vals) in enumerate(seen, start=2):
            assert n == t - 1
            assert vals == tr.values[: t - 1].tolist()
        assert len(tr.history) == len(tr.deltas)

    def test_deterministic(self):
        f = make_function("levy", 60, 10)
        cfg = DseboConfig(budget=40, seed=5, beta=30, acquisition=FAST)
        a = run_dsebo(f, 60, cfg)
        b = run_dsebo(f, 60, cfg)
        assert a.to_csv_text() == b.to_csv_text()
        assert a.history == b.history

    def test_fixed_embedding_equivalence(self):
        f = make_function("griewank", 50, 10)
        a = run_dsebo(f, 50, DseboConfig(budget=25, d_l=8, d_h=8, seed=2, acquisition=FAST))
        b = run_fixed_embedding(f, 50, 8, 25, 2, FAST)
        assert a.to_csv_text() == b.to_csv_text()
        assert b.dims.tolist() == [8] * 25

    def test_non_finite_objective(self):
        calls = []

        def f(x):
            calls.append(1)
            return float("nan") if len(calls) == 4 else 1.0

        with pytest.raises(DataError) as info:
            run_dsebo(f, 30, DseboConfig(budget=10, seed=0, acquisition=FAST))
        assert len(info.value.trace) == 3
        assert "non-finite" in info.value.trace.error

    @pytest.mark.parametrize("kwargs", [{"d_l": 0}, {"d_l": 20, "d_h": 10}, {"beta": 0}, {"budget": 0}])
    def test_bad_config(self, kwargs):
        with pytest.raises(ConfigurationError):
            DseboConfig(**kwargs).resolved(50)

    def test_d_h_defaults(self):
        assert DseboConfig().resolved(1000).d_h == 100
        assert DseboConfig().resolved(40).d_h == 40
