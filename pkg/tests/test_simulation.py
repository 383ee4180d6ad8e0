import io
import math

import numpy as np
import pytest

from summstat import estimators, simulation
from summstat.simulation import (
    Beta,
    Exponential,
    LogNormal,
    Normal,
    SimulationConfig,
    Weibull,
    preset_study,
    relative_error,
    replication_stream,
    run_grid,
    run_study,
    sample,
    summarize,
    write_cells_csv,
)

from oracles import sample_sd


def _rng(seed=0):
    return np.random.default_rng(seed)


class TestDistributionSpecs:
    def test_labels(self):
        assert Normal(50, 17).label == "normal:50:17"
        assert LogNormal(5, 0.25).label == "lognormal:5:0.25"
        assert Exponential(10).label == "exponential:10"

    @pytest.mark.parametrize("bad", [
        lambda: Normal(0, 0),
        lambda: Normal(0, -1),
        lambda: Beta(0, 2),
        lambda: Exponential(-3),
        lambda: Weibull(2, 0),
        lambda: LogNormal(1, float("nan")),
    ])
    def test_parameter_validation(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestSample:
    def test_deterministic_given_stream_state(self):
        a = sample(Normal(50, 17), 100, _rng(7))
        b = sample(Normal(50, 17), 100, _rng(7))
        np.testing.assert_array_equal(a, b)

    def test_exponential_population_mean(self):
        draws = sample(Exponential(10), 1_000_000, _rng(1))
        # mean 1/10, sd 1/10: 5-sigma CLT band
        assert draws.mean() == pytest.approx(0.1, abs=5 * 0.1 / 1000)
        assert (draws > 0).all()

    def test_normal_population_mean(self):
        draws = sample(Normal(50, 17), 1_000_000, _rng(2))
        assert draws.mean() == pytest.approx(50, abs=5 * 17 / 1000)
        assert draws.std(ddof=1) == pytest.approx(17, abs=0.1)

    def test_lognormal_moments(self):
        draws = sample(LogNormal(4, 0.3), 1_000_000, _rng(3))
        expected = math.exp(4 + 0.3 ** 2 / 2)
        assert draws.mean() == pytest.approx(expected, rel=2e-3)
        assert (draws > 0).all()

    def test_beta_support_and_mean(self):
        draws = sample(Beta(9, 4), 500_000, _rng(4))
        assert ((draws > 0) & (draws < 1)).all()
        mean = 9 / 13
        sd = math.sqrt(9 * 4 / (13 ** 2 * 14))
        assert draws.mean() == pytest.approx(mean, abs=5 * sd / math.sqrt(500_000))

    def test_beta_shape_below_one(self):
        draws = sample(Beta(0.5, 0.5), 200_000, _rng(5))
        assert ((draws > 0) & (draws < 1)).all()
        assert draws.mean() == pytest.approx(0.5, abs=0.005)

    def test_weibull_mean(self):
        draws = sample(Weibull(2, 35), 1_000_000, _rng(6))
        expected = 35 * math.gamma(1.5)
        assert draws.mean() == pytest.approx(expected, rel=2e-3)
        assert (draws > 0).all()

    def test_gamma_internal_moments(self):
        g = simulation._standard_gamma(_rng(8), 9.0, 400_000)
        assert g.mean() == pytest.approx(9.0, abs=5 * 3 / math.sqrt(400_000))
        assert g.var() == pytest.approx(9.0, rel=0.02)

    def test_bad_size(self):
        with pytest.raises(ValueError):
            sample(Normal(0, 1), 0, _rng())


class TestSummarize:
    def test_five_point_example(self):
        s = summarize([1, 2, 3, 4, 5])
        assert (s.a, s.q1, s.median, s.q3, s.b) == (1, 2, 3, 4, 5)
        assert s.true_mean == 3
        assert s.true_sd == pytest.approx(math.sqrt(2.5))
        assert s.true_sd == pytest.approx(sample_sd([1, 2, 3, 4, 5]))

    def test_constant_sample(self):
        s = summarize([2.5] * 9)
        assert s.a == s.q1 == s.median == s.q3 == s.b == 2.5
        assert s.true_sd == 0.0

    def test_order_respected_on_random_input(self):
        for seed in range(5):
            x = _rng(seed).normal(size=21)
            s = summarize(x)
            assert s.a <= s.q1 <= s.median <= s.q3 <= s.b
            assert s.a == x.min() and s.b == x.max()

    def test_positions_are_exact_order_stats(self):
        x = _rng(11).normal(size=13)  # Q = 3
        s = summarize(x)
        xs = np.sort(x)
        assert (s.q1, s.median, s.q3) == (xs[3], xs[6], xs[9])

    @pytest.mark.parametrize("n", [1, 4, 6, 8, 12])
    def test_rejects_non_4q1(self, n):
        with pytest.raises(ValueError):
            summarize(list(range(n)))

    def test_scenario_projection(self):
        s = summarize([1, 2, 3, 4, 5])
        c1 = s.to_scenario("C1")
        assert isinstance(c1, estimators.C1)
        assert not hasattr(c1, "q1")
        c3 = s.to_scenario("C3")
        assert not hasattr(c3, "a")


class TestRelativeError:
    def test_examples(self):
        assert relative_error(110, 100) == pytest.approx(0.10)
        assert relative_error(100, 100) == 0.0
        assert relative_error(90, 100) == pytest.approx(-0.10)

    def test_zero_truth(self):
        with pytest.raises(ValueError):
            relative_error(1.0, 0.0)


def _small_config(**overrides):
    base = dict(
        dist=Normal(50, 17),
        n_grid=(5, 9),
        reps=20,
        master_seed=123,
        methods={"C1": [(estimators.MethodId.MEAN_SIMPLE, estimators.MethodId.SD_WAN_BLOM)]},
    )
    base.update(overrides)
    return SimulationConfig(**base)


class TestConfigValidation:
    def test_grid_must_be_4q1(self):
        with pytest.raises(ValueError):
            _small_config(n_grid=(5, 10))
        with pytest.raises(ValueError):
            _small_config(n_grid=(3,))

    def test_reps_positive(self):
        with pytest.raises(ValueError):
            _small_config(reps=0)

    def test_method_scenario_consistency(self):
        with pytest.raises(ValueError):
            _small_config(methods={"C3": [(estimators.MethodId.MEAN_SIMPLE,
                                           estimators.MethodId.SD_BLAND)]})

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            _small_config(n_grid=())


class TestRunGrid:
    def test_single_replication_matches_manual_computation(self):
        config = _small_config(n_grid=(9,), reps=1)
        (cell,) = run_grid(config)
        # rebuild the exact same stream and replay the estimate by hand
        rng = replication_stream(123, config.dist, 9, 0)
        s = summarize(sample(config.dist, 9, rng))
        est = estimators.estimate(s.to_scenario("C1"))
        assert cell.avg_rel_err_mean == relative_error(est.mean, s.true_mean)
        assert cell.avg_rel_err_sd == relative_error(est.sd, s.true_sd)
        assert cell.reps == 1
        assert cell.discarded == 0

    def test_bitwise_determinism(self):
        config = _small_config()
        a, b = run_grid(config), run_grid(config)
        assert a == b
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_cells_csv(a, buf_a)
        write_cells_csv(b, buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_workers_do_not_change_results(self):
        config = _small_config(n_grid=(5, 9, 13), reps=10)
        assert run_grid(config, workers=1) == run_grid(config, workers=3)

    def test_methods_share_replications(self):
        # same samples feed every method of a grid point, so two methods
        # of the same cell see identical mean errors
        config = _small_config(
            methods={"C1": [
                (estimators.MethodId.MEAN_SIMPLE, estimators.MethodId.SD_WAN_BLOM),
                (estimators.MethodId.MEAN_SIMPLE, estimators.MethodId.SD_RANGE_RULE),
            ]}
        )
        cells = run_grid(config)
        by_method = {(c.n, c.sd_method): c for c in cells}
        for n in (5, 9):
            a = by_method[(n, estimators.MethodId.SD_WAN_BLOM)]
            b = by_method[(n, estimators.MethodId.SD_RANGE_RULE)]
            assert a.avg_rel_err_mean == b.avg_rel_err_mean
            assert a.avg_rel_err_sd != b.avg_rel_err_sd

    def test_cells_cover_grid_in_order(self):
        config = _small_config(n_grid=(5, 9, 13), reps=2)
        cells = run_grid(config)
        assert [c.n for c in cells] == [5, 9, 13]

    def test_zero_truth_replications_are_discarded(self, monkeypatch):
        calls = {"count": 0}
        real_sample = simulation.sample

        def flaky_sample(dist, n, rng):
            calls["count"] += 1
            if calls["count"] <= 2:
                return np.full(n, 3.0)  # true_sd == 0 -> must be discarded
            return real_sample(dist, n, rng)

        monkeypatch.setattr(simulation, "sample", flaky_sample)
        config = _small_config(n_grid=(5,), reps=4)
        (cell,) = run_grid(config)
        assert cell.discarded == 2
        assert cell.reps == 4
        assert math.isfinite(cell.avg_rel_err_sd)

    def test_standard_error_shrinks_with_reps(self):
        # spread of the cell average across master seeds should drop
        # roughly like 1/sqrt(reps)
        def spread(reps):
            values = []
            for seed in range(24):
                config = _small_config(n_grid=(9,), reps=reps, master_seed=seed)
                values.append(run_grid(config)[0].avg_rel_err_sd)
            return np.std(values)

        s1, s2, s3 = spread(25), spread(100), spread(400)
        assert 1.3 < s1 / s2 < 3.1
        assert 1.3 < s2 / s3 < 3.1


class TestStudyPresets:
    def test_c1_normal_defaults(self):
        configs = preset_study("c1-normal", reps=10)
        assert len(configs) == 1
        assert configs[0].dist == Normal(50, 17)
        assert len(configs[0].n_grid) == 250
        assert configs[0].n_grid[0] == 5 and configs[0].n_grid[-1] == 1001

    def test_c1_skewed_distributions(self):
        labels = [c.dist.label for c in preset_study("c1-skewed", reps=1)]
        assert labels == [
            "lognormal:4:0.3", "beta:9:4", "exponential:10", "weibull:2:35",
        ]
        assert all(c.n_grid[-1] == 101 for c in preset_study("c1-skewed", reps=1))

    def test_c2_methods(self):
        configs = preset_study("c2", reps=1, q_values=[1, 2])
        assert [c.dist.label for c in configs] == [
            "normal:5:1", "lognormal:5:0.25", "lognormal:5:0.5", "lognormal:5:1",
        ]
        pairs = configs[0].methods["C2"]
        assert {sd for _, sd in pairs} == {
            estimators.MethodId.SD_BLAND, estimators.MethodId.SD_WAN_BLOM,
        }

    def test_c3_spans_scenarios(self):
        configs = preset_study("c3", reps=1, q_values=[1])
        assert len(configs) == 5
        assert set(configs[0].methods) == {"C1", "C2", "C3"}
        assert configs[0].methods["C3"] == (
            (estimators.MethodId.MEAN_SIMPLE, estimators.MethodId.SD_WAN_EXACT),
        )

    def test_dist_filter(self):
        configs = preset_study("c3", reps=1, q_values=[1], dist_filter="normal:50")
        assert [c.dist.label for c in configs] == ["normal:50:17"]
        with pytest.raises(ValueError):
            preset_study("c3", reps=1, dist_filter="cauchy")

    def test_unknown_study(self):
        with pytest.raises(ValueError):
            preset_study("c4")

    def test_run_study_concatenates(self):
        configs = preset_study("c2", reps=2, q_values=[1])
        cells = run_study(configs)
        assert len(cells) == 4 * 2  # four dists x two method pairs
