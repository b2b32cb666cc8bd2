"""AR(1) generation, calibration distortions, and the Monte Carlo harness."""

import numpy as np
import pytest
from scipy.special import ndtri

from opcpd import (AffineMap, DetectorConfig, MultiConfig, PatternConfig,
                   PiecewiseLinearMap, ReplicationError, ScaleTailsMap,
                   SimSpec, apply_distortions, derive_seed,
                   extract_pattern_sequence, monte_carlo, simulate_ar1)

from oracles import ar1_recursion, lag1_autocorrelation


class TestMonotoneMaps:
    def test_affine(self):
        out = AffineMap(2.0, 1.0)(np.array([-1.0, 0.0, 3.0]))
        assert out.tolist() == [-1.0, 1.0, 7.0]

    def test_affine_rejects_non_positive_scale(self):
        with pytest.raises(ValueError):
            AffineMap(0.0)
        with pytest.raises(ValueError):
            AffineMap(-2.0, 1.0)

    def test_scale_tails(self):
        tails = ScaleTailsMap(threshold=2.0, factor=2.0)
        out = tails(np.array([-3.0, -2.0, 0.5, 2.0, 2.5]))
        assert out.tolist() == [-6.0, -2.0, 0.5, 2.0, 5.0]

    def test_scale_tails_validation(self):
        with pytest.raises(ValueError):
            ScaleTailsMap(threshold=-1.0, factor=2.0)
        with pytest.raises(ValueError):
            ScaleTailsMap(threshold=1.0, factor=1.0)

    def test_piecewise_linear_interp_and_extrapolation(self):
        pw = PiecewiseLinearMap(knots_x=(-1.0, 0.0, 1.0), knots_y=(-2.0, 0.0, 3.0))
        out = pw(np.array([-2.0, -0.5, 0.5, 2.0]))
        assert out.tolist() == [-4.0, -1.0, 1.5, 6.0]

    def test_piecewise_linear_validation(self):
        with pytest.raises(ValueError):
            PiecewiseLinearMap(knots_x=(0.0, 1.0), knots_y=(1.0, 1.0))
        with pytest.raises(ValueError):
            PiecewiseLinearMap(knots_x=(1.0, 0.0), knots_y=(0.0, 1.0))
        with pytest.raises(ValueError):
            PiecewiseLinearMap(knots_x=(0.0,), knots_y=(0.0,))

    @pytest.mark.parametrize("dist_map", [
        AffineMap(0.3, -2.0),
        ScaleTailsMap(threshold=0.8, factor=3.0),
        PiecewiseLinearMap(knots_x=(-1.0, 0.5, 2.0), knots_y=(-5.0, 0.0, 1.0)),
    ])
    def test_all_maps_strictly_increasing(self, rng, dist_map):
        x = np.sort(rng.normal(size=500, scale=2.0))
        y = dist_map(x)
        assert np.all(np.diff(y)[np.diff(x) > 0] > 0)


class TestApplyDistortions:
    def test_empty_list_is_identity_copy(self, rng):
        x = rng.normal(size=50)
        y = apply_distortions(x, ())
        assert np.array_equal(x, y)
        assert y is not x

    def test_ranges_between_starts(self):
        x = np.ones(10)
        out = apply_distortions(x, ((4, AffineMap(2.0)), (7, AffineMap(5.0))))
        assert out.tolist() == [1, 1, 1, 1, 2, 2, 2, 5, 5, 5]

    def test_shared_start_composes_in_list_order(self):
        # gain first, tail scaling second: 2.5 shrinks below the threshold
        # and stays; the reverse order would blow it up to 3.54
        gain = AffineMap(1.0 / np.sqrt(2.0))
        tails = ScaleTailsMap(threshold=2.0, factor=2.0)
        out = apply_distortions(np.array([2.5]), ((0, gain), (0, tails)))
        assert out[0] == pytest.approx(2.5 / np.sqrt(2.0))
        reverse = apply_distortions(np.array([2.5]), ((0, tails), (0, gain)))
        assert reverse[0] == pytest.approx(5.0 / np.sqrt(2.0))

    @pytest.mark.parametrize("dist_map", [
        AffineMap(np.sqrt(2.0)),
        ScaleTailsMap(threshold=0.5, factor=2.0),
        PiecewiseLinearMap(knots_x=(-2.0, 0.0, 2.0), knots_y=(-1.0, 0.5, 9.0)),
    ])
    def test_whole_series_map_leaves_patterns_alone(self, rng, dist_map):
        config = PatternConfig(order=3, delay=1, window=20)
        x = rng.normal(size=200)
        y = apply_distortions(x, ((0, dist_map),))
        assert np.array_equal(
            extract_pattern_sequence(x, config).ids,
            extract_pattern_sequence(y, config).ids)


class TestSimSpecValidation:
    def test_schedule_must_start_at_zero(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((1, 0.1),))

    def test_schedule_strictly_increasing(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((0, 0.1), (5, 0.2), (5, 0.3)))

    def test_schedule_within_length(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((0, 0.1), (10, 0.2)))

    def test_coefficients_stationary(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((0, 1.0),))

    def test_innovation_sd_positive(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((0, 0.1),), innovation_sd=0.0)

    def test_distortions_must_be_maps(self):
        with pytest.raises(ValueError):
            SimSpec(length=10, coeff_schedule=((0, 0.1),),
                    distortions=((0, np.exp),))


class TestSimulateAr1:
    def test_same_seed_bit_identical(self):
        spec = SimSpec(length=5000, coeff_schedule=((0, 0.1), (2500, 0.4)), seed=11)
        assert np.array_equal(simulate_ar1(spec), simulate_ar1(spec))

    def test_different_seeds_differ(self):
        base = SimSpec(length=100, coeff_schedule=((0, 0.2),), seed=1)
        other = SimSpec(length=100, coeff_schedule=((0, 0.2),), seed=2)
        assert not np.array_equal(simulate_ar1(base), simulate_ar1(other))

    def test_matches_scalar_recursion(self):
        # same innovations, plain-python recursion as the reference
        spec = SimSpec(length=300, coeff_schedule=((0, 0.3), (120, -0.5)),
                       innovation_sd=1.7, seed=99)
        rng = np.random.Generator(np.random.PCG64(99))
        u = (rng.integers(0, 1 << 53, size=301, dtype=np.uint64) + 0.5) * 2.0**-53
        eps = ndtri(u)
        x_init = 1.7 / np.sqrt(1.0 - 0.3**2) * eps[0]
        phis = [0.3] * 120 + [-0.5] * 180
        expected = ar1_recursion(phis, (1.7 * eps[1:]).tolist(), x_init)
        np.testing.assert_allclose(simulate_ar1(spec), expected,
                                   rtol=0, atol=1e-12)

    def test_white_noise_is_uncorrelated(self):
        spec = SimSpec(length=100_000, coeff_schedule=((0, 0.0),), seed=4)
        x = simulate_ar1(spec)
        assert abs(lag1_autocorrelation(x.tolist())) < 0.01

    def test_lag1_autocorrelation_tracks_coefficient(self):
        spec = SimSpec(length=100_000, coeff_schedule=((0, 0.3),), seed=5)
        x = simulate_ar1(spec)
        assert abs(lag1_autocorrelation(x.tolist()) - 0.3) < 0.02

    def test_stationary_start_variance(self):
        # t=0 variance over replications matches sd^2 / (1 - phi^2)
        phi, sd, reps = 0.6, 2.0, 4000
        first = np.array([
            simulate_ar1(SimSpec(length=1, coeff_schedule=((0, phi),),
                                 innovation_sd=sd, seed=seed))[0]
            for seed in range(reps)
        ])
        target = sd**2 / (1.0 - phi**2)
        spread = target * np.sqrt(2.0 / (reps - 1))
        assert abs(first.var() - target) < 3.0 * spread

    def test_distortions_applied(self):
        spec = SimSpec(length=100, coeff_schedule=((0, 0.1),),
                       distortions=((50, AffineMap(3.0)),), seed=8)
        plain = simulate_ar1(SimSpec(length=100, coeff_schedule=((0, 0.1),), seed=8))
        distorted = simulate_ar1(spec)
        assert np.array_equal(distorted[:50], plain[:50])
        np.testing.assert_allclose(distorted[50:], 3.0 * plain[50:], rtol=1e-15)


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(42, 7) == derive_seed(42, 7)

    def test_distinct_streams(self):
        seeds = {derive_seed(b, r) for b in range(4) for r in range(256)}
        assert len(seeds) == 4 * 256

    def test_range(self):
        for r in range(100):
            assert 0 <= derive_seed(2**63, r) < 2**64


class TestMonteCarlo:
    SPEC = SimSpec(length=20 * 25 + 3, coeff_schedule=((0, 0.1), (253, 0.8)))
    CONFIG = DetectorConfig(pattern=PatternConfig(order=3, delay=1, window=25))

    def test_single_rep_point_mass(self):
        report = monte_carlo(self.SPEC, self.CONFIG, reps=1, base_seed=3)
        assert report.mode == "split"
        assert list(report.histogram.values()) == [1.0]

    def test_frequencies_sum_to_one(self):
        report = monte_carlo(self.SPEC, self.CONFIG, reps=60, base_seed=3)
        assert sum(report.histogram.values()) == pytest.approx(1.0, abs=1e-12)
        assert report.reps == 60

    def test_deterministic_and_thread_invariant(self):
        sequential = monte_carlo(self.SPEC, self.CONFIG, reps=40, base_seed=9,
                                 n_threads=1)
        threaded = monte_carlo(self.SPEC, self.CONFIG, reps=40, base_seed=9,
                               n_threads=4)
        assert sequential.histogram == threaded.histogram

    def test_thread_env_var(self, monkeypatch):
        monkeypatch.setenv("OP_CPD_THREADS", "2")
        report = monte_carlo(self.SPEC, self.CONFIG, reps=10, base_seed=9)
        reference = monte_carlo(self.SPEC, self.CONFIG, reps=10, base_seed=9,
                                n_threads=1)
        assert report.histogram == reference.histogram

    def test_strong_change_is_found(self):
        report = monte_carlo(self.SPEC, self.CONFIG, reps=60, base_seed=3)
        assert report.modal_key() == (10, 10)

    def test_pair_mode_keys_are_sample_indices(self):
        config = DetectorConfig(pattern=PatternConfig(order=3, delay=1, window=25),
                                multi=MultiConfig(max_changes=2))
        report = monte_carlo(self.SPEC, config, reps=5, base_seed=3)
        assert report.mode == "sample_pair"
        for key in report.histogram:
            assert len(key) == 2
            assert all(0 < v < self.SPEC.length for v in key)
            assert list(key) == sorted(key)

    def test_replication_failure_carries_index(self):
        bad_spec = SimSpec(length=30, coeff_schedule=((0, 0.1),))
        with pytest.raises(ReplicationError) as info:
            monte_carlo(bad_spec, self.CONFIG, reps=3, base_seed=0)
        assert info.value.replication == 0

    def test_reps_must_be_positive(self):
        with pytest.raises(ValueError):
            monte_carlo(self.SPEC, self.CONFIG, reps=0, base_seed=0)
