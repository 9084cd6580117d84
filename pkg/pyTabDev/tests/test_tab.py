from __future__ import absolute_import

import math

import numpy as np
import pytest
from scipy import special, stats

from pyTabDev.core import *
from pyTabDev.errors import (ConfigurationError, DegenerateScaleError,
                             DomainError)
from pyTabDev.sim.generators import (ar1_covariance, cholesky_factor,
                                     generate_sample)


def basis(n, index):
    vector = np.zeros(n)
    vector[index] = 1.0
    return vector


def design_sample(n, t, rng, rho=0.5):
    """Gaussian AR(1) sample with every mean coordinate n^-1/2"""
    mu = np.full(n, n ** -0.5)
    gamma = cholesky_factor(ar1_covariance(n, rho))
    return generate_sample(mu, gamma, t, "gaussian", rng)


class TestSampleMatrix(object):

    def test_constructor(self):
        """Test constructor"""
        sample = SampleMatrix([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        assert sample.num_obs == 3
        assert sample.num_dims == 2
        assert sample.shape == (3, 2)

    def test_not_two_dimensional(self):
        """Test vectors are rejected"""
        with pytest.raises(DomainError):
            SampleMatrix([1.0, 2.0])

    def test_non_finite(self):
        """Test NaN entries are rejected"""
        with pytest.raises(DomainError):
            SampleMatrix([[1.0, float("nan")]])


class TestOneSampleConfig(object):

    @pytest.mark.parametrize("kwargs", [dict(d0=0.0), dict(d0=-1.0),
                                        dict(d0=1.0, alpha=1.0),
                                        dict(d0=1.0, alpha=0.0),
                                        dict(d0=1.0, split_fraction=1.0),
                                        dict(d0=float("inf"))])
    def test_invalid(self, kwargs):
        """Test invariant violations"""
        with pytest.raises(ConfigurationError):
            OneSampleConfig(**kwargs)

    def test_reference(self):
        """Test the default reference is the zero vector"""
        assert np.array_equal(OneSampleConfig(1.0).reference(3), np.zeros(3))
        with pytest.raises(DomainError):
            OneSampleConfig(1.0, mu0=[1.0, 2.0]).reference(3)


class TestSplitSample(object):

    @pytest.mark.parametrize("num_obs,fraction,sizes",
                             [(200, 0.5, (100, 100)), (5, 0.5, (2, 3)),
                              (10, 0.3, (3, 7))])
    def test_sizes(self, num_obs, fraction, sizes):
        """Test floor rule"""
        data = np.arange(num_obs * 2, dtype=float).reshape(num_obs, 2)
        head, tail = split_sample(SampleMatrix(data), fraction)
        assert (head.num_obs, tail.num_obs) == sizes
        assert np.array_equal(np.vstack([head.data, tail.data]), data)

    @pytest.mark.parametrize("num_obs,fraction", [(4, 0.9), (4, 0.1),
                                                  (2, 0.5)])
    def test_degenerate(self, num_obs, fraction):
        """Test splits with T1 = 0 or T2 < 2"""
        with pytest.raises(ConfigurationError):
            split_sample(SampleMatrix(np.ones((num_obs, 2))), fraction)


class TestComputeTargets(object):

    def test_parallel(self):
        """Test head and tail along e1"""
        head = SampleMatrix(np.tile(basis(4, 0), (3, 1)))
        tail = SampleMatrix(np.tile(basis(4, 0), (5, 1)))
        assert np.allclose(compute_targets(head, tail, 0.5), 0.75)

    def test_orthogonal(self):
        """Test head along e1 and tail along e2"""
        head = SampleMatrix(np.tile(basis(4, 0), (3, 1)))
        tail = SampleMatrix(np.tile(basis(4, 1), (5, 1)))
        assert np.array_equal(compute_targets(head, tail, 1.0),
                              -np.ones(5))

    def test_double_sum(self):
        """Test equality with the average of x_s' x_t - d0^2"""
        rng = np.random.default_rng(3)
        head, tail = rng.normal(size=(6, 4)), rng.normal(size=(5, 4))
        expected = [np.mean([h @ row - 0.7 ** 2 for h in head])
                    for row in tail]
        assert np.allclose(compute_targets(head, tail, 0.7), expected)

    def test_expectation(self):
        """Test E[X_t] = ||mu||^2 - d0^2 for mu = 0"""
        rng = np.random.default_rng(4)
        means = []
        for _ in range(100):
            data = rng.standard_normal((200, 50))
            means.append(np.mean(compute_targets(data[:100], data[100:],
                                                 1.0)))
        stderr = np.std(means, ddof=1) / math.sqrt(len(means))
        assert abs(np.mean(means) + 1.0) < 4.0 * stderr

    def test_dimension_mismatch(self):
        """Test head and tail of different dimension"""
        with pytest.raises(DomainError):
            compute_targets(np.ones((2, 3)), np.ones((2, 4)), 1.0)


class TestEstimateMoments(object):

    def test_constant(self):
        """Test a constant sequence"""
        nuisance = estimate_moments([2.5] * 8)
        assert nuisance.tau_hat == 2.5
        assert nuisance.sigma2_hat == 0.0

    def test_hand_computed(self):
        """Test X = [1, -1]"""
        assert estimate_moments([1.0, -1.0]) == NuisanceEstimates(0.0, 1.0)

    def test_too_short(self):
        """Test a single target is rejected"""
        with pytest.raises(DomainError):
            estimate_moments([1.0])

    def test_design_unbiased(self):
        """Test tau_hat centres on ||mu||^2 - d0^2"""
        rng = np.random.default_rng(21)
        d0 = 1.2
        estimates = []
        for _ in range(100):
            sample = design_sample(100, 200, rng)
            head, tail = split_sample(sample, 0.5)
            estimates.append(
                estimate_moments(compute_targets(head, tail, d0)).tau_hat)
        stderr = np.std(estimates, ddof=1) / math.sqrt(len(estimates))
        assert abs(np.mean(estimates) - (1.0 - d0 ** 2)) < 4.0 * stderr

    def test_consistency_rate(self):
        """Test the RMSE of tau_hat shrinks like T^-1/2"""
        rng = np.random.default_rng(22)

        def rmse(t):
            errors = []
            for _ in range(200):
                head, tail = split_sample(design_sample(100, t, rng), 0.5)
                targets = compute_targets(head, tail, 1.0)
                errors.append(estimate_moments(targets).tau_hat)
            return math.sqrt(np.mean(np.square(errors)))

        assert rmse(800) <= rmse(200) / 1.6


class TestRunTab(object):

    def test_zero_targets(self):
        """Test zero increments and the tie rule"""
        trajectory = run_tab(np.zeros(6), NuisanceEstimates(1.0, 0.0))
        assert np.all(trajectory.partials == 0.0)
        assert np.all(trajectory.thetas == 1)
        assert trajectory.final_stat == 0.0

    def test_hand_recursion(self):
        """Test targets [1, 1] with tau_hat = 1 and sigma2_hat = 0"""
        trajectory = run_tab([1.0, 1.0], NuisanceEstimates(1.0, 0.0))
        step = 0.5 + 1.0 / math.sqrt(2.0)
        assert abs(trajectory.partials[0] - step) < 1e-15
        assert abs(trajectory.partials[0] - 1.2071068) < 1e-7
        assert list(trajectory.thetas) == [1, -1]
        assert trajectory.final_stat == 0.0

    def test_degenerate_scale(self):
        """Test vanishing tau_hat^2 + sigma2_hat"""
        with pytest.raises(DegenerateScaleError):
            run_tab([0.0, 0.0, 0.0], NuisanceEstimates(0.0, 0.0))
        with pytest.raises(DegenerateScaleError):
            run_tab([1e-7, 1e-7], estimate_moments([1e-7, 1e-7]))

    def test_empty(self):
        """Test empty target sequences"""
        with pytest.raises(DomainError):
            run_tab([], NuisanceEstimates(1.0, 1.0))

    def test_control_rule(self):
        """Test theta_1 = +1 and theta_t = +1 iff M_{t-1} <= 0"""
        targets = np.random.default_rng(8).normal(0.2, 1.0, size=500)
        trajectory = run_tab(targets, estimate_moments(targets))
        assert trajectory.thetas[0] == 1
        expected = np.where(trajectory.partials[:-1] <= 0.0, 1, -1)
        assert np.array_equal(trajectory.thetas[1:], expected)
        assert len(trajectory.thetas) == len(trajectory.partials) == 500

    def test_closed_form(self):
        """Test M_T2 equals the two weighted sums of theta_s X_s"""
        targets = np.random.default_rng(9).normal(-0.1, 2.0, size=1000)
        nuisance = estimate_moments(targets)
        trajectory = run_tab(targets, nuisance)
        weighted = np.sum(trajectory.thetas * targets)
        spread = nuisance.tau_hat ** 2 + nuisance.sigma2_hat
        closed = (weighted / targets.size +
                  weighted / math.sqrt(targets.size) / math.sqrt(spread))
        assert abs(trajectory.final_stat - closed) <= \
            1e-10 * max(1.0, abs(closed))

    def test_null_law(self):
        """Test |M| behaves as a standard normal for centred targets"""
        rng = np.random.default_rng(10)
        finals = []
        for _ in range(500):
            targets = rng.standard_normal(10 ** 4)
            finals.append(run_tab(targets,
                                  estimate_moments(targets)).final_stat)
        assert stats.kstest(finals, "norm").statistic < 0.08

    def test_feedback(self):
        """Test concentration for positive and divergence for negative mean"""
        rng = np.random.default_rng(17)
        num_steps = 10 ** 4

        def bound(nuisance):
            spread = nuisance.tau_hat ** 2 + nuisance.sigma2_hat
            scale = 1.0 / num_steps + 1.0 / math.sqrt(num_steps * spread)
            return 6.0 * scale * math.sqrt(num_steps)

        bounded = diverged = 0
        for _ in range(200):
            targets = rng.normal(0.5, 1.0, size=num_steps)
            trajectory = run_tab(targets, estimate_moments(targets))
            bounded += np.max(np.abs(trajectory.partials)) < \
                bound(trajectory.nuisance)
            targets = rng.normal(-0.5, 1.0, size=num_steps)
            trajectory = run_tab(targets, estimate_moments(targets))
            diverged += abs(trajectory.final_stat) > bound(trajectory.nuisance)
        assert bounded >= 198
        assert diverged >= 190

    def test_determinism(self):
        """Test identical inputs give identical trajectories"""
        targets = np.random.default_rng(2).normal(size=300)
        first = run_tab(targets, estimate_moments(targets))
        second = run_tab(targets.copy(), estimate_moments(targets.copy()))
        assert np.array_equal(first.partials, second.partials)
        assert np.array_equal(first.thetas, second.thetas)
        assert first.final_stat == second.final_stat


class TestOneSampleDeviationTest(object):

    def test_decision(self):
        """Test the rejection rule and p-value convention"""
        sample = design_sample(50, 120, np.random.default_rng(30))
        for d0 in [0.5, 1.0, 1.5, 2.5]:
            result, trajectory = one_sample_deviation_test(
                sample, OneSampleConfig(d0))
            assert result.statistic == trajectory.final_stat
            assert result.critical_value == normal_critical_value(0.05)
            assert result.reject_h0 == (abs(result.statistic) >
                                        result.critical_value)
            assert result.p_value == 2.0 * special.ndtr(-abs(result.statistic))
            assert result.sizes == (60, 60)

    def test_far_radius_rejects(self):
        """Test a radius well beyond ||mu|| rejects H0"""
        sample = design_sample(100, 400, np.random.default_rng(31))
        result, _ = one_sample_deviation_test(sample, OneSampleConfig(2.0))
        assert result.reject_h0

    def test_shift_equivariance(self):
        """Test reference mu0 versus data shifted by mu0"""
        rng = np.random.default_rng(32)
        data = rng.normal(size=(40, 7))
        mu0 = rng.normal(size=7)
        shifted, _ = one_sample_deviation_test(
            data, OneSampleConfig(0.8, mu0=mu0))
        direct, _ = one_sample_deviation_test(
            data - mu0, OneSampleConfig(0.8))
        assert shifted.statistic == direct.statistic
        assert shifted.p_value == direct.p_value

    def test_determinism(self):
        """Test bit-identical repeated runs"""
        sample = design_sample(30, 60, np.random.default_rng(33))
        first, trajectory1 = one_sample_deviation_test(sample,
                                                       OneSampleConfig(1.0))
        second, trajectory2 = one_sample_deviation_test(sample,
                                                        OneSampleConfig(1.0))
        assert first.statistic == second.statistic
        assert np.array_equal(trajectory1.partials, trajectory2.partials)

    def test_too_few_observations(self):
        """Test T < 4"""
        with pytest.raises(DomainError):
            one_sample_deviation_test(np.ones((3, 2)), OneSampleConfig(1.0))

    def test_no_coordinates(self):
        """Test n = 0"""
        with pytest.raises(DomainError):
            one_sample_deviation_test(np.ones((10, 0)), OneSampleConfig(1.0))

    def test_constant_data(self):
        """Test data with tau_hat = 0 and no spread"""
        data = np.tile(basis(3, 0), (10, 1))
        with pytest.raises(DegenerateScaleError):
            one_sample_deviation_test(data, OneSampleConfig(1.0))


class TestScanRadii(object):

    @staticmethod
    def fake_run(pattern):
        def run(d0):
            reject = pattern[int(round(d0 * 10)) - 1]
            return TestResult(d0, 0.5, reject, 1.96, (1, 2), None)
        return run

    def test_threshold(self):
        """Test the smallest radius of the final rejecting run"""
        run = self.fake_run([False, True, False, True, True])
        scan = scan_radii(run, [0.5, 0.3, 0.1, 0.4, 0.2])
        assert [row.d0 for row in scan.rows] == [0.1, 0.2, 0.3, 0.4, 0.5]
        assert scan.threshold == 0.4

    def test_no_threshold(self):
        """Test no rejection at the largest radius"""
        scan = scan_radii(self.fake_run([True, False]), [0.1, 0.2])
        assert scan.threshold is None

    def test_empty(self):
        """Test an empty grid"""
        with pytest.raises(ConfigurationError):
            scan_radii(self.fake_run([]), [])

    def test_one_sample_scan(self):
        """Test rows agree with single tests"""
        sample = design_sample(40, 100, np.random.default_rng(34))
        scan = one_sample_scan(sample, [1.5, 0.5, 1.0])
        for row in scan.rows:
            result, _ = one_sample_deviation_test(sample,
                                                  OneSampleConfig(row.d0))
            assert row.statistic == result.statistic
            assert row.abs_statistic == abs(result.statistic)
            assert row.reject_h0 == result.reject_h0


class TestShuffleRows(object):

    def test_permutation(self):
        """Test rows are permuted, not altered"""
        data = np.arange(20, dtype=float).reshape(10, 2)
        shuffled = shuffle_rows(data, np.random.default_rng(1))
        assert sorted(map(tuple, shuffled.data)) == sorted(map(tuple, data))
        again = shuffle_rows(data, np.random.default_rng(1))
        assert np.array_equal(shuffled.data, again.data)
