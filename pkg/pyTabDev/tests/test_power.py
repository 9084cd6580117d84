from __future__ import absolute_import

import math

import numpy as np
import pytest
from scipy import integrate, special

from pyTabDev.core import *
from pyTabDev.errors import (ConfigurationError, DegenerateScaleError,
                             DomainError)
from pyTabDev.sim.generators import ar1_covariance

Z_975 = special.ndtri(0.975)


def design_population(num_dims=100, rho=0.5):
    return PopulationSpec(np.full(num_dims, num_dims ** -0.5),
                          ar1_covariance(num_dims, rho))


def brute_trace_square(sigma):
    total = 0.0
    for i in range(sigma.shape[0]):
        for j in range(sigma.shape[0]):
            total += sigma[i, j] * sigma[j, i]
    return total


def quad_rejection(kappa):
    law = limiting_law(kappa)
    upper, _ = integrate.quad(lambda x: bandit_pdf(x, law), Z_975,
                              abs(kappa) + 40.0, epsabs=1e-13,
                              epsrel=1e-12, limit=200)
    return 2.0 * upper


class TestPopulationSpec(object):

    def test_one_sample(self):
        """Test constructor"""
        population = PopulationSpec(np.ones(3), np.eye(3))
        assert population.num_dims == 3
        assert not population.is_two_sample

    def test_two_sample(self):
        """Test constructor with a second group"""
        population = PopulationSpec(np.ones(2), np.eye(2), np.zeros(2),
                                    np.zeros((2, 2)))
        assert population.is_two_sample

    @pytest.mark.parametrize("args", [
        (np.ones(2), [[1.0, 0.5], [0.4, 1.0]]),
        (np.ones(2), [[1.0, 2.0], [2.0, 1.0]]),
        (np.ones(2), np.eye(3)),
        (np.ones((2, 2)), np.eye(2)),
        (np.ones(2), np.eye(2), np.zeros(2)),
        (np.ones(2), np.eye(2), np.zeros(3), np.eye(3)),
    ])
    def test_invalid(self, args):
        """Test asymmetric, indefinite and mis-shaped moments"""
        with pytest.raises(ConfigurationError):
            PopulationSpec(*args)


class TestKappaOneSample(object):

    def test_boundary(self):
        """Test ||mu|| = d0 gives kappa = 0"""
        population = PopulationSpec([0.75, 1.0], np.eye(2))
        assert kappa_one_sample(population, 1.25, 50, 50) == 0.0

    def test_identity(self):
        """Test sigma^2 = ||mu||^2 + n / T1 for Sigma = I"""
        num_dims, t1, t2, d0 = 20, 40, 60, 0.8
        mu = np.linspace(-0.3, 0.3, num_dims)
        tau = float(mu @ mu) - d0 ** 2
        sigma2 = float(mu @ mu) + num_dims / t1
        expected = tau * (1.0 + math.sqrt(t2 / (tau ** 2 + sigma2)))
        kappa = kappa_one_sample(PopulationSpec(mu, np.eye(num_dims)), d0,
                                 t1, t2)
        assert abs(kappa - expected) < 1e-12

    def test_brute_force_trace(self):
        """Test the AR(1) design against an explicit double loop"""
        population = design_population()
        sigma, mu = population.sigma, population.mu
        tau = float(mu @ mu) - 1.2 ** 2
        quad = sum(mu[i] * sigma[i, j] * mu[j] for i in range(100)
                   for j in range(100))
        sigma2 = quad + brute_trace_square(sigma) / 100
        expected = tau * (1.0 + math.sqrt(100 / (tau ** 2 + sigma2)))
        assert abs(kappa_one_sample(population, 1.2, 100, 100) - expected) \
            < 1e-10

    def test_counts(self):
        """Test non-positive split lengths"""
        with pytest.raises(ConfigurationError):
            kappa_one_sample(design_population(10), 1.0, 0, 10)

    def test_degenerate(self):
        """Test tau = 0 with a zero covariance"""
        population = PopulationSpec([1.0, 0.0], np.zeros((2, 2)))
        with pytest.raises(DegenerateScaleError):
            kappa_one_sample(population, 1.0, 10, 10)


class TestKappaTwoSample(object):

    def test_brute_force(self):
        """Test equal means with identity covariances"""
        num_dims = 10
        population = PopulationSpec(np.zeros(num_dims), np.eye(num_dims),
                                    np.zeros(num_dims), np.eye(num_dims))
        summed = 2.0 * np.eye(num_dims)
        product = summed @ (np.eye(num_dims) / 100 + np.eye(num_dims) / 100)
        sigma2 = sum(product[i, i] for i in range(num_dims))
        assert abs(sigma2 - 4.0 * num_dims / 100) < 1e-12
        expected = -1.0 * (1.0 + math.sqrt(100 / (1.0 + sigma2)))
        kappa = kappa_two_sample(population, 1.0, 100, 100, 100)
        assert abs(kappa - expected) < 1e-12

    def test_general(self):
        """Test unequal covariances against explicit matrix arithmetic"""
        rng = np.random.default_rng(5)
        a1, a2 = rng.normal(size=(6, 6)), rng.normal(size=(6, 6))
        sigma1, sigma2 = a1 @ a1.T, a2 @ a2.T
        mu1, mu2 = rng.normal(size=6), rng.normal(size=6)
        population = PopulationSpec(mu1, sigma1, mu2, sigma2)
        delta = mu1 - mu2
        summed = sigma1 + sigma2
        spread = (delta @ summed @ delta +
                  np.trace(summed @ (sigma1 / 30 + sigma2 / 40)))
        tau = delta @ delta - 0.5 ** 2
        expected = tau * (1.0 + math.sqrt(25 / (tau ** 2 + spread)))
        kappa = kappa_two_sample(population, 0.5, 30, 40, 25)
        assert abs(kappa - expected) < 1e-9 * max(1.0, abs(expected))

    def test_boundary(self):
        """Test ||mu1 - mu2|| = d0 gives kappa = 0"""
        population = PopulationSpec([1.75, 1.0], np.eye(2), [1.0, 0.0],
                                    np.eye(2))
        assert kappa_two_sample(population, 1.25, 20, 20, 10) == 0.0

    def test_reduction(self):
        """Test a zero second group reproduces the one-sample drift"""
        population = design_population(30)
        paired = PopulationSpec(population.mu, population.sigma,
                                np.zeros(30), np.zeros((30, 30)))
        for d0 in [0.5, 1.0, 1.3]:
            assert kappa_two_sample(paired, d0, 70, 90, 40) == \
                kappa_one_sample(population, d0, 70, 40)

    def test_one_group(self):
        """Test a population without second group"""
        with pytest.raises(ConfigurationError):
            kappa_two_sample(design_population(5), 1.0, 10, 10, 10)


class TestTheoreticalRejectionProb(object):

    def test_zero_drift(self):
        """Test kappa = 0 gives alpha"""
        assert abs(theoretical_rejection_prob(0.0, 0.05) - 0.05) < 1e-12
        assert abs(theoretical_rejection_prob(0.0, 0.1) - 0.1) < 1e-12

    @pytest.mark.parametrize("kappa", [-8.0, -2.0, 0.5, 3.0])
    def test_quadrature(self, kappa):
        """Test against numerical integration of the limiting density"""
        assert abs(theoretical_rejection_prob(kappa, 0.05) -
                   quad_rejection(kappa)) < 1e-8

    def test_examples(self):
        """Test full power and the size side"""
        assert theoretical_rejection_prob(-8.0, 0.05) >= 0.9999
        assert theoretical_rejection_prob(3.0, 0.05) <= 0.001

    def test_size_bound(self):
        """Test g(kappa) <= alpha for kappa >= 0"""
        kappas = np.arange(0.0, 8.0 + 1e-9, 0.25)
        probs = theoretical_rejection_prob(kappas, 0.05)
        assert np.all(probs <= 0.05 + 1e-12)

    def test_limiting_law(self):
        """Test the sign flip"""
        assert limiting_law(2.0) == BanditParams(-2.0)

    def test_case_trichotomy(self):
        """Test power tends to one, a constant and alpha as tau shrinks"""
        steps = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]

        def powers(exponent):
            return [theoretical_rejection_prob(
                kappa_from_moments(-(t ** exponent), 1.0, t), 0.05)
                for t in steps]

        fast = powers(-0.25)
        assert all(b >= a for a, b in zip(fast, fast[1:]))
        assert fast[-1] > 0.999

        middle = powers(-0.5)
        assert all(0.05 < power < 1.0 for power in middle)
        limit = theoretical_rejection_prob(-1.0, 0.05)
        assert abs(middle[-1] - limit) < 1e-3

        slow = powers(-1.0)
        assert all(b < a for a, b in zip(slow, slow[1:]))
        assert abs(slow[-1] - 0.05) < 1e-3


class TestPowerCurve(object):

    def test_design_endpoints(self):
        """Test the standard grid on the AR(1) design"""
        grid = np.round(np.arange(0.5, 1.5 + 1e-9, 0.1), 10)
        rows = power_curve(design_population(), grid, (100, 100))
        assert len(rows) == 11
        assert rows[0].predicted_power < 1e-6
        assert rows[-1].predicted_power > 0.999
        kappas = [row.kappa for row in rows]
        assert all(b < a for a, b in zip(kappas, kappas[1:]))
        powers = [row.predicted_power for row in rows]
        assert all(b >= a for a, b in zip(powers, powers[1:]))

    def test_boundary_point(self):
        """Test a single radius at ||mu||"""
        population = PopulationSpec([0.75, 1.0], np.eye(2))
        row, = power_curve(population, [1.25], (10, 10), alpha=0.1)
        assert row.kappa == 0.0
        assert abs(row.predicted_power - 0.1) < 1e-12

    def test_two_sample(self):
        """Test three sizes select the two-sample drift"""
        population = PopulationSpec(np.zeros(4), np.eye(4), np.zeros(4),
                                    np.eye(4))
        row, = power_curve(population, [1.0], (50, 50, 25))
        assert row.kappa == kappa_two_sample(population, 1.0, 50, 50, 25)

    def test_errors(self):
        """Test an empty grid and malformed sizes"""
        with pytest.raises(ConfigurationError):
            power_curve(design_population(5), [], (10, 10))
        with pytest.raises(DomainError):
            power_curve(design_population(5), [1.0], (10, 10, 10, 10))
