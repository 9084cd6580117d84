"""This module contains the asymptotic size and power calculator.

The TAB statistic converges to the bandit law B(-kappa) with

    kappa = tau (1 + sqrt(steps / (tau^2 + sigma^2)))

where tau = ||mu||^2 - d0^2 (or ||mu1 - mu2||^2 - d0^2) and sigma^2 is the
variance of one target variable. The predicted rejection probability is then
the bandit tail g(kappa) at z_{alpha/2}, which never exceeds alpha when
kappa >= 0.
"""

from __future__ import absolute_import, division

from collections import namedtuple
import logging
import math

import numpy as np

from ..errors import ConfigurationError, DegenerateScaleError, DomainError
from .bandit import BanditParams, bandit_tail_prob, normal_critical_value

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-10

PowerPoint = namedtuple("PowerPoint", ["d0", "kappa", "predicted_power"])


def _checked_covariance(sigma, num_dims, name):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (num_dims, num_dims):
        raise ConfigurationError("{} has shape {}, expected ({}, {})"
                                 .format(name, sigma.shape, num_dims,
                                         num_dims))
    if not np.all(np.isfinite(sigma)):
        raise ConfigurationError("{} has non-finite entries".format(name))
    if np.max(np.abs(sigma - sigma.T), initial=0.0) > SYMMETRY_TOL:
        raise ConfigurationError("{} is not symmetric".format(name))
    if num_dims and np.linalg.eigvalsh(sigma)[0] < -PSD_TOL:
        raise ConfigurationError("{} is not positive semi-definite"
                                 .format(name))
    return sigma


class PopulationSpec(object):
    """Population moments of one or two groups.

    Args:
      mu (array_like): Mean vector mu (or mu1).
      sigma (array_like): Covariance Sigma (or Sigma1), symmetric PSD.
      mu2 (array_like, optional): Second-group mean for two-sample work.
      sigma2 (array_like, optional): Second-group covariance.
    """

    def __init__(self, mu, sigma, mu2=None, sigma2=None):
        """Constructor for PopulationSpec. See help(PopulationSpec)."""
        self.mu = np.asarray(mu, dtype=float)
        if self.mu.ndim != 1:
            raise ConfigurationError("mu must be a vector")
        num_dims = self.mu.size
        self.sigma = _checked_covariance(sigma, num_dims, "sigma")
        if (mu2 is None) != (sigma2 is None):
            raise ConfigurationError("mu2 and sigma2 must be given together")
        self.mu2 = self.sigma2 = None
        if mu2 is not None:
            self.mu2 = np.asarray(mu2, dtype=float)
            if self.mu2.shape != (num_dims,):
                raise ConfigurationError("mu2 has shape {}, expected ({},)"
                                         .format(self.mu2.shape, num_dims))
            self.sigma2 = _checked_covariance(sigma2, num_dims, "sigma2")

    @property
    def num_dims(self):
        return self.mu.size

    @property
    def is_two_sample(self):
        return self.mu2 is not None


def _quadratic_form(vector, matrix):
    return float(vector @ matrix @ vector)


def _trace_product(lhs, rhs):
    """Tr(lhs rhs) for symmetric operands as an elementwise sum, O(n^2)"""
    return float(np.sum(lhs * rhs))


def kappa_from_moments(tau, sigma2, steps):
    """Drift tau (1 + sqrt(steps / (tau^2 + sigma2))).

    Args:
      tau (float): Mean of one target variable.
      sigma2 (float): Variance of one target variable.
      steps (int): Length of the TAB phase (T2 or N0).

    Returns:
      float: kappa; the statistic's limiting law is B(-kappa).
    """
    spread = tau ** 2 + sigma2
    if not spread > 0.0:
        raise DegenerateScaleError(
            "tau^2 + sigma^2 = {} vanishes for this population"
            .format(spread))
    return tau * (1.0 + math.sqrt(steps / spread))


def _check_counts(**counts):
    for name, value in sorted(counts.items()):
        if value < 1:
            raise ConfigurationError("{} must be at least 1, got {}"
                                     .format(name, value))


def kappa_one_sample(population, d0, t1, t2):
    """Drift kappa_{1,T2} of the one-sample statistic.

    tau = ||mu||^2 - d0^2 and sigma^2 = mu' Sigma mu + Tr(Sigma^2) / T1.

    Args:
      population (PopulationSpec): mu and Sigma.
      d0 (float): Deviation radius.
      t1 (int): Head length T1.
      t2 (int): Tail length T2.

    Returns:
      float: kappa_{1,T2}.
    """
    _check_counts(t1=t1, t2=t2)
    mu, sigma = population.mu, population.sigma
    tau = float(mu @ mu) - d0 ** 2
    sigma2 = (_quadratic_form(mu, sigma) +
              _trace_product(sigma, sigma / t1))
    return kappa_from_moments(tau, sigma2, t2)


def kappa_two_sample(population, d0, m1, m2, n0):
    """Drift kappa_{1,delta} of the two-sample statistic.

    With delta = mu1 - mu2 and S = Sigma1 + Sigma2:
    tau = ||delta||^2 - d0^2 and
    sigma^2 = delta' S delta + Tr(S (Sigma1 / m1 + Sigma2 / m2)).

    Args:
      population (PopulationSpec): Two-group moments.
      d0 (float): Deviation radius.
      m1 (int): Head length of the first group.
      m2 (int): Head length of the second group.
      n0 (int): TAB-phase length N0.

    Returns:
      float: kappa_{1,delta}.
    """
    if not population.is_two_sample:
        raise ConfigurationError("population has no second group")
    _check_counts(m1=m1, m2=m2, n0=n0)
    delta = population.mu - population.mu2
    summed = population.sigma + population.sigma2
    tau = float(delta @ delta) - d0 ** 2
    sigma2 = (_quadratic_form(delta, summed) +
              _trace_product(summed, population.sigma / m1 +
                             population.sigma2 / m2))
    return kappa_from_moments(tau, sigma2, n0)


def limiting_law(kappa):
    """Bandit law B(-kappa) of a statistic with drift kappa"""
    return BanditParams(-kappa)


def theoretical_rejection_prob(kappa, alpha):
    """Asymptotic rejection probability P(|B(-kappa)| > z_{alpha/2}).

    Args:
      kappa (float or array_like): Drift of the statistic.
      alpha (float): Significance level.

    Returns:
      float or numpy.ndarray: g(kappa); at most alpha for kappa >= 0.
    """
    return bandit_tail_prob(kappa, normal_critical_value(alpha))


def power_curve(population, d0_grid, sizes, alpha=0.05):
    """Tabulate drift and predicted power over radii.

    Args:
      population (PopulationSpec): Population moments.
      d0_grid (iterable): Radii, in the order to report them.
      sizes (tuple): (t1, t2) for the one-sample test or (m1, m2, n0) for
        the two-sample test.
      alpha (float, optional): Significance level. Defaults to 0.05.

    Returns:
      list: PowerPoint rows, one per radius.
    """
    d0_grid = [float(d0) for d0 in d0_grid]
    if not d0_grid:
        raise ConfigurationError("radius grid is empty")
    if len(sizes) == 2:
        kappa_of = lambda d0: kappa_one_sample(population, d0, *sizes)
    elif len(sizes) == 3:
        kappa_of = lambda d0: kappa_two_sample(population, d0, *sizes)
    else:
        raise DomainError("sizes must be (t1, t2) or (m1, m2, n0), got {}"
                          .format(sizes))

    rows = []
    for d0 in d0_grid:
        kappa = kappa_of(d0)
        rows.append(PowerPoint(d0, kappa,
                               theoretical_rejection_prob(kappa, alpha)))
    return rows


__all__ = ["PopulationSpec", "PowerPoint", "kappa_from_moments",
           "kappa_one_sample", "kappa_two_sample", "limiting_law",
           "theoretical_rejection_prob", "power_curve"]
