"""This module contains the one-sample deviation test

    H0: ||mu - mu0||_2 > d0    versus    H1: ||mu - mu0||_2 <= d0

built on the sequential two-armed bandit (TAB) statistic. The sample is split
into a head, whose mean fixes a projection direction, and a tail, which is
consumed one observation at a time by the sign-controlled recursion in
run_tab.
"""

from __future__ import absolute_import, division

from collections import namedtuple
import logging
import math

import numpy as np
from scipy import special

from ..errors import ConfigurationError, DegenerateScaleError, DomainError
from .bandit import normal_critical_value

logger = logging.getLogger(__name__)

MIN_OBSERVATIONS = 4
SCALE_FLOOR = 1e-12


class SampleMatrix(object):
    """T observations of an n-dimensional vector, one observation per row.

    Args:
      data (array_like): Two-dimensional array of finite reals.
    """

    def __init__(self, data):
        """Constructor for SampleMatrix. See help(SampleMatrix)."""
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise DomainError("sample data must be two-dimensional, got "
                              "shape {}".format(data.shape))
        if not np.all(np.isfinite(data)):
            raise DomainError("sample data contains non-finite entries")
        self.data = data

    @property
    def num_obs(self):
        """Number of observations T"""
        return self.data.shape[0]

    @property
    def num_dims(self):
        """Dimension n of each observation"""
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return "SampleMatrix(T={}, n={})".format(self.num_obs, self.num_dims)


def as_sample_matrix(sample):
    """Wrap an array in a SampleMatrix unless it already is one"""
    if isinstance(sample, SampleMatrix):
        return sample
    return SampleMatrix(sample)


class OneSampleConfig(object):
    """Configuration of the one-sample deviation test.

    Args:
      d0 (float): Deviation radius, positive.
      mu0 (array_like, optional): Reference mean. Defaults to the zero vector
        of the sample dimension.
      alpha (float, optional): Significance level. Defaults to 0.05.
      split_fraction (float, optional): Share c1 = T1 / T of the head.
        Defaults to 0.5.
    """

    def __init__(self, d0, mu0=None, alpha=0.05, split_fraction=0.5):
        """Constructor for OneSampleConfig. See help(OneSampleConfig)."""
        if not (math.isfinite(d0) and d0 > 0.0):
            raise ConfigurationError("d0 must be positive, got {}".format(d0))
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(
                "alpha must lie in (0, 1), got {}".format(alpha))
        if not 0.0 < split_fraction < 1.0:
            raise ConfigurationError(
                "split_fraction must lie in (0, 1), got {}"
                .format(split_fraction))
        self.d0 = float(d0)
        self.mu0 = None if mu0 is None else np.asarray(mu0, dtype=float)
        self.alpha = float(alpha)
        self.split_fraction = float(split_fraction)

    def reference(self, num_dims):
        """Return mu0 as a vector of length num_dims"""
        if self.mu0 is None:
            return np.zeros(num_dims)
        if self.mu0.shape != (num_dims,):
            raise DomainError("mu0 has shape {}, expected ({},)"
                              .format(self.mu0.shape, num_dims))
        if not np.all(np.isfinite(self.mu0)):
            raise DomainError("mu0 contains non-finite entries")
        return self.mu0

    def as_dict(self):
        return {"test": "one_sample", "d0": self.d0, "alpha": self.alpha,
                "split_fraction": self.split_fraction,
                "mu0": None if self.mu0 is None else self.mu0.tolist()}


NuisanceEstimates = namedtuple("NuisanceEstimates", ["tau_hat", "sigma2_hat"])

TabTrajectory = namedtuple("TabTrajectory", ["thetas", "partials", "targets",
                                             "nuisance", "final_stat"])


class TestResult(namedtuple("TestResult",
                            ["statistic", "p_value", "reject_h0",
                             "critical_value", "sizes", "config"])):
    """Outcome of a deviation test.

    ``sizes`` holds the split, (t1, t2) for one sample and (m1, m2, n0) for
    two samples; ``config`` echoes the configuration object.
    """

    __slots__ = ()
    __test__ = False


RadiusRow = namedtuple("RadiusRow", ["d0", "statistic", "abs_statistic",
                                     "p_value", "reject_h0"])

RadiusScan = namedtuple("RadiusScan", ["rows", "threshold"])


def split_sample(sample, split_fraction):
    """Split a sample into head and tail without reordering rows.

    Args:
      sample (SampleMatrix): The full sample of T rows.
      split_fraction (float): Head share c1 in (0, 1).

    Returns:
      tuple: (head, tail) with T1 = floor(c1 T) and T2 = T - T1 rows.
    """
    sample = as_sample_matrix(sample)
    if not 0.0 < split_fraction < 1.0:
        raise ConfigurationError("split_fraction must lie in (0, 1), got {}"
                                 .format(split_fraction))
    num_head = int(math.floor(split_fraction * sample.num_obs))
    num_tail = sample.num_obs - num_head
    if num_head < 1 or num_tail < 2:
        raise ConfigurationError(
            "degenerate split of T={} at fraction {}: T1={}, T2={} "
            "(need T1 >= 1, T2 >= 2)".format(sample.num_obs, split_fraction,
                                             num_head, num_tail))
    return (SampleMatrix(sample.data[:num_head]),
            SampleMatrix(sample.data[num_head:]))


def project_targets(rows, direction, d0):
    """Inner products of each row with direction, shifted by -d0^2"""
    return rows @ direction - d0 ** 2


def compute_targets(head, tail, d0):
    """Target variables X_t of the tail observations.

    X_t = mean(head)' tail_t - d0^2, which equals the average over head rows
    of (x_s' tail_t - d0^2) and has expectation ||mu||^2 - d0^2.

    Args:
      head (SampleMatrix): The T1 head rows, reference mean already removed.
      tail (SampleMatrix): The T2 tail rows, reference mean already removed.
      d0 (float): Deviation radius.

    Returns:
      numpy.ndarray: The T2 targets.
    """
    head, tail = as_sample_matrix(head), as_sample_matrix(tail)
    if head.num_dims != tail.num_dims:
        raise DomainError("head has dimension {} but tail has {}"
                          .format(head.num_dims, tail.num_dims))
    return project_targets(tail.data, head.data.mean(axis=0), d0)


def estimate_moments(targets):
    """Nuisance estimates from the targets.

    tau_hat = mean(X) and sigma2_hat = mean(X^2) - tau_hat^2 with the 1/T2
    divisor; rounding negatives of sigma2_hat are clamped to zero.

    Args:
      targets (array_like): At least two target values.

    Returns:
      NuisanceEstimates: The pair (tau_hat, sigma2_hat).
    """
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 1 or targets.size < 2:
        raise DomainError("need at least two targets, got {}"
                          .format(targets.size))
    tau_hat = float(np.mean(targets))
    sigma2_hat = float(np.mean(targets ** 2)) - tau_hat ** 2
    return NuisanceEstimates(tau_hat, max(sigma2_hat, 0.0))


def increment_scale(nuisance, num_steps):
    """Per-step weight 1/T2 + 1/sqrt(T2 (tau_hat^2 + sigma2_hat))"""
    spread = nuisance.tau_hat ** 2 + nuisance.sigma2_hat
    if not spread > SCALE_FLOOR:
        raise DegenerateScaleError(
            "tau_hat^2 + sigma2_hat = {} vanishes; the data look constant"
            .format(spread))
    return 1.0 / num_steps + 1.0 / math.sqrt(num_steps * spread)


def run_tab(targets, nuisance):
    """Run the sign-controlled TAB recursion over the targets.

    theta_1 = +1 and theta_t = +1 if M_{t-1} <= 0, else -1; then
    M_t = M_{t-1} + theta_t X_t (1/T2 + 1/sqrt(T2 (tau^2 + sigma^2))).
    The control always pushes against the current partial sum, so the
    statistic concentrates at zero when E[X_t] > 0 and diverges when
    E[X_t] < 0.

    Args:
      targets (array_like): The T2 targets, in order.
      nuisance (NuisanceEstimates): Scale estimates.

    Returns:
      TabTrajectory: Signs, partial statistics and the final statistic.
    """
    targets = np.asarray(targets, dtype=float)
    num_steps = targets.size
    if targets.ndim != 1 or num_steps < 1:
        raise DomainError("run_tab needs a non-empty sequence of targets")
    scale = increment_scale(nuisance, num_steps)

    thetas = np.empty(num_steps, dtype=np.int8)
    partials = np.empty(num_steps)
    current = 0.0
    for step, value in enumerate(targets.tolist()):
        theta = 1 if current <= 0.0 else -1
        current += theta * (value * scale)
        thetas[step] = theta
        partials[step] = current

    return TabTrajectory(thetas, partials, targets, nuisance, current)


def decide(statistic, alpha, sizes, config):
    """Turn a final statistic into a TestResult.

    The p-value uses the standard normal reference P(|N(0,1)| > |M|), which
    is conservative under H0 where the limiting law is more concentrated.
    """
    critical = normal_critical_value(alpha)
    p_value = float(2.0 * special.ndtr(-abs(statistic)))
    return TestResult(float(statistic), p_value, abs(statistic) > critical,
                      critical, tuple(sizes), config)


def shuffle_rows(sample, rng):
    """Return the sample with its rows permuted by rng"""
    sample = as_sample_matrix(sample)
    return SampleMatrix(sample.data[rng.permutation(sample.num_obs)])


def one_sample_deviation_test(sample, config):
    """One-sample high-dimensional deviation test.

    Args:
      sample (SampleMatrix): T x n data, T >= 4.
      config (OneSampleConfig): Radius, reference mean, level and split.

    Returns:
      tuple: (TestResult, TabTrajectory).
    """
    sample = as_sample_matrix(sample)
    if sample.num_dims < 1:
        raise DomainError("sample has no coordinates")
    if sample.num_obs < MIN_OBSERVATIONS:
        raise DomainError("need at least {} observations, got {}"
                          .format(MIN_OBSERVATIONS, sample.num_obs))

    centred = SampleMatrix(sample.data - config.reference(sample.num_dims))
    head, tail = split_sample(centred, config.split_fraction)
    targets = compute_targets(head, tail, config.d0)
    nuisance = estimate_moments(targets)
    logger.debug("one-sample split T1=%d T2=%d, tau_hat=%g sigma2_hat=%g",
                 head.num_obs, tail.num_obs, nuisance.tau_hat,
                 nuisance.sigma2_hat)

    trajectory = run_tab(targets, nuisance)
    result = decide(trajectory.final_stat, config.alpha,
                    (head.num_obs, tail.num_obs), config)
    return result, trajectory


def scan_radii(run, d0_values):
    """Evaluate a deviation test over a grid of radii.

    Args:
      run (callable): Maps d0 to a TestResult.
      d0_values (iterable): Radii, scanned in ascending order.

    Returns:
      RadiusScan: One RadiusRow per radius, and the smallest radius from
        which every larger grid radius rejects H0 (None if the largest
        radius does not reject).
    """
    rows = []
    for d0 in sorted(float(d) for d in d0_values):
        result = run(d0)
        rows.append(RadiusRow(d0, result.statistic, abs(result.statistic),
                              result.p_value, result.reject_h0))
    if not rows:
        raise ConfigurationError("radius grid is empty")

    threshold = None
    for row in reversed(rows):
        if not row.reject_h0:
            break
        threshold = row.d0
    return RadiusScan(rows, threshold)


def one_sample_scan(sample, d0_values, mu0=None, alpha=0.05,
                    split_fraction=0.5):
    """Scan the one-sample test over radii. See help(scan_radii)."""
    def run(d0):
        config = OneSampleConfig(d0, mu0, alpha, split_fraction)
        return one_sample_deviation_test(sample, config)[0]
    return scan_radii(run, d0_values)


__all__ = ["SampleMatrix", "as_sample_matrix", "OneSampleConfig",
           "NuisanceEstimates", "TabTrajectory", "TestResult", "RadiusRow",
           "RadiusScan", "split_sample", "project_targets", "compute_targets",
           "estimate_moments", "increment_scale", "run_tab", "decide",
           "shuffle_rows", "one_sample_deviation_test", "scan_radii",
           "one_sample_scan"]
