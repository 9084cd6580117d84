"""This module contains the two-sample deviation test of ||mu1 - mu2||_2
against a radius d0.

Each group is split into a head of m_i = M_i - N0 rows and a tail of N0 rows.
The difference of head means fixes the projection direction Delta_0 and the
paired tail differences Delta_i are projected onto it; the resulting targets
drive the same TAB recursion as the one-sample test.
"""

from __future__ import absolute_import, division

import logging
import math

import numpy as np

from ..errors import ConfigurationError, DomainError
from .tab import (SampleMatrix, as_sample_matrix, decide, estimate_moments,
                  project_targets, run_tab, scan_radii)

logger = logging.getLogger(__name__)


class TwoSampleConfig(object):
    """Configuration of the two-sample deviation test.

    Args:
      d0 (float): Deviation radius, positive.
      alpha (float, optional): Significance level. Defaults to 0.05.
      n0 (int, optional): Length N0 of the TAB phase. Defaults to
        floor(min(M1, M2) / 3), resolved against the data.
    """

    def __init__(self, d0, alpha=0.05, n0=None):
        """Constructor for TwoSampleConfig. See help(TwoSampleConfig)."""
        if not (math.isfinite(d0) and d0 > 0.0):
            raise ConfigurationError("d0 must be positive, got {}".format(d0))
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(
                "alpha must lie in (0, 1), got {}".format(alpha))
        if n0 is not None and int(n0) != n0:
            raise ConfigurationError("n0 must be an integer, got {}"
                                     .format(n0))
        self.d0 = float(d0)
        self.alpha = float(alpha)
        self.n0 = None if n0 is None else int(n0)

    def as_dict(self):
        return {"test": "two_sample", "d0": self.d0, "alpha": self.alpha,
                "n0": self.n0}


def resolve_n0(num_x, num_z, n0=None):
    """Pick and validate the TAB-phase length N0.

    Args:
      num_x (int): Rows M1 of the first group.
      num_z (int): Rows M2 of the second group.
      n0 (int, optional): Requested N0; defaults to floor(min(M1, M2) / 3).

    Returns:
      int: N0 with 2 <= N0 < min(M1, M2).
    """
    smallest = min(num_x, num_z)
    if n0 is None:
        n0 = smallest // 3
    if not 2 <= n0 < smallest:
        raise ConfigurationError(
            "n0={} violates 2 <= n0 < min(M1, M2) = {}".format(n0, smallest))
    return n0


def compute_delta0(x_head, z_head):
    """Difference of the head column means, mean(x_head) - mean(z_head).

    Args:
      x_head (SampleMatrix): First m1 rows of the first group.
      z_head (SampleMatrix): First m2 rows of the second group.

    Returns:
      numpy.ndarray: The n-vector Delta_0.
    """
    x_head, z_head = as_sample_matrix(x_head), as_sample_matrix(z_head)
    if x_head.num_dims != z_head.num_dims:
        raise DomainError("groups have dimensions {} and {}"
                          .format(x_head.num_dims, z_head.num_dims))
    if x_head.num_obs < 1 or z_head.num_obs < 1:
        raise DomainError("both heads need at least one row")
    return x_head.data.mean(axis=0) - z_head.data.mean(axis=0)


def compute_pair_targets(x_tail, z_tail, delta0, d0):
    """Targets Y_i = Delta_0' (x_tail_i - z_tail_i) - d0^2.

    Tail rows are paired positionally, in file order.

    Args:
      x_tail (SampleMatrix): Last N0 rows of the first group.
      z_tail (SampleMatrix): Last N0 rows of the second group.
      delta0 (array_like): Head mean difference.
      d0 (float): Deviation radius.

    Returns:
      numpy.ndarray: The N0 targets.
    """
    x_tail, z_tail = as_sample_matrix(x_tail), as_sample_matrix(z_tail)
    if x_tail.shape != z_tail.shape:
        raise DomainError("tails must have equal shapes, got {} and {}"
                          .format(x_tail.shape, z_tail.shape))
    delta0 = np.asarray(delta0, dtype=float)
    if delta0.shape != (x_tail.num_dims,):
        raise DomainError("delta0 has shape {}, expected ({},)"
                          .format(delta0.shape, x_tail.num_dims))
    return project_targets(x_tail.data - z_tail.data, delta0, d0)


def two_sample_deviation_test(x, z, config):
    """Two-sample high-dimensional deviation test.

    Tests H0: ||mu1 - mu2||_2 > d0 against H1: ||mu1 - mu2||_2 <= d0 and
    rejects H0 when |M| exceeds z_{alpha/2}.

    Args:
      x (SampleMatrix): M1 x n first group.
      z (SampleMatrix): M2 x n second group.
      config (TwoSampleConfig): Radius, level and N0.

    Returns:
      tuple: (TestResult, TabTrajectory); the result's sizes are
        (m1, m2, n0).
    """
    x, z = as_sample_matrix(x), as_sample_matrix(z)
    if x.num_dims != z.num_dims:
        raise DomainError("groups have dimensions {} and {}"
                          .format(x.num_dims, z.num_dims))
    if x.num_dims < 1:
        raise DomainError("samples have no coordinates")
    n0 = resolve_n0(x.num_obs, z.num_obs, config.n0)
    m1, m2 = x.num_obs - n0, z.num_obs - n0

    delta0 = compute_delta0(SampleMatrix(x.data[:m1]),
                            SampleMatrix(z.data[:m2]))
    targets = compute_pair_targets(SampleMatrix(x.data[m1:]),
                                   SampleMatrix(z.data[m2:]), delta0,
                                   config.d0)
    nuisance = estimate_moments(targets)
    logger.debug("two-sample split m1=%d m2=%d N0=%d, tau_hat=%g "
                 "sigma2_hat=%g", m1, m2, n0, nuisance.tau_hat,
                 nuisance.sigma2_hat)

    trajectory = run_tab(targets, nuisance)
    result = decide(trajectory.final_stat, config.alpha, (m1, m2, n0), config)
    return result, trajectory


def two_sample_scan(x, z, d0_values, alpha=0.05, n0=None):
    """Scan the two-sample test over radii. See help(scan_radii)."""
    def run(d0):
        return two_sample_deviation_test(x, z,
                                         TwoSampleConfig(d0, alpha, n0))[0]
    return scan_radii(run, d0_values)


__all__ = ["TwoSampleConfig", "resolve_n0", "compute_delta0",
           "compute_pair_targets", "two_sample_deviation_test",
           "two_sample_scan"]
