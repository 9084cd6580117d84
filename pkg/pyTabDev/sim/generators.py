"""Data generation for the Monte Carlo harness.

Observations follow x_t = mu + Gamma y_t where Gamma Gamma' = Sigma and the
coordinates of y_t are independent with mean zero and unit variance, either
standard normal or Rademacher (+1 or -1 with equal probability).
"""

from __future__ import absolute_import, division

import logging

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from ..core.tab import SampleMatrix
from ..errors import ConfigurationError, DomainError, FactorizationError

logger = logging.getLogger(__name__)

NOISE_KINDS = ("gaussian", "rademacher")

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


def child_rng(seed, *key):
    """Independent random stream for one unit of work.

    The stream depends only on the master seed and the integer key, so
    tasks can run in any order or process and still draw the same numbers.

    Args:
      seed (int): Master seed, a non-negative integer.
      *key (int): Coordinates of the unit of work, for the harness
        (n, t, d0 index, replication).

    Returns:
      numpy.random.Generator: The child stream.
    """
    if seed < 0:
        raise ConfigurationError("seed must be non-negative, got {}"
                                 .format(seed))
    sequence = np.random.SeedSequence(int(seed),
                                      spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(sequence)


def ar1_covariance(n, rho):
    """Toeplitz covariance with entries rho^|i - j|.

    Args:
      n (int): Dimension, at least one.
      rho (float): Correlation of neighbouring coordinates, |rho| < 1.

    Returns:
      numpy.ndarray: The n x n covariance matrix.
    """
    if n < 1:
        raise ConfigurationError("n must be at least 1, got {}".format(n))
    if not -1.0 < rho < 1.0:
        raise ConfigurationError("rho must lie in (-1, 1), got {}"
                                 .format(rho))
    return linalg.toeplitz(rho ** np.arange(n, dtype=float))


def cholesky_factor(sigma):
    """Factor Gamma with Gamma Gamma' = Sigma.

    Positive definite input gets the ordinary lower Cholesky factor. For
    semi-definite input the pivoted LAPACK factorisation (dpstrf) is used
    and its rows are permuted back, so the factor is triangular only up to
    the pivoting.

    Args:
      sigma (array_like): Symmetric positive semi-definite matrix.

    Returns:
      numpy.ndarray: The square factor Gamma.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise FactorizationError("covariance must be square, got shape {}"
                                 .format(sigma.shape))
    if not np.all(np.isfinite(sigma)):
        raise FactorizationError("covariance has non-finite entries")
    if np.max(np.abs(sigma - sigma.T), initial=0.0) > SYMMETRY_TOL:
        raise FactorizationError("covariance is not symmetric")
    smallest = np.linalg.eigvalsh(sigma)[0] if sigma.size else 0.0
    if smallest < -PSD_TOL:
        raise FactorizationError(
            "covariance is indefinite, smallest eigenvalue {}"
            .format(smallest))

    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        logger.debug("covariance is singular, using pivoted Cholesky")

    factor, pivots, rank, info = lapack.dpstrf(sigma, lower=1)
    if info < 0:
        raise FactorizationError("dpstrf rejected argument {}".format(-info))
    lower = np.tril(factor)
    lower[:, rank:] = 0.0
    gamma = np.empty_like(lower)
    gamma[pivots - 1] = lower

    error = np.max(np.abs(gamma @ gamma.T - sigma), initial=0.0)
    if error > RECONSTRUCTION_TOL:
        raise FactorizationError("pivoted factor misses the covariance by {}"
                                 .format(error))
    return gamma


def draw_noise(noise, shape, rng):
    """Independent zero-mean unit-variance coordinates"""
    if noise == "gaussian":
        return rng.standard_normal(shape)
    elif noise == "rademacher":
        return rng.integers(0, 2, size=shape) * 2.0 - 1.0
    raise ConfigurationError("Unknown noise: {}".format(noise))


def generate_sample(mu, gamma, t, noise, rng):
    """Draw t observations x = mu + Gamma y.

    Args:
      mu (array_like): Mean vector of length n.
      gamma (array_like): n x m factor.
      t (int): Number of observations.
      noise (str): "gaussian" or "rademacher".
      rng (numpy.random.Generator): Random stream.

    Returns:
      SampleMatrix: The t x n sample.
    """
    mu = np.asarray(mu, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != mu.size:
        raise DomainError("factor has shape {}, expected ({}, m)"
                          .format(gamma.shape, mu.size))
    if t < 1:
        raise ConfigurationError("t must be at least 1, got {}".format(t))
    noise_draws = draw_noise(noise, (t, gamma.shape[1]), rng)
    return SampleMatrix(mu + noise_draws @ gamma.T)


__all__ = ["NOISE_KINDS", "child_rng", "ar1_covariance", "cholesky_factor",
           "draw_noise", "generate_sample"]
