"""This module contains an independent check of the bandit law through the
diffusion

    dY_s = alpha sign(Y_s) ds + beta dB_s,    s in [t, 1],  Y_t = x

whose endpoint density at s = 1, x = 0, t = 0, beta = 1 and alpha = kappa is
the bandit density f^kappa. Endpoints are simulated with Euler-Maruyama and
compared against the closed-form transition density by a Kolmogorov-Smirnov
distance.
"""

from __future__ import absolute_import, division

from collections import namedtuple
import logging
import math

import numpy as np
from scipy import special, stats

from ..errors import ConfigurationError, DomainError
from .bandit import SQRT_2PI

logger = logging.getLogger(__name__)

MIN_STEPS = 100
DEFAULT_STEPS = 2000
# Paths per keyed random stream in sde_check.
PATH_BLOCK = 1000

# Half-width of the quadrature window in units of beta sqrt(s - t).
_WINDOW_SDS = 30.0
_GAUSS_NODES = 8
_DEFAULT_KNOTS = 4001

SdeCheck = namedtuple("SdeCheck", ["ks_distance", "paths", "steps", "alpha",
                                   "beta", "seed"])


def _check_diffusion(beta, t, s=1.0):
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError("beta must be positive, got {}".format(beta))
    if not s > t:
        raise DomainError("need s > t, got t={} and s={}".format(t, s))


def simulate_endpoints(alpha, beta, x0, steps, paths, rng, t=0.0):
    """Euler-Maruyama endpoints Y_1 of the sign-drift diffusion.

    The step is Y <- Y + alpha sign(Y) h + beta sqrt(h) N(0, 1) with
    h = (1 - t) / steps and sign(0) = +1.

    Args:
      alpha (float): Drift magnitude; negative values pull towards zero.
      beta (float): Diffusion coefficient, positive.
      x0 (float): Start value Y_t.
      steps (int): Number of Euler steps, at least 100.
      paths (int): Number of independent paths, at least one.
      rng (numpy.random.Generator): Random stream.
      t (float, optional): Start time in [0, 1). Defaults to 0.

    Returns:
      numpy.ndarray: The endpoints, one per path.
    """
    if not 0.0 <= t < 1.0:
        raise DomainError("start time must lie in [0, 1), got {}".format(t))
    _check_diffusion(beta, t)
    if steps < MIN_STEPS:
        raise ConfigurationError("need at least {} steps, got {}"
                                 .format(MIN_STEPS, steps))
    if paths < 1:
        raise ConfigurationError("need at least one path, got {}"
                                 .format(paths))

    step = (1.0 - t) / steps
    drift = alpha * step
    noise = beta * math.sqrt(step)
    values = np.full(paths, float(x0))
    for _ in range(steps):
        values += (drift * np.where(values >= 0.0, 1.0, -1.0) +
                   noise * rng.standard_normal(paths))
    return values


def spiked_density(w, x, t, s, alpha, beta):
    """Transition density p_{x,t}(w; s) of the sign-drift diffusion.

    With tau = s - t, a = w / beta and b = x / beta the density is

        exp(-[(a - b)^2 - 2 alpha tau (|a| - |b|) / beta
              + alpha^2 tau^2 / beta^2] / (2 tau)) / (sqrt(2 pi tau) beta)
        - alpha / beta^2 exp(2 alpha |w| / beta^2)
              Phi(-(|a| + |b| + alpha tau / beta) / sqrt(tau))

    where the Gaussian integral of the second term is written through Phi
    and the product is evaluated in log space.

    Args:
      w (float or array_like): Evaluation point(s).
      x (float): Start value.
      t (float): Start time.
      s (float): Evaluation time, s > t.
      alpha (float): Drift magnitude.
      beta (float): Diffusion coefficient, positive.

    Returns:
      float or numpy.ndarray: The density, clipped at zero.
    """
    _check_diffusion(beta, t, s)
    scalar = np.ndim(w) == 0
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)):
        raise DomainError("w must be finite")
    tau = s - t
    a, b = w / beta, x / beta
    exponent = ((a - b) ** 2 - 2.0 * alpha * tau * (np.abs(a) - abs(b)) / beta
                + alpha ** 2 * tau ** 2 / beta ** 2)
    first = (np.exp(-exponent / (2.0 * tau))
             / (SQRT_2PI * math.sqrt(tau) * beta))
    lower = np.abs(a) + abs(b) + alpha * tau / beta
    second = (alpha / beta ** 2) * np.exp(
        2.0 * alpha * np.abs(w) / beta ** 2 +
        special.log_ndtr(-lower / math.sqrt(tau)))
    density = np.maximum(first - second, 0.0)
    return float(density) if scalar else density


def spiked_cdf(w, x, t, s, alpha, beta, knots=_DEFAULT_KNOTS):
    """Distribution function of the transition density by quadrature.

    Gauss-Legendre rules on each panel of a symmetric knot grid are summed
    into the CDF at the knots, which is linearly interpolated at w. The grid
    always contains w = 0, where the density has a kink.

    Args:
      w (float or array_like): Evaluation point(s).
      x, t, s, alpha, beta: As for spiked_density.
      knots (int, optional): Odd number of grid knots. Defaults to 4001.

    Returns:
      float or numpy.ndarray: Probabilities in [0, 1].
    """
    _check_diffusion(beta, t, s)
    if knots < 3 or knots % 2 == 0:
        raise ConfigurationError("knots must be odd and at least 3, got {}"
                                 .format(knots))
    scalar = np.ndim(w) == 0
    tau = s - t
    half_width = (_WINDOW_SDS * beta * math.sqrt(tau) + abs(x) +
                  abs(alpha) * tau)
    grid = np.linspace(-half_width, half_width, knots)

    nodes, weights = np.polynomial.legendre.leggauss(_GAUSS_NODES)
    left, right = grid[:-1], grid[1:]
    centre, radius = 0.5 * (left + right), 0.5 * (right - left)
    points = centre[:, None] + radius[:, None] * nodes[None, :]
    density = spiked_density(points, x, t, s, alpha, beta)
    panels = radius * (density @ weights)

    cdf = np.concatenate(([0.0], np.cumsum(panels)))
    values = np.clip(np.interp(w, grid, cdf, left=0.0, right=cdf[-1]),
                     0.0, 1.0)
    return float(values) if scalar else values


def sde_check(alpha, beta=1.0, x0=0.0, steps=DEFAULT_STEPS, paths=20000,
              seed=0):
    """KS distance between simulated endpoints and the closed-form law.

    Args:
      alpha (float): Drift magnitude.
      beta (float, optional): Diffusion coefficient. Defaults to 1.
      x0 (float, optional): Start value. Defaults to 0.
      steps (int, optional): Euler steps. Defaults to 2000.
      paths (int, optional): Simulated paths. Defaults to 20000.
      seed (int, optional): Master seed. Paths are drawn in blocks of
        PATH_BLOCK, block b from child_rng(seed, b). Defaults to 0.

    Returns:
      SdeCheck: The distance and the settings that produced it.
    """
    from ..sim.generators import child_rng
    if paths < 1:
        raise ConfigurationError("paths must be positive, got {}"
                                 .format(paths))
    endpoints = np.concatenate([
        simulate_endpoints(alpha, beta, x0, steps,
                           min(PATH_BLOCK, paths - start),
                           child_rng(seed, block))
        for block, start in enumerate(range(0, paths, PATH_BLOCK))])
    result = stats.kstest(
        endpoints, lambda w: spiked_cdf(w, x0, 0.0, 1.0, alpha, beta))
    logger.info("sde check alpha=%g beta=%g steps=%d paths=%d: KS=%.5f",
                alpha, beta, steps, paths, result.statistic)
    return SdeCheck(float(result.statistic), paths, steps, float(alpha),
                    float(beta), seed)


__all__ = ["PATH_BLOCK", "SdeCheck", "simulate_endpoints", "spiked_density",
           "spiked_cdf", "sde_check"]
