"""This module contains the closed-form bandit distribution B(kappa): density,
two-sided tail probability, distribution function, quantile and an inverse-CDF
sampler.

The density is

    f(x) = phi(|x| - kappa) - kappa * exp(2 kappa |x|) * Phi(-|x| - kappa)

which is the standard normal for kappa = 0, unimodal and more concentrated
than the normal for kappa < 0 and bimodal for kappa > 0. All products of an
exponential with a normal tail are evaluated in log space.
"""

from __future__ import absolute_import, division

from collections import namedtuple
import logging
import math

import numpy as np
from scipy import special

from ..errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Bisection bracket half-width is |kappa| + _BRACKET_PAD, far beyond any
# representable tail mass.
_BRACKET_PAD = 40.0
_BISECTION_STEPS = 50
_SECANT_STEPS = 4


class BanditParams(namedtuple("BanditParams", ["kappa"])):
    """Parameter of the bandit distribution B(kappa).

    The raw kappa is stored; mapping the drift of a test statistic onto the
    law of the statistic (a sign flip) is done by ``power.limiting_law``.
    """

    __slots__ = ()

    def __new__(cls, kappa):
        """Constructor for BanditParams. See help(BanditParams)."""
        kappa = float(kappa)
        if not math.isfinite(kappa):
            raise DomainError("kappa must be finite, got {}".format(kappa))
        return super(BanditParams, cls).__new__(cls, kappa)


DensityPoint = namedtuple("DensityPoint", ["kappa", "x", "density"])


def _as_output(values, scalar):
    """Return a float for scalar input and the array otherwise"""
    return float(values) if scalar else values


def _finite_array(values, name):
    """Convert to a float array, rejecting NaN and infinities"""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("{} must be finite, got {}".format(name, values))
    return arr


def normal_critical_value(alpha):
    """Upper alpha/2 quantile of the standard normal, z_{alpha/2}.

    Args:
      alpha (float): Significance level in (0, 1).

    Returns:
      float: The two-sided critical value.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(
            "alpha must lie in (0, 1), got {}".format(alpha))
    return float(special.ndtri(1.0 - alpha / 2.0))


def bandit_pdf(x, params):
    """Density of B(kappa) at x.

    Args:
      x (float or array_like): Evaluation point(s).
      params (BanditParams): Distribution parameter.

    Returns:
      float or numpy.ndarray: The density, non-negative and even in x.
    """
    scalar = np.ndim(x) == 0
    kappa = params.kappa
    ax = np.abs(_finite_array(x, "x"))
    gauss = np.exp(-0.5 * (ax - kappa) ** 2) / SQRT_2PI
    spike = np.exp(2.0 * kappa * ax + special.log_ndtr(-ax - kappa))
    density = np.maximum(gauss - kappa * spike, 0.0)
    return _as_output(density, scalar)


def bandit_tail_prob(kappa, z):
    """Two-sided tail g(kappa) = P(|B(-kappa)| > z).

    Evaluates 1 - Phi(kappa + z) + exp(-2 z kappa) Phi(kappa - z) in closed
    form. g is strictly decreasing in kappa and g(0) = 2 (1 - Phi(z)).

    Args:
      kappa (float or array_like): Drift parameter; note the law is
        B(-kappa).
      z (float or array_like): Non-negative threshold.

    Returns:
      float or numpy.ndarray: Probability in [0, 1].
    """
    scalar = np.ndim(kappa) == 0 and np.ndim(z) == 0
    kappa = _finite_array(kappa, "kappa")
    z = np.asarray(z, dtype=float)
    if np.any(np.isnan(z)) or np.any(z < 0.0):
        raise DomainError("z must be non-negative, got {}".format(z))
    with np.errstate(invalid="ignore"):
        upper = special.ndtr(-(kappa + z))
        reflected = np.exp(-2.0 * z * kappa + special.log_ndtr(kappa - z))
        prob = np.where(np.isinf(z), 0.0, upper + reflected)
    return _as_output(np.clip(prob, 0.0, 1.0), scalar)


def bandit_cdf(x, params):
    """Distribution function P(B(kappa) <= x).

    Obtained from the tail formula by symmetry: for x >= 0 the CDF is
    1 - g/2 with g evaluated at z = |x| and drift -kappa.

    Args:
      x (float or array_like): Evaluation point(s); infinities allowed.
      params (BanditParams): Distribution parameter.

    Returns:
      float or numpy.ndarray: Probability in [0, 1].
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("x must not be NaN")
    half_tail = 0.5 * bandit_tail_prob(-params.kappa, np.abs(x))
    cdf = np.where(x > 0.0, 1.0 - half_tail,
                   np.where(x < 0.0, half_tail, 0.5))
    return _as_output(cdf, scalar)


def _invert_half_tail(mass, kappa):
    """Solve g(-kappa, x) / 2 = mass for x >= 0, elementwise.

    Bracketed bisection narrows [0, |kappa| + pad] before a few guarded
    secant steps polish the root.
    """
    lo = np.zeros_like(mass)
    hi = np.full_like(mass, abs(kappa) + _BRACKET_PAD)

    def excess(z):
        return 0.5 * bandit_tail_prob(-kappa, z) - mass

    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = excess(mid) > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)

    f_lo, f_hi = excess(lo), excess(hi)
    root = 0.5 * (lo + hi)
    for _ in range(_SECANT_STEPS):
        slope = f_hi - f_lo
        safe = slope != 0.0
        step = np.where(safe, f_lo * (hi - lo) / np.where(safe, slope, 1.0),
                        0.0)
        root = np.clip(lo - step, lo, hi)
        f_root = excess(root)
        move_lo = f_root > 0.0
        lo, f_lo = np.where(move_lo, root, lo), np.where(move_lo, f_root, f_lo)
        hi, f_hi = np.where(move_lo, hi, root), np.where(move_lo, f_hi, f_root)
    return root


def bandit_quantile(q, params):
    """Quantile function of B(kappa).

    Args:
      q (float or array_like): Probabilities in the open interval (0, 1).
      params (BanditParams): Distribution parameter.

    Returns:
      float or numpy.ndarray: x such that bandit_cdf(x) = q.
    """
    scalar = np.ndim(q) == 0
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0.0)) or np.any(~(q < 1.0)):
        raise DomainError("q must lie in (0, 1), got {}".format(q))
    # Invert the smaller of the two tails for accuracy on both sides.
    mass = np.minimum(q, 1.0 - q)
    magnitude = np.where(mass >= 0.5, 0.0,
                         _invert_half_tail(np.atleast_1d(mass),
                                           params.kappa).reshape(mass.shape))
    quantile = np.where(q < 0.5, -magnitude, magnitude)
    return _as_output(quantile, scalar)


def bandit_sample(params, rng, count):
    """Draw i.i.d. variates from B(kappa) by inverse-CDF sampling.

    Args:
      params (BanditParams): Distribution parameter.
      rng (numpy.random.Generator): Caller-owned random stream.
      count (int): Number of draws, at least one.

    Returns:
      numpy.ndarray: The draws.
    """
    if count < 1:
        raise DomainError("count must be at least 1, got {}".format(count))
    tiny = np.finfo(float).tiny
    uniforms = np.clip(rng.random(count), tiny, 1.0 - np.finfo(float).epsneg)
    return bandit_quantile(uniforms, params)


def density_table(kappas, xs):
    """Tabulate bandit densities on a grid.

    Args:
      kappas (iterable): Values of kappa.
      xs (iterable): Evaluation points.

    Returns:
      list: DensityPoint rows, kappa-major.
    """
    rows = []
    xs = np.asarray(list(xs), dtype=float)
    for kappa in kappas:
        densities = bandit_pdf(xs, BanditParams(kappa))
        rows.extend(DensityPoint(float(kappa), float(x), float(d))
                    for x, d in zip(xs, densities))
    return rows


__all__ = ["BanditParams", "DensityPoint", "normal_critical_value",
           "bandit_pdf", "bandit_tail_prob", "bandit_cdf", "bandit_quantile",
           "bandit_sample", "density_table"]
