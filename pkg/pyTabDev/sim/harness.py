"""This module contains the grid Monte Carlo harness.

A SimulationConfig describes one design cell (n, T) together with the radii
to test, the population and the replication count. Work is cut into one task
per (cell, d0); each replication draws its data from a child stream keyed by
(n, T, d0 index, replication), so the results do not depend on how many
workers run the tasks or in which order they finish.
"""

from __future__ import absolute_import, division

from collections import namedtuple
import logging
import math
import multiprocessing
import os

import numpy as np

from ..core.power import (PopulationSpec, kappa_one_sample, kappa_two_sample,
                          theoretical_rejection_prob)
from ..core.tab import OneSampleConfig, one_sample_deviation_test
from ..core.twosample import TwoSampleConfig, two_sample_deviation_test
from ..errors import (ConfigurationError, DegenerateScaleError,
                      SimulationError, TabDevError)
from .generators import (NOISE_KINDS, ar1_covariance, child_rng,
                         cholesky_factor, generate_sample)

logger = logging.getLogger(__name__)

MU_SPECS = ("uniform_unit_norm", "zero", "custom")
SIGMA_SPECS = ("ar1", "identity", "custom")
MODES = ("one_sample", "two_sample")

DEFAULT_REPLICATIONS = 200
THREADS_ENV = "TABDEV_THREADS"

STANDARD_CELLS = [(100, 200), (200, 400), (400, 800), (600, 1200),
                  (100, 150), (200, 300), (400, 600), (600, 900)]

GridRow = namedtuple("GridRow", ["n", "t", "d0", "rate", "replications",
                                 "mean_abs_statistic", "stderr", "predicted"])


class GridResult(namedtuple("GridResult", ["rows"])):
    """Rejection rates of a simulation grid, one GridRow per (cell, d0)"""

    __slots__ = ()

    def cells(self):
        """The distinct (n, t) pairs, in row order"""
        seen = []
        for row in self.rows:
            if (row.n, row.t) not in seen:
                seen.append((row.n, row.t))
        return seen

    def d0_values(self):
        """The distinct radii, ascending"""
        return sorted(set(row.d0 for row in self.rows))

    def lookup(self, n, t, d0):
        for row in self.rows:
            if (row.n, row.t) == (n, t) and math.isclose(row.d0, d0):
                return row
        raise KeyError((n, t, d0))


class SimulationConfig(object):
    """Design of one simulation cell.

    Args:
      n (int): Dimension.
      t (int): Observations per sample (per group in two-sample mode).
      d0_values (iterable): Positive radii.
      replications (int, optional): Replications per radius. Defaults to
        200.
      seed (int, optional): Master seed. Defaults to 0.
      mu_spec (str, optional): "uniform_unit_norm" (every coordinate
        n^-1/2), "zero" or "custom". Defaults to "uniform_unit_norm".
      mu (array_like, optional): Mean for mu_spec "custom".
      sigma_spec (str, optional): "ar1", "identity" or "custom". Defaults
        to "ar1".
      rho (float, optional): AR(1) correlation. Defaults to 0.5.
      sigma (array_like, optional): Covariance for sigma_spec "custom".
      noise (str, optional): "gaussian" or "rademacher".
      mode (str, optional): "one_sample" or "two_sample".
      n0 (int, optional): Two-sample TAB length. Defaults to t // 2.
      m1 (int, optional): First-group head length. Defaults to t - n0.
      m2 (int, optional): Second-group head length. Defaults to t - n0.

    In two-sample mode the first group has mean mu, the second has mean
    zero, and both share the covariance.
    """

    def __init__(self, n, t, d0_values, replications=DEFAULT_REPLICATIONS,
                 seed=0, mu_spec="uniform_unit_norm", mu=None,
                 sigma_spec="ar1", rho=0.5, sigma=None, noise="gaussian",
                 mode="one_sample", n0=None, m1=None, m2=None):
        """Constructor for SimulationConfig. See help(SimulationConfig)."""
        if n < 1 or t < 4:
            raise ConfigurationError("need n >= 1 and t >= 4, got n={} t={}"
                                     .format(n, t))
        self.n, self.t = int(n), int(t)
        self.d0_values = [float(d0) for d0 in d0_values]
        if not self.d0_values or min(self.d0_values) <= 0.0:
            raise ConfigurationError("d0 values must be positive and "
                                     "non-empty, got {}".format(d0_values))
        if replications < 1:
            raise ConfigurationError("replications must be at least 1, got "
                                     "{}".format(replications))
        self.replications = int(replications)
        if seed < 0:
            raise ConfigurationError("seed must be non-negative, got {}"
                                     .format(seed))
        self.seed = int(seed)

        for value, allowed, name in [(mu_spec, MU_SPECS, "mu_spec"),
                                     (sigma_spec, SIGMA_SPECS, "sigma_spec"),
                                     (noise, NOISE_KINDS, "noise"),
                                     (mode, MODES, "mode")]:
            if value not in allowed:
                raise ConfigurationError("Unknown {}: {} (expected one of {})"
                                         .format(name, value,
                                                 ", ".join(allowed)))
        self.mu_spec, self.sigma_spec = mu_spec, sigma_spec
        self.noise, self.mode = noise, mode

        if mu_spec == "custom" and mu is None:
            raise ConfigurationError("mu_spec custom needs a mean vector")
        if sigma_spec == "custom" and sigma is None:
            raise ConfigurationError("sigma_spec custom needs a covariance")
        if sigma_spec == "ar1" and not -1.0 < rho < 1.0:
            raise ConfigurationError("rho must lie in (-1, 1), got {}"
                                     .format(rho))
        self.mu = None if mu is None else np.asarray(mu, dtype=float)
        self.sigma = None if sigma is None else np.asarray(sigma, dtype=float)
        if self.mu is not None and self.mu.shape != (self.n,):
            raise ConfigurationError("mu has shape {}, expected ({},)"
                                     .format(self.mu.shape, self.n))
        self.rho = float(rho)

        self.n0 = self.m1 = self.m2 = None
        if mode == "two_sample":
            self.n0 = self.t // 2 if n0 is None else int(n0)
            self.m1 = self.t - self.n0 if m1 is None else int(m1)
            self.m2 = self.t - self.n0 if m2 is None else int(m2)
            if self.n0 < 2 or self.m1 < 1 or self.m2 < 1:
                raise ConfigurationError(
                    "two-sample sizes need n0 >= 2 and m1, m2 >= 1, got "
                    "n0={} m1={} m2={}".format(self.n0, self.m1, self.m2))

    @property
    def cell(self):
        return (self.n, self.t)

    @property
    def sizes(self):
        """Split sizes, (t1, t2) or (m1, m2, n0)"""
        if self.mode == "two_sample":
            return (self.m1, self.m2, self.n0)
        t1 = self.t // 2
        return (t1, self.t - t1)

    def as_dict(self):
        return {"n": self.n, "t": self.t, "d0_values": self.d0_values,
                "replications": self.replications, "seed": self.seed,
                "mu_spec": self.mu_spec,
                "mu": None if self.mu is None else self.mu.tolist(),
                "sigma_spec": self.sigma_spec, "rho": self.rho,
                "sigma": None if self.sigma is None else self.sigma.tolist(),
                "noise": self.noise, "mode": self.mode, "n0": self.n0,
                "m1": self.m1, "m2": self.m2}


def desk_cells(full=False):
    """Design cells (n, T); desk scale keeps n <= 200 and T <= 400"""
    if full:
        return list(STANDARD_CELLS)
    return [(n, t) for n, t in STANDARD_CELLS if n <= 200 and t <= 400]


def standard_d0_grid():
    """Radii 0.5, 0.6, ..., 1.5"""
    return [round(0.5 + 0.1 * step, 10) for step in range(11)]


def build_population(cfg):
    """Population moments of a simulation cell.

    Args:
      cfg (SimulationConfig): The cell.

    Returns:
      PopulationSpec: mu and Sigma; in two-sample mode the second group
        has mean zero and the same covariance.
    """
    if cfg.mu_spec == "uniform_unit_norm":
        mu = np.full(cfg.n, cfg.n ** -0.5)
    elif cfg.mu_spec == "zero":
        mu = np.zeros(cfg.n)
    else:
        mu = cfg.mu

    if cfg.sigma_spec == "ar1":
        sigma = ar1_covariance(cfg.n, cfg.rho)
    elif cfg.sigma_spec == "identity":
        sigma = np.eye(cfg.n)
    else:
        sigma = cfg.sigma

    if cfg.mode == "two_sample":
        return PopulationSpec(mu, sigma, np.zeros(cfg.n), sigma)
    return PopulationSpec(mu, sigma)


def predicted_rejection(population, cfg, d0, alpha):
    """Asymptotic rejection probability of one grid cell"""
    try:
        if cfg.mode == "two_sample":
            kappa = kappa_two_sample(population, d0, *cfg.sizes)
        else:
            kappa = kappa_one_sample(population, d0, *cfg.sizes)
    except DegenerateScaleError:
        return float("nan")
    return float(theoretical_rejection_prob(kappa, alpha))


def _replicate(cfg, population, gamma, d0, d0_index, rep, alpha):
    rng = child_rng(cfg.seed, cfg.n, cfg.t, d0_index, rep)
    if cfg.mode == "two_sample":
        x = generate_sample(population.mu, gamma, cfg.m1 + cfg.n0,
                            cfg.noise, rng)
        z = generate_sample(population.mu2, gamma, cfg.m2 + cfg.n0,
                            cfg.noise, rng)
        config = TwoSampleConfig(d0, alpha, cfg.n0)
        return two_sample_deviation_test(x, z, config)[0]
    sample = generate_sample(population.mu, gamma, cfg.t, cfg.noise, rng)
    return one_sample_deviation_test(sample, OneSampleConfig(d0,
                                                             alpha=alpha))[0]


def run_cell(task):
    """Run every replication of one (cell, d0) task.

    Args:
      task (tuple): (SimulationConfig, d0 index, alpha).

    Returns:
      GridRow: The aggregated rejection rate.
    """
    cfg, d0_index, alpha = task
    d0 = cfg.d0_values[d0_index]
    population = build_population(cfg)
    gamma = cholesky_factor(population.sigma)

    rejections = 0
    abs_total = 0.0
    for rep in range(cfg.replications):
        try:
            result = _replicate(cfg, population, gamma, d0, d0_index, rep,
                                alpha)
        except (TabDevError, ArithmeticError, ValueError) as exc:
            raise SimulationError(
                "cell (n={}, t={}, d0={}) replication {} failed: {}"
                .format(cfg.n, cfg.t, d0, rep, exc))
        rejections += int(result.reject_h0)
        abs_total += abs(result.statistic)

    rate = rejections / cfg.replications
    stderr = math.sqrt(rate * (1.0 - rate) / cfg.replications)
    return GridRow(cfg.n, cfg.t, d0, rate, cfg.replications,
                   abs_total / cfg.replications, stderr,
                   predicted_rejection(population, cfg, d0, alpha))


def resolve_workers(workers=None):
    """Worker count from the argument, else TABDEV_THREADS, else all CPUs"""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigurationError("{} must be an integer, got {!r}"
                                     .format(THREADS_ENV, raw))
    if workers < 0:
        raise ConfigurationError("worker count must be non-negative, got {}"
                                 .format(workers))
    return workers or (os.cpu_count() or 1)


def run_grid(configs, alpha=0.05, workers=None):
    """Run the simulation over several cells.

    Args:
      configs (iterable): SimulationConfig instances, one per cell.
      alpha (float, optional): Significance level. Defaults to 0.05.
      workers (int, optional): Process count; see resolve_workers.

    Returns:
      GridResult: Rows in (cell, d0) order.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError("alpha must lie in (0, 1), got {}"
                                 .format(alpha))
    tasks = [(cfg, index, alpha) for cfg in configs
             for index in range(len(cfg.d0_values))]
    if not tasks:
        raise ConfigurationError("simulation grid is empty")
    workers = min(resolve_workers(workers), len(tasks))

    logger.info("running %d tasks on %d worker(s)", len(tasks), workers)
    if workers == 1:
        rows = [run_cell(task) for task in tasks]
    else:
        with multiprocessing.Pool(processes=workers) as pool:
            rows = pool.map(run_cell, tasks)

    for row in rows:
        logger.info("n=%d t=%d d0=%g: rate %.3f (predicted %.3f)", row.n,
                    row.t, row.d0, row.rate, row.predicted)
    return GridResult(rows)


def empirical_rejection_rate(cfg, alpha=0.05, workers=None):
    """Empirical rejection rates of one cell over its radii"""
    return run_grid([cfg], alpha, workers)


__all__ = ["MU_SPECS", "SIGMA_SPECS", "MODES", "STANDARD_CELLS", "GridRow",
           "GridResult", "SimulationConfig", "desk_cells",
           "standard_d0_grid", "build_population", "predicted_rejection",
           "run_cell", "resolve_workers", "run_grid",
           "empirical_rejection_rate"]
