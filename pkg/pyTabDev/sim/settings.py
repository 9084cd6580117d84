"""Simulation settings read from TOML files and merged with command line
overrides.

Recognised keys::

    cells = [[100, 200], [200, 400]]
    d0_values = [0.5, 1.0, 1.5]
    replications = 200
    seed = 7
    alpha = 0.05
    mu = "uniform_unit_norm"      # or "zero", or an explicit vector
    sigma = "ar1"                 # or "identity", or an explicit matrix
    rho = 0.5
    noise = "gaussian"            # or "rademacher"
    mode = "one_sample"           # or "two_sample"
    n0 = 100
    m1 = 100
    m2 = 100
    workers = 0
"""

from __future__ import absolute_import

import logging
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigurationError
from .harness import (DEFAULT_REPLICATIONS, SimulationConfig, desk_cells,
                      standard_d0_grid)

logger = logging.getLogger(__name__)

KNOWN_KEYS = frozenset(["cells", "d0_values", "replications", "seed", "alpha",
                        "mu", "sigma", "rho", "noise", "mode", "n0", "m1",
                        "m2", "workers"])

PRESETS = ("table1", "table1-full", "standard")

DEFAULTS = {"replications": DEFAULT_REPLICATIONS, "seed": None,
            "alpha": 0.05, "mu": "uniform_unit_norm", "sigma": "ar1",
            "rho": 0.5, "noise": "gaussian", "mode": "one_sample",
            "n0": None, "m1": None, "m2": None, "workers": None}


def load_settings(path):
    """Read a TOML settings file into a dict, rejecting unknown keys"""
    try:
        with open(path, "rb") as f:
            settings = tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError("cannot parse {}: {}".format(path, exc))
    except OSError as exc:
        raise ConfigurationError("cannot read {}: {}".format(path, exc))
    unknown = sorted(set(settings) - KNOWN_KEYS)
    if unknown:
        raise ConfigurationError("unknown settings in {}: {}"
                                 .format(path, ", ".join(unknown)))
    logger.debug("loaded settings %s from %s", sorted(settings), path)
    return settings


def preset_settings(name, full=False):
    """Settings of a named design grid.

    "table1" is the AR(1) design with rho = 0.5 and a unit-norm uniform mean
    over the standard radius grid, on the desk cells or on all eight cells
    when full is set. "table1-full" always runs all eight cells and
    "standard" is an alias of "table1".
    """
    if name not in PRESETS:
        raise ConfigurationError("Unknown preset: {}".format(name))
    return {"cells": desk_cells(full or name == "table1-full"),
            "d0_values": standard_d0_grid(), "mu": "uniform_unit_norm",
            "sigma": "ar1", "rho": 0.5}


def merge_settings(file_settings=None, overrides=None, full=False,
                   preset=None):
    """Combine defaults, a preset, file settings and overrides, in rising
    priority.

    Overrides whose value is None are ignored. Missing cells and radii fall
    back to the desk cells and the standard radius grid.
    """
    merged = dict(DEFAULTS)
    merged["cells"] = desk_cells(full)
    merged["d0_values"] = standard_d0_grid()
    if preset is not None:
        merged.update(preset_settings(preset, full))
    merged.update(file_settings or {})
    merged.update((key, value) for key, value in (overrides or {}).items()
                  if value is not None)
    try:
        merged["cells"] = [(int(n), int(t)) for n, t in merged["cells"]]
    except (TypeError, ValueError):
        raise ConfigurationError("cells must be pairs (n, t), got {}"
                                 .format(merged["cells"]))
    return merged


def _spec_and_value(value, names, what):
    if isinstance(value, str):
        if value not in names:
            raise ConfigurationError("Unknown {}: {}".format(what, value))
        return value, None
    return "custom", value


def configs_from_settings(settings):
    """One SimulationConfig per cell of merged settings"""
    if settings["seed"] is None:
        raise ConfigurationError("settings carry no seed")
    mu_spec, mu = _spec_and_value(settings["mu"],
                                  ("uniform_unit_norm", "zero"), "mu")
    sigma_spec, sigma = _spec_and_value(settings["sigma"],
                                        ("ar1", "identity"), "sigma")
    return [SimulationConfig(n, t, settings["d0_values"],
                             replications=settings["replications"],
                             seed=settings["seed"], mu_spec=mu_spec, mu=mu,
                             sigma_spec=sigma_spec, rho=settings["rho"],
                             sigma=sigma, noise=settings["noise"],
                             mode=settings["mode"], n0=settings["n0"],
                             m1=settings["m1"], m2=settings["m2"])
            for n, t in settings["cells"]]


__all__ = ["KNOWN_KEYS", "PRESETS", "preset_settings", "load_settings",
           "merge_settings", "configs_from_settings"]
