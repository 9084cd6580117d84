"""Command line front end.

Subcommands::

    tabdev test-one      one-sample deviation test on a CSV sample
    tabdev test-two      two-sample deviation test on two CSV samples
    tabdev simulate      Monte Carlo rejection-rate grid
    tabdev power-curve   asymptotic power over a radius grid
    tabdev dist          bandit distribution queries
    tabdev sde-check     diffusion endpoint check of the bandit law

Exit status is 0 on success, 2 for usage and configuration errors and 1 for
every other failure.
"""

from __future__ import absolute_import, print_function

import argparse
import json
import logging
import os
import re
import sys

import numpy as np

from . import __version__
from .core.bandit import (BanditParams, bandit_cdf, bandit_pdf,
                          bandit_quantile, bandit_sample, bandit_tail_prob,
                          density_table)
from .core.power import PopulationSpec, power_curve
from .core.sde import DEFAULT_STEPS, sde_check
from .core.tab import (OneSampleConfig, one_sample_deviation_test,
                       one_sample_scan, shuffle_rows)
from .core.twosample import (TwoSampleConfig, two_sample_deviation_test,
                             two_sample_scan)
from .errors import ConfigurationError, TabDevError
from .sim.generators import ar1_covariance, child_rng
from .sim.harness import run_grid
from .sim.settings import (PRESETS, configs_from_settings, load_settings,
                           merge_settings)
from .utils.dataio import parse_csv, read_matrix, read_vector, write_csv
from .utils.manifest import SCHEMA_VERSION, RunManifest
from .utils.report import render_report, write_report_template

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_CELL_PATTERN = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_float_list(text):
    """Parse "a,b,c" or an inclusive range "start:stop:step" into floats"""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0.0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + step * index, 10) for index in range(count)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected a comma separated list or start:stop:step, got {!r}"
            .format(text))


def parse_cells(text):
    """Parse "(100,200),(200,400)" into (n, t) pairs"""
    cells = [(int(n), int(t)) for n, t in _CELL_PATTERN.findall(text)]
    if not cells:
        raise argparse.ArgumentTypeError(
            "expected cells like (100,200),(200,400), got {!r}".format(text))
    return cells


def auto_seed():
    """A fresh 64-bit seed from operating system entropy"""
    return int(np.random.SeedSequence().entropy % 2 ** 64)


def resolve_seed(seed, reason):
    if seed is None:
        seed = auto_seed()
        logger.warning("no --seed given for %s, using %d", reason, seed)
    return seed


def _to_builtin(value):
    """Replace numpy scalars and arrays by plain Python values"""
    if isinstance(value, dict):
        return dict((key, _to_builtin(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [_to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def emit(document):
    """Print a JSON document carrying the schema version"""
    document = dict(_to_builtin(document), schema=SCHEMA_VERSION)
    print(json.dumps(document, indent=2, sort_keys=True))
    return document


def write_json(path, document):
    logger.info("Writing %s", path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(dict(_to_builtin(document), schema=SCHEMA_VERSION), f,
                  indent=2, sort_keys=True)
        f.write("\n")


def finish_outputs(args, argv, config, seed, outputs):
    """Write the manifest sidecar of a run with --out"""
    if not args.out:
        return
    path = os.path.join(args.out, "manifest.json")
    RunManifest.create(argv, config, seed, outputs + ["manifest.json"]) \
        .write(path)


def prepare_out(args):
    if args.out:
        os.makedirs(args.out, exist_ok=True)


def _trajectory_rows(trajectory):
    return [(step, int(theta), float(partial), float(target))
            for step, (theta, partial, target) in enumerate(
                zip(trajectory.thetas, trajectory.partials,
                    trajectory.targets), 1)]


def _result_document(result, trajectory, size_names):
    document = {"statistic": result.statistic, "p_value": result.p_value,
                "reject": result.reject_h0,
                "critical_value": result.critical_value,
                "tau_hat": trajectory.nuisance.tau_hat,
                "sigma2_hat": trajectory.nuisance.sigma2_hat,
                "config": result.config.as_dict()}
    document.update(zip(size_names, result.sizes))
    return document


def _scan_document(scan):
    return {"threshold": scan.threshold,
            "rows": [row._asdict() for row in scan.rows]}


def _report_test(args, argv, title, size_names, config, seed, run_single,
                 run_scan):
    """Shared tail of test-one and test-two"""
    prepare_out(args)
    outputs = []
    if args.d0_grid:
        scan = run_scan(args.d0_grid)
        document = _scan_document(scan)
        if args.json:
            emit(document)
        else:
            print(render_report("scan.txt", title=title, scan=scan), end="")
        if args.out:
            write_json(os.path.join(args.out, "scan.json"), document)
            outputs.append("scan.json")
    else:
        result, trajectory = run_single()
        document = _result_document(result, trajectory, size_names)
        if args.json:
            emit(document)
        else:
            print(render_report("test_result.txt", title=title, result=result,
                                nuisance=trajectory.nuisance,
                                size_names=size_names), end="")
        if args.out:
            write_json(os.path.join(args.out, "result.json"), document)
            write_csv(os.path.join(args.out, "trajectory.csv"),
                      ["t", "theta", "partial", "target"],
                      _trajectory_rows(trajectory))
            outputs.extend(["result.json", "trajectory.csv"])
    finish_outputs(args, argv, config, seed, outputs)
    return EXIT_OK


def _require_radius(args):
    if args.d0 is None and not args.d0_grid:
        raise ConfigurationError("give --d0 or --d0-grid")


def cmd_test_one(args, argv):
    """One-sample deviation test on a CSV file"""
    _require_radius(args)
    sample = parse_csv(args.data, args.header)
    mu0 = read_vector(args.mu0_file) if args.mu0_file else None
    seed = None
    if args.shuffle:
        seed = resolve_seed(args.seed, "--shuffle")
        sample = shuffle_rows(sample, child_rng(seed))

    def run_single():
        config = OneSampleConfig(args.d0, mu0, args.alpha, args.split)
        return one_sample_deviation_test(sample, config)

    def run_scan(d0_values):
        return one_sample_scan(sample, d0_values, mu0, args.alpha, args.split)

    config = {"command": "test-one", "data": args.data, "d0": args.d0,
              "d0_grid": args.d0_grid, "alpha": args.alpha,
              "split": args.split, "shuffle": args.shuffle,
              "mu0": None if mu0 is None else mu0.tolist()}
    return _report_test(args, argv, "One-sample deviation test",
                        ["t1", "t2"], config, seed, run_single, run_scan)


def cmd_test_two(args, argv):
    """Two-sample deviation test on two CSV files"""
    _require_radius(args)
    x = parse_csv(args.x, args.header)
    z = parse_csv(args.z, args.header)
    seed = None
    if args.shuffle:
        seed = resolve_seed(args.seed, "--shuffle")
        x = shuffle_rows(x, child_rng(seed, 1))
        z = shuffle_rows(z, child_rng(seed, 2))

    def run_single():
        config = TwoSampleConfig(args.d0, args.alpha, args.n0)
        return two_sample_deviation_test(x, z, config)

    def run_scan(d0_values):
        return two_sample_scan(x, z, d0_values, args.alpha, args.n0)

    config = {"command": "test-two", "x": args.x, "z": args.z, "d0": args.d0,
              "d0_grid": args.d0_grid, "alpha": args.alpha, "n0": args.n0,
              "shuffle": args.shuffle}
    return _report_test(args, argv, "Two-sample deviation test",
                        ["m1", "m2", "n0"], config, seed, run_single,
                        run_scan)


def cmd_simulate(args, argv):
    """Monte Carlo grid of empirical rejection rates"""
    file_settings = load_settings(args.config) if args.config else None
    overrides = {"cells": args.cells, "d0_values": args.d0_grid,
                 "replications": args.reps, "seed": args.seed,
                 "alpha": args.alpha, "rho": args.rho, "noise": args.noise,
                 "mode": args.mode, "n0": args.n0, "m1": args.m1,
                 "m2": args.m2, "workers": args.workers}
    settings = merge_settings(file_settings, overrides, args.full, args.preset)
    settings["seed"] = resolve_seed(settings["seed"], "simulate")
    configs = configs_from_settings(settings)

    grid = run_grid(configs, settings["alpha"], settings["workers"])
    summary = {"alpha": settings["alpha"], "seed": settings["seed"],
               "replications": settings["replications"],
               "mode": settings["mode"], "noise": settings["noise"],
               "cells": [list(cell) for cell in grid.cells()],
               "d0_values": grid.d0_values(),
               "rows": [row._asdict() for row in grid.rows]}
    report_args = dict(grid=grid, alpha=settings["alpha"],
                       replications=settings["replications"],
                       seed=settings["seed"], mode=settings["mode"],
                       noise=settings["noise"])
    if args.json:
        emit(summary)
    else:
        print(render_report("grid.md", **report_args), end="")

    if args.out:
        prepare_out(args)
        write_csv(os.path.join(args.out, "grid.csv"),
                  list(grid.rows[0]._fields), grid.rows)
        write_json(os.path.join(args.out, "summary.json"), summary)
        write_report_template("grid.md", os.path.join(args.out, "report.md"),
                              **report_args)
        config = dict((key, value) for key, value in settings.items()
                      if key != "workers")
        config["preset"] = args.preset
        finish_outputs(args, argv, config, settings["seed"],
                       ["grid.csv", "summary.json", "report.md"])
    return EXIT_OK


def _population(args):
    n = args.n
    if args.mu_file:
        mu = read_vector(args.mu_file)
        n = mu.size
    elif n < 1:
        raise ConfigurationError("--n must be at least 1, got {}".format(n))
    elif args.mu == "zero":
        mu = np.zeros(n)
    else:
        mu = np.full(n, n ** -0.5)

    if args.sigma_file:
        sigma = read_matrix(args.sigma_file)
    elif args.sigma == "identity":
        sigma = np.eye(n)
    else:
        sigma = ar1_covariance(n, args.rho)

    if args.n0 is None:
        return PopulationSpec(mu, sigma)
    mu2 = read_vector(args.mu2_file) if args.mu2_file else np.zeros(n)
    return PopulationSpec(mu, sigma, mu2, sigma)


def cmd_power_curve(args, argv):
    """Asymptotic rejection probability over radii"""
    if args.n0 is None:
        if args.t1 is None or args.t2 is None:
            raise ConfigurationError("give --t1 and --t2, or --m1, --m2 and "
                                     "--n0")
        sizes = (args.t1, args.t2)
    else:
        if args.m1 is None or args.m2 is None:
            raise ConfigurationError("--n0 needs --m1 and --m2")
        sizes = (args.m1, args.m2, args.n0)
    rows = power_curve(_population(args), args.d0_grid, sizes, args.alpha)

    if args.json:
        emit({"sizes": list(sizes), "alpha": args.alpha,
              "rows": [row._asdict() for row in rows]})
    else:
        print(render_report("power_curve.csv", rows=rows), end="")
    if args.out:
        prepare_out(args)
        write_csv(os.path.join(args.out, "power_curve.csv"),
                  list(rows[0]._fields), rows)
        config = {"command": "power-curve", "sizes": list(sizes),
                  "alpha": args.alpha, "d0_grid": args.d0_grid, "n": args.n,
                  "mu": args.mu_file or args.mu, "rho": args.rho,
                  "sigma": args.sigma_file or args.sigma}
        finish_outputs(args, argv, config, None, ["power_curve.csv"])
    return EXIT_OK


def cmd_dist(args, argv):
    """Queries against the bandit distribution B(kappa)"""
    params = BanditParams(args.kappa)
    entries = []
    for value in args.pdf:
        entries.append(("pdf", value, bandit_pdf(value, params)))
    for value in args.cdf:
        entries.append(("cdf", value, bandit_cdf(value, params)))
    for value in args.quantile:
        entries.append(("quantile", value, bandit_quantile(value, params)))
    for value in args.tail:
        # P(|B(kappa)| > z) is g evaluated at drift -kappa.
        entries.append(("tail", value, bandit_tail_prob(-args.kappa, value)))

    table = None
    if args.table:
        table = density_table(args.kappa_grid, args.x_grid)
    draws = seed = None
    if args.sample is not None:
        seed = resolve_seed(args.seed, "--sample")
        draws = bandit_sample(params, child_rng(seed), args.sample).tolist()
    if not entries and table is None and draws is None:
        raise ConfigurationError("nothing to compute; give --pdf, --cdf, "
                                 "--quantile, --tail, --sample or --table")

    document = {"kappa": args.kappa,
                "values": [{"query": name, "argument": argument,
                            "value": value}
                           for name, argument, value in entries]}
    if table is not None:
        document["table"] = [row._asdict() for row in table]
    if draws is not None:
        document["seed"] = seed
        document["draws"] = draws
    if args.json:
        emit(document)
    else:
        print(render_report("dist.txt", kappa=args.kappa, entries=entries,
                            table=table, draws=draws, seed=seed), end="")
    if args.out:
        prepare_out(args)
        write_json(os.path.join(args.out, "dist.json"), document)
        config = dict(vars(args))
        config.pop("func", None)
        finish_outputs(args, argv, config, seed, ["dist.json"])
    return EXIT_OK


def cmd_sde_check(args, argv):
    """KS distance of simulated diffusion endpoints to the closed form"""
    seed = resolve_seed(args.seed, "sde-check")
    check = sde_check(args.alpha, args.beta, args.x0, args.steps, args.paths,
                      seed)
    document = check._asdict()
    if args.json:
        emit(document)
    else:
        print(render_report("sde_check.txt", check=check), end="")
    if args.out:
        prepare_out(args)
        write_json(os.path.join(args.out, "sde_check.json"), document)
        finish_outputs(args, argv, document, seed, ["sde_check.json"])
    return EXIT_OK


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed of every random stream")
    common.add_argument("--out", default=None,
                        help="directory for output files and the manifest")
    common.add_argument("--json", action="store_true",
                        help="print a JSON document instead of text")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true",
                           help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true",
                           help="log errors only")
    return common


def _add_test_options(parser):
    parser.add_argument("--d0", type=float, default=None,
                        help="deviation radius")
    parser.add_argument("--d0-grid", type=parse_float_list, default=None,
                        help="scan radii, e.g. 1.4:1.6:0.02")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--header", action="store_true",
                        help="input files start with a header line")
    parser.add_argument("--shuffle", action="store_true",
                        help="permute rows with --seed before splitting")


def build_parser():
    """The argparse parser of the tabdev command"""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="tabdev",
        description="High-dimensional deviation tests of mean vectors with "
                    "the two-armed bandit statistic.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s {}".format(__version__))
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    test_one = subparsers.add_parser("test-one", parents=[common],
                                     help="one-sample deviation test")
    test_one.add_argument("--data", required=True, help="T x n sample CSV")
    _add_test_options(test_one)
    test_one.add_argument("--mu0", choices=["zeros"], default="zeros",
                          help="reference mean")
    test_one.add_argument("--mu0-file", default=None,
                          help="single-row CSV with the reference mean")
    test_one.add_argument("--split", type=float, default=0.5,
                          help="head share T1 / T")
    test_one.set_defaults(func=cmd_test_one)

    test_two = subparsers.add_parser("test-two", parents=[common],
                                     help="two-sample deviation test")
    test_two.add_argument("--x", required=True, help="first sample CSV")
    test_two.add_argument("--z", required=True, help="second sample CSV")
    _add_test_options(test_two)
    test_two.add_argument("--n0", type=int, default=None,
                          help="TAB length, default min(M1, M2) // 3")
    test_two.set_defaults(func=cmd_test_two)

    simulate = subparsers.add_parser("simulate", parents=[common],
                                     help="Monte Carlo rejection rates")
    simulate.add_argument("--config", default=None, help="TOML settings")
    simulate.add_argument("--preset", choices=PRESETS, default="table1",
                          help="AR(1) design grid")
    simulate.add_argument("--full", action="store_true",
                          help="all eight design cells")
    simulate.add_argument("--cells", type=parse_cells, default=None,
                          help='cells such as "(100,200),(200,400)"')
    simulate.add_argument("--d0-grid", type=parse_float_list, default=None)
    simulate.add_argument("--reps", type=int, default=None)
    simulate.add_argument("--alpha", type=float, default=None)
    simulate.add_argument("--rho", type=float, default=None)
    simulate.add_argument("--noise", choices=["gaussian", "rademacher"],
                          default=None)
    simulate.add_argument("--mode", choices=["one_sample", "two_sample"],
                          default=None)
    simulate.add_argument("--n0", type=int, default=None)
    simulate.add_argument("--m1", type=int, default=None)
    simulate.add_argument("--m2", type=int, default=None)
    simulate.add_argument("--workers", type=int, default=None,
                          help="processes; default $TABDEV_THREADS or all")
    simulate.set_defaults(func=cmd_simulate)

    power = subparsers.add_parser("power-curve", parents=[common],
                                  help="asymptotic power over radii")
    power.add_argument("--n", type=int, default=100, help="dimension")
    power.add_argument("--mu", choices=["uniform_unit_norm", "zero"],
                       default="uniform_unit_norm")
    power.add_argument("--mu-file", default=None)
    power.add_argument("--mu2-file", default=None)
    power.add_argument("--sigma", choices=["ar1", "identity"], default="ar1")
    power.add_argument("--sigma-file", default=None)
    power.add_argument("--rho", type=float, default=0.5)
    power.add_argument("--d0-grid", type=parse_float_list,
                       default=parse_float_list("0.5:1.5:0.1"))
    power.add_argument("--alpha", type=float, default=0.05)
    power.add_argument("--t1", type=int, default=None)
    power.add_argument("--t2", type=int, default=None)
    power.add_argument("--m1", type=int, default=None)
    power.add_argument("--m2", type=int, default=None)
    power.add_argument("--n0", type=int, default=None)
    power.set_defaults(func=cmd_power_curve)

    dist = subparsers.add_parser("dist", parents=[common],
                                 help="bandit distribution B(kappa)")
    dist.add_argument("--kappa", type=float, default=0.0)
    dist.add_argument("--pdf", type=float, action="append", default=[])
    dist.add_argument("--cdf", type=float, action="append", default=[])
    dist.add_argument("--quantile", type=float, action="append", default=[])
    dist.add_argument("--tail", type=float, action="append", default=[],
                      help="P(|B(kappa)| > z)")
    dist.add_argument("--sample", type=int, default=None,
                      help="number of draws")
    dist.add_argument("--table", action="store_true",
                      help="density table over --kappa-grid and --x-grid")
    dist.add_argument("--kappa-grid", type=parse_float_list,
                      default=[-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0])
    dist.add_argument("--x-grid", type=parse_float_list,
                      default=parse_float_list("-5:5:0.25"))
    dist.set_defaults(func=cmd_dist)

    sde = subparsers.add_parser("sde-check", parents=[common],
                                help="diffusion check of the bandit law")
    sde.add_argument("--alpha", type=float, default=-2.0,
                     help="drift magnitude")
    sde.add_argument("--beta", type=float, default=1.0)
    sde.add_argument("--x0", type=float, default=0.0)
    sde.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    sde.add_argument("--paths", type=int, default=20000)
    sde.set_defaults(func=cmd_sde_check)
    return parser


def configure_logging(args):
    level = logging.WARNING
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("pyTabDev").setLevel(level)


def main(argv=None):
    """Entry point of the tabdev command; returns the exit status"""
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    configure_logging(args)

    try:
        return args.func(args, argv)
    except ConfigurationError as exc:
        print("error[{}]: {}".format(exc.code, exc), file=sys.stderr)
        return EXIT_USAGE
    except TabDevError as exc:
        print("error[{}]: {}".format(exc.code, exc), file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print("error[E_IO]: {}".format(exc), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
