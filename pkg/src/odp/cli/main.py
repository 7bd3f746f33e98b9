"""Command-line entry point: `odp <command> [options]`."""

import argparse
import math
import sys
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from odp.annulus2d.branch import trace_branch
from odp.annulus2d.field import make_annulus_grid
from odp.bifurcate.lambda_star import find_lambda_star, parity_certificate
from odp.bifurcate.sweep import sweep
from odp.cli.output import build_meta, default_output, read_report, read_table, write_report, write_table
from odp.cli.rescale import rescale_to_unit_sphere
from odp.cli.run_config import PRESETS, RunConfig
from odp.cli.verify import run_verify
from odp.core.errors import BranchError, ConfigurationError, GridError, OdpError
from odp.core.logging import setup_logging
from odp.core.validation import parse_float_list
from odp.dashboard.plots import plot_branch, plot_lambda_scan, plot_profile
from odp.dtn.report import dtn_report
from odp.exterior.profile import decay_rate, energy_identity as exterior_energy_identity, solve_exterior_radial
from odp.exterior.window import Window, select_window
from odp.geometry.grid import make_sphere_grid
from odp.radial.solver import ProfileCache, energy_identity
from odp.spectrum.dirichlet import dirichlet_form_identity, mode_spectrum_table, principal_dirichlet_pair

logger = logging.getLogger(__name__)

COMMANDS = ["radial", "exterior", "spectrum", "dtn", "lambda-star", "sweep", "branch", "verify", "rescale"]

# flag dest -> RunConfig key
CONFIG_FLAGS = {
    "d": "d",
    "p": "p",
    "k": "k",
    "lam": "lambda",
    "group": "group",
    "n_r": "n_r",
    "n_theta": "n_theta",
    "n_exterior": "n_exterior",
    "r_max": "r_max",
    "lambda0": "lambda0",
    "lambda1": "lambda1",
    "amplitudes": "amplitudes",
    "eps_list": "eps_list",
    "k_list": "k_list",
    "modes": "modes",
    "n_modes": "n_modes",
    "n_jobs": "n_jobs",
    "preset": "preset",
}


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Cannot parse integer list: {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except ConfigurationError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="RunConfig YAML file")
    common.add_argument("--save-config", help="Write the resolved RunConfig to this file")
    common.add_argument("--out", help="Output file (CSV or JSON by command)")
    common.add_argument("--plot", help="Write a Plotly HTML figure to this file")
    common.add_argument("--d", type=int)
    common.add_argument("--p", type=float)
    common.add_argument("--k", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--group", help='"dihedral:n" or "modes:i/m,i/m,..."')
    common.add_argument("--n", type=int, help="Dihedral order (shorthand for --group dihedral:n)")
    common.add_argument("--n-r", dest="n_r", type=int)
    common.add_argument("--n-theta", dest="n_theta", type=int)
    common.add_argument("--n-exterior", dest="n_exterior", type=int)
    common.add_argument("--r-max", dest="r_max", type=float)
    common.add_argument("--lambda0", type=float)
    common.add_argument("--lambda1", type=float)
    common.add_argument("--amplitudes", type=_float_list)
    common.add_argument("--eps-list", dest="eps_list", type=_float_list)
    common.add_argument("--k-list", dest="k_list", type=_float_list)
    common.add_argument("--modes", type=_int_list)
    common.add_argument("--n-modes", dest="n_modes", type=int)
    common.add_argument("--n-jobs", dest="n_jobs", type=int)

    parser = argparse.ArgumentParser(prog="odp", description="Overdetermined problems on spheres with a ball removed")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("radial", parents=[common], help="Radial solution on S^d(k) minus B_1")
    ext = sub.add_parser("exterior", parents=[common], help="Exterior limit problem")
    ext.add_argument("--scan", action="store_true", help="Scan lambda and select the working window")
    sub.add_parser("spectrum", parents=[common], help="Dirichlet mode spectra")
    sub.add_parser("dtn", parents=[common], help="Linearized DtN operator report")
    sub.add_parser("lambda-star", parents=[common], help="lambda*(k) certificate")
    sub.add_parser("sweep", parents=[common], help="lambda*(k) over --k-list")
    sub.add_parser("branch", parents=[common], help="Trace the nontrivial branch (d=2)").add_argument(
        "--input", help="Certificate JSON supplying lambda*"
    )
    sub.add_parser("verify", parents=[common], help="Acceptance suite").add_argument("--preset", choices=PRESETS, default=None)
    resc = sub.add_parser("rescale", parents=[common], help="Transfer a certificate or branch point to S^d")
    resc.add_argument("--input", required=True, help="Certificate JSON or branch CSV")
    resc.add_argument("--row", type=int, default=0, help="Branch row to rescale")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Preset or --config file, then the explicit flags."""
    if args.config:
        base = RunConfig.load(args.config)
    elif args.command == "verify":
        base = RunConfig.from_preset(getattr(args, "preset", None) or "reference")
    else:
        base = RunConfig.build()
    overrides: Dict[str, Any] = {key: getattr(args, dest, None) for dest, key in CONFIG_FLAGS.items()}
    if args.n is not None:
        overrides["group"] = f"dihedral:{args.n}"
    config = base.merged(overrides)
    if args.save_config:
        config.save(args.save_config)
    return config


def _require_lambda(config: RunConfig) -> float:
    if config.lam is None:
        raise ConfigurationError("This command needs --lambda")
    return config.lam


def _sphere_cache(config: RunConfig) -> ProfileCache:
    params = config.params
    return ProfileCache(params, grid=make_sphere_grid(params.k, params.d, n=config.n_r))


def cmd_radial(config: RunConfig, args: argparse.Namespace) -> int:
    lam = _require_lambda(config)
    profile = _sphere_cache(config).get(lam)
    extra = {"residual": profile.residual_norm, "du_at_1": profile.du_at_1, "energy_identity": energy_identity(profile)}
    table = profile.to_frame()
    write_table(table, args.out or default_output("radial", ".csv"), build_meta(config, "radial", extra))
    if args.plot:
        plot_profile(table, args.plot, f"u at k={config.k:g}, lambda={lam:g}", extra)
    return 0


def cmd_exterior(config: RunConfig, args: argparse.Namespace) -> int:
    if args.scan:
        window = select_window(config.params, config.symmetry, n=config.n_exterior)
        extra = {
            "lambda0": window.lambda0,
            "lambda1": window.lambda1,
            "Lambda0": window.Lambda0,
            "Lambda_star": window.Lambda_star,
        }
        write_table(window.scan, args.out or default_output("exterior_scan", ".csv"), build_meta(config, "exterior", extra))
        if args.plot:
            plot_lambda_scan(window.scan, args.plot, extra)
        return 0

    lam = _require_lambda(config)
    profile = solve_exterior_radial(config.params.with_lambda(lam), r_max=config.r_max, n=config.n_exterior)
    extra = {
        "residual": profile.residual_norm,
        "du_at_1": profile.du_at_1,
        "r_max": profile.r_max,
        "energy_identity": exterior_energy_identity(profile),
        "decay_rate": decay_rate(profile),
    }
    table = profile.to_frame()
    write_table(table, args.out or default_output("exterior", ".csv"), build_meta(config, "exterior", extra))
    if args.plot:
        plot_profile(table, args.plot, f"Limit profile at lambda={lam:g}", extra)
    return 0


def cmd_spectrum(config: RunConfig, args: argparse.Namespace) -> int:
    u = _sphere_cache(config).get(_require_lambda(config))
    pair = principal_dirichlet_pair(u)
    _, rel = dirichlet_form_identity(u)
    degrees = sorted({0, 1, *config.symmetry.degrees})
    table = mode_spectrum_table(u, degrees)
    extra = {"tau": pair.tau, "second_eig": pair.second_eig, "morse_index": pair.morse_index, "energy_identity": rel}
    write_table(table, args.out or default_output("spectrum", ".csv"), build_meta(config, "spectrum", extra))
    return 0


def cmd_dtn(config: RunConfig, args: argparse.Namespace) -> int:
    u = _sphere_cache(config).get(_require_lambda(config))
    report = dtn_report(u, config.symmetry)
    out = Path(args.out or default_output("dtn", ".json"))
    meta = build_meta(config, "dtn", {"sigma1": report.sigma1, "index": report.index})
    write_report({"dtn": report.to_dict()}, str(out), meta)
    write_table(report.h_table(), str(out.with_name(f"{out.stem}_h.csv")), meta)
    return 0


def cmd_lambda_star(config: RunConfig, args: argparse.Namespace) -> int:
    window: Optional[Window] = None
    bounds = config.window
    if bounds is None:
        window = select_window(config.params, config.symmetry, n=config.n_exterior)
        bounds = window.as_tuple()
    cert = find_lambda_star(config.params, config.symmetry, bounds, cache=_sphere_cache(config))
    extra = {}
    if window is not None:
        extra = {"Lambda0": window.Lambda0, "Lambda_star": window.Lambda_star}
    data = {"certificate": cert.to_dict(), "parity_ok": parity_certificate(cert), "limit": extra}
    write_report(data, args.out or default_output("lambda-star", ".json"), build_meta(config, "lambda-star"))
    if args.plot and window is not None:
        plot_lambda_scan(window.scan, args.plot, {"lambda0": bounds[0], "lambda1": bounds[1], "lambda*": cert.lambda_star, **extra})
    return 0


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    window = None
    if config.window is not None:
        window = Window(config.lambda0, config.lambda1, None, math.nan, pd.DataFrame())
    table = sweep(config.k_list, config.symmetry, config.params, window=window, n_r=config.n_r, n_jobs=config.n_jobs)
    write_table(table, args.out or default_output("sweep", ".csv"), build_meta(config, "sweep"))
    failed = table["error"].notna().sum()
    if failed:
        logger.warning(f"{failed} of {len(table)} curvatures failed")
    return 0


def _lambda_star_for_branch(config: RunConfig, args: argparse.Namespace, cache: ProfileCache) -> float:
    if args.input:
        report = read_report(args.input)
        cert = report.get("certificate", report)
        if abs(float(cert["k"]) - config.k) > 1e-15 or float(cert["p"]) != config.p:
            raise ConfigurationError(f"Certificate {args.input} was computed at k={cert['k']}, p={cert['p']}")
        return float(cert["lambda_star"])
    bounds = config.window or select_window(config.params, config.symmetry, n=config.n_exterior).as_tuple()
    return find_lambda_star(config.params, config.symmetry, bounds, cache=cache).lambda_star


def cmd_branch(config: RunConfig, args: argparse.Namespace) -> int:
    if config.d != 2:
        raise ConfigurationError("branch needs d=2")
    if not config.group.startswith("dihedral"):
        raise ConfigurationError("branch needs a dihedral group (--n or --group dihedral:n)")
    n = config.symmetry.first_degree
    cache = _sphere_cache(config)
    lambda_star = _lambda_star_for_branch(config, args, cache)
    grid = make_annulus_grid(config.k, n, config.n_r, config.n_theta, radial=cache.grid)
    out = args.out or default_output("branch", ".csv")
    try:
        table = trace_branch(cache, grid, config.amplitudes, lambda_star, config.n_modes)
    except BranchError as e:
        if e.last_point is not None:
            logger.error(f"Last converged branch point: {e.last_point.to_dict()}")
        raise
    extra = {"n": n, "lambda_star": lambda_star, "rate": table.attrs.get("rate")}
    write_table(table, out, build_meta(config, "branch", extra))
    if args.plot:
        plot_branch(table, config.k, n, args.plot, lambda_star)
    return 0


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    summary = run_verify(config)
    write_report(summary, args.out or default_output("verify", ".json"), build_meta(config, "verify"))
    failed = [c["name"] for c in summary["checks"] if not c["passed"]]
    if failed:
        logger.error(f"Failed checks: {', '.join(failed)}")
        return 1
    logger.info("All acceptance checks passed")
    return 0


def cmd_rescale(config: RunConfig, args: argparse.Namespace) -> int:
    path = Path(args.input)
    if path.suffix == ".csv":
        table, meta = read_table(str(path))
        if not 0 <= args.row < len(table):
            raise ConfigurationError(f"Row {args.row} not in {path} ({len(table)} rows)")
        row = table.iloc[args.row]
        report = dict(meta)
        report["lambda"] = float(row["lambda"])
        report["coefficients"] = [float(row[c]) for c in table.columns if c.startswith("a_")]
    else:
        data = read_report(str(path))
        report = dict(data.get("certificate", data))
        report.setdefault("n_r", data.get("meta", {}).get("n_r"))
    result = rescale_to_unit_sphere(report, n_r=report.get("n_r"))
    write_report({"rescale": result}, args.out or default_output("rescale", ".json"), build_meta(config, "rescale"))
    return 0


HANDLERS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "radial": cmd_radial,
    "exterior": cmd_exterior,
    "spectrum": cmd_spectrum,
    "dtn": cmd_dtn,
    "lambda-star": cmd_lambda_star,
    "sweep": cmd_sweep,
    "branch": cmd_branch,
    "verify": cmd_verify,
    "rescale": cmd_rescale,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Execute one command.

    Returns:
        0 on success, 1 on a solver failure, 2 on invalid configuration or flags
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = resolve_config(args)
        return HANDLERS[args.command](config, args)
    except (ConfigurationError, GridError) as e:
        logger.error(f"Configuration error: {e}")
        return 2
    except OdpError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return 1


def main() -> int:
    setup_logging()
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
