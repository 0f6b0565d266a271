"""
Command-line interface: batch subcommands over polytope, weight and PL
function files. Every command writes its document to the output directory
under a content-hash filename and prints it to stdout.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Tuple

import pandas as pd

from config.settings import (EXIT_DESTABILIZED, EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK, APP_NAME,
                             APP_VERSION, create_directories)
from extremal.affine import AffineFunction
from extremal.solver import c_constant, extremal_family, lipschitz_fit, solve_extremal
from filtration.dh import dh_histogram
from filtration.metrics import d_v1_detailed, quotient_distance
from filtration.volumes import ToricFiltration, weighted_volume_exact, weighted_volume_lattice
from geometry.linalg import to_fraction
from geometry.triangulation import triangulate
from quadrature.integrate import integrate_pl_product
from quadrature.polynomial import Polynomial
from stability.destabilizer import check_stability
from stability.functional import discrete_MA, evaluate_L, normalize, weighted_futaki
from stability.pl_functions import adapted_triangulation
from toolkit.config import RunConfig
from toolkit.report import FORMATS, context_for, records_frame, report, to_csv, to_json
from toolkit.sweep import run_sweep
from toolkit.validation import blocking, validate_inputs
from utils.data_loader import DataLoader, dumps, to_serializable
from utils.errors import InputValidationError, ToricStabilityError
from utils.report_writer import ReportWriter

logger = logging.getLogger(__name__)

# (payload, optional table, exit code)
CommandResult = Tuple[Dict, Optional[pd.DataFrame], int]


def build_parser() -> argparse.ArgumentParser:
    # abbreviations off: "--f" would otherwise read as a prefix of --force/--format
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Toric weighted K-stability toolkit.",
                                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--refine", type=int, default=None, help="Refinement level k")
    parser.add_argument("--quad-degree", type=int, default=None, help="Quadrature degree for smooth weights")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads (default TORIC_WKSTAB_WORKERS)")
    parser.add_argument("--output", default=None, help="Output directory")
    parser.add_argument("--force", action="store_true", help="Run despite blocking diagnostics")
    parser.add_argument("--format", choices=FORMATS, default="json", help="Output document format")
    parser.add_argument("--config", default=None, help="RunConfig JSON; flags override its values")

    inputs = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    inputs.add_argument("--polytope", default=None, help="Polytope JSON")
    inputs.add_argument("--v", default=None, help="Boundary weight JSON (default 1)")
    inputs.add_argument("--w", default=None, help="Region weight JSON (default 1)")
    inputs.add_argument("--y0", default=None, help="Normalization point, comma separated")
    # also accepted after the subcommand; SUPPRESS keeps a global value from being reset
    inputs.add_argument("--refine", type=int, default=argparse.SUPPRESS, help="Refinement level k")
    inputs.add_argument("--quad-degree", type=int, default=argparse.SUPPRESS,
                        help="Quadrature degree for smooth weights")

    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return subparsers.add_parser(name, parents=[inputs], help=help_text, allow_abbrev=False)

    add("lext", "Weighted extremal affine function")

    lext_sweep = add("lext-sweep", "Extremal function along P_eps")
    lext_sweep.add_argument("--extra", "--cuts", dest="cuts", default=None, help="Perturbation cut list JSON")
    lext_sweep.add_argument("--eps", default=None, help="Comma separated eps values")

    eval_l = add("eval-L", "Weighted Donaldson functional of a PL function")
    eval_l.add_argument("--f", required=True, help="PL function JSON")
    eval_l.add_argument("--c", default=None, help="Use w_eff = w with this constant instead of w * l_ext, c = 1")
    eval_l.add_argument("--normalize", action="store_true", help="Normalize f at y0 first")

    futaki = add("futaki", "Weighted Futaki invariant")
    futaki.add_argument("--xi", required=True, help="Affine function b0,b1,...,bn")

    ma = add("ma", "Discrete weighted Monge-Ampere measure")
    ma.add_argument("--f", required=True, help="PL function JSON")

    add("check", "LP destabilizer search")

    sweep = add("sweep", "Perturbation sweep")
    sweep.add_argument("--extra", "--cuts", dest="cuts", default=None, help="Perturbation cut list JSON")
    sweep.add_argument("--eps", default=None, help="Comma separated eps values")
    sweep.add_argument("--no-trend", action="store_true", help="Skip the k + 1 solve per entry")

    volume = add("volume", "Weighted volume of a toric filtration")
    volume.add_argument("--f", required=True, help="PL function JSON")
    volume.add_argument("--lattice", "--m", dest="m", default=None, help="Comma separated lattice levels")
    volume.add_argument("--normalized", action="store_true", help="Apply the 1/(n! vol_v) prefactor")
    volume.add_argument("--rounding", action="store_true", help="Floor the successive minima")

    dh = add("dh", "Weighted Duistermaat-Heckman histogram")
    dh.add_argument("--f", required=True, help="PL function JSON")
    dh.add_argument("--bins", type=int, default=20)
    dh.add_argument("--lattice", "--m", dest="m", type=int, default=50, help="Lattice level")

    dist = add("dist", "d_v1 and its quotient distance")
    dist.add_argument("--f1", "--f", dest="f", required=True, help="First PL function JSON")
    dist.add_argument("--f2", required=True, help="Second PL function JSON")
    dist.add_argument("--quotient", action="store_true", help="Also minimize over constant shifts")

    validate = add("validate", "Validate inputs")
    validate.add_argument("--extra", "--cuts", dest="cuts", default=None, help="Perturbation cut list JSON")
    validate.add_argument("--eps", default=None, help="Comma separated eps values")
    return parser


def config_from_args(args: argparse.Namespace, loader: DataLoader) -> RunConfig:
    """RunConfig from an optional JSON file, overridden by command-line flags"""
    values = dict(loader.load_data(args.config)) if args.config else {}
    overrides = {
        "polytope_path": getattr(args, "polytope", None),
        "v_path": getattr(args, "v", None),
        "w_path": getattr(args, "w", None),
        "extra_path": getattr(args, "cuts", None),
        "eps_list": getattr(args, "eps", None),
        "y0": getattr(args, "y0", None),
        "refinement": args.refine,
        "quadrature_degree": args.quad_degree,
        "workers": args.workers,
        "output_dir": args.output,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.force:
        values["force"] = True
    if getattr(args, "no_trend", False):
        values["trend"] = False
    return RunConfig(**values)


def _inputs(config: RunConfig, loader: DataLoader):
    if config.polytope_path is None:
        raise InputValidationError("--polytope is required")
    P = loader.load_polytope(config.polytope_path)
    v = loader.load_weight(config.v_path, P.dim, config.quadrature_degree)
    w = loader.load_weight(config.w_path, P.dim, config.quadrature_degree)
    return P, v, w


def _require_valid(config: RunConfig):
    problems = blocking(validate_inputs(config))
    if problems and not config.force:
        raise InputValidationError(f"{len(problems)} blocking diagnostics; rerun with --force to override",
                                   problems)


def cmd_lext(args, config, loader) -> CommandResult:
    P, v, w = _inputs(config, loader)
    T = triangulate(P, config.refinement)
    solution = solve_extremal(P, v, w, T)
    payload = {
        "polytope": P.to_dict(),
        "extremal": solution.to_dict(),
        "c": c_constant(P, v, w, T),
        "facet_measure_total": P.facet_measure_total(),
    }
    return payload, None, EXIT_OK


def cmd_lext_sweep(args, config, loader) -> CommandResult:
    P, v, w = _inputs(config, loader)
    cuts = loader.load_cuts(config.extra_path)
    family = extremal_family(P, cuts, v, w, config.eps_values, config.refinement, config.workers)
    rows = []
    for entry in family:
        coeffs = list(entry.solution.ell.coefficients) if entry.ok else [None] * (P.dim + 1)
        residual = entry.solution.residual if entry.ok else None
        rows.append([to_serializable(entry.eps)] + [to_serializable(b) for b in coeffs]
                    + [to_serializable(residual), entry.error or "ok"])
    table = pd.DataFrame(rows, columns=["eps"] + [f"b{i}" for i in range(P.dim + 1)] + ["residual", "status"])
    payload = {"family": [{"eps": e.eps, "ell": e.solution.to_dict() if e.ok else None, "error": e.error}
                          for e in family]}
    try:
        fit = lipschitz_fit(family)
        payload["lipschitz"] = {"constant": fit.constant, "verified": fit.verified,
                                "distances": [{"eps": eps, "distance": d} for eps, d in fit.distances]}
    except ValueError as e:
        logger.info(f"No Lipschitz fit: {e}")
    return payload, table, EXIT_OK


def _pl_setup(args, config, loader, attribute="f"):
    P, v, w = _inputs(config, loader)
    f = loader.load_pl_function(getattr(args, attribute), P)
    return P, v, w, f


def cmd_eval_l(args, config, loader) -> CommandResult:
    P, v, w, f = _pl_setup(args, config, loader)
    if args.normalize:
        f = normalize(f, config.y0_point or P.default_base_point())
    T = adapted_triangulation(P, f)
    if args.c is not None:
        c, w_eff = to_fraction(args.c), w
    else:
        c, w_eff = 1, w * solve_extremal(P, v, w).as_polynomial()
    value = evaluate_L(f, P, v, w_eff, c, T)
    boundary = integrate_pl_product(f, Polynomial.constant(P.dim, 1), T, boundary=True)
    payload = {"L": value, "c": c, "boundary_integral": boundary,
               "ratio": value / boundary if boundary else None, "relative": args.c is None}
    return payload, None, EXIT_OK


def cmd_futaki(args, config, loader) -> CommandResult:
    P, v, w = _inputs(config, loader)
    xi = AffineFunction.parse(args.xi)
    if xi.dim != P.dim:
        raise ValueError(f"xi has dimension {xi.dim}, polytope has dimension {P.dim}")
    c = c_constant(P, v, w)
    solution = solve_extremal(P, v, w)
    payload = {
        "futaki": weighted_futaki(xi, P, v, w, c),
        "c": c,
        "futaki_relative": weighted_futaki(xi, P, v, w * solution.as_polynomial(), 1),
    }
    return payload, None, EXIT_OK


def cmd_ma(args, config, loader) -> CommandResult:
    P, v, w, f = _pl_setup(args, config, loader)
    measure = discrete_MA(f, v, P)
    table = pd.DataFrame([[to_serializable(list(a.gradient)), to_serializable(a.mass)] for a in measure.atoms],
                         columns=["gradient", "mass"])
    return measure.to_dict(), table, EXIT_OK


def cmd_check(args, config, loader) -> CommandResult:
    _require_valid(config)
    P, v, w = _inputs(config, loader)
    result = check_stability(P, v, w, config)
    code = EXIT_DESTABILIZED if result.destabilized else EXIT_OK
    table = pd.DataFrame([[k, to_serializable(d)] for k, d in result.trend], columns=["refinement", "delta"])
    return result.to_dict(), table, code


def cmd_sweep(args, config, loader) -> CommandResult:
    _require_valid(config)
    result = run_sweep(config, loader)
    context = context_for(result)
    loader.save_result("sweep", to_json(result.records, context), "json")
    loader.save_result("sweep", to_csv(result.records), "csv")
    destabilized = any(r.ok and r.delta < 0 for r in result.records)
    payload = {"records": [r.to_dict() for r in result.records], **context}
    if args.format == "md":
        payload = {"markdown": report(result.records, "md", context)}
    table = records_frame(result.records)
    return payload, table, EXIT_DESTABILIZED if destabilized else EXIT_OK


def cmd_volume(args, config, loader) -> CommandResult:
    P, v, w, f = _pl_setup(args, config, loader)
    T = adapted_triangulation(P, f)
    exact = weighted_volume_exact(f, v, P, T, normalized=args.normalized)
    filtration = ToricFiltration.from_function(f)
    payload = {"exact": exact, "denominator": filtration.denominator}
    rows = []
    for m in [int(x) for x in (args.m or "").split(",") if x.strip()]:
        approx = weighted_volume_lattice(f, v, P, m, rounding=args.rounding, normalized=args.normalized,
                                         max_workers=config.workers)
        rows.append([m, approx, abs(approx - float(exact))])
    table = pd.DataFrame(rows, columns=["m", "lattice", "error"])
    payload["lattice"] = table.to_dict(orient="records")
    return payload, table, EXIT_OK


def cmd_dh(args, config, loader) -> CommandResult:
    P, v, w, f = _pl_setup(args, config, loader)
    histogram = dh_histogram(f, v, P, args.bins, args.m)
    table = pd.DataFrame(histogram.to_records())
    payload = {"total": histogram.total, "first_moment": histogram.first_moment, "m": histogram.m,
               "bins": histogram.to_records()}
    return payload, table, EXIT_OK


def cmd_dist(args, config, loader) -> CommandResult:
    P, v, w, f1 = _pl_setup(args, config, loader)
    f2 = loader.load_pl_function(args.f2, P)
    T = adapted_triangulation(P, f1, f2)
    distance = d_v1_detailed(f1, f2, v, P, T)
    payload = {"d_v1": distance.value, "l1": distance.l1_value, "consistent": distance.consistent}
    if args.quotient:
        quotient = quotient_distance(f1, f2, v, P, T)
        payload.update({"quotient": quotient.value, "shift": quotient.shift})
    return payload, None, EXIT_OK


def cmd_validate(args, config, loader) -> CommandResult:
    diagnostics = validate_inputs(config)
    table = pd.DataFrame([[d.severity.value, d.code, d.message] for d in diagnostics],
                         columns=["severity", "code", "message"])
    code = EXIT_INPUT_ERROR if blocking(diagnostics) and not config.force else EXIT_OK
    return {"diagnostics": [d.model_dump(mode="json") for d in diagnostics]}, table, code


COMMANDS: Dict[str, Callable] = {
    "lext": cmd_lext,
    "lext-sweep": cmd_lext_sweep,
    "eval-L": cmd_eval_l,
    "futaki": cmd_futaki,
    "ma": cmd_ma,
    "check": cmd_check,
    "sweep": cmd_sweep,
    "volume": cmd_volume,
    "dh": cmd_dh,
    "dist": cmd_dist,
    "validate": cmd_validate,
}


def render(command: str, payload: Dict, table: Optional[pd.DataFrame], fmt: str) -> str:
    if fmt == "json":
        return dumps(payload)
    if fmt == "csv":
        frame = table if table is not None else pd.DataFrame([{k: to_serializable(v) for k, v in payload.items()
                                                                if not isinstance(v, (dict, list))}])
        return frame.to_csv(index=False)
    if "markdown" in payload:
        return payload["markdown"]
    writer = ReportWriter(f"{APP_NAME} {command}")
    writer.add_bullets(f"{k}: {to_serializable(v)}" for k, v in sorted(payload.items())
                       if not isinstance(v, (dict, list)))
    if table is not None and not table.empty:
        writer.add_table(list(table.columns), table.itertuples(index=False, name=None))
    writer.add_conventions()
    return writer.create_document()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        loader = DataLoader(args.output)
        config = config_from_args(args, loader)
        loader = DataLoader(config.output_dir)
        create_directories(config.output_dir)
        payload, table, code = COMMANDS[args.command](args, config, loader)
        text = render(args.command, payload, table, args.format)
        path = loader.save_result(args.command, text, args.format)
        sys.stdout.write(text)
        logger.info(f"{args.command} finished with exit code {code}; document at {path}")
        return code
    except InputValidationError as e:
        for diagnostic in e.diagnostics:
            logger.error(f"{diagnostic.code}: {diagnostic.message}")
        logger.error(f"Input error: {str(e)}")
        return EXIT_INPUT_ERROR
    except (ToricStabilityError, ValueError, FileNotFoundError) as e:
        logger.error(f"Input error: {type(e).__name__}: {str(e)}")
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.exception(f"Internal error: {str(e)}")
        return EXIT_INTERNAL_ERROR
