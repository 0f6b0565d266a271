"""
Input validation: run every type invariant on a configuration and collect
diagnostics instead of raising.
"""

import logging
from typing import List

from extremal.solver import check_log_concave, check_positive
from geometry.polytope import format_rational, perturb, stable_threshold
from geometry.triangulation import triangulate
from toolkit.config import Diagnostic, RunConfig, Severity
from utils.data_loader import DataLoader, is_primitive
from utils.errors import NotPositiveDefinite, ToricStabilityError

logger = logging.getLogger(__name__)


def _point(p) -> str:
    return "(" + ", ".join(format_rational(x) for x in p) + ")"


def _diagnostic(severity: Severity, code: str, message: str) -> Diagnostic:
    log = logger.error if severity == Severity.ERROR else logger.warning
    if severity != Severity.INFO:
        log(f"{code}: {message}")
    return Diagnostic(severity=severity, code=code, message=message)


def validate_inputs(config: RunConfig) -> List[Diagnostic]:
    """
    Check polytope consistency, weight positivity on the samples of the
    triangulation, the triangulation itself and the perturbation cuts.

    Returns:
        Diagnostics; an empty list means the configuration is clean
    """
    loader = DataLoader(config.output_dir)
    diagnostics: List[Diagnostic] = []
    if config.polytope_path is None:
        return [_diagnostic(Severity.ERROR, "polytope-missing", "no polytope file given")]

    for normal in loader.raw_normals(config.polytope_path):
        if not is_primitive(normal):
            diagnostics.append(_diagnostic(
                Severity.WARNING, "normal-normalized",
                f"normal {[format_rational(x) for x in normal]} is not primitive; rescaled to a primitive vector"))
    try:
        P = loader.load_polytope(config.polytope_path)
    except (ToricStabilityError, ValueError, KeyError) as e:
        diagnostics.append(_diagnostic(Severity.ERROR, "polytope-invalid", f"{type(e).__name__}: {e}"))
        return diagnostics
    if not P.is_delzant():
        diagnostics.append(_diagnostic(Severity.INFO, "not-delzant", "polytope is not Delzant (reported only)"))

    try:
        y0 = config.y0_point or P.default_base_point()
        slack = min(P.slack(y0)) if len(y0) == P.dim else None
        if slack is None or slack <= 0:
            detail = f" (smallest facet slack {format_rational(slack)})" if slack is not None else ""
            diagnostics.append(_diagnostic(Severity.ERROR, "y0-not-interior",
                                           f"y0 = {_point(y0)} is not interior to the polytope{detail}"))
            y0 = P.default_base_point()
        T = triangulate(P, config.refinement, y0)
        if T.total_volume() != P.volume:
            diagnostics.append(_diagnostic(
                Severity.ERROR, "triangulation-volume",
                f"simplex volumes sum to {T.total_volume()}, polytope volume is {P.volume}"))
    except ToricStabilityError as e:
        diagnostics.append(_diagnostic(Severity.ERROR, "triangulation-invalid", f"{type(e).__name__}: {e}"))
        return diagnostics

    weights = {}
    for name, path in (("v", config.v_path), ("w", config.w_path)):
        try:
            weights[name] = loader.load_weight(path, P.dim, config.quadrature_degree)
        except (ValueError, KeyError) as e:
            diagnostics.append(_diagnostic(Severity.ERROR, f"{name}-invalid", f"{type(e).__name__}: {e}"))
    for name, weight in weights.items():
        bad = [p for p in P.vertices if weight.evaluate(p) <= 0]
        for p in bad:
            diagnostics.append(_diagnostic(Severity.ERROR, f"{name}-not-positive",
                                           f"{name} = {weight.evaluate(p)} at vertex {_point(p)}"))
        if bad:
            continue
        try:
            check_positive(weight, T, config.quadrature_degree)
        except NotPositiveDefinite as e:
            diagnostics.append(_diagnostic(Severity.ERROR, f"{name}-not-positive", str(e)))

    positive = not any(d.code == "v-not-positive" for d in diagnostics)
    if "v" in weights and positive:
        concavity = check_log_concave(weights["v"], T)
        if not concavity.log_concave:
            witness = _point(concavity.witness) if concavity.exact else str(list(concavity.witness))
            diagnostics.append(_diagnostic(
                Severity.WARNING, "v-not-log-concave",
                f"v is not log-concave at {witness}; openness under perturbation is not covered"))

    try:
        cuts = loader.load_cuts(config.extra_path)
    except (ValueError, KeyError) as e:
        diagnostics.append(_diagnostic(Severity.ERROR, "cuts-invalid", f"{type(e).__name__}: {e}"))
        return diagnostics
    if any(eps > 0 for eps in config.eps_values) and not cuts:
        diagnostics.append(_diagnostic(Severity.ERROR, "cuts-missing", "positive eps values need a cut file"))
    if cuts:
        try:
            perturb(P, cuts, 0)
        except ToricStabilityError as e:
            diagnostics.append(_diagnostic(Severity.ERROR, "cut-invalid", str(e)))
            return diagnostics
        threshold = stable_threshold(P, cuts)
        for eps in config.eps_values:
            if threshold is not None and eps >= threshold:
                diagnostics.append(_diagnostic(
                    Severity.WARNING, "eps-beyond-threshold",
                    f"eps = {format_rational(eps)} changes the combinatorial type (threshold {format_rational(threshold)})"))

    logger.debug(f"Validation finished with {len(diagnostics)} diagnostics")
    return diagnostics


def blocking(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diagnostics if d.blocking]
