"""
Perturbation sweep: build P_eps for each requested eps, solve the extremal
function and run the stability pipeline on it.

The largest sampled eps with delta > 0 is an empirical lower bound for the
openness threshold eps_0, evidence only.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from extremal.solver import c_constant, check_log_concave
from geometry.polytope import Polytope, format_rational, perturb, stable_threshold
from stability.destabilizer import StabilityReport, check_stability
from toolkit.config import RunConfig
from utils.data_loader import DataLoader, content_hash, dumps, parse_number, round_float
from utils.errors import InputValidationError, ToricStabilityError

logger = logging.getLogger(__name__)


def _number(x):
    if x is None or isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return round_float(float(x))


@dataclass
class SweepRecord:
    eps: Fraction
    ell_coeffs: Optional[List] = None
    c_value: Optional[object] = None
    delta: Optional[object] = None
    lp_status: str = "not_run"
    wall_time_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.delta is not None

    @classmethod
    def from_report(cls, eps, report: StabilityReport, c_value, wall_time_ms: float) -> "SweepRecord":
        return cls(
            eps=Fraction(eps),
            ell_coeffs=[_number(b) for b in report.extremal.ell.coefficients],
            c_value=_number(c_value),
            delta=_number(report.delta),
            lp_status=report.lp_status.value,
            wall_time_ms=round_float(wall_time_ms),
        )

    @classmethod
    def failure(cls, eps, error: Exception, wall_time_ms: float) -> "SweepRecord":
        return cls(eps=Fraction(eps), lp_status=type(error).__name__, wall_time_ms=round_float(wall_time_ms))

    def to_dict(self, with_time: bool = True) -> Dict:
        data = asdict(self)
        if not with_time:
            data.pop("wall_time_ms")
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "SweepRecord":
        coeffs = data.get("ell_coeffs")
        return cls(
            eps=parse_number(data["eps"]),
            ell_coeffs=[parse_number(b) for b in coeffs] if coeffs is not None else None,
            c_value=parse_number(data.get("c_value")),
            delta=parse_number(data.get("delta")),
            lp_status=data.get("lp_status", "not_run"),
            wall_time_ms=float(data.get("wall_time_ms", 0.0)),
        )


@dataclass
class SweepResult:
    records: List[SweepRecord]
    triangulation_ids: Dict[str, str] = field(default_factory=dict)
    combinatorial_threshold: Optional[Fraction] = None
    forced: bool = False
    v_log_concave: Optional[bool] = None

    @property
    def largest_stable_eps(self) -> Optional[Fraction]:
        stable = [r.eps for r in self.records if r.ok and r.delta > 0]
        return max(stable) if stable else None

    @property
    def determinism_hash(self) -> str:
        return determinism_hash(self.records)

    def summary(self) -> Dict:
        largest = self.largest_stable_eps
        return {
            "records": len(self.records),
            "failed": sum(not r.ok for r in self.records),
            "largest_stable_eps": largest,
            "combinatorial_threshold": self.combinatorial_threshold,
            "v_log_concave": self.v_log_concave,
            "determinism_hash": self.determinism_hash,
            "note": "largest sampled eps with delta > 0; an empirical lower bound for eps_0, evidence only",
        }


def determinism_hash(records: List[SweepRecord]) -> str:
    """sha256 of the canonical JSON of the records without wall times"""
    return content_hash(dumps([r.to_dict(with_time=False) for r in records]))


def _sweep_entry(P: Polytope, cuts, v, w, eps: Fraction, config: RunConfig):
    """Run one eps; returns (record, triangulation id or None)"""
    start = time.perf_counter()
    try:
        if eps > 0 and not cuts:
            raise InputValidationError("positive eps needs perturbation cuts")
        P_eps = perturb(P, cuts, eps) if cuts else P
        report = check_stability(P_eps, v, w, config)
        c_value = c_constant(P_eps, v, w)
        elapsed = (time.perf_counter() - start) * 1000
        return SweepRecord.from_report(eps, report, c_value, elapsed), report.triangulation_id
    except (ToricStabilityError, ValueError) as e:
        elapsed = (time.perf_counter() - start) * 1000
        logger.warning(f"Sweep entry eps={format_rational(eps)} failed: {type(e).__name__}: {e}")
        return SweepRecord.failure(eps, e, elapsed), None


def run_sweep(config: RunConfig, loader: Optional[DataLoader] = None) -> SweepResult:
    """
    One record per requested eps, failures included.

    Unless config.force is set, the base polytope must have delta > 0 first.

    Raises:
        InputValidationError: base polytope fails the stability check
    """
    loader = loader or DataLoader(config.output_dir)
    P = loader.load_polytope(config.polytope_path)
    v = loader.load_weight(config.v_path, P.dim, config.quadrature_degree)
    w = loader.load_weight(config.w_path, P.dim, config.quadrature_degree)
    cuts = loader.load_cuts(config.extra_path)
    eps_values = config.eps_values

    precomputed = {}
    if not config.force:
        base, tid = _sweep_entry(P, cuts, v, w, Fraction(0), config)
        if not base.ok or base.delta <= 0:
            message = f"base polytope check failed (status {base.lp_status}, delta {base.delta})"
            logger.error(message)
            raise InputValidationError(message)
        precomputed[Fraction(0)] = (base, tid)

    pending = [eps for eps in eps_values if eps not in precomputed]
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = {eps: executor.submit(_sweep_entry, P, cuts, v, w, eps, config) for eps in dict.fromkeys(pending)}
        # single collector, submission order
        outcomes = {eps: future.result() for eps, future in futures.items()}
    outcomes.update(precomputed)

    records, ids = [], {}
    for eps in eps_values:
        record, tid = outcomes[eps]
        records.append(record)
        if tid is not None:
            ids[format_rational(eps)] = tid
    threshold = stable_threshold(P, cuts) if cuts else None
    concavity = check_log_concave(v, P.base_triangulation)
    if not concavity.log_concave:
        logger.warning("v is not log-concave on the base polytope; openness of stability is not guaranteed")
    result = SweepResult(records, ids, threshold, config.force, concavity.log_concave)
    largest = result.largest_stable_eps
    logger.info(f"Sweep finished: {len(records)} records, {result.summary()['failed']} failed, "
                f"largest eps with delta > 0: {format_rational(largest) if largest is not None else 'none'}")
    return result
