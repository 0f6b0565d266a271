"""
Run configuration and validation diagnostics
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from config.settings import (DEFAULT_QUADRATURE_DEGREE, DEFAULT_REFINEMENT, DEFAULT_SEED, MAX_REFINEMENT,
                             MAX_WORKERS, MIN_QUADRATURE_DEGREE, RESULTS_DIR)
from geometry.linalg import to_fraction


class RunConfig(BaseModel):
    polytope_path: Optional[Path] = Field(default=None, description="Polytope JSON file")
    v_path: Optional[Path] = Field(default=None, description="Boundary weight v (polynomial JSON); default v = 1")
    w_path: Optional[Path] = Field(default=None, description="Region weight w (polynomial or smooth JSON); default w = 1")
    extra_path: Optional[Path] = Field(default=None, description="Perturbation cut list JSON")
    refinement: int = Field(default=DEFAULT_REFINEMENT, ge=0, description="Uniform refinement level k")
    eps_list: List[str] = Field(default_factory=list, description="Perturbation parameters as rational strings")
    y0: Optional[List[str]] = Field(default=None, description="Normalization point override")
    quadrature_degree: int = Field(default=DEFAULT_QUADRATURE_DEGREE, description="Degree of the smooth-weight rule")
    output_dir: Path = Field(default=RESULTS_DIR, description="Directory for result files")
    workers: int = Field(default=MAX_WORKERS, ge=1, description="Worker threads for sweeps and lattice sums")
    seed: int = Field(default=DEFAULT_SEED, description="Seed for randomized property checks")
    trend: bool = Field(default=True, description="Also solve at refinement k + 1")
    force: bool = Field(default=False, description="Run despite error diagnostics or an unstable base polytope")

    @field_validator("refinement")
    @classmethod
    def check_refinement(cls, value: int) -> int:
        if value > MAX_REFINEMENT:
            raise ValueError(f"refinement must be at most {MAX_REFINEMENT}")
        return value

    @field_validator("quadrature_degree")
    @classmethod
    def check_degree(cls, value: int) -> int:
        if value < MIN_QUADRATURE_DEGREE:
            raise ValueError(f"quadrature degree must be at least {MIN_QUADRATURE_DEGREE}")
        return value

    @field_validator("eps_list", mode="before")
    @classmethod
    def check_eps(cls, value):
        if isinstance(value, str):
            value = [x for x in value.split(",") if x.strip()]
        result = []
        for x in value:
            eps = to_fraction(x if not isinstance(x, float) else repr(x))
            if eps < 0:
                raise ValueError(f"eps must be nonnegative, got {x}")
            result.append(str(eps))
        return result

    @field_validator("y0", mode="before")
    @classmethod
    def check_y0(cls, value):
        if value is None:
            return None
        if isinstance(value, str):
            value = [x for x in value.split(",") if x.strip()]
        return [str(to_fraction(x if not isinstance(x, float) else repr(x))) for x in value]

    @field_validator("polytope_path", "v_path", "w_path", "extra_path")
    @classmethod
    def check_path(cls, value: Optional[Path]) -> Optional[Path]:
        if value is not None and not Path(value).exists():
            raise ValueError(f"file not found: {value}")
        return value

    @property
    def eps_values(self):
        return [to_fraction(x) for x in self.eps_list]

    @property
    def y0_point(self):
        return tuple(to_fraction(x) for x in self.y0) if self.y0 is not None else None


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


class Diagnostic(BaseModel):
    severity: Severity = Field(..., description="info and warning never block a run")
    code: str = Field(..., description="Short machine-readable identifier")
    message: str

    @property
    def blocking(self) -> bool:
        return self.severity == Severity.ERROR
