import math
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from .circuit import AnsatzSpec, ScheduleConfig, TargetSpec
from .cost import TMSS_KINDS, CostSpec


class NflConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mode: Literal["risk", "covariance"] = "risk"
    kind: Literal["orthogonal", "symplectic"] = "orthogonal"
    ms: List[int] = Field(..., min_length=1)
    ranks: List[int] = Field(default_factory=lambda: [1])
    set_sizes: Optional[List[int]] = Field(
        None, description="Training-set sizes; all 0..2m when omitted"
    )
    n_samples: int = Field(2000, ge=1)
    n_sigma_samples: int = Field(100, ge=1)
    D: float = Field(2.0, gt=1)
    tolerance: float = Field(0.01, ge=0)
    remainder_constant: float = Field(10.0, ge=0)
    z_low: float = Field(0.5, gt=0)
    z_high: float = Field(2.0, gt=0)

    @field_validator('ms', 'ranks')
    @classmethod
    def check_positive(cls, v: List[int]) -> List[int]:
        if any(x < 1 for x in v):
            raise ValueError("mode counts and ranks must be positive")
        return v

    @model_validator(mode='after')
    def check_z(self):
        if self.z_low > self.z_high:
            raise ValueError("z_low must not exceed z_high")
        return self


class LandscapeConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    r_values: List[float] = Field(default_factory=lambda: [0.1, 2.5])
    eps_grid: List[float] = Field(
        default_factory=lambda: [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
    )
    samples: int = Field(20, ge=1)
    cost_kind: Literal["LE-TMSS", "R-TMSS", "LE-TMSS-local"] = "LE-TMSS"
    grad_ms: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    grad_r: float = Field(0.5, gt=0)
    grad_samples: int = Field(500, ge=2)
    grad_fd_step: float = Field(1e-5, gt=0)

    @field_validator('eps_grid')
    @classmethod
    def check_sorted(cls, v: List[float]) -> List[float]:
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("eps_grid must be sorted")
        if any(e < 0 for e in v):
            raise ValueError("eps values must be non-negative")
        return v


class VerifyConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    suites: List[Literal["ricochet", "inner-product", "group-integral"]] = Field(
        default_factory=lambda: ["ricochet", "inner-product", "group-integral"]
    )
    ranks: List[int] = Field(default_factory=lambda: [2, 4, 8])
    r_values: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    ricochet_samples: int = Field(10000, ge=2)
    limit_r: float = 6.0
    limit_rank: int = Field(2, ge=2)
    gce_pairs: int = Field(20, ge=1)
    gce_cutoff: int = Field(20, ge=2)
    gce_r: float = Field(0.5, gt=0)
    integral_m: int = Field(3, ge=1)
    integral_samples: int = Field(100000, ge=2)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    command: Literal["compile", "nfl", "landscape", "verify"]
    seed: int = Field(..., description="Mandatory: every stochastic step derives from it")
    name: Optional[str] = None
    cutoff: int = Field(50, ge=2, le=512)
    shots: Optional[int] = Field(None, ge=1)
    threads: Optional[int] = Field(None, ge=1)
    allow_large: bool = False
    output: Optional[str] = None

    target: Optional[TargetSpec] = None
    ansatz: Optional[AnsatzSpec] = None
    cost: Optional[CostSpec] = None
    schedule: Optional[ScheduleConfig] = None
    init: Literal["uniform", "zeros", "target"] = "uniform"
    init_range: Optional[Tuple[float, float]] = None

    nfl: Optional[NflConfig] = None
    landscape: Optional[LandscapeConfig] = None
    verify: Optional[VerifyConfig] = None

    @model_validator(mode='after')
    def check_sections(self):
        required = {
            "compile": ("target", "ansatz", "cost", "schedule"),
            "nfl": ("nfl",),
            "landscape": ("target", "ansatz", "landscape"),
            "verify": (),
        }[self.command]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(
                f"command '{self.command}' needs section(s): {', '.join(missing)}"
            )
        if self.target is not None and self.ansatz is not None:
            if self.target.modes != self.ansatz.modes:
                raise ValueError(
                    f"target acts on {self.target.modes} mode(s), "
                    f"ansatz on {self.ansatz.modes}"
                )
        if self.command == "compile" and self.cost.kind in TMSS_KINDS:
            if self.schedule.r_values[0] <= 0:
                raise ValueError("TMSS costs need r > 0 in every stage")
        return self


class RecordHeader(BaseModel):
    model_config = ConfigDict(extra='forbid')

    command: str
    config: Dict[str, Any]
    build_id: str
    run_id: str
    started_at: datetime
    finished_at: Optional[datetime] = None
    columns: List[str]
    summary: Dict[str, Any] = Field(default_factory=dict)


class ExperimentRecord(BaseModel):
    model_config = ConfigDict(extra='forbid')

    header: RecordHeader
    rows: List[Dict[str, Any]] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_rows(self):
        columns = set(self.header.columns)
        for row in self.rows:
            unknown = set(row) - columns
            if unknown:
                raise ValueError(f"row has undeclared columns {sorted(unknown)}")
        return self

    def column(self, name: str) -> List[Any]:
        return [row.get(name) for row in self.rows]

    def numeric_rows(self) -> List[Dict[str, float]]:
        """Rows without timing columns, for reproducibility comparisons."""
        return [
            {
                k: v
                for k, v in row.items()
                if k != "wall_time" and not (isinstance(v, float) and math.isnan(v))
            }
            for row in self.rows
        ]


class LandscapeScan(BaseModel):
    model_config = ConfigDict(extra='forbid')

    eps_grid: List[float]
    samples: int = Field(..., ge=1)
    values: List[List[float]]
    seed: int
    r: float
    cost_kind: str

    @model_validator(mode='after')
    def check_values(self):
        if any(b < a for a, b in zip(self.eps_grid, self.eps_grid[1:])):
            raise ValueError("eps grid must be sorted")
        if len(self.values) != len(self.eps_grid):
            raise ValueError("one row of values per eps")
        for row in self.values:
            if len(row) != self.samples:
                raise ValueError("each eps row holds `samples` values")
            if not all(math.isfinite(v) for v in row):
                raise ValueError("scan values must be finite")
        return self

    def means(self) -> List[float]:
        return [sum(row) / len(row) for row in self.values]
