import math
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from .hilbert import Operator

LAYER_FIELDS = ("alpha_re", "alpha_im", "beta_re", "beta_im", "phi", "chi")
GAUSSIAN_FIELDS = ("alpha_re", "alpha_im", "beta_re", "beta_im", "phi")


class GateParams(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    alpha: complex = 0j
    beta: complex = 0j
    phi: float = 0.0
    chi: float = 0.0
    theta: float = 0.0

    @model_validator(mode='after')
    def check_finite(self):
        values = (
            self.alpha.real,
            self.alpha.imag,
            self.beta.real,
            self.beta.imag,
            self.phi,
            self.chi,
            self.theta,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValueError("gate parameters must be finite")
        return self


class TargetSpec(BaseModel):
    """Target unitary of a compile run: a gate family plus its parameters."""

    model_config = ConfigDict(extra='forbid')

    kind: Literal["gaussian", "kerr", "beamsplitter", "identity"]
    params: Dict[str, float] = Field(default_factory=dict)
    random: bool = Field(
        False, description="Draw params from the run seed, ignoring params"
    )

    @property
    def modes(self) -> int:
        return 2 if self.kind == "beamsplitter" else 1


class AnsatzSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: Literal["gaussian", "layered", "two-mode-layered"]
    layers: int = Field(1, ge=1, le=64)
    bounds: Optional[List[Tuple[float, float]]] = Field(
        None, description="Per-parameter [lo, hi]"
    )
    bound_all: Optional[Tuple[float, float]] = Field(
        None, description="Same [lo, hi] for every parameter"
    )

    @field_validator('bounds')
    @classmethod
    def check_ordered(cls, v):
        if v is None:
            return v
        for lo, hi in v:
            if not lo <= hi:
                raise ValueError(f"bound [{lo}, {hi}] is not ordered")
        return v

    @model_validator(mode='after')
    def check_layout(self):
        if self.kind == "two-mode-layered" and self.layers != 1:
            raise ValueError("two-mode ansatz has exactly one layer")
        if self.bound_all is not None and self.bound_all[0] > self.bound_all[1]:
            raise ValueError("bound_all is not ordered")
        if self.bounds is not None and len(self.bounds) != self.n_params:
            raise ValueError(
                f"{len(self.bounds)} bounds given for {self.n_params} parameters"
            )
        return self

    @property
    def modes(self) -> int:
        return 2 if self.kind == "two-mode-layered" else 1

    def parameter_names(self) -> List[str]:
        if self.kind == "gaussian":
            return list(GAUSSIAN_FIELDS)
        if self.kind == "layered":
            return [
                f"{name}_{layer}"
                for layer in range(1, self.layers + 1)
                for name in LAYER_FIELDS
            ]
        names = ["bs_theta", "bs_phi"]
        for mode in (1, 2):
            names.extend(f"{name}_m{mode}" for name in LAYER_FIELDS)
        return names

    @property
    def n_params(self) -> int:
        return len(self.parameter_names())

    def resolved_bounds(self) -> Optional[List[Tuple[float, float]]]:
        if self.bounds is not None:
            return list(self.bounds)
        if self.bound_all is not None:
            return [tuple(self.bound_all)] * self.n_params
        return None


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    method: Literal["simplex", "quasi-newton"] = "quasi-newton"
    max_evals: int = Field(5000, ge=1)
    f_tol: float = Field(1e-10, gt=0)
    fd_step: float = Field(1e-6, gt=0)
    seed: int = 0
    restarts: int = Field(2, ge=0)
    target_value: Optional[float] = Field(
        1e-13, description="Stop as soon as the best value reaches this"
    )


class ScheduleConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    r_values: List[float] = Field(..., min_length=1)
    optimizers: List[OptimizerConfig] = Field(
        default_factory=lambda: [OptimizerConfig()]
    )

    @field_validator('r_values')
    @classmethod
    def check_increasing(cls, v: List[float]) -> List[float]:
        if any(r < 0 for r in v):
            raise ValueError("squeezing values must be non-negative")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("r_values must be strictly increasing")
        return v

    @model_validator(mode='after')
    def check_stages(self):
        if len(self.optimizers) not in (1, len(self.r_values)):
            raise ValueError(
                "give one optimizer for all stages or one per r value"
            )
        return self

    def stage_optimizer(self, stage: int) -> OptimizerConfig:
        if len(self.optimizers) == 1:
            return self.optimizers[0]
        return self.optimizers[stage]


class TrainRecord(BaseModel):
    model_config = ConfigDict(extra='forbid')

    iteration: int = Field(..., ge=0)
    stage: int = Field(0, ge=0)
    r: Optional[float] = None
    cost: float
    n_evals: int = Field(0, ge=0)
    hst_5: Optional[float] = None
    hst_50: Optional[float] = None
    errors: Dict[str, float] = Field(default_factory=dict)
    params: List[float] = Field(default_factory=list)
    wall_time: float = Field(0.0, ge=0)
    seed: int = 0
    penalized: int = Field(0, ge=0, description="Non-finite evaluations so far")

    @field_validator('cost')
    @classmethod
    def check_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("recorded cost must be finite")
        return v


class TargetInstance(BaseModel):
    """A concrete target unitary together with the parameters it was built from."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["gaussian", "kerr", "beamsplitter", "identity"]
    params: Dict[str, float]
    operator: Operator


class OptimizationResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: List[float]
    value: float
    records: List[TrainRecord] = Field(default_factory=list)
    n_evals: int = Field(0, ge=0)
    penalized: int = Field(0, ge=0)
    stop_reason: Literal["target", "max_evals", "stalled", "converged"] = "converged"


class ScheduleResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: List[float]
    value: float
    records: List[TrainRecord]
    stage_values: List[float]
    diverged: bool = False
