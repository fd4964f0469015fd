from typing import Literal, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

GROUP_TOLERANCE = 1e-10


def symplectic_form(m: int) -> np.ndarray:
    """Direct sum of m blocks [[0, 1], [-1, 0]] in (q1, p1, ..., qm, pm) order."""
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class PhaseSpaceMap(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    kind: Literal["orthogonal", "symplectic"]

    @field_validator('matrix', mode='before')
    @classmethod
    def as_real_square(cls, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ValueError(f"phase-space map must be 2m x 2m, got {arr.shape}")
        view = arr.view()
        view.flags.writeable = False
        return view

    @model_validator(mode='after')
    def check_group(self):
        M = self.matrix
        if self.kind == "orthogonal":
            defect = np.max(np.abs(M.T @ M - np.eye(M.shape[0])))
        else:
            omega = symplectic_form(self.m)
            defect = np.max(np.abs(M.T @ omega @ M - omega))
        if defect > GROUP_TOLERANCE * max(1.0, float(np.max(np.abs(M))) ** 2):
            raise ValueError(f"matrix is not {self.kind} (defect {defect:.2e})")
        return self

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[0] // 2

    def inverse(self) -> np.ndarray:
        if self.kind == "orthogonal":
            return self.matrix.T
        omega = symplectic_form(self.m)
        return -omega @ self.matrix.T @ omega


class RiskEstimate(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mean: float
    stderr: float = Field(..., ge=0)
    n_samples: int = Field(..., ge=1)
    theory: float
    theory_alt: Optional[float] = Field(
        None, description="Second closed form reported next to theory"
    )
    kind: Literal["orthogonal", "symplectic", "covariance"] = "orthogonal"
    m: int = Field(..., ge=1)
    set_size: int = Field(0, ge=0)
    rank: int = Field(1, ge=1)
    D: Optional[float] = None

    def deviation(self) -> float:
        return abs(self.mean - self.theory)

    def agrees(self, tolerance: float, n_sigma: float = 3.0) -> bool:
        return self.deviation() <= max(n_sigma * self.stderr, tolerance)


class GroupIntegralEstimate(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mean_ii: float
    stderr_ii: float = Field(..., ge=0)
    mean_ij: float
    stderr_ij: float = Field(..., ge=0)
    theory_ii: float
    theory_ij: float
    theory_ij_alt: float
    n_samples: int = Field(..., ge=1)
