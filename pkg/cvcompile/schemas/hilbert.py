"""
Truncated Fock-space containers.

Amplitudes of a k-mode ket are stored row-major with mode 0 varying slowest,
so index ``(n_0, ..., n_{k-1})`` maps to ``sum(n_i * N**(k-1-i))``.
"""

from functools import reduce
from typing import Tuple, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

# numpy refuses to index beyond this anyway
MAX_DIMENSION = 2**40


def _readonly(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.flags.writeable = False
    return view


class HilbertSpec(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    cutoff: int = Field(..., ge=2, description="Fock levels 0..N-1 per mode")
    modes: int = Field(1, ge=1, description="Number of modes")

    @model_validator(mode='after')
    def check_dimension(self):
        if self.cutoff**self.modes > MAX_DIMENSION:
            raise ValueError(
                f"cutoff**modes = {self.cutoff}**{self.modes} is not representable"
            )
        return self

    @property
    def dim(self) -> int:
        return self.cutoff**self.modes

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cutoff,) * self.modes


class Ket(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    amplitudes: np.ndarray
    spec: HilbertSpec

    @field_validator('amplitudes', mode='before')
    @classmethod
    def as_complex_vector(cls, v) -> np.ndarray:
        return _readonly(np.asarray(v, dtype=np.complex128).reshape(-1))

    @model_validator(mode='after')
    def check_length(self):
        if self.amplitudes.size != self.spec.dim:
            raise ValueError(
                f"ket has {self.amplitudes.size} amplitudes, "
                f"expected {self.spec.dim}"
            )
        return self

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.spec.shape)


class Operator(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    spec: HilbertSpec

    @field_validator('matrix', mode='before')
    @classmethod
    def as_complex_matrix(cls, v) -> np.ndarray:
        arr = np.asarray(v, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator must be square, got shape {arr.shape}")
        return _readonly(arr)

    @model_validator(mode='after')
    def check_shape(self):
        if self.matrix.shape[0] != self.spec.dim:
            raise ValueError(
                f"operator dimension {self.matrix.shape[0]} does not match "
                f"{self.spec.dim}"
            )
        return self

    @property
    def dim(self) -> int:
        return self.spec.dim

    def adjoint(self) -> "Operator":
        return Operator(matrix=self.matrix.conj().T, spec=self.spec)

    def conjugate(self) -> "Operator":
        """Entrywise conjugate in the Fock basis."""
        return Operator(matrix=self.matrix.conj(), spec=self.spec)

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if other.spec != self.spec:
            raise ValueError("operator specs differ")
        return Operator(matrix=self.matrix @ other.matrix, spec=self.spec)


class ProductOperator(BaseModel):
    """Tensor product of operators on consecutive mode groups, kept factored."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    factors: Tuple[Operator, ...]

    @model_validator(mode='after')
    def check_factors(self):
        if not self.factors:
            raise ValueError("product needs at least one factor")
        cutoffs = {f.spec.cutoff for f in self.factors}
        if len(cutoffs) != 1:
            raise ValueError("all factors must share one cutoff")
        return self

    @property
    def spec(self) -> HilbertSpec:
        return HilbertSpec(
            cutoff=self.factors[0].spec.cutoff,
            modes=sum(f.spec.modes for f in self.factors),
        )

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.dense().matrix

    def dense(self) -> Operator:
        matrix = reduce(np.kron, (f.matrix for f in self.factors))
        return Operator(matrix=matrix, spec=self.spec)

    def adjoint(self) -> "ProductOperator":
        return ProductOperator(factors=tuple(f.adjoint() for f in self.factors))

    def conjugate(self) -> "ProductOperator":
        return ProductOperator(
            factors=tuple(f.conjugate() for f in self.factors)
        )


AnyOperator = Union[Operator, ProductOperator]


class DensityMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    spec: HilbertSpec

    @field_validator('matrix', mode='before')
    @classmethod
    def as_complex_matrix(cls, v) -> np.ndarray:
        arr = np.asarray(v, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"density matrix must be square, got {arr.shape}")
        return _readonly(arr)

    @model_validator(mode='after')
    def check_shape(self):
        if self.matrix.shape[0] != self.spec.dim:
            raise ValueError("density matrix does not match its spec")
        return self

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)
