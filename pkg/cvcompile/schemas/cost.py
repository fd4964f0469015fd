from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .hilbert import Ket

CostKind = Literal[
    "HST",
    "LE-TMSS",
    "R-TMSS",
    "R-TMSS-normalized",
    "LE-TMSS-local",
    "R-TMSS-local",
    "ACS",
    "ACS-local",
    "ECFS",
]

TMSS_KINDS = frozenset(
    {"LE-TMSS", "R-TMSS", "R-TMSS-normalized", "LE-TMSS-local", "R-TMSS-local"}
)
TRAINING_KINDS = frozenset({"ACS", "ACS-local", "ECFS"})


class CostSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    kind: CostKind
    r: float = Field(0.5, ge=0, description="TMSS squeezing")
    energy: float = Field(1.0, ge=0, description="Energy bound E of training states")
    k: int = Field(1, ge=1, description="Number of training states")
    rank: int = Field(1, ge=1, description="Entanglement rank of ECFS states")
    d: Optional[int] = Field(None, ge=1, description="HST truncation")
    shots: Optional[int] = Field(None, ge=1)

    @property
    def needs_training(self) -> bool:
        return self.kind in TRAINING_KINDS


class TrainingSet(BaseModel):
    """Training pairs (input, U input) with the phase-space means they came from."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["coherent", "entangled-coherent-fock"]
    pairs: List[Tuple[Ket, Ket]]
    mean_vectors: List[np.ndarray]
    rank: int = Field(1, ge=1)
    energy_bound: float = Field(..., ge=0)

    @model_validator(mode='after')
    def check_consistency(self):
        if len(self.pairs) != len(self.mean_vectors):
            raise ValueError("one mean-vector block per training pair")
        for block in self.mean_vectors:
            block = np.atleast_2d(block)
            if block.shape[0] != self.rank:
                raise ValueError(
                    f"each state needs {self.rank} mean vectors, "
                    f"got {block.shape[0]}"
                )
            energies = 0.5 * np.sum(block**2, axis=1)
            if np.any(energies > self.energy_bound * (1 + 1e-9) + 1e-12):
                raise ValueError("training state exceeds the energy bound")
        if self.kind == "coherent" and self.rank != 1:
            raise ValueError("coherent training states have rank 1")
        return self

    @property
    def size(self) -> int:
        return len(self.pairs)
