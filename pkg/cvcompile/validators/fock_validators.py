from typing import Sequence

import numpy as np

from ..core.exceptions import InvalidArgumentError, OutOfRangeError

HERMITIAN_TOLERANCE = 1e-10


class FockValidators:
    @staticmethod
    def validate_cutoff(cutoff: int) -> None:
        if not isinstance(cutoff, (int, np.integer)):
            raise InvalidArgumentError("Cutoff must be an integer")

        if cutoff < 2:
            raise InvalidArgumentError(
                f"Cutoff must be at least 2, got {cutoff}"
            )

    @staticmethod
    def validate_level(n: int, cutoff: int) -> None:
        if n < 0 or n >= cutoff:
            raise OutOfRangeError(
                f"Fock level {n} is outside 0..{cutoff - 1}"
            )

    @staticmethod
    def validate_targets(targets: Sequence[int], modes: int) -> None:
        if not targets:
            raise InvalidArgumentError("At least one target mode is required")

        if len(set(targets)) != len(targets):
            raise InvalidArgumentError(f"Target modes repeat: {list(targets)}")

        for t in targets:
            if t < 0 or t >= modes:
                raise InvalidArgumentError(
                    f"Target mode {t} is outside 0..{modes - 1}"
                )

    @staticmethod
    def validate_keep(keep: Sequence[int], modes: int) -> None:
        if not keep:
            raise InvalidArgumentError("Keep set must not be empty")

        FockValidators.validate_targets(keep, modes)

    @staticmethod
    def validate_hermitian(
        matrix: np.ndarray, tolerance: float = HERMITIAN_TOLERANCE
    ) -> None:
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidArgumentError("Generator must be a square matrix")

        defect = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
        if defect > tolerance:
            raise InvalidArgumentError(
                f"Generator is not Hermitian (max |H - H^dag| = {defect:.2e})"
            )

    @staticmethod
    def validate_same_spec(a, b) -> None:
        if a.spec != b.spec:
            raise InvalidArgumentError(
                f"Hilbert spaces differ: {a.spec} vs {b.spec}"
            )
