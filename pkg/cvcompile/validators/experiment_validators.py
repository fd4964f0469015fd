import math

from ..core.config import settings
from ..core.exceptions import ResourceRefusalError


class ExperimentValidators:
    @staticmethod
    def suggested_cutoff(modes: int, budget: int) -> int:
        cutoff = int(math.floor(budget ** (1.0 / modes)))
        # the float root can land one off either way
        while cutoff**modes > budget:
            cutoff -= 1
        while (cutoff + 1) ** modes <= budget:
            cutoff += 1
        return max(cutoff, 2)

    @staticmethod
    def validate_amplitude_budget(
        cutoff: int,
        modes: int,
        allow_large: bool = False,
        budget: int | None = None,
    ) -> None:
        budget = budget or settings.MAX_AMPLITUDES
        amplitudes = cutoff**modes
        if amplitudes <= budget or allow_large:
            return

        suggestion = ExperimentValidators.suggested_cutoff(modes, budget)
        raise ResourceRefusalError(
            f"{modes} modes at cutoff {cutoff} need {amplitudes} amplitudes, "
            f"budget is {budget}; use --cutoff {suggestion} or --allow-large",
            suggested_cutoff=suggestion,
        )
