from ..core.exceptions import InvalidArgumentError


class NflValidators:
    @staticmethod
    def validate_dimension(dim: int) -> None:
        if dim < 2 or dim % 2:
            raise InvalidArgumentError(
                f"Phase-space dimension must be even and >= 2, got {dim}"
            )

    @staticmethod
    def validate_agree_dim(agree_dim: int, m: int, kind: str) -> None:
        if agree_dim < 0 or agree_dim > 2 * m:
            raise InvalidArgumentError(
                f"Agreement dimension {agree_dim} must lie in 0..{2 * m}"
            )

        if kind == "symplectic" and agree_dim % 2:
            raise InvalidArgumentError(
                "Symplectic learners need an even agreement dimension"
            )

    @staticmethod
    def validate_D(D: float) -> None:
        if not D > 1:
            raise InvalidArgumentError(f"Squeezing bound D must exceed 1, got {D}")
