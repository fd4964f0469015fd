from .run_compile import RunCompileUseCase
from .run_landscape import RunLandscapeUseCase
from .run_nfl import RunNflUseCase
from .run_verify import RunVerifyUseCase

USE_CASES = {
    "compile": RunCompileUseCase,
    "nfl": RunNflUseCase,
    "landscape": RunLandscapeUseCase,
    "verify": RunVerifyUseCase,
}

__all__ = [
    "RunCompileUseCase",
    "RunNflUseCase",
    "RunLandscapeUseCase",
    "RunVerifyUseCase",
    "USE_CASES",
]
