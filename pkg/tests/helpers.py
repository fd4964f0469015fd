"""
Общие помощники для тестов.
"""

import numpy as np

from cvcompile.fock.core import expm_hermitian
from cvcompile.schemas.hilbert import HilbertSpec, Operator


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(
    cutoff: int, rng: np.random.Generator, modes: int = 1
) -> Operator:
    """Случайный унитарный оператор exp(-iH)."""
    spec = HilbertSpec(cutoff=cutoff, modes=modes)
    return Operator(
        matrix=expm_hermitian(random_hermitian(spec.dim, rng)), spec=spec
    )
