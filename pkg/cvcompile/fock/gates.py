"""
Truncated CV gates.

Sign conventions: ``rotation`` is diag(e^{+i phi n}); ``gaussian_unitary`` is
e^{-iH} with H = alpha a + alpha* a^dag + beta a^2 + beta* a^dag^2 + phi a^dag a.
The two differ in the sign of the phase term and both are kept.
"""

from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..schemas.hilbert import HilbertSpec, Operator
from ..validators.fock_validators import FockValidators
from .core import expm_hermitian


@lru_cache(maxsize=32)
def _ladder(cutoff: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)
    a.flags.writeable = False
    return a


def _single(matrix: np.ndarray, cutoff: int) -> Operator:
    return Operator(matrix=matrix, spec=HilbertSpec(cutoff=cutoff))


def displacement(alpha: complex, cutoff: int) -> Operator:
    """D(alpha) = exp(alpha a^dag - alpha* a) = e^{-iH}, H = i(alpha a^dag - alpha* a)."""
    FockValidators.validate_cutoff(cutoff)
    a = _ladder(cutoff)
    H = 1j * (alpha * a.T - np.conj(alpha) * a)
    return _single(expm_hermitian(H), cutoff)


def squeeze(z: complex, cutoff: int) -> Operator:
    """S(z) = exp((z* a^2 - z a^dag^2) / 2)."""
    FockValidators.validate_cutoff(cutoff)
    a = _ladder(cutoff)
    a2 = a @ a
    H = 0.5j * (np.conj(z) * a2 - z * a2.T)
    return _single(expm_hermitian(H), cutoff)


def rotation(phi: float, cutoff: int) -> Operator:
    FockValidators.validate_cutoff(cutoff)
    n = np.arange(cutoff)
    return _single(np.diag(np.exp(1j * phi * n)), cutoff)


def kerr(chi: float, cutoff: int) -> Operator:
    FockValidators.validate_cutoff(cutoff)
    n = np.arange(cutoff, dtype=float)
    return _single(np.diag(np.exp(-1j * chi * n**2)), cutoff)


def gaussian_unitary(
    alpha: complex, beta: complex, phi: float, cutoff: int
) -> Operator:
    FockValidators.validate_cutoff(cutoff)
    a = _ladder(cutoff)
    ad = a.T
    n = np.diag(np.arange(cutoff, dtype=float))
    H = (
        alpha * a
        + np.conj(alpha) * ad
        + beta * (a @ a)
        + np.conj(beta) * (ad @ ad)
        + phi * n
    )
    return _single(expm_hermitian(H), cutoff)


def factored_gaussian(
    alpha: complex, beta: complex, phi: float, cutoff: int
) -> Operator:
    """R(phi) D(alpha) S(beta); a reparameterization of gaussian_unitary, not equal to it."""
    return rotation(phi, cutoff) @ displacement(alpha, cutoff) @ squeeze(
        beta, cutoff
    )


Coupling = Callable[[int, int], Optional[Tuple[Tuple[int, int], complex]]]


def _blockwise_two_mode(
    cutoff: int,
    label: Callable[[int, int], int],
    coupling: Coupling,
) -> np.ndarray:
    """
    e^{-iH} for a two-mode generator that is block-diagonal in ``label``.

    ``coupling(i, j)`` gives the single raising entry <i', j'|H|i, j>; the
    Hermitian completion supplies the lowering entries.
    """
    blocks: Dict[int, List[Tuple[int, int]]] = {}
    for i in range(cutoff):
        for j in range(cutoff):
            blocks.setdefault(label(i, j), []).append((i, j))

    U = np.zeros((cutoff * cutoff, cutoff * cutoff), dtype=np.complex128)
    for states in blocks.values():
        position = {s: p for p, s in enumerate(states)}
        H = np.zeros((len(states), len(states)), dtype=np.complex128)
        for s in states:
            entry = coupling(*s)
            if entry is None or entry[0] not in position:
                continue
            target, value = entry
            H[position[target], position[s]] += value
            H[position[s], position[target]] += np.conj(value)
        flat = np.array([i * cutoff + j for i, j in states])
        U[np.ix_(flat, flat)] = expm_hermitian(H)
    return U


def beamsplitter(theta: float, phi: float, cutoff: int) -> Operator:
    """
    exp(theta (a b^dag e^{i phi} - a^dag b e^{-i phi})) on modes (a, b).

    Built block by block in the total photon number, which the generator
    conserves, so the result is exactly unitary on the truncated space.
    """
    FockValidators.validate_cutoff(cutoff)
    phase = np.exp(1j * phi)

    def coupling(i: int, j: int):
        # a b^dag |i, j> = sqrt(i (j+1)) |i-1, j+1>
        if i == 0 or j + 1 >= cutoff:
            return None
        return (i - 1, j + 1), 1j * theta * phase * np.sqrt(i * (j + 1))

    U = _blockwise_two_mode(cutoff, lambda i, j: i + j, coupling)
    return Operator(matrix=U, spec=HilbertSpec(cutoff=cutoff, modes=2))


def two_mode_squeeze(r: float, cutoff: int) -> Operator:
    """exp(r (a^dag b^dag - a b)); on vacuum gives coefficients +tanh^n r."""
    FockValidators.validate_cutoff(cutoff)

    def coupling(i: int, j: int):
        if i + 1 >= cutoff or j + 1 >= cutoff:
            return None
        return (i + 1, j + 1), 1j * r * np.sqrt((i + 1) * (j + 1))

    U = _blockwise_two_mode(cutoff, lambda i, j: i - j, coupling)
    return Operator(matrix=U, spec=HilbertSpec(cutoff=cutoff, modes=2))
