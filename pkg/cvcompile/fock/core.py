"""
Truncated Fock-space linear algebra.

Gates act on kets by tensor contraction over the target modes; the dense
N^m x N^m embedding is only built by ``embed_operator`` (small sizes, oracle).
"""

import logging
from typing import Sequence, Union

import numpy as np
from scipy import stats

from ..core.exceptions import InvalidArgumentError, UnsupportedSizeError
from ..schemas.hilbert import (
    AnyOperator,
    DensityMatrix,
    HilbertSpec,
    Ket,
    Operator,
    ProductOperator,
)
from ..validators.fock_validators import FockValidators

logger = logging.getLogger(__name__)

# dense embeddings above this dimension are refused (4096^2 complex = 256 MiB)
MAX_DENSE_DIM = 4096


def ladder_operator(cutoff: int) -> Operator:
    FockValidators.validate_cutoff(cutoff)
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)
    return Operator(matrix=a, spec=HilbertSpec(cutoff=cutoff))


def number_operator(cutoff: int) -> Operator:
    FockValidators.validate_cutoff(cutoff)
    return Operator(
        matrix=np.diag(np.arange(cutoff, dtype=float)),
        spec=HilbertSpec(cutoff=cutoff),
    )


def expm_hermitian(H: np.ndarray) -> np.ndarray:
    """e^{-iH} for a Hermitian array, via eigendecomposition."""
    FockValidators.validate_hermitian(H)
    H = 0.5 * (H + H.conj().T)
    energies, vectors = np.linalg.eigh(H)
    return (vectors * np.exp(-1j * energies)) @ vectors.conj().T


def matrix_exponential_unitary(H: Operator) -> Operator:
    """
    Return e^{-iH} for a Hermitian generator.

    Raises:
        InvalidArgumentError: if max|H - H^dag| exceeds 1e-10
    """
    return Operator(matrix=expm_hermitian(H.matrix), spec=H.spec)


def _contract(
    psi: np.ndarray,
    gate: np.ndarray,
    targets: Sequence[int],
    modes: int,
    cutoff: int,
) -> np.ndarray:
    k = len(targets)
    tensor = psi.reshape((cutoff,) * modes)
    g = gate.reshape((cutoff,) * (2 * k))
    out = np.tensordot(g, tensor, axes=(list(range(k, 2 * k)), list(targets)))
    # gate outputs land in front, the untouched modes keep their order
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(-1)


def apply_array(
    psi: np.ndarray,
    gate: AnyOperator,
    targets: Sequence[int],
    modes: int,
    cutoff: int,
) -> np.ndarray:
    """Array-level form of apply_to_modes, used inside cost loops."""
    if isinstance(gate, ProductOperator):
        offset = 0
        for factor in gate.factors:
            k = factor.spec.modes
            psi = _contract(
                psi, factor.matrix, targets[offset : offset + k], modes, cutoff
            )
            offset += k
        return psi
    return _contract(psi, gate.matrix, targets, modes, cutoff)


def apply_to_modes(
    state: Ket, gate: AnyOperator, targets: Sequence[int]
) -> Ket:
    targets = list(targets)
    FockValidators.validate_targets(targets, state.spec.modes)
    if gate.spec.cutoff != state.spec.cutoff:
        raise InvalidArgumentError(
            f"Gate cutoff {gate.spec.cutoff} does not match state cutoff "
            f"{state.spec.cutoff}"
        )
    if gate.spec.modes != len(targets):
        raise InvalidArgumentError(
            f"Gate acts on {gate.spec.modes} mode(s) but {len(targets)} "
            f"target(s) were given"
        )
    amplitudes = apply_array(
        state.amplitudes,
        gate,
        targets,
        state.spec.modes,
        state.spec.cutoff,
    )
    return Ket(amplitudes=amplitudes, spec=state.spec)


def embed_operator(
    gate: AnyOperator, targets: Sequence[int], modes: int
) -> Operator:
    """Dense N^m x N^m operator acting as ``gate`` on ``targets``."""
    targets = list(targets)
    FockValidators.validate_targets(targets, modes)
    cutoff = gate.spec.cutoff
    dim = cutoff**modes
    if dim > MAX_DENSE_DIM:
        raise UnsupportedSizeError(
            f"Dense embedding of dimension {dim} exceeds {MAX_DENSE_DIM}"
        )
    if gate.spec.modes != len(targets):
        raise InvalidArgumentError("Gate size does not match the target list")

    rest = [i for i in range(modes) if i not in targets]
    full = np.kron(gate.matrix, np.eye(cutoff ** len(rest)))
    order = targets + rest
    perm = [order.index(i) for i in range(modes)]
    full = full.reshape((cutoff,) * (2 * modes))
    full = full.transpose(perm + [modes + p for p in perm])
    return Operator(
        matrix=full.reshape(dim, dim),
        spec=HilbertSpec(cutoff=cutoff, modes=modes),
    )


def inner_product(a: Ket, b: Ket) -> complex:
    FockValidators.validate_same_spec(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: Ket, b: Ket) -> float:
    return float(abs(inner_product(a, b)) ** 2)


def partial_trace(
    state: Union[Ket, DensityMatrix], keep: Sequence[int]
) -> DensityMatrix:
    """
    Marginal on ``keep`` (result modes ordered as listed in ``keep``).

    Raises:
        InvalidArgumentError: if keep is empty, repeats or is out of range
    """
    keep = list(keep)
    spec = state.spec
    FockValidators.validate_keep(keep, spec.modes)
    cutoff, modes = spec.cutoff, spec.modes
    d_keep = cutoff ** len(keep)
    kept_spec = HilbertSpec(cutoff=cutoff, modes=len(keep))

    if isinstance(state, Ket):
        rest = [i for i in range(modes) if i not in keep]
        tensor = np.transpose(state.tensor(), keep + rest)
        M = tensor.reshape(d_keep, -1)
        return DensityMatrix(matrix=M @ M.conj().T, spec=kept_spec)

    # row labels 0..m-1, column labels m..2m-1, traced modes share a label
    rho = state.matrix.reshape((cutoff,) * (2 * modes))
    rows = list(range(modes))
    cols = [modes + i if i in keep else i for i in range(modes)]
    out = keep + [modes + i for i in keep]
    reduced = np.einsum(rho, rows + cols, out)
    return DensityMatrix(matrix=reduced.reshape(d_keep, d_keep), spec=kept_spec)


def expectation(state: Ket, op: AnyOperator, targets: Sequence[int]) -> complex:
    return inner_product(state, apply_to_modes(state, op, targets))


def entanglement_entropy(state: Ket, keep: Sequence[int]) -> float:
    """Von Neumann entropy (bits) of the marginal on ``keep``."""
    eigenvalues = partial_trace(state, keep).eigenvalues()
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    if eigenvalues.sum() <= 0:
        raise InvalidArgumentError("State has zero norm")
    return float(stats.entropy(eigenvalues, base=2))


def low_lying_indices(cutoff: int, modes: int, d: int) -> np.ndarray:
    """Flat indices whose every mode level is below ``d``."""
    d = min(d, cutoff)
    grids = np.indices((d,) * modes).reshape(modes, -1)
    return np.ravel_multi_index(grids, (cutoff,) * modes)


def isometry_defect(U: AnyOperator, d: int) -> float:
    """max |P_d U^dag U P_d - I| over the levels below ``d`` on every mode."""
    idx = low_lying_indices(U.spec.cutoff, U.spec.modes, d)
    cols = U.matrix[:, idx]
    gram = cols.conj().T @ cols
    return float(np.max(np.abs(gram - np.eye(idx.size))))
