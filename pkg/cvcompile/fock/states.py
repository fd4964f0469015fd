"""
Training and resource states: Fock, coherent, two-mode squeezed (formula and
circuit routes), rank-truncated TMSS, entangled coherent-Fock, thermal.

Every ket constructor returns a unit-norm state; truncated states are
renormalized after truncation.
"""

import logging
from functools import reduce
from typing import List, Sequence

import numpy as np
from scipy import stats

from ..core.exceptions import InvalidArgumentError
from ..schemas.cost import TrainingSet
from ..schemas.hilbert import AnyOperator, DensityMatrix, HilbertSpec, Ket
from ..validators.fock_validators import FockValidators
from .core import apply_array, apply_to_modes
from .gates import beamsplitter, squeeze

logger = logging.getLogger(__name__)

TAIL_WARNING = 1e-6


def fock_state(n: int, cutoff: int) -> Ket:
    FockValidators.validate_cutoff(cutoff)
    FockValidators.validate_level(n, cutoff)
    amplitudes = np.zeros(cutoff, dtype=np.complex128)
    amplitudes[n] = 1.0
    return Ket(amplitudes=amplitudes, spec=HilbertSpec(cutoff=cutoff))


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Renormalized truncated amplitudes alpha^n / sqrt(n!)."""
    amplitudes = np.empty(cutoff, dtype=np.complex128)
    amplitudes[0] = 1.0
    for n in range(1, cutoff):
        amplitudes[n] = amplitudes[n - 1] * alpha / np.sqrt(n)

    mean_photons = abs(alpha) ** 2
    tail = float(stats.poisson.sf(cutoff - 1, mean_photons)) if mean_photons else 0.0
    if tail > TAIL_WARNING:
        logger.warning(
            f"coherent state |alpha|^2={mean_photons:.3f} loses {tail:.2e} "
            f"of its mass above cutoff {cutoff}"
        )
    elif mean_photons > cutoff / 4:
        logger.warning(
            f"coherent state |alpha|^2={mean_photons:.3f} exceeds cutoff/4"
        )
    return amplitudes / np.linalg.norm(amplitudes)


def coherent_state(alpha: complex, cutoff: int) -> Ket:
    FockValidators.validate_cutoff(cutoff)
    return Ket(
        amplitudes=coherent_amplitudes(alpha, cutoff),
        spec=HilbertSpec(cutoff=cutoff),
    )


def coherent_product(alphas: Sequence[complex], cutoff: int) -> Ket:
    FockValidators.validate_cutoff(cutoff)
    if len(alphas) == 0:
        raise InvalidArgumentError("At least one mode amplitude is required")
    amplitudes = reduce(
        np.kron, (coherent_amplitudes(a, cutoff) for a in alphas)
    )
    return Ket(
        amplitudes=amplitudes,
        spec=HilbertSpec(cutoff=cutoff, modes=len(alphas)),
    )


def mean_vector_to_alpha(w: Sequence[float]) -> np.ndarray:
    """(q1, p1, ..., qm, pm) -> alpha_l = (q_l + i p_l) / sqrt(2)."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.size % 2:
        raise InvalidArgumentError("Mean vector must have even length 2m")
    return (w[0::2] + 1j * w[1::2]) / np.sqrt(2)


def alpha_to_mean_vector(alphas: Sequence[complex]) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=np.complex128).reshape(-1)
    w = np.empty(2 * alphas.size)
    w[0::2] = np.sqrt(2) * alphas.real
    w[1::2] = np.sqrt(2) * alphas.imag
    return w


def thermal_weights(r: float, cutoff: int) -> np.ndarray:
    """Normalized tanh^{2n} r over n < cutoff (squared TMSS Schmidt coefficients)."""
    t2 = np.tanh(r) ** 2
    weights = t2 ** np.arange(cutoff, dtype=float)
    return weights / weights.sum()


def tmss_weights(r: float, m: int, cutoff: int) -> np.ndarray:
    """Flattened product of per-pair weights over the m system modes."""
    p = thermal_weights(r, cutoff)
    return reduce(np.kron, [p] * m)


def tmss(r: float, m: int, cutoff: int) -> Ket:
    """
    Product of m truncated two-mode squeezed pairs.

    Modes are ordered (A_1..A_m, B_1..B_m); pair j couples A_j with B_j.
    """
    if r < 0:
        raise InvalidArgumentError(f"Squeezing must be non-negative, got {r}")
    FockValidators.validate_cutoff(cutoff)
    _warn_tmss_tail(r, cutoff)
    coefficients = np.sqrt(tmss_weights(r, m, cutoff))
    # amplitude matrix rows index the A register, columns the B register
    amplitudes = np.diag(coefficients.astype(np.complex128)).reshape(-1)
    return Ket(amplitudes=amplitudes, spec=HilbertSpec(cutoff=cutoff, modes=2 * m))


def tmss_tail_mass(r: float, cutoff: int) -> float:
    """Per-pair probability lost above the cutoff before renormalization."""
    return float(np.tanh(r) ** (2 * cutoff))


def _warn_tmss_tail(r: float, cutoff: int) -> None:
    tail = tmss_tail_mass(r, cutoff)
    if tail > TAIL_WARNING:
        logger.warning(
            f"TMSS r={r} loses {tail:.2e} per pair above cutoff {cutoff}"
        )


def tmss_via_circuit(r: float, m: int, cutoff: int) -> Ket:
    """S(-r) on A_j, S(r) on B_j, then the 50:50 beamsplitter on (A_j, B_j)."""
    if r < 0:
        raise InvalidArgumentError(f"Squeezing must be non-negative, got {r}")
    FockValidators.validate_cutoff(cutoff)
    modes = 2 * m
    spec = HilbertSpec(cutoff=cutoff, modes=modes)
    vacuum = np.zeros(spec.dim, dtype=np.complex128)
    vacuum[0] = 1.0
    state = Ket(amplitudes=vacuum, spec=spec)

    squeeze_a = squeeze(-r, cutoff)
    squeeze_b = squeeze(r, cutoff)
    mixer = beamsplitter(np.pi / 4, 0.0, cutoff)
    for j in range(m):
        state = apply_to_modes(state, squeeze_a, [j])
        state = apply_to_modes(state, squeeze_b, [m + j])
        state = apply_to_modes(state, mixer, [j, m + j])
    return Ket(amplitudes=state.amplitudes / state.norm, spec=spec)


def truncated_tmss(r: float, rank: int) -> Ket:
    """
    Rank-truncated pair state on levels 0..rank-1 of each mode.

    Rank 1 is stored in a two-level container (the smallest HilbertSpec).
    """
    if rank < 1:
        raise InvalidArgumentError(f"Rank must be positive, got {rank}")
    t = np.tanh(r)
    if t < 1.0:
        prefactor = np.sqrt((1 - t**2) / (1 - t ** (2 * rank)))
        coefficients = prefactor * t ** np.arange(rank, dtype=float)
    else:
        # tanh saturates in double precision: the Bell-like limit
        coefficients = np.full(rank, 1 / np.sqrt(rank))

    cutoff = max(rank, 2)
    amplitudes = np.zeros((cutoff, cutoff), dtype=np.complex128)
    amplitudes[np.arange(rank), np.arange(rank)] = coefficients
    return Ket(
        amplitudes=amplitudes.reshape(-1), spec=HilbertSpec(cutoff=cutoff, modes=2)
    )


def entangled_coherent_fock(
    mean_vectors: Sequence[Sequence[float]], cutoff: int
) -> Ket:
    """
    (1/sqrt(r)) sum_k |w_k> (x) |k>, register levels 1..r on one extra mode.

    Modes are the m system modes followed by the register mode.

    Raises:
        InvalidArgumentError: if the mean vectors are linearly dependent or
            the register does not fit below the cutoff
    """
    FockValidators.validate_cutoff(cutoff)
    W = np.atleast_2d(np.asarray(mean_vectors, dtype=float))
    rank = W.shape[0]
    if rank >= cutoff:
        raise InvalidArgumentError(
            f"Register needs levels 1..{rank}, cutoff is {cutoff}"
        )
    if np.linalg.matrix_rank(W) < rank:
        raise InvalidArgumentError("Mean vectors are linearly dependent")

    m = W.shape[1] // 2
    system_dim = cutoff**m
    columns = np.zeros((system_dim, cutoff), dtype=np.complex128)
    for k, w in enumerate(W, start=1):
        columns[:, k] = coherent_product(mean_vector_to_alpha(w), cutoff).amplitudes
    amplitudes = columns.reshape(-1) / np.sqrt(rank)
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    return Ket(amplitudes=amplitudes, spec=HilbertSpec(cutoff=cutoff, modes=m + 1))


def thermal_state(r: float, cutoff: int) -> DensityMatrix:
    if r <= 0:
        raise InvalidArgumentError(f"Thermal state needs r > 0, got {r}")
    FockValidators.validate_cutoff(cutoff)
    return DensityMatrix(
        matrix=np.diag(thermal_weights(r, cutoff)),
        spec=HilbertSpec(cutoff=cutoff),
    )


def sample_coherent_amplitudes(
    m: int, energy: float, k: int, rng: np.random.Generator
) -> np.ndarray:
    """
    k amplitude vectors uniform in the ball sum |alpha_l|^2 <= energy.

    For one mode the energy is uniform in [0, E] and the phase in [0, 2pi).

    Returns:
        complex array of shape (k, m)
    """
    if m < 1 or k < 1:
        raise InvalidArgumentError("Need m >= 1 modes and k >= 1 samples")
    if energy < 0:
        raise InvalidArgumentError("Energy bound must be non-negative")
    if m == 1:
        e = rng.uniform(0.0, energy, size=k)
        phase = rng.uniform(0.0, 2 * np.pi, size=k)
        return (np.sqrt(e) * np.exp(1j * phase)).reshape(k, 1)

    radius = np.sqrt(energy)
    out = np.empty((k, m), dtype=np.complex128)
    filled = 0
    while filled < k:
        box = rng.uniform(-radius, radius, size=(4 * k, 2 * m))
        inside = box[np.sum(box**2, axis=1) <= energy]
        take = min(k - filled, inside.shape[0])
        out[filled : filled + take] = inside[:take, 0::2] + 1j * inside[:take, 1::2]
        filled += take
    return out


def build_training_set(
    target: AnyOperator,
    kind: str,
    k: int,
    energy: float,
    rng: np.random.Generator,
    rank: int = 1,
) -> TrainingSet:
    """
    Sample k training inputs and pair each with target applied to it.

    Coherent inputs are product coherent states; entangled inputs carry
    ``rank`` independent means on the system and a Fock register mode.
    """
    cutoff = target.spec.cutoff
    m = target.spec.modes
    pairs = []
    blocks: List[np.ndarray] = []
    for _ in range(k):
        if kind == "coherent":
            alphas = sample_coherent_amplitudes(m, energy, 1, rng)[0]
            state = coherent_product(alphas, cutoff)
            block = alpha_to_mean_vector(alphas).reshape(1, -1)
            image = apply_to_modes(state, target, list(range(m)))
        elif kind == "entangled-coherent-fock":
            block = _independent_means(m, energy, rank, rng)
            state = entangled_coherent_fock(block, cutoff)
            image = Ket(
                amplitudes=apply_array(
                    state.amplitudes, target, list(range(m)), m + 1, cutoff
                ),
                spec=state.spec,
            )
        else:
            raise InvalidArgumentError(f"Unknown training kind '{kind}'")
        pairs.append((state, image))
        blocks.append(block)

    return TrainingSet(
        kind=kind,
        pairs=pairs,
        mean_vectors=blocks,
        rank=rank if kind == "entangled-coherent-fock" else 1,
        energy_bound=energy,
    )


def _independent_means(
    m: int, energy: float, rank: int, rng: np.random.Generator
) -> np.ndarray:
    if rank > 2 * m:
        raise InvalidArgumentError(
            f"At most {2 * m} independent means exist in 2m={2 * m} dimensions"
        )
    for _ in range(100):
        alphas = sample_coherent_amplitudes(m, energy, rank, rng)
        block = np.stack([alpha_to_mean_vector(a) for a in alphas])
        if np.linalg.matrix_rank(block, tol=1e-8) == rank:
            return block
    raise InvalidArgumentError("Could not draw linearly independent means")

