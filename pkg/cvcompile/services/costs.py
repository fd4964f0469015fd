"""
Compiling cost functions.

Every cost is ``1 - mean(p)`` over a vector of success probabilities ``p``
(squared overlaps, or Pr(00) on a mode pair for the local costs). Keeping the
probabilities separate lets ``CostEvaluator`` add binomial shot noise.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np

from ..core.exceptions import (
    DegenerateInputError,
    InvalidArgumentError,
    UnsupportedSizeError,
)
from ..fock.core import apply_array, low_lying_indices, partial_trace
from ..fock.states import (
    coherent_amplitudes,
    mean_vector_to_alpha,
    thermal_weights,
    tmss_weights,
)
from ..schemas.cost import CostSpec, TrainingSet
from ..schemas.hilbert import AnyOperator, Ket, ProductOperator

logger = logging.getLogger(__name__)

NORMALIZER_FLOOR = 1e-14


def _check_pair(
    U: AnyOperator,
    V: AnyOperator,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> tuple[int, int]:
    if U.spec != V.spec:
        raise InvalidArgumentError(
            f"Target and ansatz act on different spaces: {U.spec} vs {V.spec}"
        )
    if m is not None and m != U.spec.modes:
        raise InvalidArgumentError(
            f"Operators act on {U.spec.modes} mode(s), m={m} was given"
        )
    if cutoff is not None and cutoff != U.spec.cutoff:
        raise InvalidArgumentError(
            f"Operators use cutoff {U.spec.cutoff}, cutoff={cutoff} was given"
        )
    return U.spec.modes, U.spec.cutoff


def _factor_pairs(U: AnyOperator, V: AnyOperator):
    """Matching single-group factors of two product operators, else None."""
    if not (isinstance(U, ProductOperator) and isinstance(V, ProductOperator)):
        return None
    if [f.spec.modes for f in U.factors] != [f.spec.modes for f in V.factors]:
        return None
    return list(zip(U.factors, V.factors))


def _diag_of_product(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """diag(U V^dag) without forming the product."""
    return np.einsum('nk,nk->n', U, V.conj())


@lru_cache(maxsize=32)
def _tmss_coefficients(r: float, m: int, cutoff: int) -> np.ndarray:
    coefficients = np.sqrt(tmss_weights(r, m, cutoff)).astype(np.complex128)
    coefficients.flags.writeable = False
    return coefficients


def _tmss_array(r: float, m: int, cutoff: int) -> np.ndarray:
    """Flat TMSS ket; only the N^m Schmidt coefficients are cached."""
    coefficients = _tmss_coefficients(r, m, cutoff)
    dim = coefficients.size
    psi = np.zeros(dim * dim, dtype=np.complex128)
    psi[:: dim + 1] = coefficients
    return psi


def _system_targets(m: int) -> List[int]:
    return list(range(m))


def _partner_targets(m: int) -> List[int]:
    return list(range(m, 2 * m))


def _pair_probabilities(phi: np.ndarray, r: float, m: int, cutoff: int) -> np.ndarray:
    """Pr(00) on each pair (A_j, B_j) after undoing the pair preparation."""
    pair = np.diag(np.sqrt(thermal_weights(r, cutoff))).astype(np.complex128)
    tensor = phi.reshape((cutoff,) * (2 * m))
    probs = np.empty(m)
    for j in range(m):
        rest = np.tensordot(pair.conj(), tensor, axes=([0, 1], [j, m + j]))
        probs[j] = float(np.vdot(rest, rest).real)
    return probs


# --------------------------------------------------------------- HST

def _hst_probabilities(U: AnyOperator, V: AnyOperator, d: int) -> np.ndarray:
    m, cutoff = _check_pair(U, V)
    if d < 1 or d > cutoff:
        raise InvalidArgumentError(f"HST truncation d={d} must lie in 1..{cutoff}")
    pairs = _factor_pairs(U, V)
    if pairs is not None:
        trace, dim = 1.0 + 0j, 1
        for Uf, Vf in pairs:
            idx = low_lying_indices(cutoff, Uf.spec.modes, d)
            trace *= np.einsum('kn,kn->', Vf.matrix[:, idx].conj(), Uf.matrix[:, idx])
            dim *= idx.size
    else:
        idx = low_lying_indices(cutoff, m, d)
        trace = np.einsum('kn,kn->', V.matrix[:, idx].conj(), U.matrix[:, idx])
        dim = idx.size
    return np.array([abs(trace) ** 2 / dim**2])


def hst_truncated(U: AnyOperator, V: AnyOperator, d: int) -> float:
    """
    1 - |Tr(P_d V^dag U P_d)|^2 / dim(P_d)^2, P_d keeping levels < d per mode.
    """
    return float(1.0 - _hst_probabilities(U, V, d).mean())


# --------------------------------------------------------------- TMSS family

def _le_tmss_overlap(U: AnyOperator, V: AnyOperator, r: float) -> complex:
    m, cutoff = _check_pair(U, V)
    pairs = _factor_pairs(U, V)
    if pairs is not None:
        overlap = 1.0 + 0j
        for Uf, Vf in pairs:
            weights = tmss_weights(r, Uf.spec.modes, cutoff)
            overlap *= np.dot(weights, _diag_of_product(Uf.matrix, Vf.matrix))
        return complex(overlap)
    weights = tmss_weights(r, m, cutoff)
    return complex(np.dot(weights, _diag_of_product(U.matrix, V.matrix)))


def le_tmss_cost(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """1 - |<TMSS(r)| (U V^dag (x) I) |TMSS(r)>|^2."""
    _check_pair(U, V, m, cutoff)
    return float(1.0 - abs(_le_tmss_overlap(U, V, r)) ** 2)


def _ricochet_state(
    U: AnyOperator, V: AnyOperator, r: float, m: int, cutoff: int
) -> np.ndarray:
    psi = _tmss_array(float(r), m, cutoff)
    phi = apply_array(psi, U, _system_targets(m), 2 * m, cutoff)
    return apply_array(phi, V.conjugate(), _partner_targets(m), 2 * m, cutoff)


def ricochet_overlap(U: AnyOperator, V: AnyOperator, r: float) -> complex:
    """<TMSS(r)| (U_A (x) V*_B) |TMSS(r)>."""
    m, cutoff = _check_pair(U, V)
    psi = _tmss_array(float(r), m, cutoff)
    return complex(np.vdot(psi, _ricochet_state(U, V, r, m, cutoff)))


def r_tmss_cost(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """1 - |<TMSS(r)| (U_A (x) V*_B) |TMSS(r)>|^2, V* conjugated in the Fock basis."""
    _check_pair(U, V, m, cutoff)
    return float(1.0 - abs(ricochet_overlap(U, V, r)) ** 2)


def _normalized_ricochet_probability(
    U: AnyOperator, V: AnyOperator, r: float
) -> np.ndarray:
    norm_u = abs(ricochet_overlap(U, U, r))
    norm_v = abs(ricochet_overlap(V, V, r))
    if norm_u < NORMALIZER_FLOOR or norm_v < NORMALIZER_FLOOR:
        raise DegenerateInputError(
            f"Ricochet normalizer vanishes (N_U={norm_u:.2e}, N_V={norm_v:.2e})"
        )
    return np.array([abs(ricochet_overlap(U, V, r)) ** 2 / (norm_u * norm_v)])


def r_tmss_normalized(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """
    Ricochet cost divided by N_U N_V, N_X = |<TMSS| X (x) X* |TMSS>|.

    Raises:
        DegenerateInputError: if either normalizer is below 1e-14
    """
    _check_pair(U, V, m, cutoff)
    return float(1.0 - _normalized_ricochet_probability(U, V, r).mean())


def _le_tmss_local_probabilities(
    U: AnyOperator, V: AnyOperator, r: float
) -> np.ndarray:
    m, cutoff = _check_pair(U, V)
    pairs = _factor_pairs(U, V)
    if pairs is not None and all(f.spec.modes == 1 for f, _ in pairs):
        p = thermal_weights(r, cutoff)
        overlaps = np.empty(m, dtype=np.complex128)
        norms = np.empty(m)
        for j, (Uf, Vf) in enumerate(pairs):
            W = Uf.matrix @ Vf.matrix.conj().T
            overlaps[j] = np.dot(p, np.diag(W))
            norms[j] = float(np.dot(p, np.sum(np.abs(W) ** 2, axis=0)))
        total = np.prod(norms)
        return np.array(
            [abs(overlaps[j]) ** 2 * total / norms[j] for j in range(m)]
        )

    psi = _tmss_array(float(r), m, cutoff)
    phi = apply_array(psi, V.adjoint(), _system_targets(m), 2 * m, cutoff)
    phi = apply_array(phi, U, _system_targets(m), 2 * m, cutoff)
    return _pair_probabilities(phi, r, m, cutoff)


def le_tmss_local_cost(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """1 - (1/m) sum_j Pr(00 on pair j) for (U V^dag (x) I)|TMSS(r)>."""
    _check_pair(U, V, m, cutoff)
    return float(1.0 - _le_tmss_local_probabilities(U, V, r).mean())


def le_tmss_local_via_fidelity(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """
    Local cost rebuilt from entanglement fidelities of the thermal-embedded channels.

    F_j = sum_{k, k'} p_k |sum_n p_n W[(n, k'), (n, k)]|^2, W = U V^dag, where
    k, k' run over the other system modes.

    Raises:
        UnsupportedSizeError: for m > 2 at cutoff >= 20
    """
    m, cutoff = _check_pair(U, V, m, cutoff)
    if m > 2 and cutoff >= 20:
        raise UnsupportedSizeError(
            f"Fidelity oracle builds dense {cutoff}^{m} operators; "
            "limited to m <= 2 at cutoff >= 20"
        )
    W = U.matrix @ V.matrix.conj().T
    tensor = W.reshape((cutoff,) * (2 * m))
    p = thermal_weights(r, cutoff)
    rest_weights = tmss_weights(r, m - 1, cutoff) if m > 1 else np.ones(1)

    fidelities = np.empty(m)
    for j in range(m):
        moved = np.moveaxis(tensor, [j, m + j], [0, 1])
        G = np.diagonal(moved, axis1=0, axis2=1) @ p
        G = np.asarray(G).reshape(rest_weights.size, rest_weights.size)
        fidelities[j] = float(np.sum(np.abs(G) ** 2 * rest_weights[None, :]))
    return float(1.0 - fidelities.mean())


def _r_tmss_local_probabilities(
    U: AnyOperator, V: AnyOperator, r: float
) -> np.ndarray:
    m, cutoff = _check_pair(U, V)
    phi = _ricochet_state(U, V, r, m, cutoff)
    return _pair_probabilities(phi, r, m, cutoff)


def r_tmss_local_cost(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> float:
    """1 - (1/m) sum_j Pr(00 on pair j) for (U_A (x) V*_B)|TMSS(r)>."""
    _check_pair(U, V, m, cutoff)
    return float(1.0 - _r_tmss_local_probabilities(U, V, r).mean())


def gce_inner_product(
    U: AnyOperator,
    V: AnyOperator,
    r: float,
    m: Optional[int] = None,
    cutoff: Optional[int] = None,
) -> complex:
    """
    (V, U) = Tr[sqrt(rho) U sqrt(rho) V^dag] for the truncated thermal state
    rho at inverse temperature -2 ln tanh r, taken on every mode.
    """
    if r <= 0:
        raise InvalidArgumentError(f"Inner product needs r > 0, got {r}")
    m, cutoff = _check_pair(U, V, m, cutoff)
    root = np.sqrt(tmss_weights(r, m, cutoff))
    weighted = root[:, None] * U.matrix * root[None, :]
    return complex(np.trace(weighted @ V.matrix.conj().T))


# --------------------------------------------------------------- training-state costs

def _require_training(training: TrainingSet, kind: str) -> None:
    if training is None or training.size == 0:
        raise InvalidArgumentError("Training set is empty")
    if training.kind != kind:
        raise InvalidArgumentError(
            f"Cost needs '{kind}' training states, got '{training.kind}'"
        )


def _overlap_probabilities(
    U: AnyOperator, V: AnyOperator, states: Sequence[Ket]
) -> np.ndarray:
    m, cutoff = _check_pair(U, V)
    probs = np.empty(len(states))
    for i, state in enumerate(states):
        modes = state.spec.modes
        targets = _system_targets(m)
        u_state = apply_array(state.amplitudes, U, targets, modes, cutoff)
        v_state = apply_array(state.amplitudes, V, targets, modes, cutoff)
        probs[i] = abs(np.vdot(v_state, u_state)) ** 2
    return probs


def _acs_probabilities(
    U: AnyOperator, V: AnyOperator, training: TrainingSet
) -> np.ndarray:
    _require_training(training, "coherent")
    return _overlap_probabilities(U, V, [pair[0] for pair in training.pairs])


def acs_cost(U: AnyOperator, V: AnyOperator, training: TrainingSet) -> float:
    """1 - (1/k) sum_j |<alpha_j| V^dag U |alpha_j>|^2."""
    return float(1.0 - _acs_probabilities(U, V, training).mean())


def _acs_local_probabilities(
    U: AnyOperator, V: AnyOperator, training: TrainingSet
) -> np.ndarray:
    _require_training(training, "coherent")
    m, cutoff = _check_pair(U, V)
    targets = _system_targets(m)
    probs = []
    for (state, _), w in zip(training.pairs, training.mean_vectors):
        phi = apply_array(state.amplitudes, U, targets, m, cutoff)
        phi = apply_array(phi, V.adjoint(), targets, m, cutoff)
        evolved = Ket(amplitudes=phi, spec=state.spec)
        alphas = mean_vector_to_alpha(np.atleast_2d(w)[0])
        for mode, alpha in enumerate(alphas):
            rho = partial_trace(evolved, [mode]).matrix
            ref = coherent_amplitudes(alpha, cutoff)
            probs.append(float(np.real(np.vdot(ref, rho @ ref))))
    return np.asarray(probs)


def acs_local_cost(U: AnyOperator, V: AnyOperator, training: TrainingSet) -> float:
    """1 - (1/k) sum_j (1/m) sum_l <alpha_jl| rho_l^{(j)} |alpha_jl>, rho of V^dag U |alpha_j>."""
    return float(1.0 - _acs_local_probabilities(U, V, training).mean())


def _ecfs_probabilities(
    U: AnyOperator, V: AnyOperator, training: TrainingSet
) -> np.ndarray:
    _require_training(training, "entangled-coherent-fock")
    return _overlap_probabilities(U, V, [pair[0] for pair in training.pairs])


def ecfs_cost(U: AnyOperator, V: AnyOperator, training: TrainingSet) -> float:
    """1 - (1/k) sum_j |<psi_j| (V^dag U (x) I_R) |psi_j>|^2."""
    return float(1.0 - _ecfs_probabilities(U, V, training).mean())


# --------------------------------------------------------------- evaluator

class CostEvaluator:
    """
    Evaluates the cost named by a CostSpec, optionally with shot noise.

    With ``spec.shots`` set, every success probability p is replaced by
    Binomial(shots, p) / shots drawn from the evaluator's generator.
    """

    def __init__(
        self,
        spec: CostSpec,
        training: Optional[TrainingSet] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.spec = spec
        self.training = training
        if spec.needs_training and training is None:
            raise InvalidArgumentError(f"Cost '{spec.kind}' needs a training set")
        if spec.shots is not None and rng is None:
            raise InvalidArgumentError("Shot noise needs a seeded generator")
        self.rng = rng

    def probabilities(self, U: AnyOperator, V: AnyOperator) -> np.ndarray:
        kind, r = self.spec.kind, self.spec.r
        if kind == "HST":
            return _hst_probabilities(U, V, self.spec.d or U.spec.cutoff)
        if kind == "LE-TMSS":
            return np.array([abs(_le_tmss_overlap(U, V, r)) ** 2])
        if kind == "R-TMSS":
            return np.array([abs(ricochet_overlap(U, V, r)) ** 2])
        if kind == "R-TMSS-normalized":
            return _normalized_ricochet_probability(U, V, r)
        if kind == "LE-TMSS-local":
            return _le_tmss_local_probabilities(U, V, r)
        if kind == "R-TMSS-local":
            return _r_tmss_local_probabilities(U, V, r)
        if kind == "ACS":
            return _acs_probabilities(U, V, self.training)
        if kind == "ACS-local":
            return _acs_local_probabilities(U, V, self.training)
        if kind == "ECFS":
            return _ecfs_probabilities(U, V, self.training)
        raise InvalidArgumentError(f"Unknown cost kind '{kind}'")

    def evaluate(self, U: AnyOperator, V: AnyOperator) -> float:
        probs = self.probabilities(U, V)
        if self.spec.shots is not None:
            shots = self.spec.shots
            probs = self.rng.binomial(shots, np.clip(probs, 0.0, 1.0)) / shots
        return float(1.0 - np.mean(probs))

    __call__ = evaluate
