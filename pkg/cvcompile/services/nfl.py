"""
No-Free-Lunch checks in phase space.

Row-vector convention throughout: a learner T acts as w -> w T, and agrees
with the target O on w when w T = w O. Sampled maps use the interleaved
(q1, p1, ..., qm, pm) ordering.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.linalg import block_diag

from ..core.exceptions import InvalidArgumentError
from ..fock.core import apply_array
from ..fock.states import truncated_tmss
from ..schemas.hilbert import HilbertSpec, Operator
from ..schemas.nfl import GroupIntegralEstimate, PhaseSpaceMap, RiskEstimate
from ..utils.rng import map_chunks, mean_and_stderr
from ..validators.nfl_validators import NflValidators

logger = logging.getLogger(__name__)

Z_LOW = 0.5
Z_HIGH = 2.0

MatrixLike = Union[PhaseSpaceMap, np.ndarray]


def _as_array(M: MatrixLike) -> np.ndarray:
    return M.matrix if isinstance(M, PhaseSpaceMap) else np.asarray(M, dtype=float)


# --------------------------------------------------------------- samplers

def _orthogonal_array(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 0:
        return np.zeros((0, 0))
    if dim == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return stats.ortho_group.rvs(dim, random_state=rng)


def haar_orthogonal(dim: int, rng: np.random.Generator) -> PhaseSpaceMap:
    NflValidators.validate_dimension(dim)
    return PhaseSpaceMap(matrix=_orthogonal_array(dim, rng), kind="orthogonal")


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise InvalidArgumentError(f"Unitary size must be positive, got {n}")
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.uniform())]])
    return stats.unitary_group.rvs(n, random_state=rng)


def _interleave(m: int) -> np.ndarray:
    """Permutation taking (q1..qm, p1..pm) to (q1, p1, ..., qm, pm)."""
    return np.ravel(np.column_stack([np.arange(m), np.arange(m, 2 * m)]))


def _unitary_to_phase_space(U: np.ndarray) -> np.ndarray:
    X, Y = U.real, U.imag
    block = np.block([[X, -Y], [Y, X]])
    order = _interleave(U.shape[0])
    return block[np.ix_(order, order)]


def orthogonal_symplectic(m: int, rng: np.random.Generator) -> PhaseSpaceMap:
    """Haar sample of Orth(2m) n Sp(2m), the real image of U(m)."""
    matrix = _unitary_to_phase_space(haar_unitary(m, rng))
    return PhaseSpaceMap(matrix=matrix, kind="symplectic")


def _squeezer(z: np.ndarray) -> np.ndarray:
    return np.diag(np.ravel(np.column_stack([z, 1.0 / z])))


def log_uniform_z(
    m: int, rng: np.random.Generator, low: float = Z_LOW, high: float = Z_HIGH
) -> np.ndarray:
    return np.atleast_1d(stats.loguniform.rvs(low, high, size=m, random_state=rng))


def _bloch_messiah_array(
    m: int, rng: np.random.Generator, z_low: float, z_high: float
) -> np.ndarray:
    if m == 0:
        return np.zeros((0, 0))
    first = _unitary_to_phase_space(haar_unitary(m, rng))
    squeezer = _squeezer(log_uniform_z(m, rng, z_low, z_high))
    second = _unitary_to_phase_space(haar_unitary(m, rng))
    return first @ squeezer @ second


def haar_symplectic_bloch_messiah(
    dim: int,
    rng: np.random.Generator,
    z_low: float = Z_LOW,
    z_high: float = Z_HIGH,
) -> PhaseSpaceMap:
    """L = O1 Z O2 with O1, O2 Haar orthogonal-symplectic and z log-uniform."""
    NflValidators.validate_dimension(dim)
    matrix = _bloch_messiah_array(dim // 2, rng, z_low, z_high)
    return PhaseSpaceMap(matrix=matrix, kind="symplectic")


def sample_target(
    kind: str,
    m: int,
    rng: np.random.Generator,
    z_low: float = Z_LOW,
    z_high: float = Z_HIGH,
) -> PhaseSpaceMap:
    if kind == "orthogonal":
        return haar_orthogonal(2 * m, rng)
    if kind == "symplectic":
        return haar_symplectic_bloch_messiah(2 * m, rng, z_low, z_high)
    raise InvalidArgumentError(f"Unknown group kind '{kind}'")


# --------------------------------------------------------------- learners

def block_perfect_learner(
    target: PhaseSpaceMap,
    agree_dim: int,
    rng: np.random.Generator,
    z_low: float = Z_LOW,
    z_high: float = Z_HIGH,
) -> PhaseSpaceMap:
    """
    T = (I_s (+) Y) target, Y Haar on the complement group.

    Raises:
        InvalidArgumentError: if s is outside 0..2m or odd for symplectic maps
    """
    m = target.m
    NflValidators.validate_agree_dim(agree_dim, m, target.kind)
    rest = 2 * m - agree_dim
    if target.kind == "orthogonal":
        free = _orthogonal_array(rest, rng)
    else:
        free = _bloch_messiah_array(rest // 2, rng, z_low, z_high)
    left = block_diag(np.eye(agree_dim), free)
    return PhaseSpaceMap(matrix=left @ target.matrix, kind=target.kind)


def perfect_learner_from_training(
    target: PhaseSpaceMap, mean_vectors: np.ndarray, rng: np.random.Generator
) -> PhaseSpaceMap:
    """
    Orthogonal learner agreeing with ``target`` on the span of the training means.

    T O^T = B (I_s (+) Y) B^T where the first s columns of B span the means.
    """
    if target.kind != "orthogonal":
        raise InvalidArgumentError(
            "Training-set learners are built for orthogonal targets"
        )
    W = np.atleast_2d(np.asarray(mean_vectors, dtype=float))
    if W.shape[1] != target.dim:
        raise InvalidArgumentError(
            f"Mean vectors have length {W.shape[1]}, target acts on {target.dim}"
        )
    s = int(np.linalg.matrix_rank(W))
    # leading s left singular vectors span the means, the rest complete the basis
    basis, _, _ = np.linalg.svd(W.T)
    middle = np.eye(target.dim)
    middle[s:, s:] = _orthogonal_array(target.dim - s, rng)
    matrix = basis @ middle @ basis.T @ target.matrix
    return PhaseSpaceMap(matrix=matrix, kind="orthogonal")


# --------------------------------------------------------------- risks

def risk_closed_form(O: PhaseSpaceMap, T: PhaseSpaceMap) -> float:
    """1/2 - Tr(T O^{-1}) / 4m; O^{-1} = O^T for orthogonal maps."""
    if O.dim != T.dim:
        raise InvalidArgumentError("Target and learner dimensions differ")
    risk = 0.5 - float(np.trace(T.matrix @ O.inverse())) / (4 * O.m)
    if O.kind == "orthogonal" and T.kind == "orthogonal":
        assert -1e-9 <= risk <= 1 + 1e-9, f"orthogonal risk {risk} outside [0, 1]"
    return risk


def phase_space_risk_mc(
    O: MatrixLike,
    T: MatrixLike,
    sigma: float,
    n_samples: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Monte Carlo of (1/8m sigma) E ||x T - x O||^2 with x ~ N(0, sigma I_2m).

    Returns:
        (mean, stderr)
    """
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    diff = _as_array(T) - _as_array(O)
    dim = diff.shape[0]
    scale = 1.0 / (8 * (dim // 2) * sigma)

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        x = np.sqrt(sigma) * child.standard_normal((size, dim))
        return scale * np.sum((x @ diff) ** 2, axis=1)

    return mean_and_stderr(map_chunks(worker, n_samples, rng, threads))


def expected_risk_theory(m: int, set_size: int, rank: int = 1) -> float:
    return 0.5 - rank * set_size / (4 * m)


def expected_risk_mc(
    m: int,
    set_size: int,
    rank: int,
    kind: str,
    n_samples: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
    z_low: float = Z_LOW,
    z_high: float = Z_HIGH,
) -> RiskEstimate:
    """
    Average risk of block perfect learners with agree_dim = rank * |S|.

    Raises:
        InvalidArgumentError: if rank * |S| > 2m or the parity is wrong
    """
    agree_dim = rank * set_size
    NflValidators.validate_agree_dim(agree_dim, m, kind)

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        for i in range(size):
            target = sample_target(kind, m, child, z_low, z_high)
            learner = block_perfect_learner(target, agree_dim, child, z_low, z_high)
            out[i] = risk_closed_form(target, learner)
        return out

    mean, stderr = mean_and_stderr(map_chunks(worker, n_samples, rng, threads))
    logger.debug(f"risk kind={kind} m={m} s={set_size} rank={rank} mean={mean:.4f}")
    return RiskEstimate(
        mean=mean,
        stderr=stderr,
        n_samples=n_samples,
        theory=expected_risk_theory(m, set_size, rank),
        kind=kind,
        m=m,
        set_size=set_size,
        rank=rank,
    )


# --------------------------------------------------------------- covariance risk

def _covariance_batch(
    m: int, D: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Batch of Sigma = W^T diag(e^{-2r}/2, e^{2r}/2) W, shape (size, 2m, 2m)."""
    dim = 2 * m
    half = 0.5 * np.log(D)
    r = rng.uniform(-half, half, size=(size, m))
    diag = np.empty((size, dim))
    diag[:, 0::2] = np.exp(-2 * r) / 2
    diag[:, 1::2] = np.exp(2 * r) / 2
    W = stats.ortho_group.rvs(dim, size=size, random_state=rng)
    W = np.reshape(W, (size, dim, dim))
    return np.einsum('kji,kj,kjl->kil', W, diag, W)


def covariance_risk_mc(
    O: MatrixLike,
    T: MatrixLike,
    D: float,
    m: int,
    n_samples: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """
    (1/m) E ||T^T Sigma T - O^T Sigma O||_F^2 over rotated, boundedly squeezed
    covariances.

    Returns:
        (mean, stderr)
    """
    NflValidators.validate_D(D)
    O, T = _as_array(O), _as_array(T)
    if O.shape != (2 * m, 2 * m) or T.shape != O.shape:
        raise InvalidArgumentError(f"Maps must be {2 * m}x{2 * m}")
    sigmas = _covariance_batch(m, D, n_samples, rng)
    diff = np.einsum('ji,kjl,lp->kip', T, sigmas, T) - np.einsum(
        'ji,kjl,lp->kip', O, sigmas, O
    )
    values = np.sum(diff**2, axis=(1, 2)) / m
    return mean_and_stderr(values)


def _squeeze_moments(D: float) -> Tuple[float, float]:
    log_d = np.log(D)
    c1 = (D**2 - D**-2) / (4 * log_d)
    c2 = (D - 1 / D) / (2 * log_d)
    return c1, c2


def expected_covariance_risk(m: int, set_size: int, D: float) -> float:
    """Large-m closed form, without its O(1/m^2) remainder."""
    if m < 1:
        raise InvalidArgumentError("m must be positive")
    NflValidators.validate_D(D)
    c1, _ = _squeeze_moments(D)
    log_d = np.log(D)
    return float(
        c1 * (1 - 1 / (2 * (m + 1)))
        - (D - 1 / D) ** 2 * (set_size**2 + 1) / (8 * m * log_d**2)
    )


def expected_covariance_risk_exact(m: int, set_size: int, D: float) -> float:
    """
    Exact group average of the covariance risk for block perfect learners.

    Uses E Tr M^2 = s + 1 and E (Tr M)^2 = s^2 + 1 for M = I_s (+) Y, Y Haar.
    """
    if m < 1:
        raise InvalidArgumentError("m must be positive")
    NflValidators.validate_D(D)
    n = 2 * m
    NflValidators.validate_agree_dim(set_size, m, "orthogonal")
    if set_size == n:
        return 0.0
    c1, c2 = _squeeze_moments(D)
    a = set_size + 1
    b = set_size**2 + 1
    q = (n + a + b) / (n * (n + 2))
    p = (n * (n + 1) - a - b) / ((n - 1) * n * (n + 2))
    return float(c1 - c1 * q - p * (1 + 2 * (m - 1) * c2**2))


def expected_covariance_risk_mc(
    m: int,
    set_size: int,
    D: float,
    n_outer: int,
    n_inner: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> RiskEstimate:
    """Nested MC: (O, Y) pairs outside, covariance samples inside."""
    NflValidators.validate_agree_dim(set_size, m, "orthogonal")

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        for i in range(size):
            target = haar_orthogonal(2 * m, child)
            learner = block_perfect_learner(target, set_size, child)
            out[i], _ = covariance_risk_mc(target, learner, D, m, n_inner, child)
        return out

    mean, stderr = mean_and_stderr(map_chunks(worker, n_outer, rng, threads))
    return RiskEstimate(
        mean=mean,
        stderr=stderr,
        n_samples=n_outer,
        theory=expected_covariance_risk_exact(m, set_size, D),
        theory_alt=expected_covariance_risk(m, set_size, D),
        kind="covariance",
        m=m,
        set_size=set_size,
        D=D,
    )


# --------------------------------------------------------------- group integrals

def group_integral_theory(L: MatrixLike) -> Tuple[float, float, float]:
    """
    Orthogonal-group averages of (e_i^T W^T L W e_i)^2 and (e_i^T W^T L W e_j)^2.

    Returns:
        (diagonal, exact off-diagonal, large-m off-diagonal)
    """
    L = _as_array(L)
    n = L.shape[0]
    m = n // 2
    tr = np.trace(L)
    tr_sq = np.trace(L @ L)
    tr_llt = np.trace(L @ L.T)
    diagonal = (tr_llt + tr_sq + tr**2) / (n * (n + 2))
    off_exact = ((n + 1) * tr_llt - tr_sq - tr**2) / ((n - 1) * n * (n + 2))
    d = np.diag(L)
    pair_sum = d.sum() ** 2 - np.sum(d**2)
    off_alt = np.sum(d**2) / (4 * m**2 + 4 * m) + pair_sum * (2 * m + 1) / (
        4 * m * (m + 1) * (2 * m - 1)
    )
    return float(diagonal), float(off_exact), float(off_alt)


def group_integral_mc(
    L: MatrixLike,
    i: int,
    j: int,
    n_samples: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> GroupIntegralEstimate:
    L = _as_array(L)
    n = L.shape[0]
    if i == j:
        raise InvalidArgumentError("Off-diagonal entry needs i != j")
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidArgumentError(f"Indices must lie in 0..{n - 1}")

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        W = stats.ortho_group.rvs(n, size=size, random_state=child)
        W = np.reshape(W, (size, n, n))
        wi, wj = W[:, :, i], W[:, :, j]
        diag = np.einsum('ka,ab,kb->k', wi, L, wi) ** 2
        off = np.einsum('ka,ab,kb->k', wi, L, wj) ** 2
        return np.column_stack([diag, off]).ravel()

    values = map_chunks(worker, n_samples, rng, threads).reshape(-1, 2)
    mean_ii, stderr_ii = mean_and_stderr(values[:, 0])
    mean_ij, stderr_ij = mean_and_stderr(values[:, 1])
    theory_ii, theory_ij, alt = group_integral_theory(L)
    return GroupIntegralEstimate(
        mean_ii=mean_ii,
        stderr_ii=stderr_ii,
        mean_ij=mean_ij,
        stderr_ij=stderr_ij,
        theory_ii=theory_ii,
        theory_ij=theory_ij,
        theory_ij_alt=alt,
        n_samples=n_samples,
    )


# --------------------------------------------------------------- rank-truncated ricochet

def ricochet_modulus_closed_form(rank: int, r: float) -> float:
    """E_V |<psi_r| V (x) V* |psi_r>| for V Haar on U(rank), psi_r rank-truncated TMSS."""
    if rank < 1:
        raise InvalidArgumentError("Rank must be positive")
    t = np.tanh(r)
    if rank == 1:
        return 1.0
    if t >= 1.0:
        return 1.0
    return float(
        (1 / rank) * ((1 + t) / (1 + t**rank)) * ((1 - t**rank) / (1 - t))
    )


def ricochet_modulus_mc(
    rank: int,
    r: float,
    n_samples: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> Tuple[float, float]:
    """Monte Carlo of the same average through the truncated pair state."""
    state = truncated_tmss(r, rank)
    cutoff = state.spec.cutoff
    psi = state.amplitudes

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        for k in range(size):
            V = np.eye(cutoff, dtype=np.complex128)
            V[:rank, :rank] = haar_unitary(rank, child)
            phi = apply_array(psi, _dense(V, cutoff), [0], 2, cutoff)
            phi = apply_array(phi, _dense(V.conj(), cutoff), [1], 2, cutoff)
            out[k] = abs(np.vdot(psi, phi))
        return out

    return mean_and_stderr(map_chunks(worker, n_samples, rng, threads))


def _dense(matrix: np.ndarray, cutoff: int) -> Operator:
    return Operator(matrix=matrix, spec=HilbertSpec(cutoff=cutoff))


def risk_grid(
    ms: Sequence[int],
    ranks: Sequence[int],
    set_sizes: Optional[Sequence[int]] = None,
) -> list:
    """Feasible and infeasible (m, rank, |S|) cells, in row order."""
    cells = []
    for m in ms:
        for rank in ranks:
            sizes = set_sizes if set_sizes is not None else range(0, 2 * m + 1)
            for s in sizes:
                cells.append((m, rank, s, rank * s <= 2 * m))
    return cells
