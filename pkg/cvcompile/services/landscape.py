"""
Cost landscapes for the phase-gate compiling problem.

U = (x)_j R(phi_j) against V = I. With t = tanh r each mode contributes the
factor f(phi) = (1 - t^2)^2 / (1 - 2 t^2 cos phi + t^4) to the echo
probability; the global cost multiplies the factors, the local cost averages
them.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.exceptions import InvalidArgumentError, PreconditionError
from ..fock.gates import rotation
from ..schemas.circuit import AnsatzSpec
from ..schemas.cost import CostSpec
from ..schemas.hilbert import AnyOperator, HilbertSpec, Operator, ProductOperator
from ..schemas.records import LandscapeScan
from ..utils.rng import map_chunks, mean_and_stderr
from .costs import CostEvaluator
from .trainer import ansatz_operator

logger = logging.getLogger(__name__)

OPTIMUM_TOLERANCE = 1e-6

PhaseCost = Callable[[np.ndarray], float]


def _mode_factors(phis: Sequence[float], r: float) -> np.ndarray:
    if r < 0:
        raise InvalidArgumentError(f"Squeezing must be non-negative, got {r}")
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    t2 = np.tanh(r) ** 2
    return (1 - t2) ** 2 / (1 - 2 * t2 * np.cos(phis) + t2**2)


def analytic_phase_cost(phis: Sequence[float], r: float) -> float:
    """1 - cosh^{-4m} r prod_j (1 - 2 cos phi_j tanh^2 r + tanh^4 r)^{-1}."""
    return float(1.0 - np.prod(_mode_factors(phis, r)))


def analytic_local_phase_cost(phis: Sequence[float], r: float) -> float:
    return float(1.0 - np.mean(_mode_factors(phis, r)))


def analytic_grad_expectation(r: float, m: int) -> float:
    if r <= 0:
        raise InvalidArgumentError(f"Gradient expectation needs r > 0, got {r}")
    t2 = np.tanh(r) ** 2
    per_mode = 2 / (np.pi * (1 + 2 * np.sinh(r) ** 2) ** 2)
    return float(per_mode**m * t2 / (1 + t2**2))


def analytic_local_grad_expectation(r: float, m: int) -> float:
    if r <= 0:
        raise InvalidArgumentError(f"Gradient expectation needs r > 0, got {r}")
    t2 = np.tanh(r) ** 2
    prefactor = 2 / (np.pi * m * np.cosh(r) ** 4 * (1 + t2) ** 2)
    return float(prefactor * (m - 1 + t2 / (1 + t2**2)))


def _single_mode_slope(r: float) -> float:
    t2 = np.tanh(r) ** 2
    return 4 / np.pi * t2 / (1 + t2) ** 2


def grad_expectation_exact(r: float, m: int) -> float:
    """E|d C / d phi_1| for the global cost, phi uniform on [-pi, pi]^m."""
    if r <= 0:
        raise InvalidArgumentError(f"Gradient expectation needs r > 0, got {r}")
    # E f = sech 2r per spectator mode
    return float(_single_mode_slope(r) / np.cosh(2 * r) ** (m - 1))


def local_grad_expectation_exact(r: float, m: int) -> float:
    if r <= 0:
        raise InvalidArgumentError(f"Gradient expectation needs r > 0, got {r}")
    return float(_single_mode_slope(r) / m)


def per_mode_decay(r: float) -> float:
    """Ratio of analytic_grad_expectation between m + 1 and m modes."""
    return float(2 / (np.pi * (1 + 2 * np.sinh(r) ** 2) ** 2))


def exact_decay_slope(r: float) -> float:
    return float(-np.log(np.cosh(2 * r)))


# --------------------------------------------------------------- simulated costs

def phase_gate_cost(
    kind: str, r: float, m: int, cutoff: int
) -> PhaseCost:
    """Fock-space cost of (x)_j R(phi_j) against the identity."""
    identity = Operator(
        matrix=np.eye(cutoff, dtype=np.complex128), spec=HilbertSpec(cutoff=cutoff)
    )
    V = ProductOperator(factors=(identity,) * m)
    evaluator = CostEvaluator(CostSpec(kind=kind, r=r))

    def cost(phis: np.ndarray) -> float:
        U: AnyOperator = ProductOperator(
            factors=tuple(rotation(float(phi), cutoff) for phi in phis)
        )
        return evaluator.evaluate(U, V)

    return cost


# --------------------------------------------------------------- gradient statistics

def _central_difference(cost: PhaseCost, phis: np.ndarray, step: float) -> float:
    up, down = phis.copy(), phis.copy()
    up[0] += step
    down[0] -= step
    return (cost(up) - cost(down)) / (2 * step)


def grad_samples_mc(
    cost: PhaseCost,
    m: int,
    n_samples: int,
    fd_step: float,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> np.ndarray:
    """|d cost / d phi_1| at phi drawn uniformly on [-pi, pi]^m."""
    if n_samples < 2:
        raise InvalidArgumentError("Need at least two gradient samples")

    def worker(child: np.random.Generator, size: int) -> np.ndarray:
        phis = child.uniform(-np.pi, np.pi, size=(size, m))
        return np.array(
            [abs(_central_difference(cost, row, fd_step)) for row in phis]
        )

    return map_chunks(worker, n_samples, rng, threads)


def grad_magnitude_mc(
    cost: PhaseCost,
    m: int,
    n_samples: int,
    fd_step: float,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> Tuple[float, float]:
    return mean_and_stderr(grad_samples_mc(cost, m, n_samples, fd_step, rng, threads))


def exceedance_probability(samples: np.ndarray, eps: float) -> Tuple[float, float]:
    """Empirical P(|grad| > eps) and its binomial standard error."""
    samples = np.asarray(samples, dtype=float)
    p = float(np.mean(samples > eps))
    return p, float(np.sqrt(p * (1 - p) / samples.size))


def decay_slope(ms: Sequence[int], means: Sequence[float]) -> float:
    """Slope of log(mean gradient) against the number of modes."""
    fit = stats.linregress(np.asarray(ms, dtype=float), np.log(np.asarray(means)))
    return float(fit.slope)


# --------------------------------------------------------------- perturbation scans

def landscape_scan(
    target: Operator,
    ansatz: AnsatzSpec,
    theta_opt: Sequence[float],
    eps_grid: Sequence[float],
    samples: int,
    cost_kind: str,
    r: float,
    rng: np.random.Generator,
    seed: int = 0,
) -> LandscapeScan:
    """
    Cost at theta_opt + eps R, R uniform in [-1, 1]^n, for every eps and sample.

    Raises:
        PreconditionError: if theta_opt is not an optimum (cost > 1e-6)
    """
    cutoff = target.spec.cutoff
    evaluator = CostEvaluator(CostSpec(kind=cost_kind, r=r))
    theta_opt = np.asarray(theta_opt, dtype=float)

    def cost(theta: np.ndarray) -> float:
        return evaluator.evaluate(target, ansatz_operator(ansatz, theta, cutoff))

    base = cost(theta_opt)
    if base > OPTIMUM_TOLERANCE:
        raise PreconditionError(
            f"Scan centre is not an optimum: cost {base:.3e} > {OPTIMUM_TOLERANCE}"
        )

    values = []
    for eps in eps_grid:
        kicks = rng.uniform(-1.0, 1.0, size=(samples, theta_opt.size))
        values.append([cost(theta_opt + eps * kick) for kick in kicks])
    logger.info(f"scan r={r} kind={cost_kind} eps_points={len(values)}")
    return LandscapeScan(
        eps_grid=list(eps_grid),
        samples=samples,
        values=values,
        seed=seed,
        r=r,
        cost_kind=cost_kind,
    )
