"""
Variational compiling: ansatz circuits, targets, the bounded optimizer wrapper
and the squeezing schedule.
"""

import logging
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..core.exceptions import InvalidArgumentError, PreconditionError
from ..fock.gates import (
    beamsplitter,
    displacement,
    gaussian_unitary,
    kerr,
    rotation,
    squeeze,
)
from ..schemas.circuit import (
    GAUSSIAN_FIELDS,
    LAYER_FIELDS,
    AnsatzSpec,
    OptimizationResult,
    OptimizerConfig,
    ScheduleConfig,
    ScheduleResult,
    TargetInstance,
    TargetSpec,
    TrainRecord,
)
from ..schemas.cost import TMSS_KINDS, CostSpec, TrainingSet
from ..schemas.hilbert import HilbertSpec, Operator
from .costs import CostEvaluator, hst_truncated

logger = logging.getLogger(__name__)

PENALTY_VALUE = 10.0
HST_LEVELS = (5, 50)

Objective = Callable[[np.ndarray], float]
Annotator = Callable[[np.ndarray], Dict]


# --------------------------------------------------------------- ansätze

def build_single_mode_layer(
    alpha: complex, beta: complex, phi: float, chi: float, cutoff: int
) -> Operator:
    """K(chi) R(phi) D(alpha) S(beta); the squeezer acts first."""
    return (
        kerr(chi, cutoff)
        @ rotation(phi, cutoff)
        @ displacement(alpha, cutoff)
        @ squeeze(beta, cutoff)
    )


def _layer_from_slice(values: Sequence[float], cutoff: int) -> Operator:
    alpha_re, alpha_im, beta_re, beta_im, phi, chi = values
    return build_single_mode_layer(
        complex(alpha_re, alpha_im), complex(beta_re, beta_im), phi, chi, cutoff
    )


def build_layered_ansatz(theta: Sequence[float], layers: int, cutoff: int) -> Operator:
    theta = np.asarray(theta, dtype=float)
    width = len(LAYER_FIELDS)
    if theta.size != width * layers:
        raise InvalidArgumentError(
            f"{layers} layer(s) need {width * layers} parameters, got {theta.size}"
        )
    result = Operator(
        matrix=np.eye(cutoff, dtype=np.complex128), spec=HilbertSpec(cutoff=cutoff)
    )
    for layer in range(layers):
        block = theta[layer * width : (layer + 1) * width]
        result = _layer_from_slice(block, cutoff) @ result
    return result


def build_two_mode_ansatz(theta: Sequence[float], cutoff: int) -> Operator:
    """BS(theta, phi) (layer on mode 1 (x) layer on mode 2)."""
    theta = np.asarray(theta, dtype=float)
    width = len(LAYER_FIELDS)
    if theta.size != 2 + 2 * width:
        raise InvalidArgumentError(
            f"Two-mode ansatz needs {2 + 2 * width} parameters, got {theta.size}"
        )
    first = _layer_from_slice(theta[2 : 2 + width], cutoff)
    second = _layer_from_slice(theta[2 + width :], cutoff)
    mixer = beamsplitter(theta[0], theta[1], cutoff)
    return Operator(
        matrix=mixer.matrix @ np.kron(first.matrix, second.matrix),
        spec=mixer.spec,
    )


def gaussian_ansatz(theta: Sequence[float], cutoff: int) -> Operator:
    theta = np.asarray(theta, dtype=float)
    if theta.size != len(GAUSSIAN_FIELDS):
        raise InvalidArgumentError(
            f"Gaussian ansatz needs {len(GAUSSIAN_FIELDS)} parameters, got {theta.size}"
        )
    alpha_re, alpha_im, beta_re, beta_im, phi = theta
    return gaussian_unitary(
        complex(alpha_re, alpha_im), complex(beta_re, beta_im), phi, cutoff
    )


def ansatz_operator(ansatz: AnsatzSpec, theta: Sequence[float], cutoff: int) -> Operator:
    if ansatz.kind == "gaussian":
        return gaussian_ansatz(theta, cutoff)
    if ansatz.kind == "layered":
        return build_layered_ansatz(theta, ansatz.layers, cutoff)
    return build_two_mode_ansatz(theta, cutoff)


# --------------------------------------------------------------- targets

def random_target_params(kind: str, rng: np.random.Generator) -> Dict[str, float]:
    if kind == "gaussian":
        values = rng.uniform(0.0, 1.0, size=4)
        return {
            **dict(zip(GAUSSIAN_FIELDS[:4], values.tolist())),
            "phi": float(rng.uniform(0.0, 2 * np.pi)),
        }
    if kind == "kerr":
        return {"chi": float(rng.uniform(0.0, 1.0))}
    if kind == "beamsplitter":
        theta, phi = rng.uniform(0.0, 2 * np.pi, size=2)
        return {"theta": float(theta), "phi": float(phi)}
    if kind == "identity":
        return {}
    raise InvalidArgumentError(f"Unknown target kind '{kind}'")


def target_operator(kind: str, params: Dict[str, float], cutoff: int) -> Operator:
    p = {k: float(v) for k, v in params.items()}
    if kind == "gaussian":
        return gaussian_unitary(
            complex(p.get("alpha_re", 0.0), p.get("alpha_im", 0.0)),
            complex(p.get("beta_re", 0.0), p.get("beta_im", 0.0)),
            p.get("phi", 0.0),
            cutoff,
        )
    if kind == "kerr":
        return kerr(p.get("chi", 0.0), cutoff)
    if kind == "beamsplitter":
        return beamsplitter(p.get("theta", 0.0), p.get("phi", 0.0), cutoff)
    if kind == "identity":
        return Operator(
            matrix=np.eye(cutoff, dtype=np.complex128), spec=HilbertSpec(cutoff=cutoff)
        )
    raise InvalidArgumentError(f"Unknown target kind '{kind}'")


def random_target(kind: str, rng: np.random.Generator, cutoff: int) -> TargetInstance:
    params = random_target_params(kind, rng)
    return TargetInstance(
        kind=kind, params=params, operator=target_operator(kind, params, cutoff)
    )


def build_target(
    spec: TargetSpec, cutoff: int, rng: Optional[np.random.Generator] = None
) -> TargetInstance:
    if spec.random:
        if rng is None:
            raise InvalidArgumentError("Random targets need a seeded generator")
        return random_target(spec.kind, rng, cutoff)
    return TargetInstance(
        kind=spec.kind,
        params=dict(spec.params),
        operator=target_operator(spec.kind, spec.params, cutoff),
    )


def exact_parameters(ansatz: AnsatzSpec, target: TargetInstance) -> Optional[np.ndarray]:
    """A parameter vector realizing the target exactly, when the layout admits one."""
    p = target.params
    if target.kind == "identity":
        return np.zeros(ansatz.n_params)
    if ansatz.kind == "gaussian" and target.kind == "gaussian":
        return np.array([p.get(name, 0.0) for name in GAUSSIAN_FIELDS])
    if ansatz.kind == "layered" and target.kind == "kerr":
        theta = np.zeros(ansatz.n_params)
        chi_per_layer = p.get("chi", 0.0) / ansatz.layers
        theta[len(LAYER_FIELDS) - 1 :: len(LAYER_FIELDS)] = chi_per_layer
        return theta
    if ansatz.kind == "two-mode-layered" and target.kind == "beamsplitter":
        theta = np.zeros(ansatz.n_params)
        theta[:2] = p.get("theta", 0.0), p.get("phi", 0.0)
        return theta
    return None


def initial_parameters(
    ansatz: AnsatzSpec,
    init: str,
    rng: np.random.Generator,
    target: Optional[TargetInstance] = None,
    init_range: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    n = ansatz.n_params
    if init == "zeros":
        theta = np.zeros(n)
    elif init == "target":
        theta = exact_parameters(ansatz, target) if target is not None else None
        if theta is None:
            raise PreconditionError(
                f"No exact {ansatz.kind} parameters for target "
                f"{getattr(target, 'kind', None)}"
            )
    elif init_range is not None:
        theta = rng.uniform(init_range[0], init_range[1], size=n)
    elif ansatz.kind == "gaussian":
        theta = np.concatenate(
            [rng.uniform(0.0, 1.0, size=4), rng.uniform(0.0, 2 * np.pi, size=1)]
        )
    else:
        theta = rng.uniform(0.0, 0.1, size=n)

    bounds = ansatz.resolved_bounds()
    if bounds is not None:
        lo, hi = np.array(bounds, dtype=float).T
        theta = np.clip(theta, lo, hi)
    return theta


# --------------------------------------------------------------- objectives

def compile_cost_function(
    target: Operator,
    ansatz: AnsatzSpec,
    cost: CostSpec,
    training: Optional[TrainingSet] = None,
    rng: Optional[np.random.Generator] = None,
) -> Objective:
    cutoff = target.spec.cutoff
    evaluator = CostEvaluator(cost, training=training, rng=rng)

    def objective(theta: np.ndarray) -> float:
        return evaluator.evaluate(target, ansatz_operator(ansatz, theta, cutoff))

    return objective


class _StopSearch(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class TrackedObjective:
    """
    Counts evaluations, keeps the best point, penalizes non-finite values and
    stops the search on target value, evaluation budget or stall.
    """

    def __init__(
        self,
        objective: Objective,
        config: OptimizerConfig,
        n_params: int,
        bounds: Optional[np.ndarray] = None,
    ):
        self.objective = objective
        self.config = config
        self.bounds = bounds
        self.n_evals = 0
        self.penalized = 0
        self.best_value = np.inf
        self.best_x: Optional[np.ndarray] = None
        self.window = max(25, 3 * (2 * n_params + 1))
        self._trace: List[float] = []

    def reset_stall(self) -> None:
        self._trace = []

    def clip(self, x: np.ndarray) -> np.ndarray:
        if self.bounds is None:
            return np.asarray(x, dtype=float)
        return np.clip(x, self.bounds[:, 0], self.bounds[:, 1])

    def __call__(self, x: np.ndarray) -> float:
        if self.n_evals >= self.config.max_evals:
            raise _StopSearch("max_evals")
        x = self.clip(x)
        value = float(self.objective(x))
        self.n_evals += 1
        if not np.isfinite(value):
            self.penalized += 1
            value = PENALTY_VALUE
        if value < self.best_value:
            self.best_value = value
            self.best_x = x.copy()
        self._trace.append(self.best_value)

        target = self.config.target_value
        if target is not None and self.best_value <= target:
            raise _StopSearch("target")
        if self.n_evals >= self.config.max_evals:
            raise _StopSearch("max_evals")
        if len(self._trace) > self.window:
            before = self._trace[-self.window - 1]
            gain = (before - self.best_value) / max(abs(before), 1e-300)
            if gain < self.config.f_tol:
                raise _StopSearch("stalled")
        return value

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Central differences, step fd_step * max(1, |x_i|), kept inside the bounds."""
        x = self.clip(x)
        grad = np.empty_like(x)
        for i in range(x.size):
            h = self.config.fd_step * max(1.0, abs(x[i]))
            up, down = x.copy(), x.copy()
            up[i] += h
            down[i] -= h
            up, down = self.clip(up), self.clip(down)
            span = up[i] - down[i]
            if span == 0:
                grad[i] = 0.0
                continue
            grad[i] = (self(up) - self(down)) / span
        return grad


def minimize(
    objective: Objective,
    init: Sequence[float],
    config: OptimizerConfig,
    bounds: Optional[Sequence[Tuple[float, float]]] = None,
    annotate: Optional[Annotator] = None,
    stage: int = 0,
    r: Optional[float] = None,
    iteration_offset: int = 0,
    seed: int = 0,
) -> OptimizationResult:
    """
    Bounded local minimization with simplex or finite-difference quasi-Newton.

    Non-finite objective values are replaced by a penalty and counted. Each
    optimizer iteration appends a TrainRecord holding the best value so far.

    Raises:
        PreconditionError: if the objective is not finite at ``init``
    """
    x0 = np.asarray(init, dtype=float).copy()
    box = np.array(bounds, dtype=float) if bounds is not None else None
    tracked = TrackedObjective(objective, config, x0.size, box)
    x0 = tracked.clip(x0)
    rng = np.random.default_rng(np.random.SeedSequence([seed, config.seed, stage]))
    records: List[TrainRecord] = []
    started = time.perf_counter()

    def record(x: np.ndarray) -> None:
        extra = annotate(x) if annotate is not None else {}
        records.append(
            TrainRecord(
                iteration=iteration_offset + len(records),
                stage=stage,
                r=r,
                cost=tracked.best_value,
                n_evals=tracked.n_evals,
                params=[float(v) for v in x],
                wall_time=time.perf_counter() - started,
                seed=seed,
                penalized=tracked.penalized,
                **extra,
            )
        )

    try:
        first = tracked(x0)
    except _StopSearch as stop:
        record(tracked.best_x)
        return _result(tracked, records, stop.reason)
    if tracked.penalized:
        raise PreconditionError("Objective is not finite at the initial parameters")
    logger.debug(f"minimize start stage={stage} value={first:.3e}")
    record(tracked.best_x)

    reason = "converged"
    start = x0
    for attempt in range(config.restarts + 1):
        tracked.reset_stall()
        try:
            _run_method(tracked, start, config, box, lambda xk: record(tracked.best_x))
            reason = "converged"
        except _StopSearch as stop:
            reason = stop.reason
            if reason in ("target", "max_evals"):
                break
        if attempt < config.restarts:
            scale = 0.1 * 2.0**-attempt
            jitter = rng.uniform(-1.0, 1.0, size=start.size)
            step = scale * jitter * np.maximum(1.0, np.abs(tracked.best_x))
            start = tracked.clip(tracked.best_x + step)

    if not records or records[-1].cost != tracked.best_value:
        record(tracked.best_x)
    logger.info(
        f"minimize stage={stage} method={config.method} value={tracked.best_value:.3e} "
        f"evals={tracked.n_evals} stop={reason}"
    )
    return _result(tracked, records, reason)


def _run_method(
    tracked: TrackedObjective,
    x0: np.ndarray,
    config: OptimizerConfig,
    box: Optional[np.ndarray],
    callback: Callable[[np.ndarray], None],
) -> None:
    scipy_bounds = [tuple(b) for b in box] if box is not None else None
    if config.method == "simplex":
        optimize.minimize(
            tracked,
            x0,
            method="Nelder-Mead",
            bounds=scipy_bounds,
            callback=callback,
            options={
                "adaptive": True,
                "maxfev": config.max_evals,
                "xatol": 1e-12,
                "fatol": config.f_tol * 1e-3,
            },
        )
    else:
        optimize.minimize(
            tracked,
            x0,
            method="L-BFGS-B",
            jac=tracked.gradient,
            bounds=scipy_bounds,
            callback=callback,
            options={
                "maxiter": config.max_evals,
                "maxfun": config.max_evals,
                "ftol": np.finfo(float).eps,
                "gtol": 1e-14,
            },
        )


def _result(
    tracked: TrackedObjective, records: List[TrainRecord], reason: str
) -> OptimizationResult:
    return OptimizationResult(
        params=[float(v) for v in tracked.best_x],
        value=float(tracked.best_value),
        records=records,
        n_evals=tracked.n_evals,
        penalized=tracked.penalized,
        stop_reason=reason,
    )


# --------------------------------------------------------------- diagnostics

def _angle_error(a: float, b: float) -> float:
    return float(abs(np.angle(np.exp(1j * (a - b)))))


def diagnostics(
    params: Sequence[float],
    ansatz: AnsatzSpec,
    target: TargetInstance,
    levels: Sequence[int] = HST_LEVELS,
) -> Dict:
    """
    Parameter errors against the target plus HST at the requested truncations.

    Returns:
        {"hst_<d>": value for d in levels, "errors": {name: value}}
    """
    theta = np.asarray(params, dtype=float)
    cutoff = target.operator.spec.cutoff
    V = ansatz_operator(ansatz, theta, cutoff)
    out: Dict = {
        f"hst_{d}": hst_truncated(target.operator, V, min(d, cutoff)) for d in levels
    }

    errors: Dict[str, float] = {}
    p = target.params
    if ansatz.kind == "gaussian":
        reference = exact_parameters(ansatz, target)
        if reference is not None:
            for name, value, ref in zip(GAUSSIAN_FIELDS, theta, reference):
                errors[name] = float(abs(value - ref))
    elif ansatz.kind == "layered" and target.kind in ("kerr", "identity"):
        blocks = theta.reshape(ansatz.layers, len(LAYER_FIELDS))
        errors["alpha_sum"] = float(abs(complex(blocks[:, 0].sum(), blocks[:, 1].sum())))
        errors["beta_sum"] = float(abs(complex(blocks[:, 2].sum(), blocks[:, 3].sum())))
        errors["phi_sum"] = float(abs(blocks[:, 4].sum()))
        errors["chi_sum"] = float(abs(blocks[:, 5].sum() - p.get("chi", 0.0)))
    elif ansatz.kind == "two-mode-layered" and target.kind == "beamsplitter":
        errors["bs_theta"] = _angle_error(theta[0], p.get("theta", 0.0))
        errors["bs_phi"] = _angle_error(theta[1], p.get("phi", 0.0))
    out["errors"] = errors
    return out


# --------------------------------------------------------------- training runs

class CompileTrainer:
    """Trains one ansatz against one target under one CostSpec."""

    def __init__(
        self,
        target: TargetInstance,
        ansatz: AnsatzSpec,
        cost: CostSpec,
        training: Optional[TrainingSet] = None,
        seed: int = 0,
        with_diagnostics: bool = True,
    ):
        if target.operator.spec.modes != ansatz.modes:
            raise InvalidArgumentError(
                f"Target acts on {target.operator.spec.modes} mode(s), "
                f"ansatz on {ansatz.modes}"
            )
        self.target = target
        self.ansatz = ansatz
        self.cost = cost
        self.training = training
        self.seed = seed
        self.with_diagnostics = with_diagnostics
        self.noise_rng = (
            np.random.default_rng(np.random.SeedSequence([seed, 1]))
            if cost.shots is not None
            else None
        )

    def objective(self, r: Optional[float] = None) -> Objective:
        spec = self.cost if r is None else self.cost.model_copy(update={"r": r})
        return compile_cost_function(
            self.target.operator, self.ansatz, spec, self.training, self.noise_rng
        )

    def annotate(self, theta: np.ndarray) -> Dict:
        if not self.with_diagnostics:
            return {}
        return diagnostics(theta, self.ansatz, self.target)

    def _bounds(self):
        return self.ansatz.resolved_bounds()

    def train(self, optimizer: OptimizerConfig, init: Sequence[float]) -> ScheduleResult:
        """Single-stage training for costs without a squeezing parameter."""
        result = minimize(
            self.objective(),
            init,
            optimizer,
            bounds=self._bounds(),
            annotate=self.annotate,
            seed=self.seed,
        )
        return ScheduleResult(
            params=result.params,
            value=result.value,
            records=result.records,
            stage_values=[result.value],
        )

    def train_with_r_schedule(
        self, schedule: ScheduleConfig, init: Sequence[float]
    ) -> ScheduleResult:
        """
        Train at each r in turn, warm-starting every stage at the previous optimum.
        """
        if self.cost.kind not in TMSS_KINDS:
            raise PreconditionError(
                f"Squeezing schedules apply to TMSS costs, not '{self.cost.kind}'"
            )
        theta = np.asarray(init, dtype=float)
        records: List[TrainRecord] = []
        stage_values: List[float] = []
        result: Optional[OptimizationResult] = None
        for stage, r in enumerate(schedule.r_values):
            result = minimize(
                self.objective(r),
                theta,
                schedule.stage_optimizer(stage),
                bounds=self._bounds(),
                annotate=self.annotate,
                stage=stage,
                r=r,
                iteration_offset=len(records),
                seed=self.seed,
            )
            records.extend(result.records)
            stage_values.append(result.value)
            theta = np.asarray(result.params)
            logger.info(f"stage={stage} r={r} cost={result.value:.3e}")

        diverged = stage_values[-1] > stage_values[0]
        if diverged:
            logger.warning(
                f"final cost {stage_values[-1]:.3e} exceeds first-stage cost "
                f"{stage_values[0]:.3e}"
            )
        return ScheduleResult(
            params=result.params,
            value=result.value,
            records=records,
            stage_values=stage_values,
            diverged=diverged,
        )


def train_with_r_schedule(
    target: TargetInstance,
    ansatz: AnsatzSpec,
    cost: CostSpec,
    schedule: ScheduleConfig,
    init: Sequence[float],
    seed: int,
) -> ScheduleResult:
    return CompileTrainer(target, ansatz, cost, seed=seed).train_with_r_schedule(
        schedule, init
    )
