import logging
from typing import Any, Dict, List

from ..core.logging import timed
from ..fock.states import build_training_set
from ..schemas.cost import TMSS_KINDS, CostSpec
from ..schemas.records import ExperimentConfig, ExperimentRecord
from ..services.trainer import CompileTrainer, build_target, initial_parameters
from ..utils.datetime import utc_now
from ..utils.rng import make_rng
from ..validators.experiment_validators import ExperimentValidators
from .base import ExperimentUseCase

logger = logging.getLogger(__name__)

BASE_COLUMNS = [
    "iteration",
    "stage",
    "r",
    "cost",
    "n_evals",
    "hst_5",
    "hst_50",
    "penalized",
    "wall_time",
    "seed",
]


def simulated_modes(cost: CostSpec, modes: int) -> int:
    """Modes held in memory while the cost is evaluated."""
    if cost.kind in TMSS_KINDS:
        return 2 * modes
    if cost.kind == "ECFS":
        return modes + 1
    return modes


class RunCompileUseCase(ExperimentUseCase):
    command = "compile"

    def execute(self, config: ExperimentConfig) -> ExperimentRecord:
        started_at = utc_now()
        cost = config.cost
        if config.shots is not None:
            cost = cost.model_copy(update={"shots": config.shots})
        ExperimentValidators.validate_amplitude_budget(
            config.cutoff,
            simulated_modes(cost, config.target.modes),
            config.allow_large,
        )

        rng = make_rng(config.seed)
        target = build_target(config.target, config.cutoff, rng)
        training = None
        if cost.needs_training:
            kind = "entangled-coherent-fock" if cost.kind == "ECFS" else "coherent"
            training = build_training_set(
                target.operator, kind, cost.k, cost.energy, rng, rank=cost.rank
            )

        trainer = CompileTrainer(
            target, config.ansatz, cost, training=training, seed=config.seed
        )
        init = initial_parameters(
            config.ansatz, config.init, rng, target, config.init_range
        )
        with timed(logger, f"compile target={target.kind} cost={cost.kind}"):
            if cost.kind in TMSS_KINDS:
                result = trainer.train_with_r_schedule(config.schedule, init)
            else:
                result = trainer.train(config.schedule.stage_optimizer(0), init)

        names = config.ansatz.parameter_names()
        error_names: List[str] = []
        for rec in result.records:
            error_names.extend(n for n in rec.errors if n not in error_names)

        rows: List[Dict[str, Any]] = []
        for rec in result.records:
            row = rec.model_dump(include=set(BASE_COLUMNS))
            row.update({f"err_{n}": v for n, v in rec.errors.items()})
            row.update(dict(zip(names, rec.params)))
            rows.append(row)

        last = result.records[-1]
        summary = {
            "target": {"kind": target.kind, "params": target.params},
            "final_cost": result.value,
            "final_hst_5": last.hst_5,
            "final_hst_50": last.hst_50,
            "final_errors": last.errors,
            "final_params": result.params,
            "stage_values": result.stage_values,
            "diverged": result.diverged,
            "training_size": training.size if training is not None else 0,
        }
        columns = BASE_COLUMNS + [f"err_{n}" for n in error_names] + names
        return self._record(config, started_at, columns, rows, summary)
