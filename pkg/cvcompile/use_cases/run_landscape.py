import logging
from typing import Any, Dict, List

import numpy as np

from ..core.logging import timed
from ..schemas.records import ExperimentConfig, ExperimentRecord
from ..services.landscape import (
    analytic_grad_expectation,
    analytic_local_grad_expectation,
    analytic_local_phase_cost,
    analytic_phase_cost,
    decay_slope,
    exact_decay_slope,
    grad_expectation_exact,
    grad_magnitude_mc,
    landscape_scan,
    local_grad_expectation_exact,
    per_mode_decay,
)
from ..services.trainer import build_target, initial_parameters
from ..utils.datetime import utc_now
from ..utils.rng import child_sequences, make_rng
from ..validators.experiment_validators import ExperimentValidators
from .base import ExperimentUseCase

logger = logging.getLogger(__name__)

COLUMNS = [
    "section",
    "r",
    "eps",
    "sample",
    "value",
    "m",
    "analytic",
    "analytic_local",
    "exact",
    "exact_local",
    "mc_mean",
    "mc_stderr",
    "mc_local_mean",
    "mc_local_stderr",
]


class RunLandscapeUseCase(ExperimentUseCase):
    command = "landscape"

    def execute(self, config: ExperimentConfig) -> ExperimentRecord:
        started_at = utc_now()
        land = config.landscape
        ExperimentValidators.validate_amplitude_budget(
            config.cutoff, 2 * config.target.modes, config.allow_large
        )
        rng = make_rng(config.seed)
        target = build_target(config.target, config.cutoff, rng)
        theta_opt = initial_parameters(config.ansatz, "target", rng, target)
        threads = self._threads(config)
        scan_streams = child_sequences(rng, len(land.r_values))
        grad_streams = child_sequences(rng, 2 * len(land.grad_ms))

        rows: List[Dict[str, Any]] = []
        plateau: Dict[str, float] = {}
        with timed(logger, f"landscape scans r={land.r_values}"):
            for r, stream in zip(land.r_values, scan_streams):
                scan = landscape_scan(
                    target.operator,
                    config.ansatz,
                    theta_opt,
                    land.eps_grid,
                    land.samples,
                    land.cost_kind,
                    r,
                    np.random.default_rng(stream),
                    seed=config.seed,
                )
                for eps, values in zip(scan.eps_grid, scan.values):
                    for k, value in enumerate(values):
                        rows.append(
                            {
                                "section": "scan",
                                "r": r,
                                "eps": eps,
                                "sample": k,
                                "value": value,
                            }
                        )
                plateau[str(r)] = scan.means()[-1]

        means: List[float] = []
        with timed(logger, f"gradient table ms={land.grad_ms}"):
            for i, m in enumerate(land.grad_ms):
                r = land.grad_r
                mean, stderr = grad_magnitude_mc(
                    lambda phis: analytic_phase_cost(phis, r),
                    m,
                    land.grad_samples,
                    land.grad_fd_step,
                    np.random.default_rng(grad_streams[2 * i]),
                    threads,
                )
                local_mean, local_stderr = grad_magnitude_mc(
                    lambda phis: analytic_local_phase_cost(phis, r),
                    m,
                    land.grad_samples,
                    land.grad_fd_step,
                    np.random.default_rng(grad_streams[2 * i + 1]),
                    threads,
                )
                means.append(mean)
                rows.append(
                    {
                        "section": "gradient",
                        "r": r,
                        "m": m,
                        "analytic": analytic_grad_expectation(r, m),
                        "analytic_local": analytic_local_grad_expectation(r, m),
                        "exact": grad_expectation_exact(r, m),
                        "exact_local": local_grad_expectation_exact(r, m),
                        "mc_mean": mean,
                        "mc_stderr": stderr,
                        "mc_local_mean": local_mean,
                        "mc_local_stderr": local_stderr,
                    }
                )

        summary: Dict[str, Any] = {
            "theta_opt": [float(v) for v in theta_opt],
            "largest_eps_mean_cost": plateau,
        }
        if len(land.grad_ms) >= 2 and all(v > 0 for v in means):
            summary["decay_slope_mc"] = decay_slope(land.grad_ms, means)
            summary["decay_slope_exact"] = exact_decay_slope(land.grad_r)
            summary["decay_slope_closed_form"] = float(
                np.log(per_mode_decay(land.grad_r))
            )
        return self._record(config, started_at, COLUMNS, rows, summary)
