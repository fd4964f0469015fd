import logging
from typing import Any, Dict, List

import numpy as np

from ..core.logging import timed
from ..fock.core import expm_hermitian
from ..schemas.hilbert import HilbertSpec, Operator
from ..schemas.records import ExperimentConfig, ExperimentRecord, VerifyConfig
from ..services.costs import gce_inner_product, r_tmss_normalized, ricochet_overlap
from ..services.nfl import (
    haar_orthogonal,
    haar_unitary,
    group_integral_mc,
    ricochet_modulus_closed_form,
    ricochet_modulus_mc,
)
from ..utils.datetime import utc_now
from ..utils.rng import child_sequences, make_rng
from .base import ExperimentUseCase

logger = logging.getLogger(__name__)

COLUMNS = [
    "suite",
    "name",
    "rank",
    "r",
    "value",
    "theory",
    "theory_alt",
    "stderr",
    "allowance",
    "passed",
]

IDENTITY_TOLERANCE = 1e-8
FAITHFUL_ZERO = 1e-10
FAITHFUL_FLOOR = 1e-4
PERTURBATION = 0.3

SUITES = ("ricochet", "inner-product", "group-integral")


class RunVerifyUseCase(ExperimentUseCase):
    command = "verify"

    def execute(self, config: ExperimentConfig) -> ExperimentRecord:
        started_at = utc_now()
        verify = config.verify or VerifyConfig()
        threads = self._threads(config)
        streams = dict(
            zip(SUITES, child_sequences(make_rng(config.seed), len(SUITES)))
        )

        rows: List[Dict[str, Any]] = []
        for suite in verify.suites:
            rng = np.random.default_rng(streams[suite])
            with timed(logger, f"verify suite={suite}"):
                if suite == "ricochet":
                    rows.extend(self._ricochet_rows(verify, rng, threads))
                elif suite == "inner-product":
                    rows.extend(self._inner_product_rows(verify, rng))
                else:
                    rows.extend(self._integral_rows(verify, rng, threads))

        summary = {
            "checks": len(rows),
            "passed": sum(bool(row["passed"]) for row in rows),
            "failed": [row["name"] for row in rows if not row["passed"]],
        }
        return self._record(config, started_at, COLUMNS, rows, summary)

    def _ricochet_rows(self, verify: VerifyConfig, rng, threads) -> List[Dict]:
        rows = []
        cells = [(k, r) for k in verify.ranks for r in verify.r_values]
        cells.append((verify.limit_rank, verify.limit_r))
        streams = child_sequences(rng, len(cells))
        for index, ((rank, r), stream) in enumerate(zip(cells, streams)):
            mean, stderr = ricochet_modulus_mc(
                rank,
                r,
                verify.ricochet_samples,
                np.random.default_rng(stream),
                threads,
            )
            limit = index == len(cells) - 1
            if limit:
                theory = 1.0
                allowance = 2 * (rank - 1) * np.exp(-2 * r) + 3 * stderr
                name = "ricochet_limit"
            else:
                theory = ricochet_modulus_closed_form(rank, r)
                allowance = 0.02 * theory + 3 * stderr
                name = "ricochet_modulus"
            rows.append(
                {
                    "suite": "ricochet",
                    "name": name,
                    "rank": rank,
                    "r": r,
                    "value": mean,
                    "theory": theory,
                    "theory_alt": ricochet_modulus_closed_form(rank, r),
                    "stderr": stderr,
                    "allowance": float(allowance),
                    "passed": abs(mean - theory) <= allowance,
                }
            )
        return rows

    def _inner_product_rows(self, verify: VerifyConfig, rng) -> List[Dict]:
        spec = HilbertSpec(cutoff=verify.gce_cutoff)
        r = verify.gce_r
        worst_identity = 0.0
        worst_zero = 0.0
        smallest_perturbed = np.inf
        for _ in range(verify.gce_pairs):
            U = Operator(matrix=haar_unitary(spec.cutoff, rng), spec=spec)
            V = Operator(matrix=haar_unitary(spec.cutoff, rng), spec=spec)
            gap = abs(gce_inner_product(U, V, r) - ricochet_overlap(U, V, r))
            worst_identity = max(worst_identity, gap)

            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            twin = Operator(matrix=phase * U.matrix, spec=spec)
            worst_zero = max(worst_zero, r_tmss_normalized(U, twin, r))

            G = rng.standard_normal((spec.cutoff,) * 2) + 1j * rng.standard_normal(
                (spec.cutoff,) * 2
            )
            H = (G + G.conj().T) / 2
            H /= np.linalg.norm(H, 2)
            kicked = Operator(
                matrix=U.matrix @ expm_hermitian(PERTURBATION * H), spec=spec
            )
            smallest_perturbed = min(
                smallest_perturbed, r_tmss_normalized(U, kicked, r)
            )

        base = {"suite": "inner-product", "r": r}
        return [
            {
                **base,
                "name": "gce_identity",
                "value": worst_identity,
                "theory": 0.0,
                "allowance": IDENTITY_TOLERANCE,
                "passed": worst_identity <= IDENTITY_TOLERANCE,
            },
            {
                **base,
                "name": "normalized_zero_on_phase",
                "value": worst_zero,
                "theory": 0.0,
                "allowance": FAITHFUL_ZERO,
                "passed": worst_zero <= FAITHFUL_ZERO,
            },
            {
                **base,
                "name": "normalized_positive_off_phase",
                "value": float(smallest_perturbed),
                "allowance": FAITHFUL_FLOOR,
                "passed": smallest_perturbed >= FAITHFUL_FLOOR,
            },
        ]

    def _integral_rows(self, verify: VerifyConfig, rng, threads) -> List[Dict]:
        dim = 2 * verify.integral_m
        matrices = {
            "identity": np.eye(dim),
            "orthogonal": haar_orthogonal(dim, rng).matrix,
        }
        streams = child_sequences(rng, len(matrices))
        rows = []
        for (label, L), stream in zip(matrices.items(), streams):
            estimate = group_integral_mc(
                L, 0, 1, verify.integral_samples, np.random.default_rng(stream), threads
            )
            for part, mean, stderr, theory, alt in (
                ("ii", estimate.mean_ii, estimate.stderr_ii, estimate.theory_ii, None),
                (
                    "ij",
                    estimate.mean_ij,
                    estimate.stderr_ij,
                    estimate.theory_ij,
                    estimate.theory_ij_alt,
                ),
            ):
                allowance = max(0.01 * abs(theory), 3 * stderr, 1e-12)
                rows.append(
                    {
                        "suite": "group-integral",
                        "name": f"integral_{label}_{part}",
                        "value": mean,
                        "theory": theory,
                        "theory_alt": alt,
                        "stderr": stderr,
                        "allowance": allowance,
                        "passed": abs(mean - theory) <= allowance,
                    }
                )
        return rows
