"""
Интеграционные тесты для сценариев экспериментов.
"""

import numpy as np
import pytest

from cvcompile.core.exceptions import ResourceRefusalError
from cvcompile.schemas.records import ExperimentConfig
from cvcompile.use_cases import (
    RunCompileUseCase,
    RunLandscapeUseCase,
    RunNflUseCase,
    RunVerifyUseCase,
)
from cvcompile.utils.records import check_columns


def _config(**data) -> ExperimentConfig:
    data.setdefault("seed", 11)
    return ExperimentConfig.model_validate(data)


class TestCompileUseCase:
    """Тесты для сценария компиляции."""

    def test_kerr_from_exact_start(self):
        """Старт в точном решении: нулевая стоимость на каждом этапе."""
        # Arrange
        config = _config(
            command="compile",
            cutoff=10,
            target={"kind": "kerr", "params": {"chi": 0.2}},
            ansatz={"kind": "layered", "layers": 1},
            cost={"kind": "LE-TMSS"},
            schedule={"r_values": [0.1, 0.5]},
            init="target",
        )

        # Act
        record = RunCompileUseCase(run_id="kerr").execute(config)

        # Assert
        summary = record.header.summary
        assert record.header.command == "compile"
        assert record.header.run_id == "kerr"
        assert summary["final_cost"] < 1e-12
        assert len(summary["stage_values"]) == 2
        assert summary["training_size"] == 0
        assert "chi_1" in record.header.columns
        assert "err_chi_sum" in record.header.columns
        assert set(record.column("stage")) == {0, 1}
        check_columns("compile", record.header.columns)

    def test_training_set_cost(self):
        """ACS строит обучающий набор из k когерентных состояний."""
        config = _config(
            command="compile",
            cutoff=12,
            target={"kind": "gaussian", "random": True},
            ansatz={"kind": "gaussian"},
            cost={"kind": "ACS", "k": 2},
            schedule={"r_values": [0.0]},
            init="target",
        )
        record = RunCompileUseCase().execute(config)
        assert record.header.summary["training_size"] == 2
        assert record.header.summary["final_cost"] < 1e-10

    def test_resource_refusal_before_work(self):
        """Слишком большая конфигурация отклоняется с рекомендацией."""
        config = _config(
            command="compile",
            cutoff=512,
            target={"kind": "beamsplitter", "random": True},
            ansatz={"kind": "two-mode-layered"},
            cost={"kind": "LE-TMSS"},
            schedule={"r_values": [0.1]},
        )
        with pytest.raises(ResourceRefusalError) as exc_info:
            RunCompileUseCase().execute(config)
        assert exc_info.value.suggested_cutoff == 64


class TestNflUseCase:
    """Тесты для сценария NFL."""

    def test_risk_grid(self):
        """Недостижимые ячейки пропускаются, остальные оцениваются."""
        # Arrange
        config = _config(
            command="nfl",
            nfl={"ms": [1], "ranks": [1, 2], "n_samples": 200},
        )

        # Act
        record = RunNflUseCase().execute(config)

        # Assert
        assert record.header.summary["cells"] == 6
        assert record.header.summary["evaluated"] == 5
        skipped = [row for row in record.rows if row["skipped"]]
        assert [(row["rank"], row["set_size"]) for row in skipped] == [(2, 2)]
        theory = {
            (row["rank"], row["set_size"]): row["theory"]
            for row in record.rows
            if not row["skipped"]
        }
        assert theory[(1, 0)] == pytest.approx(0.5)
        assert theory[(1, 1)] == pytest.approx(0.25)
        assert theory[(2, 1)] == pytest.approx(0.0)

    def test_symplectic_skips_odd(self):
        """Для симплектик нечётные размерности согласия пропускаются."""
        config = _config(
            command="nfl",
            nfl={"kind": "symplectic", "ms": [1], "n_samples": 50},
        )
        record = RunNflUseCase().execute(config)
        skipped = {row["set_size"] for row in record.rows if row["skipped"]}
        assert skipped == {1}

    def test_covariance_mode(self):
        """Ковариационный риск с точной теорией и эффектом размера набора."""
        config = _config(
            command="nfl",
            nfl={
                "mode": "covariance",
                "ms": [2],
                "set_sizes": [0, 2, 6],
                "n_samples": 40,
                "n_sigma_samples": 5,
            },
        )
        record = RunNflUseCase().execute(config)
        assert [row["skipped"] for row in record.rows] == [False, False, True]
        effect = record.header.summary["set_size_effect"]["2"]
        assert effect["exact"] < 0

    @pytest.mark.reproducibility
    def test_threads_do_not_change_numbers(self):
        """Число потоков не влияет на результаты."""
        data = {"command": "nfl", "nfl": {"ms": [2], "n_samples": 600}}
        single = RunNflUseCase().execute(_config(threads=1, **data))
        pooled = RunNflUseCase().execute(_config(threads=3, **data))
        assert single.numeric_rows() == pooled.numeric_rows()


class TestLandscapeUseCase:
    """Тесты для сценария ландшафта."""

    def test_scan_and_gradient_table(self):
        """Скан вокруг оптимума и таблица градиентов."""
        # Arrange
        config = _config(
            command="landscape",
            cutoff=10,
            target={"kind": "kerr", "params": {"chi": 0.3}},
            ansatz={"kind": "layered", "layers": 1},
            landscape={
                "r_values": [0.5],
                "eps_grid": [0.0, 0.1],
                "samples": 2,
                "grad_ms": [1, 2],
                "grad_samples": 50,
            },
        )

        # Act
        record = RunLandscapeUseCase().execute(config)

        # Assert
        sections = record.column("section")
        assert sections.count("scan") == 4
        assert sections.count("gradient") == 2
        origin = [
            row["value"]
            for row in record.rows
            if row["section"] == "scan" and row["eps"] == 0.0
        ]
        assert max(origin) < 1e-12
        summary = record.header.summary
        assert summary["decay_slope_exact"] == pytest.approx(
            np.log(1 / np.cosh(1.0))
        )


class TestVerifyUseCase:
    """Тесты для сценария проверок."""

    def test_small_suite(self):
        """Все три набора проверок дают строки с допусками."""
        # Arrange
        config = _config(
            command="verify",
            verify={
                "ranks": [2],
                "r_values": [0.5],
                "ricochet_samples": 200,
                "gce_pairs": 2,
                "gce_cutoff": 6,
                "integral_m": 1,
                "integral_samples": 200,
            },
        )

        # Act
        record = RunVerifyUseCase().execute(config)

        # Assert
        names = record.column("name")
        assert len(names) == 9
        by_name = {row["name"]: row for row in record.rows}
        for name in (
            "gce_identity",
            "normalized_zero_on_phase",
            "normalized_positive_off_phase",
            "integral_identity_ii",
            "integral_identity_ij",
        ):
            assert by_name[name]["passed"], name
        assert record.header.summary["checks"] == 9

    def test_suite_subset(self):
        """Можно запустить только часть наборов."""
        config = _config(
            command="verify",
            verify={"suites": ["inner-product"], "gce_pairs": 1, "gce_cutoff": 4},
        )
        record = RunVerifyUseCase().execute(config)
        assert set(record.column("suite")) == {"inner-product"}
