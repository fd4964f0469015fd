"""
E2E тесты для полных сценариев: конфигурация -> запуск CLI -> файл записи.
"""

import math

import pytest

from cvcompile.cli.main import run
from cvcompile.utils.records import read_record

KERR_SCHEDULE = """
command = "compile"
seed = 4
cutoff = 12
init = "zeros"

[target]
kind = "kerr"
params = { chi = 0.3 }

[ansatz]
kind = "layered"
layers = 1

[cost]
kind = "LE-TMSS"

[schedule]
r_values = [0.1, 0.5]

[[schedule.optimizers]]
method = "quasi-newton"
max_evals = 3000
"""


@pytest.fixture
def run_to_file(tmp_path):
    """Запускает CLI и читает запись из файла."""

    def _run(*argv):
        out = tmp_path / "record.csv"
        code = run([*argv, "--out", str(out)])
        assert code == 0
        return read_record(out)

    return _run


class TestCompileScenario:
    """Сценарий компиляции гейта Керра с расписанием по r."""

    def test_kerr_schedule_converges(self, tmp_path, run_to_file):
        """Стоимость падает ниже 1e-6, HST на 5 уровнях мал."""
        # Arrange
        config = tmp_path / "kerr.toml"
        config.write_text(KERR_SCHEDULE, encoding="utf-8")

        # Act
        record = run_to_file("compile", "--config", str(config))

        # Assert
        summary = record.header.summary
        assert summary["final_cost"] <= 1e-6
        assert summary["final_hst_5"] < 1e-3
        assert not summary["diverged"]
        assert summary["final_errors"]["chi_sum"] == pytest.approx(0.0, abs=1e-2)
        costs = record.column("cost")
        assert costs[-1] <= costs[0]


class TestNflScenario:
    """Сценарии проверки No-Free-Lunch."""

    def test_orthogonal_risk_preset(self, run_to_file):
        """Каждая ячейка согласуется с теорией."""
        record = run_to_file("nfl", "--preset", "nfl-orthogonal")
        summary = record.header.summary
        assert summary["evaluated"] == summary["cells"] == 15
        assert summary["passed"] == summary["evaluated"]

    def test_entangled_risk_preset(self, run_to_file):
        """Запутанные данные: достижимые ячейки согласуются с теорией."""
        record = run_to_file(
            "nfl", "--preset", "nfl-entangled", "--threads", "2"
        )
        summary = record.header.summary
        assert summary["passed"] == summary["evaluated"]
        assert summary["evaluated"] < summary["cells"]


class TestVerifyScenario:
    """Полный набор проверок тождеств."""

    def test_verify_all(self, run_to_file):
        """Все проверки проходят."""
        record = run_to_file("verify", "--preset", "verify-all")
        assert record.header.summary["failed"] == []


class TestLandscapeScenario:
    """Ландшафт вокруг гауссовой цели при уменьшенном cutoff."""

    def test_large_r_is_more_sensitive(self, run_to_file):
        """При большом r стоимость вдали от оптимума выше."""
        # Act
        record = run_to_file(
            "landscape", "--preset", "landscape-gaussian", "--cutoff", "20"
        )

        # Assert
        plateau = record.header.summary["largest_eps_mean_cost"]
        assert plateau["2.5"] > plateau["0.1"]
        exact = record.header.summary["decay_slope_exact"]
        assert exact == pytest.approx(math.log(1 / math.cosh(1.0)))
