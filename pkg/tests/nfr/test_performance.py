"""
NFR тесты производительности.

Проверяют:
- Время вычисления стоимостей при cutoff 50
- Факторизованный путь локальной стоимости без плотных операторов
- Отказ по бюджету до выделения памяти
"""

import numpy as np
import pytest

from cvcompile.core.exceptions import ResourceRefusalError
from cvcompile.schemas.hilbert import ProductOperator
from cvcompile.services.costs import le_tmss_cost, le_tmss_local_cost
from cvcompile.services.landscape import analytic_phase_cost, grad_magnitude_mc
from cvcompile.validators import ExperimentValidators
from tests.helpers import random_unitary

pytest.importorskip("pytest_benchmark")
psutil = pytest.importorskip("psutil")


@pytest.fixture(scope="module")
def cutoff50_pair():
    """Пара унитарных операторов при cutoff=50."""
    rng = np.random.default_rng(77)
    return random_unitary(50, rng), random_unitary(50, rng)


class TestCostTiming:
    """Тесты времени вычисления стоимостей."""

    def test_le_tmss_cutoff_50(self, cutoff50_pair, benchmark):
        """LE-TMSS на одной моде при cutoff 50."""
        U, V = cutoff50_pair

        value = benchmark(le_tmss_cost, U, V, 0.5)

        assert 0.0 <= value <= 1.0
        # одна оценка должна укладываться в 0.5s
        assert (
            benchmark.stats["mean"] < 0.5
        ), f"LE-TMSS too slow: {benchmark.stats['mean']:.4f}s"

    def test_gradient_table(self, benchmark):
        """Монте-Карло градиента по замкнутой форме."""
        rng = np.random.default_rng(1)

        def table():
            return grad_magnitude_mc(
                lambda phis: analytic_phase_cost(phis, 0.5), 4, 500, 1e-5, rng
            )

        mean, _ = benchmark(table)
        assert mean > 0
        assert benchmark.stats["mean"] < 2.0


class TestMemory:
    """Тесты потребления памяти."""

    def test_local_cost_stays_factored(self):
        """Локальная стоимость на трёх модах не собирает плотный оператор."""
        # Arrange
        rng = np.random.default_rng(3)
        U = ProductOperator(factors=tuple(random_unitary(20, rng) for _ in range(3)))
        V = ProductOperator(factors=tuple(random_unitary(20, rng) for _ in range(3)))
        process = psutil.Process()
        before = process.memory_info().rss

        # Act
        value = le_tmss_local_cost(U, V, 0.5)

        # Assert
        grown = process.memory_info().rss - before
        assert 0.0 <= value <= 1.0
        # плотный 8000 x 8000 complex занял бы около 1 GB
        assert grown < 200 * 1024 * 1024, f"RSS grew by {grown / 2**20:.0f} MB"

    def test_refusal_before_allocation(self):
        """Отказ по бюджету не выделяет память."""
        process = psutil.Process()
        before = process.memory_info().rss

        with pytest.raises(ResourceRefusalError):
            ExperimentValidators.validate_amplitude_budget(512, 4)

        assert process.memory_info().rss - before < 16 * 1024 * 1024
