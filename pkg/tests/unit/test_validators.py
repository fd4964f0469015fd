"""
Unit тесты для валидаторов.
"""

import numpy as np
import pytest

from cvcompile.core.exceptions import (
    InvalidArgumentError,
    OutOfRangeError,
    ResourceRefusalError,
)
from cvcompile.validators import ExperimentValidators, FockValidators, NflValidators


class TestExperimentValidators:
    """Тесты для бюджета амплитуд."""

    @pytest.mark.parametrize(
        "modes, budget, expected",
        [(2, 100, 10), (3, 1000, 10), (3, 999, 9), (4, 2**24, 64), (30, 10, 2)],
    )
    def test_suggested_cutoff(self, modes, budget, expected):
        """Наибольший cutoff, укладывающийся в бюджет (не меньше 2)."""
        assert ExperimentValidators.suggested_cutoff(modes, budget) == expected

    def test_within_budget(self):
        """Конфигурация в пределах бюджета проходит."""
        ExperimentValidators.validate_amplitude_budget(10, 2, budget=100)

    def test_over_budget_refused(self):
        """Превышение бюджета - отказ с рекомендацией."""
        with pytest.raises(ResourceRefusalError) as exc_info:
            ExperimentValidators.validate_amplitude_budget(11, 2, budget=100)
        assert exc_info.value.suggested_cutoff == 10
        assert "--cutoff 10" in exc_info.value.message

    def test_allow_large(self):
        """Флаг allow_large снимает ограничение."""
        ExperimentValidators.validate_amplitude_budget(
            11, 2, allow_large=True, budget=100
        )


class TestFockValidators:
    """Тесты для проверок фоковских аргументов."""

    def test_cutoff(self):
        """cutoff - целое не меньше 2."""
        FockValidators.validate_cutoff(np.int64(3))
        with pytest.raises(InvalidArgumentError):
            FockValidators.validate_cutoff(1)
        with pytest.raises(InvalidArgumentError, match="integer"):
            FockValidators.validate_cutoff(2.5)

    def test_level(self):
        """Уровень лежит в 0..cutoff-1."""
        FockValidators.validate_level(3, 4)
        with pytest.raises(OutOfRangeError):
            FockValidators.validate_level(4, 4)

    @pytest.mark.parametrize("targets", [[], [0, 0], [2]])
    def test_bad_targets(self, targets):
        """Пустые, повторяющиеся и внешние моды отклоняются."""
        with pytest.raises(InvalidArgumentError):
            FockValidators.validate_targets(targets, 2)

    def test_hermitian(self):
        """Генератор должен быть эрмитовым."""
        FockValidators.validate_hermitian(np.array([[1, 1j], [-1j, 0]]))
        with pytest.raises(InvalidArgumentError, match="Hermitian"):
            FockValidators.validate_hermitian(np.array([[0, 1], [0, 0]]))


class TestNflValidators:
    """Тесты для проверок NFL-аргументов."""

    def test_dimension(self):
        """Размерность чётная и не меньше 2."""
        NflValidators.validate_dimension(4)
        with pytest.raises(InvalidArgumentError):
            NflValidators.validate_dimension(5)

    def test_agree_dim(self):
        """Размерность согласия в пределах 0..2m и чётная для симплектик."""
        NflValidators.validate_agree_dim(3, 2, "orthogonal")
        with pytest.raises(InvalidArgumentError, match="even"):
            NflValidators.validate_agree_dim(3, 2, "symplectic")
        with pytest.raises(InvalidArgumentError):
            NflValidators.validate_agree_dim(5, 2, "orthogonal")

    def test_D(self):
        """Граница сжатия больше единицы."""
        with pytest.raises(InvalidArgumentError, match="exceed 1"):
            NflValidators.validate_D(1.0)
