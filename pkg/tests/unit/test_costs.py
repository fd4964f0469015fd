"""
Unit тесты для функций стоимости компиляции.
"""

import numpy as np
import pytest

from cvcompile.core.exceptions import (
    DegenerateInputError,
    InvalidArgumentError,
    UnsupportedSizeError,
)
from cvcompile.fock.gates import kerr, rotation
from cvcompile.fock.states import build_training_set, tmss
from cvcompile.schemas.cost import CostSpec
from cvcompile.schemas.hilbert import HilbertSpec, Operator, ProductOperator
from cvcompile.services.costs import (
    CostEvaluator,
    _tmss_array,
    _tmss_coefficients,
    acs_cost,
    acs_local_cost,
    ecfs_cost,
    gce_inner_product,
    hst_truncated,
    le_tmss_cost,
    le_tmss_local_cost,
    le_tmss_local_via_fidelity,
    r_tmss_cost,
    r_tmss_local_cost,
    r_tmss_normalized,
    ricochet_overlap,
)
from tests.helpers import random_unitary


class TestHst:
    """Тесты для усечённого HST."""

    def test_zero_for_equal_unitaries(self, unitary_pair):
        """HST равен нулю при U = V."""
        U, _ = unitary_pair
        assert hst_truncated(U, U, 4) == pytest.approx(0.0, abs=1e-12)

    def test_global_phase_invariant(self, unitary_pair):
        """Глобальная фаза не меняет стоимость."""
        U, _ = unitary_pair
        twin = Operator(matrix=np.exp(0.7j) * U.matrix, spec=U.spec)
        assert hst_truncated(U, twin, 6) == pytest.approx(0.0, abs=1e-12)

    def test_truncation_out_of_range(self, unitary_pair):
        """d вне 1..cutoff отклоняется."""
        U, V = unitary_pair
        with pytest.raises(InvalidArgumentError, match="HST truncation"):
            hst_truncated(U, V, 7)

    def test_product_matches_dense(self, rng):
        """Факторизованный путь совпадает с плотным."""
        # Arrange
        U = ProductOperator(
            factors=(random_unitary(4, rng), random_unitary(4, rng))
        )
        V = ProductOperator(
            factors=(random_unitary(4, rng), random_unitary(4, rng))
        )

        # Act & Assert
        assert hst_truncated(U, V, 3) == pytest.approx(
            hst_truncated(U.dense(), V.dense(), 3), abs=1e-12
        )

    def test_different_spaces(self, rng):
        """Операторы на разных пространствах несравнимы."""
        with pytest.raises(InvalidArgumentError, match="different spaces"):
            hst_truncated(random_unitary(4, rng), random_unitary(5, rng), 2)


class TestTmssCosts:
    """Тесты для стоимостей на основе TMSS."""

    def test_tmss_cache_keeps_coefficients_only(self):
        """В кэше только коэффициенты Шмидта, вектор TMSS строится заново."""
        # Arrange
        r, m, cutoff = 0.4, 2, 6

        # Act
        first = _tmss_array(r, m, cutoff)
        second = _tmss_array(r, m, cutoff)

        # Assert
        assert np.allclose(first, tmss(r, m, cutoff).amplitudes)
        assert first is not second
        assert _tmss_coefficients(r, m, cutoff).size == cutoff**m
        assert not hasattr(_tmss_array, "cache_info")

    def test_le_tmss_zero_at_target(self, unitary_pair):
        """LE-TMSS обращается в ноль при U = V."""
        U, _ = unitary_pair
        assert le_tmss_cost(U, U, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_le_tmss_in_unit_interval(self, unitary_pair):
        """Стоимость лежит в [0, 1]."""
        U, V = unitary_pair
        value = le_tmss_cost(U, V, 0.8)
        assert 0.0 <= value <= 1.0

    def test_le_tmss_vacuum_limit(self, unitary_pair):
        """При r = 0 остаётся только вакуумная компонента."""
        U, V = unitary_pair
        expected = 1 - abs(np.vdot(V.matrix[0], U.matrix[0])) ** 2
        assert le_tmss_cost(U, V, 0.0) == pytest.approx(expected, abs=1e-12)

    def test_le_tmss_checks_declared_size(self, unitary_pair):
        """Явно заданные m и cutoff должны совпадать."""
        U, V = unitary_pair
        with pytest.raises(InvalidArgumentError, match="m=2"):
            le_tmss_cost(U, V, 0.5, m=2)
        with pytest.raises(InvalidArgumentError, match="cutoff=7"):
            le_tmss_cost(U, V, 0.5, cutoff=7)

    def test_ricochet_equals_le_tmss_against_identity(
        self, unitary_pair, identity_op
    ):
        """При V = I обе стоимости совпадают."""
        U, _ = unitary_pair
        assert r_tmss_cost(U, identity_op, 0.6) == pytest.approx(
            le_tmss_cost(U, identity_op, 0.6), abs=1e-12
        )

    def test_ricochet_zero_for_diagonal_unitary(self):
        """Для диагональных операторов ricochet-стоимость нулевая при U = V."""
        U = kerr(0.4, 8)
        assert r_tmss_cost(U, U, 0.7) == pytest.approx(0.0, abs=1e-12)

    def test_gce_inner_product_is_ricochet_overlap(self, unitary_pair):
        """Скалярное произведение совпадает с амплитудой ricochet."""
        U, V = unitary_pair
        assert gce_inner_product(U, V, 0.5) == pytest.approx(
            ricochet_overlap(U, V, 0.5), abs=1e-10
        )

    def test_gce_inner_product_needs_positive_r(self, unitary_pair):
        """r = 0 недопустимо."""
        U, V = unitary_pair
        with pytest.raises(InvalidArgumentError, match="r > 0"):
            gce_inner_product(U, V, 0.0)

    def test_normalized_zero_on_phase_twin(self, unitary_pair):
        """Нормированная стоимость нулевая для U и e^{i phi} U."""
        U, _ = unitary_pair
        twin = Operator(matrix=np.exp(-1.1j) * U.matrix, spec=U.spec)
        assert r_tmss_normalized(U, twin, 0.5) == pytest.approx(0.0, abs=1e-10)

    def test_normalized_degenerate(self):
        """Нулевой нормировщик даёт DegenerateInputError."""
        spec = HilbertSpec(cutoff=3)
        zero = Operator(matrix=np.zeros((3, 3)), spec=spec)
        with pytest.raises(DegenerateInputError):
            r_tmss_normalized(zero, zero, 0.5)

    def test_local_product_path_matches_dense(self, rng):
        """Локальная стоимость одинакова для произведения и плотной формы."""
        # Arrange
        U = ProductOperator(
            factors=(random_unitary(5, rng), random_unitary(5, rng))
        )
        V = ProductOperator(
            factors=(random_unitary(5, rng), random_unitary(5, rng))
        )

        # Act
        fast = le_tmss_local_cost(U, V, 0.4)
        dense = le_tmss_local_cost(U.dense(), V.dense(), 0.4)

        # Assert
        assert fast == pytest.approx(dense, abs=1e-10)

    def test_local_cost_matches_fidelity_route(self, rng):
        """Локальная стоимость через точности каналов совпадает с прямой."""
        U = random_unitary(4, rng, modes=2)
        V = random_unitary(4, rng, modes=2)
        assert le_tmss_local_cost(U, V, 0.5) == pytest.approx(
            le_tmss_local_via_fidelity(U, V, 0.5), abs=1e-10
        )

    def test_local_cost_single_mode_equals_global(self, unitary_pair):
        """Для одной моды локальная стоимость равна глобальной."""
        U, V = unitary_pair
        assert le_tmss_local_cost(U, V, 0.5) == pytest.approx(
            le_tmss_cost(U, V, 0.5), abs=1e-10
        )

    def test_local_not_above_global(self, rng):
        """Локальная стоимость не превышает глобальную."""
        U = random_unitary(4, rng, modes=2)
        V = random_unitary(4, rng, modes=2)
        assert le_tmss_local_cost(U, V, 0.5) <= le_tmss_cost(U, V, 0.5) + 1e-12

    def test_fidelity_route_refuses_large(self):
        """Оракул через точности ограничен по размеру."""
        single = Operator(matrix=np.eye(20), spec=HilbertSpec(cutoff=20))
        identity = ProductOperator(factors=(single,) * 3)
        with pytest.raises(UnsupportedSizeError):
            le_tmss_local_via_fidelity(identity, identity, 0.5)

    def test_ricochet_local_zero_for_diagonal(self):
        """Локальная ricochet-стоимость обнуляется на диагональном U = V."""
        U = ProductOperator(factors=(rotation(0.3, 6), kerr(0.2, 6)))
        assert r_tmss_local_cost(U, U, 0.5) == pytest.approx(0.0, abs=1e-12)


class TestTrainingCosts:
    """Тесты для стоимостей на обучающих состояниях."""

    def test_acs_zero_at_target(self, rng):
        """ACS обращается в ноль при U = V."""
        # Arrange
        U = random_unitary(12, rng)
        training = build_training_set(U, "coherent", 2, 1.0, rng)

        # Act & Assert
        assert acs_cost(U, U, training) == pytest.approx(0.0, abs=1e-12)
        assert acs_local_cost(U, U, training) == pytest.approx(
            0.0, abs=1e-10
        )

    def test_acs_positive_off_target(self, rng):
        """ACS положительна для различных операторов."""
        U, V = random_unitary(12, rng), random_unitary(12, rng)
        training = build_training_set(U, "coherent", 2, 1.0, rng)
        assert acs_cost(U, V, training) > 1e-3

    def test_ecfs_zero_at_target(self, rng):
        """ECFS обращается в ноль при U = V."""
        U = random_unitary(10, rng)
        training = build_training_set(
            U, "entangled-coherent-fock", 1, 1.0, rng, rank=2
        )
        assert ecfs_cost(U, U, training) == pytest.approx(0.0, abs=1e-12)

    def test_wrong_training_kind(self, rng):
        """ECFS не принимает когерентные состояния."""
        U = random_unitary(10, rng)
        training = build_training_set(U, "coherent", 1, 1.0, rng)
        with pytest.raises(InvalidArgumentError, match="training states"):
            ecfs_cost(U, U, training)


class TestCostEvaluator:
    """Тесты для CostEvaluator."""

    def test_dispatch_matches_functions(self, unitary_pair):
        """Оценщик вызывает соответствующую функцию."""
        U, V = unitary_pair
        assert CostEvaluator(CostSpec(kind="LE-TMSS", r=0.3))(
            U, V
        ) == pytest.approx(le_tmss_cost(U, V, 0.3))
        assert CostEvaluator(CostSpec(kind="R-TMSS", r=0.3))(
            U, V
        ) == pytest.approx(r_tmss_cost(U, V, 0.3))
        assert CostEvaluator(CostSpec(kind="HST", d=3))(U, V) == pytest.approx(
            hst_truncated(U, V, 3)
        )

    def test_training_required(self):
        """ACS без обучающего набора недопустима."""
        with pytest.raises(InvalidArgumentError, match="needs a training set"):
            CostEvaluator(CostSpec(kind="ACS"))

    def test_shots_need_generator(self):
        """Дробовой шум требует генератор."""
        with pytest.raises(InvalidArgumentError, match="generator"):
            CostEvaluator(CostSpec(kind="LE-TMSS", shots=100))

    def test_shot_noise_is_binomial(self, unitary_pair):
        """Значения с шумом кратны 1/shots и воспроизводимы."""
        # Arrange
        U, V = unitary_pair
        spec = CostSpec(kind="LE-TMSS", r=0.5, shots=64)

        # Act
        first = CostEvaluator(spec, rng=np.random.default_rng(3))(U, V)
        second = CostEvaluator(spec, rng=np.random.default_rng(3))(U, V)

        # Assert
        assert first == second
        assert (1 - first) * 64 == pytest.approx(round((1 - first) * 64))
