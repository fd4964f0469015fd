"""
Конфигурация для тестов.
"""

import logging
import warnings

import numpy as np
import pytest

from cvcompile.schemas.hilbert import HilbertSpec, Operator
from tests.helpers import random_unitary

warnings.filterwarnings("ignore", category=DeprecationWarning)


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Снимаем обработчики логгера пакета после теста."""
    yield
    package_logger = logging.getLogger("cvcompile")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
    package_logger.propagate = True


@pytest.fixture(scope="function")
def rng():
    """Фикстура для воспроизводимого генератора."""
    return np.random.default_rng(12345)


@pytest.fixture(scope="function")
def unitary_pair(rng):
    """Пара случайных унитарных операторов при cutoff=6."""
    return random_unitary(6, rng), random_unitary(6, rng)


@pytest.fixture(scope="function")
def identity_op():
    """Тождественный оператор при cutoff=6."""
    return Operator(
        matrix=np.eye(6, dtype=np.complex128), spec=HilbertSpec(cutoff=6)
    )


# полные прогоны пресетов дольше таймаута по умолчанию из pytest.ini
E2E_TIMEOUT = 1800

MARKERS = {
    "unit": "быстрые тесты одной функции или класса",
    "integration": "сценарии use case и CLI на маленьких конфигурациях",
    "e2e": "полные прогоны пресетов через CLI",
    "slow": "тесты дольше нескольких секунд",
    "nfr": "нефункциональные требования",
    "performance": "время и память",
    "reproducibility": "совпадение чисел при одинаковом seed",
    "benchmark": "замеры через pytest-benchmark",
    "statistical": "статистические проверки (KS, допуски Монте-Карло)",
}


def pytest_configure(config):
    """Регистрируем маркеры."""
    for name, description in MARKERS.items():
        config.addinivalue_line("markers", f"{name}: {description}")


def pytest_collection_modifyitems(config, items):
    """Маркеры по каталогу теста."""
    for item in items:
        path = item.nodeid
        if path.startswith("tests/unit"):
            item.add_marker(pytest.mark.unit)
        elif path.startswith("tests/integration"):
            item.add_marker(pytest.mark.integration)
        elif path.startswith("tests/e2e"):
            item.add_marker(pytest.mark.e2e)
            item.add_marker(pytest.mark.slow)
            item.add_marker(pytest.mark.timeout(E2E_TIMEOUT))
        elif path.startswith("tests/nfr"):
            item.add_marker(pytest.mark.nfr)
            if "test_performance" in path:
                item.add_marker(pytest.mark.performance)
                item.add_marker(pytest.mark.benchmark)
            else:
                item.add_marker(pytest.mark.reproducibility)
