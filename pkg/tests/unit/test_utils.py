"""
Unit тесты для вспомогательных модулей: потоки случайных чисел, записи, время.
"""

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from cvcompile.core.exceptions import ConfigurationError, PreconditionError
from cvcompile.schemas.records import ExperimentRecord, RecordHeader
from cvcompile.use_cases import run_compile, run_landscape, run_nfl, run_verify
from cvcompile.utils.datetime import elapsed_seconds, isoformat_z
from cvcompile.utils.records import (
    check_columns,
    parse_record,
    read_record,
    render_record,
    schema_columns,
    write_record,
)
from cvcompile.utils.rng import chunk_sizes, map_chunks, mean_and_stderr


def _draw(gen: np.random.Generator, size: int) -> np.ndarray:
    return gen.standard_normal(size)


def _record() -> ExperimentRecord:
    header = RecordHeader(
        command="nfl",
        config={"seed": 1, "command": "nfl"},
        build_id="test",
        run_id="abc",
        started_at=datetime(2026, 1, 2, 3, 4, 5, tzinfo=timezone.utc),
        columns=["m", "mean", "agrees", "params", "label"],
        summary={"max_deviation": 0.01},
    )
    rows = [
        {"m": 1, "mean": 0.25, "agrees": True, "params": [0.1, 0.2], "label": "a"},
        {"m": 2, "mean": 0.1 + 0.2},
    ]
    return ExperimentRecord(header=header, rows=rows)


class TestRandomStreams:
    """Тесты для разбиения выборок по потокам."""

    def test_chunk_sizes(self):
        """Остаток идёт последним блоком."""
        assert chunk_sizes(600, 256) == [256, 256, 88]
        assert chunk_sizes(512, 256) == [256, 256]
        assert chunk_sizes(0, 256) == []

    def test_independent_of_threads(self):
        """Результат не зависит от числа потоков."""
        # Act
        single = map_chunks(_draw, 1000, np.random.default_rng(5), 1, 128)
        pooled = map_chunks(_draw, 1000, np.random.default_rng(5), 4, 128)

        # Assert
        assert single.shape == (1000,)
        assert np.array_equal(single, pooled)

    def test_depends_on_chunk_size(self):
        """Размер блока входит в описание эксперимента."""
        a = map_chunks(_draw, 300, np.random.default_rng(5), 1, 100)
        b = map_chunks(_draw, 300, np.random.default_rng(5), 1, 150)
        assert not np.array_equal(a, b)

    def test_parent_consumes_one_draw(self):
        """Родительский генератор расходует ровно одно число."""
        # Arrange
        used = np.random.default_rng(8)
        reference = np.random.default_rng(8)

        # Act
        map_chunks(_draw, 700, used, 1, 256)
        reference.integers(2**63)

        # Assert
        assert used.integers(1000) == reference.integers(1000)

    def test_empty_run(self):
        """Ноль выборок - пустой массив."""
        assert map_chunks(_draw, 0, np.random.default_rng(1), 1, 10).size == 0

    def test_mean_and_stderr(self):
        """Среднее и стандартная ошибка среднего."""
        mean, stderr = mean_and_stderr(np.array([1.0, 2.0, 3.0]))
        assert mean == pytest.approx(2.0)
        assert stderr == pytest.approx(1 / np.sqrt(3))

    def test_mean_and_stderr_small(self):
        """Одна выборка - нулевая ошибка, пустая - NaN."""
        assert mean_and_stderr(np.array([4.0])) == (4.0, 0.0)
        assert np.isnan(mean_and_stderr(np.array([]))[0])


class TestRecords:
    """Тесты для файлов записей экспериментов."""

    def test_render_and_parse(self):
        """Заголовок и строки восстанавливаются из текста."""
        # Arrange
        record = _record()

        # Act
        text = render_record(record)
        parsed = parse_record(text)

        # Assert
        assert text.startswith("# {")
        assert parsed.header == record.header
        assert parsed.rows == record.rows

    def test_missing_cells_are_empty(self):
        """Отсутствующие значения пишутся пустыми ячейками."""
        lines = render_record(_record()).splitlines()
        assert lines[1] == "m,mean,agrees,params,label"
        assert lines[3] == "2,0.30000000000000004,,,"

    def test_column_mismatch(self):
        """Столбцы CSV должны совпадать с заголовком."""
        lines = render_record(_record()).splitlines()
        lines[1] = "m,mean"
        with pytest.raises(ConfigurationError, match="columns"):
            parse_record("\n".join(lines))

    def test_missing_header(self):
        """Без строки-заголовка файл не читается."""
        with pytest.raises(ConfigurationError, match="JSON header"):
            parse_record("m,mean\n1,0.5\n")

    def test_write_and_read(self, tmp_path):
        """Запись создаёт каталоги и читается обратно."""
        path = write_record(_record(), tmp_path / "nested" / "run.csv")
        assert path.exists()
        assert read_record(path).rows == _record().rows

    def test_undeclared_column_rejected(self):
        """Строка с незаявленным столбцом недопустима."""
        record = _record()
        with pytest.raises(ValueError, match="undeclared"):
            ExperimentRecord(header=record.header, rows=[{"extra": 1}])


class TestRecordSchema:
    """Тесты для схемы столбцов записей."""

    @pytest.mark.parametrize(
        "command, columns",
        [
            ("compile", run_compile.BASE_COLUMNS),
            ("nfl", run_nfl.COLUMNS),
            ("landscape", run_landscape.COLUMNS),
            ("verify", run_verify.COLUMNS),
        ],
    )
    def test_use_case_columns_match_schema(self, command, columns):
        """Столбцы каждого use case совпадают со схемой."""
        assert schema_columns(command) == columns
        check_columns(command, columns)

    def test_compile_dynamic_columns(self):
        """Ошибки и параметры анзаца описаны шаблонами схемы."""
        columns = run_compile.BASE_COLUMNS + [
            "err_chi_sum",
            "err_bs_theta",
            "alpha_re_1",
            "chi_2",
            "phi_m2",
            "bs_theta",
            "phi",
        ]
        check_columns("compile", columns)

    def test_unknown_column_rejected(self):
        """Столбец вне схемы отклоняется."""
        with pytest.raises(PreconditionError, match="not in the schema"):
            check_columns("nfl", run_nfl.COLUMNS + ["extra"])

    def test_reordered_columns_rejected(self):
        """Порядок фиксированных столбцов важен."""
        columns = list(reversed(run_verify.COLUMNS))
        with pytest.raises(PreconditionError, match="differ from schema"):
            check_columns("verify", columns)

    def test_unknown_command(self):
        """Для неизвестной команды схемы нет."""
        with pytest.raises(PreconditionError, match="No record schema"):
            schema_columns("presets")


class TestDatetime:
    """Тесты для форматирования времени."""

    def test_isoformat_z(self):
        """UTC с суффиксом Z, другие пояса приводятся к UTC."""
        moscow = timezone(timedelta(hours=3))
        assert (
            isoformat_z(datetime(2026, 1, 2, 6, 4, 5, tzinfo=moscow))
            == "2026-01-02T03:04:05Z"
        )

    def test_elapsed_seconds(self):
        """Разность моментов в секундах."""
        start = datetime(2026, 1, 1, tzinfo=timezone.utc)
        assert elapsed_seconds(start, start + timedelta(seconds=90)) == 90.0
