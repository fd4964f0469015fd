import logging
from datetime import datetime
from typing import Any, Dict, List, Optional

from ..core.config import settings
from ..core.logging import new_run_id
from ..schemas.records import ExperimentConfig, ExperimentRecord, RecordHeader
from ..utils.datetime import elapsed_seconds, utc_now
from ..utils.records import check_columns

logger = logging.getLogger(__name__)


class ExperimentUseCase:
    """Shared plumbing: run id, thread count and the record header."""

    command: str = ""

    def __init__(self, run_id: Optional[str] = None, threads: Optional[int] = None):
        self.run_id = run_id or new_run_id()
        self.threads = threads

    def _threads(self, config: ExperimentConfig) -> int:
        return config.threads or self.threads or settings.THREADS

    def _record(
        self,
        config: ExperimentConfig,
        started_at: datetime,
        columns: List[str],
        rows: List[Dict[str, Any]],
        summary: Dict[str, Any],
    ) -> ExperimentRecord:
        clean_rows = [
            {k: v for k, v in row.items() if v is not None} for row in rows
        ]
        check_columns(self.command, columns)
        finished_at = utc_now()
        header = RecordHeader(
            command=self.command,
            config=config.model_dump(mode="json"),
            build_id=settings.BUILD_ID,
            run_id=self.run_id,
            started_at=started_at,
            finished_at=finished_at,
            columns=columns,
            summary=summary,
        )
        logger.info(
            f"{self.command} finished rows={len(clean_rows)} "
            f"elapsed={elapsed_seconds(started_at, finished_at):.2f}s"
        )
        return ExperimentRecord(header=header, rows=clean_rows)
