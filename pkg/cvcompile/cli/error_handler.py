import json
import logging
import sys
from typing import IO, Any, Dict, Optional

from ..core.config import settings
from ..core.error_codes import ErrorCode, get_error_description
from ..core.exceptions import CVCompileError, ResourceRefusalError
from ..utils.datetime import isoformat_z, utc_now

logger = logging.getLogger(__name__)

TITLES = {
    1: "Computation Error",
    2: "Configuration Error",
    3: "Resource Refused",
}


def problem_details(
    code: str,
    message: str,
    exit_code: int,
    run_id: str,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Объект ошибки в стиле RFC7807 для вывода в stderr.

    Описание берётся из централизованной карты ошибок.
    """
    problem = {
        "type": f"urn:cvcompile:error:{code}",
        "title": TITLES.get(exit_code, "Error"),
        "detail": message,
        "error": {
            "code": code,
            "message": message,
            "description": get_error_description(code),
        },
        "exit_code": exit_code,
        "run_id": run_id,
        "timestamp": isoformat_z(utc_now()),
    }
    if extra:
        problem.update(extra)
    return problem


def handle_error(exc: BaseException, run_id: str, stream: IO[str] = None) -> int:
    """
    Логирует ошибку с run_id, печатает problem JSON и возвращает код выхода.

    В production скрываем детали неожиданных исключений.
    """
    stream = stream or sys.stderr
    if isinstance(exc, CVCompileError):
        logger.error(f"{exc.code}: {exc.message}")
        extra = None
        if isinstance(exc, ResourceRefusalError) and exc.suggested_cutoff:
            extra = {"suggested_cutoff": exc.suggested_cutoff}
        problem = problem_details(exc.code, exc.message, exc.exit_code, run_id, extra)
        code = exc.exit_code
    else:
        logger.error(f"unexpected error: {exc}", exc_info=True)
        detail = "Internal error" if settings.STAGE == "production" else str(exc)
        problem = problem_details(ErrorCode.INTERNAL_ERROR, detail, 1, run_id)
        code = 1
    stream.write(json.dumps(problem) + "\n")
    return code
