import logging
import time
import uuid
from contextlib import contextmanager

_FORMAT = (
    "ts=%(asctime)s level=%(levelname)s logger=%(name)s "
    "run_id=%(run_id)s msg=%(message)s"
)


class RunIdFilter(logging.Filter):
    """Stamps every record with the id of the current run."""

    def __init__(self, run_id: str):
        super().__init__()
        self.run_id = run_id

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run_id"):
            record.run_id = self.run_id
        return True


def new_run_id() -> str:
    return uuid.uuid4().hex[:12]


def setup_logging(level: str = "INFO", run_id: str | None = None) -> str:
    """Install a single key=value stream handler on the package logger."""
    run_id = run_id or new_run_id()
    root = logging.getLogger("cvcompile")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(_FORMAT))
    handler.addFilter(RunIdFilter(run_id))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
    return run_id


@contextmanager
def timed(logger: logging.Logger, label: str):
    start_time = time.perf_counter()
    logger.info(f"start: {label}")
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start_time
        logger.info(f"done: {label} elapsed={elapsed:.4f}s")
