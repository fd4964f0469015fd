from datetime import datetime, timezone


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def isoformat_z(dt: datetime) -> str:
    """UTC ISO-8601 with a trailing Z, the form used in record headers and errors."""
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def elapsed_seconds(start: datetime, end: datetime) -> float:
    return (end - start).total_seconds()
