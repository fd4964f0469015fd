import logging
import os

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


class Settings:
    """
    Process-wide settings read from the environment.

    Experiment parameters live in ExperimentConfig; this only holds what the
    process needs before a config file is parsed (budgets, threads, logging).
    """

    # Environment
    STAGE: str = os.getenv("CVC_STAGE", "local")
    LOG_LEVEL: str = os.getenv("CVC_LOG_LEVEL", "INFO").upper()

    # Resource guard: largest state vector any command may allocate
    MAX_AMPLITUDES: int = 2**24

    # Parallelism (results never depend on it, see utils.rng)
    THREADS: int = 1
    MC_CHUNK: int = 256

    DEFAULT_CUTOFF: int = 50

    BUILD_ID: str = os.getenv("CVC_BUILD_ID", "0.1.0+local")

    def __post_init__(self):
        """Parse integer knobs; local stage falls back to defaults."""
        defaults = {
            "MAX_AMPLITUDES": ("CVC_MAX_AMPLITUDES", 2**24),
            "THREADS": ("CVC_THREADS", 1),
            "MC_CHUNK": ("CVC_MC_CHUNK", 256),
            "DEFAULT_CUTOFF": ("CVC_DEFAULT_CUTOFF", 50),
        }
        for attr, (env_name, default) in defaults.items():
            try:
                value = _int_env(env_name, default)
                if value < 1:
                    raise ConfigurationError(
                        f"{env_name} must be positive, got {value}"
                    )
            except ConfigurationError:
                if self.STAGE != "local":
                    raise
                logger.warning(
                    "invalid %s, using default %s", env_name, default
                )
                value = default
            setattr(self, attr, value)

        if self.DEFAULT_CUTOFF < 2:
            raise ConfigurationError("CVC_DEFAULT_CUTOFF must be >= 2")

        if not isinstance(logging.getLevelName(self.LOG_LEVEL), int):
            if self.STAGE != "local":
                raise ConfigurationError(
                    f"Unknown CVC_LOG_LEVEL {self.LOG_LEVEL!r}"
                )
            self.LOG_LEVEL = "INFO"


settings = Settings()

# validate on import
if hasattr(settings, '__post_init__'):
    settings.__post_init__()
