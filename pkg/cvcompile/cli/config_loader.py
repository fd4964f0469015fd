"""
Experiment configuration: TOML files and shipped presets, flag overrides,
validation into ExperimentConfig.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from ..core.exceptions import ConfigurationError
from ..schemas.records import ExperimentConfig

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"


def list_presets() -> List[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.toml"))


def parse_toml(text: str, source: str = "<config>") -> Dict[str, Any]:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{source}: {e}")


def load_toml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    return parse_toml(path.read_text(encoding="utf-8"), str(path))


def load_preset(name: str) -> Dict[str, Any]:
    path = PRESET_DIR / f"{name}.toml"
    if not path.is_file():
        raise ConfigurationError(
            f"Unknown preset '{name}'; available: {', '.join(list_presets())}"
        )
    return load_toml(path)


def apply_overrides(
    data: Dict[str, Any],
    seed: Optional[int] = None,
    output: Optional[str] = None,
    threads: Optional[int] = None,
    shots: Optional[int] = None,
    cutoff: Optional[int] = None,
    allow_large: bool = False,
) -> Dict[str, Any]:
    merged = dict(data)
    for key, value in (
        ("seed", seed),
        ("output", output),
        ("threads", threads),
        ("shots", shots),
        ("cutoff", cutoff),
    ):
        if value is not None:
            merged[key] = value
    if allow_large:
        merged["allow_large"] = True
    return merged


def _format_errors(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def build_config(data: Dict[str, Any], command: Optional[str] = None) -> ExperimentConfig:
    """
    Validate a raw mapping; ``command`` fills in or must match data['command'].

    Raises:
        ConfigurationError: with the failing field paths
    """
    data = dict(data)
    if command is not None:
        declared = data.setdefault("command", command)
        if declared != command:
            raise ConfigurationError(
                f"Config is for '{declared}', but '{command}' was requested"
            )
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {_format_errors(e)}")
    logger.debug(f"config command={config.command} seed={config.seed}")
    return config
