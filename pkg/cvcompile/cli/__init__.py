from .config_loader import build_config, list_presets, load_preset, load_toml
from .main import build_parser, main, run

__all__ = [
    "build_config",
    "build_parser",
    "list_presets",
    "load_preset",
    "load_toml",
    "main",
    "run",
]
