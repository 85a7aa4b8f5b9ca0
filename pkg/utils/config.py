import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "limits": {
        "max_walls": 64,
        "max_degree": 7,
        "max_group_order": 645120,  # 2^7 * 7!
        "max_vertices": 65536,
    },
    "zd": {
        "escape_radius_per_dim": 10,
    },
    "sweeps": {
        "seed": 0,
        "trials": 200,
    },
    "paths": {
        "corpus": str(Path(__file__).resolve().parent.parent / "corpus"),
    },
}


class Config:
    """Configuration management for cubist"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file
        self.values: Dict[str, Any] = copy.deepcopy(DEFAULT_CONFIG)
        if config_file:
            self.load_file(config_file)
        self.apply_environment()

    def load_file(self, config_file: str):
        """Merge settings from a JSON or YAML file over the defaults"""
        path = Path(config_file)
        if not path.exists():
            logger.warning(f"Config file {path} not found, using defaults")
            return

        with open(path, "r") as f:
            if path.suffix.lower() in (".yaml", ".yml"):
                loaded = yaml.safe_load(f) or {}
            else:
                loaded = json.load(f)

        self._merge(self.values, loaded)
        logger.debug(f"Loaded config from {path}")

    def apply_environment(self):
        """Environment overrides win over files"""
        max_walls = os.environ.get("CUBIST_MAX_WALLS")
        if max_walls:
            try:
                self.set("limits.max_walls", int(max_walls))
            except ValueError:
                logger.warning(f"Ignoring non-integer CUBIST_MAX_WALLS={max_walls!r}")

    def _merge(self, target: Dict, source: Dict):
        for key, value in source.items():
            if isinstance(value, dict) and isinstance(target.get(key), dict):
                self._merge(target[key], value)
            else:
                target[key] = value

    def get(self, key_path: str, default=None):
        """Get config value using dot notation (e.g., 'limits.max_walls')"""
        value = self.values
        for key in key_path.split("."):
            if not isinstance(value, dict) or key not in value:
                return default
            value = value[key]
        return value

    def set(self, key_path: str, value):
        """Set config value using dot notation"""
        keys = key_path.split(".")
        current = self.values
        for key in keys[:-1]:
            if key not in current:
                current[key] = {}
            current = current[key]

        current[keys[-1]] = value

    def save(self, config_file: str):
        """Write the effective configuration as JSON or YAML"""
        path = Path(config_file)
        os.makedirs(path.parent, exist_ok=True)
        with open(path, "w") as f:
            if path.suffix.lower() in (".yaml", ".yml"):
                yaml.safe_dump(self.values, f, sort_keys=True)
            else:
                json.dump(self.values, f, indent=2, sort_keys=True)


_active_config: Optional[Config] = None


def get_config() -> Config:
    """Process-wide configuration, loaded from CUBIST_CONFIG on first use"""
    global _active_config
    if _active_config is None:
        _active_config = Config(os.environ.get("CUBIST_CONFIG"))
    return _active_config


def load_config(config_file: Optional[str] = None) -> Config:
    """Replace the process-wide configuration"""
    global _active_config
    _active_config = Config(config_file or os.environ.get("CUBIST_CONFIG"))
    return _active_config


def reset_config():
    global _active_config
    _active_config = None
