# src/polarorder/config.py
import copy
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from loguru import logger

DEFAULT_CONFIG_PATH = Path("config.yaml")

DEFAULT_CONFIG: Dict[str, Any] = {
    "logging": {"level": "INFO"},
    "tolerances": {
        "stochastic": 1e-12,
        "exact": 1e-12,
    },
    "delta": {"merge_tol": 1e-12, "budget": 256},
    "polar": {"max_atoms": 1_000_000},
    "ordering": {"solver": {"provider": "simplex", "max_iterations": 50_000, "tol": 1e-9}},
    "infoset": {"max_concurrency": 4, "recheck_budget": 1024},
    "example": {"bisection_tol": 1e-7},
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Loads a YAML config and merges it over DEFAULT_CONFIG. An explicitly given path
    must exist; without one, ./config.yaml is used when present.
    """
    if path is None:
        config_path = DEFAULT_CONFIG_PATH
        if not config_path.exists():
            logger.debug("No config.yaml found; using built-in defaults.")
            return copy.deepcopy(DEFAULT_CONFIG)
    else:
        config_path = Path(path)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found at: {config_path}")

    with open(config_path, "r") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file '{config_path}' must contain a mapping at the top level.")
    logger.debug(f"Loaded config from {config_path}")
    return _deep_merge(DEFAULT_CONFIG, data)


def setup_logging(config: Dict[str, Any]) -> None:
    """Configures the logging level based on the config file."""
    log_config = config.get("logging", {})
    log_level = str(log_config.get("level", "INFO")).upper()

    logger.remove()  # Remove default handler
    logger.add(sys.stderr, level=log_level)
    logger.debug(f"Logging initialized with level: {log_level}")
