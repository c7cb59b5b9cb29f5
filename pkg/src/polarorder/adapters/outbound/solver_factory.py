# src/polarorder/adapters/outbound/solver_factory.py
from typing import Any, Dict, Tuple

from loguru import logger

from .base import FeasibilitySolver
from .simplex_solver import SimplexFeasibilitySolver

_solver_instances: Dict[Tuple[Any, ...], FeasibilitySolver] = {}


def get_feasibility_solver(config: Dict[str, Any]) -> FeasibilitySolver:
    """Factory returning one shared solver instance per distinct solver configuration."""
    solver_config = config.get("ordering", {}).get("solver", {})
    provider = solver_config.get("provider", "simplex")
    key = (provider, tuple(sorted((k, str(v)) for k, v in solver_config.items())))

    if key in _solver_instances:
        return _solver_instances[key]

    logger.debug(f"Initializing feasibility solver of type: '{provider}'")
    if provider == "simplex":
        instance = SimplexFeasibilitySolver(config)
    else:
        raise ValueError(f"Unknown feasibility solver provider: {provider}")

    _solver_instances[key] = instance
    return instance
