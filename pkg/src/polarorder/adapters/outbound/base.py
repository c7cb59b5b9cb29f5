# src/polarorder/adapters/outbound/base.py
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


class FeasibilityResult(BaseModel):
    """Outcome of a linear feasibility problem A x = b, x >= 0."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    feasible: bool
    x: Optional[np.ndarray] = None
    infeasibility: float
    iterations: int


class FeasibilitySolver(ABC):
    """Port for linear feasibility problems over nonnegative variables."""

    @abstractmethod
    def find_feasible_point(self, a_eq: np.ndarray, b_eq: np.ndarray) -> FeasibilityResult:
        """Finds x >= 0 with a_eq @ x = b_eq, or reports that none exists."""
        pass


class ReportWriter(ABC):
    """Port for emitting rendered reports."""

    @abstractmethod
    def write(self, content: str, destination: Optional[str] = None) -> None:
        """Writes content to the destination, or to the default sink when None."""
        pass
