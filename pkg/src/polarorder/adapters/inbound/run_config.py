# src/polarorder/adapters/inbound/run_config.py
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from polarorder.core.functionals import Functional, parse_functional
from polarorder.core.infoset import MAX_DEPTH
from polarorder.core.polar import parse_sign_sequence

Subcommand = Literal["synth", "order", "infoset", "containment", "example-zbsc", "params"]


class RunConfig(BaseModel):
    """A fully validated CLI invocation, built before any computation starts."""
    subcommand: Subcommand
    channels: List[Path] = Field(default_factory=list)
    sequence: Optional[str] = None
    method: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=0, le=MAX_DEPTH)
    phi: Optional[str] = None
    eps: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    p: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    budget: Optional[int] = Field(default=None, ge=2)
    exact: bool = False
    output: Optional[Path] = None
    tol: Optional[float] = Field(default=None, gt=0.0)

    @field_validator("channels")
    @classmethod
    def _channels_exist(cls, value: List[Path]) -> List[Path]:
        missing = [str(p) for p in value if not p.exists()]
        if missing:
            raise ValueError(f"channel spec files not found: {missing}")
        return value

    @field_validator("sequence")
    @classmethod
    def _normalize_sequence(cls, value: Optional[str]) -> Optional[str]:
        return None if value is None else parse_sign_sequence(value)

    @field_validator("phi")
    @classmethod
    def _known_phi(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            parse_functional(value)
        return value

    @model_validator(mode="after")
    def _budget_or_exact(self) -> "RunConfig":
        if self.exact and self.budget is not None:
            raise ValueError("--budget and --exact are mutually exclusive")
        return self

    @property
    def functional(self) -> Functional:
        return parse_functional(self.phi)

    def effective_budget(self, config: Dict[str, Any]) -> Optional[int]:
        """The explicit budget, None under --exact, otherwise the configured default."""
        if self.exact:
            return None
        if self.budget is not None:
            return self.budget
        return config.get("delta", {}).get("budget")
