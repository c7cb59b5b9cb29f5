# src/polarorder/core/models.py
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from .errors import DistributionValidationError

STOCHASTIC_TOL = 1e-12
VALUE_TOL = 1e-12
MERGE_TOL = 1e-12


def frozen_array(data: Any, ndim: int = 1) -> np.ndarray:
    """Copies data into a read-only float64 array of the given rank."""
    arr = np.array(data, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.setflags(write=False)
    return arr


def merge_atoms(values: np.ndarray, weights: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sorts atoms by value and combines every run whose consecutive gaps are at most
    `tol` into one atom at the run's weight-averaged value. Total weight is kept.
    """
    order = np.argsort(values, kind="stable")
    values = values[order]
    weights = weights[order]
    if values.size <= 1:
        return values, weights

    starts = np.flatnonzero(np.concatenate(([True], np.diff(values) > tol)))
    if starts.size == values.size:
        return values, weights

    merged_w = np.add.reduceat(weights, starts)
    merged_mass = np.add.reduceat(weights * values, starts)
    counts = np.diff(np.append(starts, values.size))
    merged_v = values[starts].copy()
    grouped = (counts > 1) & (merged_w > 0)
    merged_v[grouped] = merged_mass[grouped] / merged_w[grouped]
    return merged_v, merged_w


def _prepare_atoms(values: Any, weights: Any, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=np.float64).ravel()
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if values.shape != weights.shape:
        raise DistributionValidationError(
            f"{values.size} values but {weights.size} weights"
        )
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(weights))):
        raise DistributionValidationError("atoms must be finite")
    if np.any(np.abs(values) > 1.0 + VALUE_TOL):
        worst = float(values[np.argmax(np.abs(values))])
        raise DistributionValidationError(f"value {worst} lies outside [-1, 1]")
    if np.any(weights < 0):
        raise DistributionValidationError(f"negative weight {float(weights.min())}")

    keep = weights > 0
    merged_v, merged_w = merge_atoms(np.clip(values[keep], -1.0, 1.0), weights[keep], tol)
    merged_v = np.clip(merged_v, -1.0, 1.0)

    total = float(merged_w.sum())
    if merged_w.size == 0 or abs(total - 1.0) > STOCHASTIC_TOL:
        raise DistributionValidationError(f"weights sum to {total!r}, expected 1")

    merged_v.setflags(write=False)
    merged_w.setflags(write=False)
    return merged_v, merged_w


class Channel(BaseModel):
    """A binary-input DMC: the rows W(y|0) and W(y|1) over a labeled output alphabet."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    output_labels: Tuple[str, ...]
    row0: np.ndarray
    row1: np.ndarray

    @field_validator("row0", "row1", mode="before")
    @classmethod
    def _coerce_row(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_rows(self) -> "Channel":
        if len(set(self.output_labels)) != len(self.output_labels):
            seen, dupes = set(), []
            for label in self.output_labels:
                if label in seen:
                    dupes.append(label)
                seen.add(label)
            raise ValueError(f"duplicate output labels: {sorted(set(dupes))}")
        for name, row in (("row0", self.row0), ("row1", self.row1)):
            if row.size != len(self.output_labels):
                raise ValueError(
                    f"{name} has {row.size} entries for {len(self.output_labels)} output labels"
                )
            if np.any(row < 0):
                raise ValueError(f"{name} has a negative entry {float(row.min())!r}")
            total = float(row.sum())
            if abs(total - 1.0) > STOCHASTIC_TOL:
                raise ValueError(f"{name} sums to {total!r}, expected 1")
        return self

    @field_serializer("row0", "row1")
    def _serialize_row(self, row: np.ndarray) -> List[float]:
        return row.tolist()

    @property
    def size(self) -> int:
        return len(self.output_labels)

    @property
    def q(self) -> np.ndarray:
        """Output law under uniform inputs, (W(y|0) + W(y|1)) / 2."""
        return (self.row0 + self.row1) / 2.0

    @property
    def matrix(self) -> np.ndarray:
        return np.vstack([self.row0, self.row1])


class Kernel(BaseModel):
    """A Markov kernel P(y|z): one probability row per input symbol."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    input_labels: Tuple[str, ...]
    output_labels: Tuple[str, ...]
    rows: np.ndarray

    @field_validator("rows", mode="before")
    @classmethod
    def _coerce_rows(cls, value: Any) -> np.ndarray:
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_rows(self) -> "Kernel":
        expected = (len(self.input_labels), len(self.output_labels))
        if self.rows.shape != expected:
            raise ValueError(f"rows have shape {self.rows.shape}, expected {expected}")
        if np.any(self.rows < 0):
            raise ValueError(f"negative kernel entry {float(self.rows.min())!r}")
        sums = self.rows.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"row '{self.input_labels[i]}' sums to {float(sums[i])!r}, expected 1")
        return self

    @field_serializer("rows")
    def _serialize_rows(self, rows: np.ndarray) -> List[List[float]]:
        return rows.tolist()


class DeltaDistribution(BaseModel):
    """
    A finite law of the Delta parameter on [-1, 1]. Atoms are sorted by strictly
    increasing value; zero-weight atoms are dropped and weights sum to 1.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    weights: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _normalize_atoms(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        values, weights = _prepare_atoms(data.get("values", ()), data.get("weights", ()), tol=0.0)
        return {"values": values, "weights": weights}

    @classmethod
    def from_atoms(cls, values: Any, weights: Any, tol: float = MERGE_TOL) -> "DeltaDistribution":
        """Builds a distribution, merging atoms closer than `tol`."""
        values, weights = _prepare_atoms(values, weights, tol)
        return cls.model_construct(values=values, weights=weights)

    @classmethod
    def point_mass(cls, value: float) -> "DeltaDistribution":
        return cls.from_atoms([value], [1.0])

    @field_serializer("values", "weights")
    def _serialize_array(self, arr: np.ndarray) -> List[float]:
        return arr.tolist()

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.values.tolist(), self.weights.tolist()))

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.weights))

    def allclose(self, other: "DeltaDistribution", atol: float = 1e-12) -> bool:
        """Atomwise comparison of two distributions."""
        return (
            self.size == other.size
            and bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))
            and bool(np.allclose(self.weights, other.weights, rtol=0.0, atol=atol))
        )


class CutWitness(BaseModel):
    kind: Literal["cut"] = "cut"
    delta: Optional[float] = None
    sign_changes: int = 0


class StopLossWitness(BaseModel):
    kind: Literal["stop_loss"] = "stop_loss"
    t: float
    lhs: float
    rhs: float


class KernelWitness(BaseModel):
    kind: Literal["degrading_kernel", "mean_preserving_kernel"]
    kernel: Kernel


Witness = Annotated[Union[CutWitness, StopLossWitness, KernelWitness], Field(discriminator="kind")]


class OrderingVerdict(BaseModel):
    """The outcome of an order test plus a machine-checkable witness."""
    holds: bool
    method: str
    witness: Optional[Witness] = None
    details: Dict[str, float] = Field(default_factory=dict)


class InfoSet(BaseModel):
    """
    The sign sequences s in {+,-}^n with E[phi(|Delta_{W^s}|)] >= 1 - eps, up to
    the rounding slack `tol`.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    phi: str
    eps: float = Field(gt=0.0, lt=1.0)
    budget: Optional[int] = None
    tol: float = Field(default=0.0, ge=0.0)
    members: Tuple[str, ...]
    report: Dict[str, float]

    @model_validator(mode="after")
    def _check_report(self) -> "InfoSet":
        if len(self.members) > 2 ** self.n:
            raise ValueError(f"{len(self.members)} members exceed 2^{self.n}")
        missing = [s for s in self.members if s not in self.report]
        if missing:
            raise ValueError(f"members without report values: {missing[:5]}")
        for s, value in self.report.items():
            if len(s) != self.n:
                raise ValueError(f"sequence '{s}' does not have length {self.n}")
            if not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValueError(f"report value {value!r} for '{s}' outside [0, 1]")
        return self

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def rate(self) -> float:
        return self.size / 2 ** self.n


class ContainmentViolation(BaseModel):
    sequence: str
    index: int
    lhs: float
    rhs: float


class ContainmentReport(BaseModel):
    """Whether A.members is a subset of B.members, with the offending sequences."""
    contained: bool
    n: int
    phi: str
    eps: float
    lhs_budget: Optional[int] = None
    rhs_budget: Optional[int] = None
    lhs_size: int
    rhs_size: int
    violations: List[ContainmentViolation] = Field(default_factory=list)
    rechecked: bool = False
    recheck_budget: Optional[int] = None


class ZBscReport(BaseModel):
    """Best BSC under degradation, symmetric convex ordering and symmetrization for Z(p)."""
    p: float
    degradation_threshold: float
    degradation_closed_form: float
    symmetric_convex_threshold: float
    symmetric_convex_closed_form: float
    symmetrization_threshold: float
    strict: bool
