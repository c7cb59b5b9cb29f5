# src/polarorder/core/functionals.py
"""
Convex functionals phi on [0, 1] used to grade synthetic channels through
E[phi(|Delta|)]. Every functional satisfies phi(0) = 0, phi(1) = 1 and is convex
and nondecreasing on [0, 1].
"""
from typing import Dict, Literal, Optional, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .errors import FunctionalValidationError

GRID_STEP = 1e-3
SHAPE_TOL = 1e-12

FunctionalName = Literal["variational", "bhattacharyya_complement", "capacity", "power", "piecewise_linear"]


def binary_entropy(p: Union[float, np.ndarray]) -> np.ndarray:
    """h(p) in bits, with 0 log 0 = 0."""
    p = np.clip(np.asarray(p, dtype=np.float64), 0.0, 1.0)
    out = np.zeros_like(p)
    inner = (p > 0.0) & (p < 1.0)
    pi = p[inner]
    out[inner] = -(pi * np.log2(pi) + (1.0 - pi) * np.log2(1.0 - pi))
    return out


class Functional(BaseModel):
    """A named convex function phi on [0, 1]."""
    model_config = ConfigDict(frozen=True)

    name: FunctionalName
    exponent: Optional[float] = None
    knots: Optional[Tuple[Tuple[float, float], ...]] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "Functional":
        if self.name == "power":
            if self.exponent is None or self.exponent < 1.0:
                raise ValueError(f"power functional needs an exponent >= 1, got {self.exponent}")
        elif self.name == "piecewise_linear":
            self._check_knots()
        return self

    def _check_knots(self) -> None:
        if not self.knots or len(self.knots) < 2:
            raise ValueError("piecewise_linear needs at least two knots")
        xs = np.array([k[0] for k in self.knots])
        ys = np.array([k[1] for k in self.knots])
        if np.any(np.diff(xs) <= 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("knots must start at x=0 and end at x=1")
        if abs(ys[0]) > SHAPE_TOL or abs(ys[-1] - 1.0) > SHAPE_TOL:
            raise ValueError("piecewise_linear must satisfy phi(0)=0 and phi(1)=1")

        grid = np.linspace(0.0, 1.0, int(round(1.0 / GRID_STEP)) + 1)
        vals = np.interp(grid, xs, ys)
        first = np.diff(vals)
        second = np.diff(vals, n=2)
        if np.any(first < -SHAPE_TOL):
            raise ValueError("piecewise_linear must be nondecreasing on [0, 1]")
        if np.any(second < -SHAPE_TOL):
            raise ValueError("piecewise_linear must be convex on [0, 1]")

    @property
    def label(self) -> str:
        if self.name == "power":
            return f"power:{self.exponent:g}"
        if self.name == "piecewise_linear":
            return "piecewise_linear:" + ";".join(f"{x:g},{y:g}" for x, y in self.knots)
        return self.name

    def __call__(self, x: Union[float, np.ndarray]) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
        if self.name == "variational":
            return x.copy()
        if self.name == "bhattacharyya_complement":
            return 1.0 - np.sqrt(np.maximum(1.0 - x * x, 0.0))
        if self.name == "capacity":
            return 1.0 - binary_entropy((1.0 + x) / 2.0)
        if self.name == "power":
            return np.power(x, self.exponent)
        xs = [k[0] for k in self.knots]
        ys = [k[1] for k in self.knots]
        return np.interp(x, xs, ys)

    def symmetric_extension(self, x: Union[float, np.ndarray]) -> np.ndarray:
        """f(x) = phi(|x|) on [-1, 1]; convex and symmetric whenever phi is admissible."""
        return self(np.abs(np.asarray(x, dtype=np.float64)))


def variational() -> Functional:
    return Functional(name="variational")


def bhattacharyya_complement() -> Functional:
    return Functional(name="bhattacharyya_complement")


def capacity() -> Functional:
    return Functional(name="capacity")


def power(k: float) -> Functional:
    try:
        return Functional(name="power", exponent=float(k))
    except ValidationError as e:
        raise FunctionalValidationError(e.errors()[0]["msg"]) from e


def piecewise_linear(knots) -> Functional:
    try:
        return Functional(name="piecewise_linear", knots=tuple((float(x), float(y)) for x, y in knots))
    except ValidationError as e:
        raise FunctionalValidationError(e.errors()[0]["msg"]) from e


BUILTIN_FUNCTIONALS: Dict[str, Functional] = {
    "variational": variational(),
    "bhattacharyya_complement": bhattacharyya_complement(),
    "capacity": capacity(),
}


def parse_functional(text: str) -> Functional:
    """
    Parses a functional name as given on the command line:
    'capacity', 'power:3' or 'piecewise_linear:0,0;0.5,0.2;1,1'.
    """
    name, _, arg = text.strip().partition(":")
    if name in BUILTIN_FUNCTIONALS and not arg:
        return BUILTIN_FUNCTIONALS[name]
    if name == "power" and arg:
        try:
            return power(float(arg))
        except ValueError as e:
            raise FunctionalValidationError(f"bad power functional '{text}': {e}") from e
    if name == "piecewise_linear" and arg:
        try:
            knots = [tuple(float(v) for v in pair.split(",")) for pair in arg.split(";")]
        except ValueError as e:
            raise FunctionalValidationError(f"bad knot list in '{text}'") from e
        if any(len(k) != 2 for k in knots):
            raise FunctionalValidationError(f"knots must be 'x,y' pairs in '{text}'")
        return piecewise_linear(knots)
    logger.debug(f"Rejected functional spec '{text}'")
    raise FunctionalValidationError(
        f"unknown functional '{text}'; expected one of "
        f"{sorted(BUILTIN_FUNCTIONALS)}, power:K or piecewise_linear:x,y;..."
    )
