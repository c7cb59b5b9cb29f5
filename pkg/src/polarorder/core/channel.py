# src/polarorder/core/channel.py
from typing import Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .errors import ChannelValidationError, KernelValidationError, LabelMismatchError
from .models import MERGE_TOL, STOCHASTIC_TOL, Channel, DeltaDistribution, Kernel

BINARY_LABELS = ("0", "1")


def _check_probability(name: str, value: float, upper: float = 1.0) -> float:
    value = float(value)
    if not 0.0 <= value <= upper:
        raise ChannelValidationError(f"{name} must lie in [0, {upper:g}], got {value!r}")
    return value


def from_rows(labels: Sequence[str], row0: Sequence[float], row1: Sequence[float]) -> Channel:
    """Builds an arbitrary B-DMC from its two transition rows."""
    try:
        return Channel(output_labels=tuple(str(label) for label in labels), row0=row0, row1=row1)
    except ValidationError as e:
        raise ChannelValidationError(e.errors()[0]["msg"].removeprefix("Value error, ")) from e


def make_kernel(input_labels: Sequence[str], output_labels: Sequence[str], rows) -> Kernel:
    try:
        return Kernel(
            input_labels=tuple(str(label) for label in input_labels),
            output_labels=tuple(str(label) for label in output_labels),
            rows=rows,
        )
    except ValidationError as e:
        raise KernelValidationError(e.errors()[0]["msg"].removeprefix("Value error, ")) from e


def make_bsc(eps: float) -> Channel:
    eps = _check_probability("BSC crossover probability", eps, upper=0.5)
    return from_rows(BINARY_LABELS, [1.0 - eps, eps], [eps, 1.0 - eps])


def make_z(p: float) -> Channel:
    """Z-channel: input 0 is noiseless, input 1 flips to 0 with probability p."""
    p = _check_probability("Z-channel crossover probability", p)
    return from_rows(BINARY_LABELS, [1.0, 0.0], [p, 1.0 - p])


def make_bec(eps: float) -> Channel:
    eps = _check_probability("BEC erasure probability", eps)
    return from_rows(("0", "e", "1"), [1.0 - eps, eps, 0.0], [0.0, eps, 1.0 - eps])


def identity_kernel(labels: Sequence[str]) -> Kernel:
    return make_kernel(labels, labels, np.eye(len(labels)))


def bsc_kernel(eps: float, labels: Sequence[str] = BINARY_LABELS) -> Kernel:
    """The BSC(eps) transition matrix as a kernel on a binary alphabet."""
    eps = _check_probability("BSC crossover probability", eps)
    return make_kernel(labels, labels, [[1.0 - eps, eps], [eps, 1.0 - eps]])


def delta_distribution(channel: Channel, merge_tol: float = MERGE_TOL) -> DeltaDistribution:
    """
    The law of Delta_W(Y) = (W(y|0) - W(y|1)) / (W(y|0) + W(y|1)) with Y ~ q_W.
    Outputs with q_W(y) = 0 carry no mass and are dropped.
    """
    total = channel.row0 + channel.row1
    live = total > 0
    values = (channel.row0[live] - channel.row1[live]) / total[live]
    weights = total[live] / 2.0
    return DeltaDistribution.from_atoms(values, weights, tol=merge_tol)


def symmetrize(channel: Channel) -> Channel:
    """W_s(y, z | x) = W(y | x xor z) / 2 on outputs rendered 'y|z'."""
    labels = []
    row0 = np.empty(2 * channel.size)
    row1 = np.empty(2 * channel.size)
    for i, label in enumerate(channel.output_labels):
        labels.extend((f"{label}|0", f"{label}|1"))
        row0[2 * i] = 0.5 * channel.row0[i]
        row0[2 * i + 1] = 0.5 * channel.row1[i]
        row1[2 * i] = 0.5 * channel.row1[i]
        row1[2 * i + 1] = 0.5 * channel.row0[i]
    return from_rows(labels, row0, row1)


def degrade(channel: Channel, kernel: Kernel) -> Channel:
    """V(y|x) = sum_z W(z|x) P(y|z)."""
    if set(kernel.input_labels) != set(channel.output_labels) or len(kernel.input_labels) != channel.size:
        raise LabelMismatchError(
            f"kernel inputs {list(kernel.input_labels)} do not match "
            f"channel outputs {list(channel.output_labels)}"
        )
    position = {label: i for i, label in enumerate(kernel.input_labels)}
    rows = kernel.rows[[position[label] for label in channel.output_labels]]
    composed = channel.matrix @ rows
    # products of stochastic rows drift by a few ulps
    composed = np.maximum(composed, 0.0)
    composed /= composed.sum(axis=1, keepdims=True)
    return from_rows(kernel.output_labels, composed[0], composed[1])


def is_symmetric(channel: Channel, tol: float = STOCHASTIC_TOL) -> bool:
    """
    True iff some output permutation pi has W(y|0) = W(pi(y)|1) for every y,
    decided by matching each (W(y|0), W(y|1)) pair against an unused swapped pair.
    """
    a, b = channel.row0, channel.row1
    unused = np.ones(channel.size, dtype=bool)
    for y in range(channel.size):
        candidates = np.flatnonzero(unused & (np.abs(b - a[y]) <= tol) & (np.abs(a - b[y]) <= tol))
        if candidates.size == 0:
            logger.debug(f"Output '{channel.output_labels[y]}' has no swapped partner")
            return False
        unused[candidates[0]] = False
    return True


def channel_from_parameters(bsc: Optional[float] = None, bec: Optional[float] = None, z: Optional[float] = None) -> Channel:
    """Builds one of the standard channels from a single keyword."""
    given = [(name, value) for name, value in (("bsc", bsc), ("bec", bec), ("z", z)) if value is not None]
    if len(given) != 1:
        raise ChannelValidationError(f"exactly one of bsc/bec/z must be given, got {[g[0] for g in given]}")
    name, value = given[0]
    return {"bsc": make_bsc, "bec": make_bec, "z": make_z}[name](value)
