# src/polarorder/core/polar.py
import asyncio
from typing import Callable, Dict, Optional, Union

import numpy as np
from loguru import logger

from .channel import from_rows
from .errors import AlphabetOverflowError, SignSequenceError, SupportOverflowError
from .functionals import Functional
from .models import MERGE_TOL, Channel, DeltaDistribution
from .delta import quantize

MAX_OUTPUTS = 1_000_000
MAX_ATOMS = 1_000_000
SKIP_WEIGHT = 1e-15

SIGNS = "+-"
_SIGN_ALIASES = {"+": "+", "-": "-", "−": "-"}


def parse_sign_sequence(text: str) -> str:
    """Normalizes a sign sequence; the leftmost sign is applied first."""
    try:
        return "".join(_SIGN_ALIASES[c] for c in text.strip())
    except KeyError as e:
        raise SignSequenceError(f"invalid sign {e.args[0]!r} in sequence '{text}'") from e


def _check_outputs(count: int, max_outputs: int) -> None:
    if count > max_outputs:
        raise AlphabetOverflowError(
            f"transform would produce {count} outputs, above the cap of {max_outputs}"
        )


def channel_minus(channel: Channel, max_outputs: int = MAX_OUTPUTS) -> Channel:
    """W^-(y1 y2 | u1) = 1/2 sum_u2 W(y1 | u1 xor u2) W(y2 | u2), outputs '(y1,y2)'."""
    k = channel.size
    _check_outputs(k * k, max_outputs)
    r0, r1 = channel.row0, channel.row1
    row0 = 0.5 * (np.outer(r0, r0) + np.outer(r1, r1))
    row1 = 0.5 * (np.outer(r1, r0) + np.outer(r0, r1))
    labels = [f"({a},{b})" for a in channel.output_labels for b in channel.output_labels]
    return from_rows(labels, row0.ravel(), row1.ravel())


def channel_plus(channel: Channel, max_outputs: int = MAX_OUTPUTS) -> Channel:
    """W^+(y1 y2 u1 | u2) = 1/2 W(y1 | u1 xor u2) W(y2 | u2), outputs '(y1,y2,u1)'."""
    k = channel.size
    _check_outputs(2 * k * k, max_outputs)
    r0, r1 = channel.row0, channel.row1
    # axes: y1, y2, u1
    row0 = 0.5 * np.stack((np.outer(r0, r0), np.outer(r1, r0)), axis=-1)
    row1 = 0.5 * np.stack((np.outer(r1, r1), np.outer(r0, r1)), axis=-1)
    labels = [
        f"({a},{b},{u})" for a in channel.output_labels for b in channel.output_labels for u in "01"
    ]
    return from_rows(labels, row0.ravel(), row1.ravel())


def _check_atoms(count: int, max_atoms: int) -> None:
    if count > max_atoms:
        raise SupportOverflowError(
            f"transform would produce {count} atoms, above the cap of {max_atoms}",
            atoms=count,
            cap=max_atoms,
        )


def minus_transform(
    dist: DeltaDistribution, max_atoms: int = MAX_ATOMS, merge_tol: float = MERGE_TOL
) -> DeltaDistribution:
    """Delta_{W^-} = Delta_W(Y1) Delta_W(Y2) with independent Y1, Y2 ~ q_W."""
    _check_atoms(dist.size ** 2, max_atoms)
    values = np.outer(dist.values, dist.values).ravel()
    weights = np.outer(dist.weights, dist.weights).ravel()
    return DeltaDistribution.from_atoms(values, weights, tol=merge_tol)


def plus_transform(
    dist: DeltaDistribution,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
    skip_weight: float = SKIP_WEIGHT,
) -> DeltaDistribution:
    """
    Delta_{W^+} = (d1 + s d2) / (1 + s d1 d2) with s = (-1)^{u1}, drawn with weight
    p1 p2 (1 + s d1 d2) / 2. Branches whose factor is at most `skip_weight` carry no
    mass and are skipped, which also removes the 0/0 points at d1 d2 = -s.
    """
    _check_atoms(2 * dist.size ** 2, max_atoms)
    d1 = dist.values[:, None]
    d2 = dist.values[None, :]
    pair_w = np.outer(dist.weights, dist.weights)
    prod = d1 * d2

    values, weights = [], []
    for s in (1.0, -1.0):
        factor = (1.0 + s * prod) / 2.0
        live = factor > skip_weight
        branch = (d1 + s * d2)[live] / (1.0 + s * prod[live])
        values.append(np.clip(branch, -1.0, 1.0))
        weights.append(pair_w[live] * factor[live])
    return DeltaDistribution.from_atoms(np.concatenate(values), np.concatenate(weights), tol=merge_tol)


def apply_sign(
    dist: DeltaDistribution,
    sign: str,
    budget: Optional[int] = None,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
) -> DeltaDistribution:
    """
    One polarization step, quantized to `budget` atoms unless budget is None. A
    budgeted step may always expand a parent of `budget` atoms before quantizing.
    """
    transform = minus_transform if sign == "-" else plus_transform
    if budget is not None:
        max_atoms = max(max_atoms, 2 * budget * budget)
    child = transform(dist, max_atoms=max_atoms, merge_tol=merge_tol)
    return child if budget is None else quantize(child, budget)


def synthesize(
    dist: DeltaDistribution,
    sequence: str,
    budget: Optional[int] = None,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
) -> DeltaDistribution:
    """Delta law of W^s, folding the transforms of `sequence` left to right."""
    sequence = parse_sign_sequence(sequence)
    current = dist
    for step, sign in enumerate(sequence, start=1):
        current = apply_sign(current, sign, budget=budget, max_atoms=max_atoms, merge_tol=merge_tol)
        logger.debug(f"synthesize step {step}/{len(sequence)} '{sign}': {current.size} atoms")
    return current


Tree = Dict[str, DeltaDistribution]


def _expand_serial(level: Tree, step: Callable[[DeltaDistribution, str], DeltaDistribution]) -> Tree:
    return {prefix + sign: step(dist, sign) for prefix, dist in level.items() for sign in "-+"}


async def _expand_concurrent(
    level: Tree, step: Callable[[DeltaDistribution, str], DeltaDistribution], max_concurrency: int
) -> Tree:
    semaphore = asyncio.Semaphore(max_concurrency)
    keys = [(prefix, sign) for prefix in level for sign in "-+"]

    async def run(prefix: str, sign: str) -> DeltaDistribution:
        async with semaphore:
            return await asyncio.to_thread(step, level[prefix], sign)

    children = await asyncio.gather(*(run(prefix, sign) for prefix, sign in keys))
    return {prefix + sign: child for (prefix, sign), child in zip(keys, children)}


def _loop_running() -> bool:
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return False
    return True


def _synthesize_levels(
    dist: DeltaDistribution,
    n: int,
    budget: Optional[int],
    max_atoms: int,
    merge_tol: float,
    max_concurrency: int,
    keep_all: bool,
) -> Tree:
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")

    def step(parent: DeltaDistribution, sign: str) -> DeltaDistribution:
        return apply_sign(parent, sign, budget=budget, max_atoms=max_atoms, merge_tol=merge_tol)

    tree: Tree = {"": dist}
    level: Tree = {"": dist}
    for depth in range(1, n + 1):
        # asyncio.run cannot nest inside a caller's event loop
        if max_concurrency > 1 and len(level) > 1 and not _loop_running():
            level = asyncio.run(_expand_concurrent(level, step, max_concurrency))
        else:
            level = _expand_serial(level, step)
        largest = max(child.size for child in level.values())
        logger.debug(f"level {depth}/{n}: {len(level)} channels, largest support {largest}")
        if keep_all:
            tree.update(level)
    return tree if keep_all else level


def synthesize_tree(
    dist: DeltaDistribution,
    n: int,
    budget: Optional[int] = None,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
    max_concurrency: int = 1,
) -> Tree:
    """
    Delta laws of W^s for every sequence of length 0..n. Each node is computed once
    from its parent; the nodes of one level are independent and may be expanded
    concurrently.
    """
    return _synthesize_levels(dist, n, budget, max_atoms, merge_tol, max_concurrency, keep_all=True)


def synthesize_level(
    dist: DeltaDistribution,
    n: int,
    budget: Optional[int] = None,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
    max_concurrency: int = 1,
) -> Tree:
    """Like synthesize_tree but only keeps the 2^n leaves."""
    return _synthesize_levels(dist, n, budget, max_atoms, merge_tol, max_concurrency, keep_all=False)


def f_plus_compose(
    phi: Functional, d1: Union[float, np.ndarray], d2: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """
    f+(d1, d2) = (1 + d1 d2)/2 f((d1 + d2)/(1 + d1 d2)) + (1 - d1 d2)/2 f((d1 - d2)/(1 - d1 d2))
    with f(x) = phi(|x|). A term with a zero prefactor contributes 0.
    """
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    prod = d1 * d2
    total = np.zeros(np.broadcast(d1, d2).shape)
    for s in (1.0, -1.0):
        factor = (1.0 + s * prod) / 2.0
        live = factor > 0.0
        denom = np.where(live, 1.0 + s * prod, 1.0)
        arg = np.clip((d1 + s * d2) / denom, -1.0, 1.0)
        total = total + np.where(live, factor * phi.symmetric_extension(arg), 0.0)
    return float(total) if total.ndim == 0 else total


def f_minus_compose(
    phi: Functional, d1: Union[float, np.ndarray], d2: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """f-(d1, d2) = f(d1 d2) with f(x) = phi(|x|)."""
    out = phi.symmetric_extension(np.asarray(d1, dtype=np.float64) * np.asarray(d2, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def bec_erasure_recursion(eps: float, sequence: str) -> float:
    """Erasure probability of BEC(eps)^s: eps- = 2 eps - eps^2, eps+ = eps^2."""
    for sign in parse_sign_sequence(sequence):
        eps = 2.0 * eps - eps * eps if sign == "-" else eps * eps
    return eps
