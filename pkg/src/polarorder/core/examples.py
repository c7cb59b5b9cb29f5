# src/polarorder/core/examples.py
"""
The Z-channel versus BSC study: how noisy may a BSC be while still being worse
than Z(p), under degradation, under the symmetric convex order, and under
degradation of the symmetrized Z-channel.
"""
from typing import Callable, Optional, Tuple

from loguru import logger

from polarorder.adapters.outbound.base import FeasibilitySolver

from .channel import BINARY_LABELS, make_bsc, make_kernel, make_z, symmetrize
from .errors import ChannelValidationError
from .models import Kernel, ZBscReport
from .ordering import degradation_check, symmetric_convex_check

BISECTION_TOL = 1e-7
BSC_MAX = 0.5


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ChannelValidationError(f"Z-channel crossover probability must lie in [0, 1], got {p!r}")
    return p


def z_to_bsc_kernel(p: float, alpha: float) -> Kernel:
    """
    The kernel P with P(0|0) = 1 - eps and P(0|1) = alpha that turns Z(p) into
    BSC(eps), eps = (p + (1 - p) alpha) / (1 + p).
    """
    p = _check_p(p)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    eps = (p + (1.0 - p) * alpha) / (1.0 + p)
    return make_kernel(BINARY_LABELS, BINARY_LABELS, [[1.0 - eps, eps], [alpha, 1.0 - alpha]])


def degradation_interval(p: float) -> Tuple[float, float]:
    """Crossover probabilities reachable by degrading Z(p): [p/(1+p), 1/(1+p)]."""
    p = _check_p(p)
    return p / (1.0 + p), 1.0 / (1.0 + p)


def bisect_threshold(
    predicate: Callable[[float], bool], lo: float, hi: float, tol: float = BISECTION_TOL
) -> float:
    """
    Smallest x in [lo, hi] with predicate(x) true, for a predicate that is false
    below some threshold and true above it. Returns a point within `tol` above it.
    """
    if lo > hi:
        raise ValueError(f"empty bisection interval [{lo}, {hi}]")
    if predicate(lo):
        return lo
    if not predicate(hi):
        raise ValueError(f"predicate is false on the whole interval [{lo}, {hi}]")
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        steps += 1
    logger.debug(f"bisection converged to {hi:.9f} after {steps} steps")
    return hi


def zbsc_study(p: float, tol: float = BISECTION_TOL, solver: Optional[FeasibilitySolver] = None) -> ZBscReport:
    p = _check_p(p)
    log = logger.bind(op="zbsc_study", p=p)
    z = make_z(p)
    z_sym = symmetrize(z)

    degradation = bisect_threshold(
        lambda eps: degradation_check(z, make_bsc(eps), solver=solver).holds, 0.0, BSC_MAX, tol
    )
    symmetric = bisect_threshold(
        lambda eps: symmetric_convex_check(make_bsc(eps), z).holds, 0.0, BSC_MAX, tol
    )
    symmetrization = bisect_threshold(
        lambda eps: degradation_check(z_sym, make_bsc(eps), solver=solver).holds, 0.0, BSC_MAX, tol
    )
    degradation_closed, _ = degradation_interval(p)
    symmetric_closed = p / 2.0

    log.info(
        f"BSC thresholds for Z({p:g}): degradation {degradation:.6f}, "
        f"symmetric convex {symmetric:.6f}, symmetrization {symmetrization:.6f}"
    )
    return ZBscReport(
        p=p,
        degradation_threshold=degradation,
        degradation_closed_form=degradation_closed,
        symmetric_convex_threshold=symmetric,
        symmetric_convex_closed_form=symmetric_closed,
        symmetrization_threshold=symmetrization,
        strict=symmetric_closed < degradation_closed,
    )
