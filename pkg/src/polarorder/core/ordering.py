# src/polarorder/core/ordering.py
"""
Stochastic-order tests between Delta laws and between channels: increasing convex
(icx), decreasing concave (dcv), convex (cx), the cut criterion, Blackwell
mean-preserving kernels and stochastic degradation.
"""
from typing import Literal, Optional, Tuple

import numpy as np
from loguru import logger

from polarorder.adapters.outbound.base import FeasibilitySolver
from polarorder.adapters.outbound.solver_factory import get_feasibility_solver
from polarorder.config import DEFAULT_CONFIG

from .channel import degrade, delta_distribution, make_kernel
from .delta import abs_distribution, b_distribution, stop_loss_curve
from .models import (
    Channel,
    CutWitness,
    DeltaDistribution,
    Kernel,
    KernelWitness,
    OrderingVerdict,
    StopLossWitness,
)

EXACT_TOL = 1e-12
QUANTIZED_TOL = 1e-9
MEAN_TOL = 1e-9
KERNEL_TOL = 1e-9

OrderMethod = Literal["icx", "dcv", "cx", "cut", "degradation", "blackwell", "symmetric"]
ORDER_METHODS: Tuple[str, ...] = ("icx", "dcv", "cx", "cut", "degradation", "blackwell", "symmetric")


def _solver(solver: Optional[FeasibilitySolver]) -> FeasibilitySolver:
    return solver if solver is not None else get_feasibility_solver(DEFAULT_CONFIG)


def _support_label(value: float) -> str:
    return f"{value:.17g}"


def icx_check(
    x: DeltaDistribution, y: DeltaDistribution, tol: float = EXACT_TOL, method: str = "icx"
) -> OrderingVerdict:
    """
    X <=icx Y iff E[(X - t)+] <= E[(Y - t)+] for all t. Both stop-loss transforms
    are piecewise linear with knots on the supports, so comparing at the union of
    supports decides the order.
    """
    knots = np.union1d(x.values, y.values)
    lhs = stop_loss_curve(x, knots)
    rhs = stop_loss_curve(y, knots)
    gap = lhs - rhs
    worst = int(np.argmax(gap))
    holds = bool(gap[worst] <= tol)
    witness = None
    if not holds:
        witness = StopLossWitness(t=float(knots[worst]), lhs=float(lhs[worst]), rhs=float(rhs[worst]))
    return OrderingVerdict(holds=holds, method=method, witness=witness, details={"max_gap": float(gap[worst])})


def dcv_check(x: DeltaDistribution, y: DeltaDistribution, tol: float = EXACT_TOL) -> OrderingVerdict:
    """X <=dcv Y iff Y <=icx X."""
    return icx_check(y, x, tol=tol, method="dcv")


def cx_check(
    x: DeltaDistribution, y: DeltaDistribution, tol: float = EXACT_TOL, mean_tol: float = MEAN_TOL
) -> OrderingVerdict:
    """X <=cx Y iff the means agree and X <=icx Y."""
    icx = icx_check(x, y, tol=tol)
    mean_x, mean_y = x.mean, y.mean
    holds = icx.holds and abs(mean_x - mean_y) <= mean_tol
    details = {**icx.details, "mean_lhs": mean_x, "mean_rhs": mean_y}
    return OrderingVerdict(holds=holds, method="cx", witness=icx.witness, details=details)


def symmetric_convex_check(v: Channel, w: Channel, tol: float = EXACT_TOL) -> OrderingVerdict:
    """|Delta_V| <=icx |Delta_W|, the order the polar transforms preserve."""
    verdict = icx_check(
        abs_distribution(delta_distribution(v)), abs_distribution(delta_distribution(w)), tol=tol
    )
    return verdict.model_copy(update={"method": "symmetric"})


def cut_criterion(x: DeltaDistribution, y: DeltaDistribution, tol: float = EXACT_TOL) -> OrderingVerdict:
    """
    Karlin-Novikoff single-crossing test, sufficient for X <=icx Y: m_X <= m_Y and
    F - G changes sign at most once, from <= 0 to >= 0. F - G is constant on the
    half-open intervals between consecutive support points; exact zeros (within
    `tol`) are ignored. More than one crossing is inconclusive, not a refutation.
    """
    points = np.union1d(x.values, y.values)
    f = np.concatenate(([0.0], np.cumsum(x.weights)))[np.searchsorted(x.values, points, side="right")]
    g = np.concatenate(([0.0], np.cumsum(y.weights)))[np.searchsorted(y.values, points, side="right")]
    diff = f - g
    signs = np.where(diff > tol, 1, np.where(diff < -tol, -1, 0))
    nonzero = signs[signs != 0]
    sign_changes = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
    single_crossing = not bool(np.any((nonzero[:-1] == 1) & (nonzero[1:] == -1)))

    positive = np.flatnonzero(signs == 1)
    delta = float(points[positive[0]]) if positive.size else None
    mean_x, mean_y = x.mean, y.mean
    details = {"mean_lhs": mean_x, "mean_rhs": mean_y}

    if mean_x > mean_y + tol:
        return OrderingVerdict(holds=False, method="cut", details=details)
    if not single_crossing:
        logger.debug(f"Cut criterion inconclusive with {sign_changes} sign changes")
        return OrderingVerdict(
            holds=False,
            method="cut-inconclusive",
            witness=CutWitness(delta=delta, sign_changes=sign_changes),
            details=details,
        )
    return OrderingVerdict(
        holds=True, method="cut", witness=CutWitness(delta=delta, sign_changes=sign_changes), details=details
    )


def _clean_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.maximum(matrix, 0.0)
    sums = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, sums, out=np.full_like(matrix, 1.0 / matrix.shape[1]), where=sums > 0)


def degradation_check(
    w: Channel, v: Channel, solver: Optional[FeasibilitySolver] = None, tol: float = KERNEL_TOL
) -> OrderingVerdict:
    """
    Is V stochastically degraded with respect to W? Solves for a kernel P(y|z) >= 0
    with rows summing to 1 and V(y|x) = sum_z W(z|x) P(y|z) for both inputs.
    """
    k, m = w.size, v.size
    a_eq = np.zeros((2 * m + k, k * m))
    b_eq = np.zeros(2 * m + k)
    for x, (w_row, v_row) in enumerate(((w.row0, v.row0), (w.row1, v.row1))):
        for j in range(m):
            a_eq[x * m + j, j::m] = w_row
            b_eq[x * m + j] = v_row[j]
    for i in range(k):
        a_eq[2 * m + i, i * m:(i + 1) * m] = 1.0
        b_eq[2 * m + i] = 1.0

    result = _solver(solver).find_feasible_point(a_eq, b_eq)
    details = {"infeasibility": result.infeasibility, "iterations": float(result.iterations)}
    if not result.feasible:
        return OrderingVerdict(holds=False, method="degradation", details=details)

    rows = _clean_rows(result.x.reshape(k, m))
    residual = float(np.abs(w.matrix @ rows - v.matrix).max())
    details["residual"] = residual
    if residual > tol:
        logger.warning(f"Degrading kernel residual {residual:.3e} exceeds tolerance {tol:.1e}")
        return OrderingVerdict(holds=False, method="degradation", details=details)
    kernel = make_kernel(w.output_labels, v.output_labels, rows)
    return OrderingVerdict(
        holds=True, method="degradation", witness=KernelWitness(kind="degrading_kernel", kernel=kernel), details=details
    )


def find_mean_preserving_kernel(
    x: DeltaDistribution,
    y: DeltaDistribution,
    solver: Optional[FeasibilitySolver] = None,
    tol: float = KERNEL_TOL,
    mean_tol: float = MEAN_TOL,
) -> Optional[Kernel]:
    """
    A Markov kernel T from supp(X) to supp(Y) with sum_y T(y|x) y = x and
    sum_x P(X=x) T(y|x) = P(Y=y). It exists iff X <=cx Y.
    """
    if abs(x.mean - y.mean) > mean_tol:
        return None
    a, b = x.size, y.size
    a_eq = np.zeros((2 * a + b, a * b))
    b_eq = np.zeros(2 * a + b)
    for i in range(a):
        a_eq[i, i * b:(i + 1) * b] = 1.0
        b_eq[i] = 1.0
        a_eq[a + i, i * b:(i + 1) * b] = y.values
        b_eq[a + i] = x.values[i]
    for j in range(b):
        a_eq[2 * a + j, j::b] = x.weights
        b_eq[2 * a + j] = y.weights[j]

    result = _solver(solver).find_feasible_point(a_eq, b_eq)
    if not result.feasible:
        return None
    rows = _clean_rows(result.x.reshape(a, b))
    mean_residual = float(np.abs(rows @ y.values - x.values).max())
    marginal_residual = float(np.abs(x.weights @ rows - y.weights).max())
    if max(mean_residual, marginal_residual) > tol:
        logger.warning(
            f"Mean-preserving kernel residuals {mean_residual:.3e}/{marginal_residual:.3e} "
            f"exceed tolerance {tol:.1e}"
        )
        return None
    return make_kernel(
        [_support_label(v) for v in x.values], [_support_label(v) for v in y.values], rows
    )


def blackwell_check(
    x: DeltaDistribution, y: DeltaDistribution, solver: Optional[FeasibilitySolver] = None, tol: float = KERNEL_TOL
) -> OrderingVerdict:
    """X <=cx Y decided through the existence of a mean-preserving kernel."""
    kernel = find_mean_preserving_kernel(x, y, solver=solver, tol=tol)
    details = {"mean_lhs": x.mean, "mean_rhs": y.mean}
    if kernel is None:
        return OrderingVerdict(holds=False, method="blackwell", details=details)
    witness = KernelWitness(kind="mean_preserving_kernel", kernel=kernel)
    return OrderingVerdict(holds=True, method="blackwell", witness=witness, details=details)


def posterior_kernel(w: Channel, kernel: Kernel) -> Kernel:
    """
    Pbar(z|y) = q_W(z) P(y|z) / sum_z q_W(z) P(y|z), from the outputs of
    V = degrade(W, P) that carry mass back to the outputs of W. Row means of Delta_W
    under Pbar reproduce Delta_V.
    """
    v = degrade(w, kernel)
    position = {label: i for i, label in enumerate(kernel.input_labels)}
    rows = kernel.rows[[position[label] for label in w.output_labels]]
    joint = w.q[:, None] * rows
    q_v = joint.sum(axis=0)
    live = q_v > 0
    posterior = (joint[:, live] / q_v[live]).T
    labels = [label for label, keep in zip(v.output_labels, live) if keep]
    return make_kernel(labels, w.output_labels, _clean_rows(posterior))


def dominating_bec_variational(w: Channel) -> float:
    """Erasure probability of the BEC with the same variational distance as W."""
    dist = delta_distribution(w)
    return float(np.clip(1.0 - np.dot(dist.weights, np.abs(dist.values)), 0.0, 1.0))


def dominating_bec_bhattacharyya(w: Channel) -> float:
    """Erasure probability of the BEC with the same Bhattacharyya parameter as W."""
    return float(np.clip(b_distribution(delta_distribution(w)).mean, 0.0, 1.0))


def symmetric_cx_equivalence(v: Channel, w: Channel, tol: float = EXACT_TOL) -> Tuple[OrderingVerdict, OrderingVerdict]:
    """For symmetric channels |Delta_V| <=icx |Delta_W| iff Delta_V <=cx Delta_W; both verdicts."""
    return (
        symmetric_convex_check(v, w, tol=tol),
        cx_check(delta_distribution(v), delta_distribution(w), tol=tol),
    )


def order_check(
    lhs: Channel,
    rhs: Channel,
    method: OrderMethod,
    tol: float = EXACT_TOL,
    solver: Optional[FeasibilitySolver] = None,
) -> OrderingVerdict:
    """
    Tests whether lhs is the smaller channel under `method`. Distribution tests run
    on Delta laws; 'cut' and 'symmetric' run on |Delta| laws; 'degradation' asks
    whether lhs is a degraded version of rhs.
    """
    logger.debug(f"order_check method={method} lhs={lhs.size} outputs rhs={rhs.size} outputs")
    if method == "symmetric":
        return symmetric_convex_check(lhs, rhs, tol=tol)
    if method == "degradation":
        return degradation_check(rhs, lhs, solver=solver, tol=max(tol, KERNEL_TOL))

    x, y = delta_distribution(lhs), delta_distribution(rhs)
    if method == "icx":
        return icx_check(x, y, tol=tol)
    if method == "dcv":
        return dcv_check(x, y, tol=tol)
    if method == "cx":
        return cx_check(x, y, tol=tol)
    if method == "cut":
        return cut_criterion(abs_distribution(x), abs_distribution(y), tol=tol)
    if method == "blackwell":
        return blackwell_check(x, y, solver=solver, tol=max(tol, KERNEL_TOL))
    raise ValueError(f"unknown order method '{method}'; expected one of {list(ORDER_METHODS)}")
