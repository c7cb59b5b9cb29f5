# src/polarorder/core/delta.py
import bisect
import heapq
from typing import Dict, List, Tuple, Union

import numpy as np

from .functionals import Functional, capacity
from .models import MERGE_TOL, DeltaDistribution, merge_atoms

SYMMETRY_TOL = 1e-12
# a round closing fewer than 1 in TAIL_RATIO open gaps hands over to the heap
TAIL_RATIO = 64


def expectation_phi(dist: DeltaDistribution, phi: Functional) -> float:
    """E[phi(|Delta|)]."""
    return float(np.dot(dist.weights, phi(np.abs(dist.values))))


def mean(dist: DeltaDistribution) -> float:
    return dist.mean


def second_moment(dist: DeltaDistribution) -> float:
    return float(np.dot(dist.weights, dist.values ** 2))


def abs_distribution(dist: DeltaDistribution, tol: float = MERGE_TOL) -> DeltaDistribution:
    """The law of |Delta|; weights of +-v pairs are summed."""
    return DeltaDistribution.from_atoms(np.abs(dist.values), dist.weights, tol=tol)


def merge(dist: DeltaDistribution, tol: float = MERGE_TOL) -> DeltaDistribution:
    """Combines atoms within `tol` of each other at their weight-averaged value."""
    if tol < 0:
        raise ValueError(f"merge tolerance must be >= 0, got {tol}")
    return DeltaDistribution.from_atoms(dist.values, dist.weights, tol=tol)


def _merge_costs(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # loss in E[X^2] from replacing two adjacent atoms by their conditional mean
    w1, w2 = weights[:-1], weights[1:]
    return w1 * w2 / (w1 + w2) * np.diff(values) ** 2


def _kth_merge(merge_cost: np.ndarray, k: int) -> Tuple[float, int]:
    """(cost, gap) of the k-th cheapest merge recorded so far."""
    done = np.flatnonzero(np.isfinite(merge_cost))
    gap = int(done[np.lexsort((done, merge_cost[done]))[k - 1]])
    return float(merge_cost[gap]), gap


def _greedy_tail(
    values: np.ndarray, weights: np.ndarray, gaps: np.ndarray, merge_cost: np.ndarray, excess: int
) -> None:
    """
    Continues the merge order one pair at a time from the current clusters with a
    heap of (cost, gap) keys, recording each closed gap in `merge_cost`. Stops once
    `excess` recorded merges are cheaper than the next one.
    """
    done = np.flatnonzero(np.isfinite(merge_cost))
    recorded = sorted(zip(merge_cost[done].tolist(), done.tolist()))
    vals, wts = values.tolist(), weights.tolist()
    right_gap = gaps.tolist() + [-1]
    nxt = list(range(1, len(vals))) + [-1]
    prv = [-1] + list(range(len(vals) - 1))

    def pair_cost(i: int) -> float:
        j = nxt[i]
        return wts[i] * wts[j] / (wts[i] + wts[j]) * (vals[j] - vals[i]) ** 2

    live: Dict[int, float] = {}
    heap: List[Tuple[float, int, int]] = []
    for i in range(len(vals) - 1):
        live[right_gap[i]] = pair_cost(i)
        heap.append((live[right_gap[i]], right_gap[i], i))
    heapq.heapify(heap)

    popped = 0
    while heap:
        cost, gap, i = heap[0]
        if live.get(gap) != cost:
            heapq.heappop(heap)
            continue
        if bisect.bisect_left(recorded, (cost, gap)) + popped >= excess:
            return
        heapq.heappop(heap)
        del live[gap]
        merge_cost[gap] = cost
        popped += 1

        j = nxt[i]
        w_sum = wts[i] + wts[j]
        vals[i] = (wts[i] * vals[i] + wts[j] * vals[j]) / w_sum
        wts[i] = w_sum
        right_gap[i], nxt[i] = right_gap[j], nxt[j]
        if nxt[i] != -1:
            prv[nxt[i]] = i
        for k in (prv[i], i):
            if k != -1 and nxt[k] != -1:
                live[right_gap[k]] = pair_cost(k)
                heapq.heappush(heap, (live[right_gap[k]], right_gap[k], k))


def quantize(dist: DeltaDistribution, budget: int) -> DeltaDistribution:
    """
    Reduces the support to at most `budget` atoms by repeatedly merging the adjacent
    pair whose replacement by its conditional mean loses the least E[X^2]; ties go to
    the leftmost pair. The mean is preserved and E[f(X)] can only drop for convex f.

    Merging never lowers the cost of a neighbouring pair, so a pair cheaper than both
    neighbours is merged by the one-at-a-time greedy in its current form. Each round
    merges all such pairs at once and records, for every gap between original atoms,
    the cost at which it closed. The greedy result keeps the `budget - 1` gaps that
    close last; rounds stop once no open gap can close before the cutoff. Long runs
    of monotone costs only free one pair per round, so those are finished by
    `_greedy_tail`.
    """
    if budget < 1:
        raise ValueError(f"quantization budget must be >= 1, got {budget}")
    if dist.size <= budget:
        return dist

    excess = dist.size - budget
    merge_cost = np.full(dist.size - 1, np.inf)
    values = np.array(dist.values)
    weights = np.array(dist.weights)
    # gaps[i] is the original gap between cluster i and cluster i + 1
    gaps = np.arange(dist.size - 1)
    closed = 0
    while gaps.size:
        costs = _merge_costs(values, weights)
        if closed >= excess:
            cutoff_cost, cutoff_gap = _kth_merge(merge_cost, excess)
            first = int(np.argmin(costs))
            if (costs[first], gaps[first]) > (cutoff_cost, cutoff_gap):
                break

        # (cost, gap) is a strict order; gaps increase left to right
        left_ok = np.ones(costs.size, dtype=bool)
        left_ok[1:] = costs[1:] < costs[:-1]
        right_ok = np.ones(costs.size, dtype=bool)
        right_ok[:-1] = costs[:-1] <= costs[1:]
        pairs = np.flatnonzero(left_ok & right_ok)
        if pairs.size * TAIL_RATIO < costs.size:
            _greedy_tail(values, weights, gaps, merge_cost, excess)
            break
        merge_cost[gaps[pairs]] = costs[pairs]
        closed += pairs.size

        w_sum = weights[pairs] + weights[pairs + 1]
        values[pairs] = (weights[pairs] * values[pairs] + weights[pairs + 1] * values[pairs + 1]) / w_sum
        weights[pairs] = w_sum
        keep = np.ones(values.size, dtype=bool)
        keep[pairs + 1] = False
        values, weights = values[keep], weights[keep]
        gaps = np.delete(gaps, pairs)

    done = np.flatnonzero(np.isfinite(merge_cost))
    order = done[np.lexsort((done, merge_cost[done]))]
    open_gap = np.ones(merge_cost.size, dtype=bool)
    open_gap[order[:excess]] = False
    starts = np.concatenate(([0], np.flatnonzero(open_gap) + 1))
    cluster_w = np.add.reduceat(dist.weights, starts)
    cluster_v = np.add.reduceat(dist.weights * dist.values, starts) / cluster_w
    return DeltaDistribution.from_atoms(cluster_v, cluster_w, tol=0.0)


def b_distribution(dist: DeltaDistribution, tol: float = MERGE_TOL) -> DeltaDistribution:
    """The law of B = sqrt(1 - Delta^2); its mean is the Bhattacharyya parameter."""
    mapped = np.sqrt(np.maximum(1.0 - dist.values ** 2, 0.0))
    return DeltaDistribution.from_atoms(mapped, dist.weights, tol=tol)


def cdf_at(dist: DeltaDistribution, x: float) -> float:
    """Right-continuous CDF, P(Delta <= x)."""
    return float(dist.weights[dist.values <= x].sum())


def stop_loss(dist: DeltaDistribution, t: float) -> float:
    """E[max(Delta - t, 0)]."""
    return float(np.dot(dist.weights, np.maximum(dist.values - t, 0.0)))


def stop_loss_curve(dist: DeltaDistribution, ts: np.ndarray) -> np.ndarray:
    """stop_loss evaluated at many points through suffix sums over the sorted atoms."""
    ts = np.asarray(ts, dtype=np.float64)
    suffix_w = np.concatenate((np.cumsum(dist.weights[::-1])[::-1], [0.0]))
    suffix_m = np.concatenate((np.cumsum((dist.weights * dist.values)[::-1])[::-1], [0.0]))
    first_above = np.searchsorted(dist.values, ts, side="right")
    return np.maximum(suffix_m[first_above] - ts * suffix_w[first_above], 0.0)


def mixture(first: DeltaDistribution, second: DeltaDistribution, lam: float) -> DeltaDistribution:
    """lam * first + (1 - lam) * second."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {lam}")
    values = np.concatenate((first.values, second.values))
    weights = np.concatenate((lam * first.weights, (1.0 - lam) * second.weights))
    return DeltaDistribution.from_atoms(values, weights, tol=0.0)


def is_symmetric_distribution(dist: DeltaDistribution, tol: float = SYMMETRY_TOL) -> bool:
    """F(x) = 1 - F(-x-): atoms at v and -v carry equal weight."""
    mirrored = DeltaDistribution.from_atoms(-dist.values, dist.weights, tol=0.0)
    return dist.allclose(mirrored, atol=tol)


def channel_parameters(dist: DeltaDistribution) -> Dict[str, Union[float, int]]:
    """Variational distance, Bhattacharyya parameter and symmetric capacity."""
    return {
        "variational": float(np.dot(dist.weights, np.abs(dist.values))),
        "bhattacharyya": b_distribution(dist).mean,
        "capacity": expectation_phi(dist, capacity()),
        "atoms": dist.size,
    }
