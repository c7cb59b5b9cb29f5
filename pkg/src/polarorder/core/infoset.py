# src/polarorder/core/infoset.py
"""
Information sets: the synthetic channels W^s, s in {+,-}^n, whose functional
E[phi(|Delta|)] clears 1 - eps, and the containment check between two such sets.
"""
import itertools
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Union

from loguru import logger

from .channel import delta_distribution
from .delta import expectation_phi
from .errors import ParameterMismatchError
from .functionals import Functional
from .models import (
    MERGE_TOL,
    Channel,
    ContainmentReport,
    ContainmentViolation,
    DeltaDistribution,
    InfoSet,
)
from .polar import MAX_ATOMS, apply_sign, parse_sign_sequence, synthesize_level

MAX_DEPTH = 20
EXACT_TOL = 1e-12
QUANTIZED_TOL = 1e-9
RECHECK_BUDGET = 1024

Source = Union[Channel, DeltaDistribution]


def index_of(sequence: str) -> int:
    """1 + the binary value of the sequence read MSB first, with '-' as 0 and '+' as 1."""
    sequence = parse_sign_sequence(sequence)
    return 1 + sum(1 << (len(sequence) - 1 - i) for i, sign in enumerate(sequence) if sign == "+")


def all_sequences(n: int) -> Iterator[str]:
    """Every sequence of length n in index order."""
    for signs in itertools.product("-+", repeat=n):
        yield "".join(signs)


def _as_distribution(source: Source) -> DeltaDistribution:
    return delta_distribution(source) if isinstance(source, Channel) else source


def _check_depth(n: int) -> None:
    if not 0 <= n <= MAX_DEPTH:
        raise ValueError(f"n must lie in [0, {MAX_DEPTH}], got {n}")


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


def _default_tol(budget: Optional[int]) -> float:
    return EXACT_TOL if budget is None else QUANTIZED_TOL


def synthesize_leaves(
    source: Source,
    n: int,
    budget: Optional[int] = None,
    max_atoms: int = MAX_ATOMS,
    merge_tol: float = MERGE_TOL,
    max_concurrency: int = 1,
) -> Dict[str, DeltaDistribution]:
    """Delta laws of all 2^n synthetic channels, keyed by sign sequence."""
    _check_depth(n)
    return synthesize_level(
        _as_distribution(source), n, budget=budget, max_atoms=max_atoms,
        merge_tol=merge_tol, max_concurrency=max_concurrency,
    )


def evaluate_reports(leaves: Mapping[str, DeltaDistribution], phi: Functional) -> Dict[str, float]:
    """E[phi(|Delta_{W^s}|)] per sequence, in index order."""
    return {s: expectation_phi(leaves[s], phi) for s in sorted(leaves, key=index_of)}


def info_set_from_reports(
    reports: Mapping[str, float],
    n: int,
    phi: Functional,
    eps: float,
    budget: Optional[int] = None,
    tol: Optional[float] = None,
) -> InfoSet:
    """
    Thresholds a report: s is a member iff report(s) >= 1 - eps - tol. The slack
    absorbs rounding when two channels share a value exactly at the threshold.
    """
    tol = _default_tol(budget) if tol is None else tol
    ordered = {s: float(reports[s]) for s in sorted(reports, key=index_of)}
    members = tuple(s for s, value in ordered.items() if value >= 1.0 - eps - tol)
    return InfoSet(n=n, phi=phi.label, eps=eps, budget=budget, tol=tol, members=members, report=ordered)


def build_info_set(
    source: Source,
    n: int,
    phi: Functional,
    eps: float,
    budget: Optional[int] = None,
    max_concurrency: int = 1,
    max_atoms: int = MAX_ATOMS,
    tol: Optional[float] = None,
) -> InfoSet:
    """
    A_N^{phi,eps}(W) for N = 2^n. Without a budget every transform is exact, which
    only stays small for BEC-like channels; pass a budget otherwise.
    """
    _check_eps(eps)
    log = logger.bind(op="build_info_set", n=n, phi=phi.label, eps=eps, budget=budget)
    leaves = synthesize_leaves(source, n, budget=budget, max_atoms=max_atoms, max_concurrency=max_concurrency)
    info_set = info_set_from_reports(evaluate_reports(leaves, phi), n, phi, eps, budget=budget, tol=tol)
    log.info(f"Information set has {info_set.size}/{2 ** n} members")
    return info_set


def _violations(a: InfoSet, b: InfoSet) -> List[ContainmentViolation]:
    outside = set(b.members)
    return [
        ContainmentViolation(sequence=s, index=index_of(s), lhs=a.report[s], rhs=b.report.get(s, float("nan")))
        for s in a.members
        if s not in outside
    ]


def containment(a: InfoSet, b: InfoSet) -> ContainmentReport:
    """Is A.members a subset of B.members? Both sets must share n, phi and eps."""
    if (a.n, a.phi, a.eps) != (b.n, b.phi, b.eps):
        raise ParameterMismatchError(
            f"cannot compare info sets with (n, phi, eps) = {(a.n, a.phi, a.eps)} and {(b.n, b.phi, b.eps)}"
        )
    violations = _violations(a, b)
    return ContainmentReport(
        contained=not violations,
        n=a.n,
        phi=a.phi,
        eps=a.eps,
        lhs_budget=a.budget,
        rhs_budget=b.budget,
        lhs_size=a.size,
        rhs_size=b.size,
        violations=violations,
    )


def _recheck_reports(
    root: DeltaDistribution,
    sequences: Iterable[str],
    phi: Functional,
    budget: int,
    paths: Dict[str, DeltaDistribution],
    max_atoms: int,
) -> Dict[str, float]:
    """Re-synthesizes only the root-to-leaf paths of `sequences` at `budget`."""
    paths.setdefault("", root)
    values = {}
    for s in sequences:
        for depth in range(1, len(s) + 1):
            prefix = s[:depth]
            if prefix not in paths:
                paths[prefix] = apply_sign(paths[s[: depth - 1]], s[depth - 1], budget=budget, max_atoms=max_atoms)
        values[s] = expectation_phi(paths[s], phi)
    return values


def containment_grid(
    v: Source,
    w: Source,
    n: int,
    phis: Sequence[Functional],
    eps_values: Sequence[float],
    budget: Optional[int] = None,
    recheck_budget: Optional[int] = RECHECK_BUDGET,
    max_concurrency: int = 1,
    max_atoms: int = MAX_ATOMS,
    tol: Optional[float] = None,
) -> List[ContainmentReport]:
    """
    Checks A(V) within A(W) for every (phi, eps) of the grid, phi-major. Both trees
    are synthesized once and every functional and threshold is read off the same
    leaves. Quantization lowers reports by different amounts on the two sides, so
    each violating sequence found under a budget is re-synthesized along its path
    at `recheck_budget` and re-tested before it is reported.
    """
    for eps in eps_values:
        _check_eps(eps)
    log = logger.bind(op="containment_grid", n=n, budget=budget)
    v_root, w_root = _as_distribution(v), _as_distribution(w)
    v_leaves = synthesize_leaves(v_root, n, budget=budget, max_atoms=max_atoms, max_concurrency=max_concurrency)
    w_leaves = synthesize_leaves(w_root, n, budget=budget, max_atoms=max_atoms, max_concurrency=max_concurrency)
    recheck = budget is not None and recheck_budget is not None and recheck_budget > budget
    v_paths: Dict[str, DeltaDistribution] = {}
    w_paths: Dict[str, DeltaDistribution] = {}

    reports = []
    for phi in phis:
        v_values, w_values = evaluate_reports(v_leaves, phi), evaluate_reports(w_leaves, phi)
        for eps in eps_values:
            a = info_set_from_reports(v_values, n, phi, eps, budget=budget, tol=tol)
            b = info_set_from_reports(w_values, n, phi, eps, budget=budget, tol=tol)
            report = containment(a, b)
            if not report.contained and recheck:
                log.warning(
                    f"{len(report.violations)} violations for {phi.label}, eps={eps} at budget {budget}; "
                    f"re-testing their paths at budget {recheck_budget}"
                )
                suspects = [x.sequence for x in report.violations]
                a = info_set_from_reports(
                    {**v_values, **_recheck_reports(v_root, suspects, phi, recheck_budget, v_paths, max_atoms)},
                    n, phi, eps, budget=budget, tol=tol,
                )
                b = info_set_from_reports(
                    {**w_values, **_recheck_reports(w_root, suspects, phi, recheck_budget, w_paths, max_atoms)},
                    n, phi, eps, budget=budget, tol=tol,
                )
                report = containment(a, b).model_copy(update={"rechecked": True, "recheck_budget": recheck_budget})
            reports.append(report)

    failed = sum(not r.contained for r in reports)
    log.info(f"Containment holds for {len(reports) - failed}/{len(reports)} (phi, eps) pairs")
    return reports


def verify_containment(
    v: Source,
    w: Source,
    n: int,
    phi: Functional,
    eps: float,
    budget: Optional[int] = None,
    recheck_budget: Optional[int] = RECHECK_BUDGET,
    max_concurrency: int = 1,
    max_atoms: int = MAX_ATOMS,
    tol: Optional[float] = None,
) -> ContainmentReport:
    """Builds A(V) and A(W) and checks A(V) within A(W) for one (phi, eps)."""
    return containment_grid(
        v, w, n, [phi], [eps], budget=budget, recheck_budget=recheck_budget,
        max_concurrency=max_concurrency, max_atoms=max_atoms, tol=tol,
    )[0]


def rate(info_set: InfoSet) -> float:
    """|members| / 2^n."""
    return info_set.rate
