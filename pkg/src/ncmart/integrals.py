"""Left and right stochastic integral sums and their refinement behaviour.

Sums use the left endpoint of the integrand throughout.  On a step
filtration the refining-partition limit is exact: once a partition contains
every index at which the integrator or integrand changes, further
refinement does not move the sum, which is what the refinement table
measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import AlgElement, lp_norm
from .errors import DomainError, StructureError
from .processes import AdaptedProcess, as_partition, full_partition, is_martingale

SIDES = ("left", "right")

MARTINGALE_TOL = 1e-9


@dataclass(frozen=True)
class IntegralSum:
    """One evaluated integral sum over a partition."""
    side: str
    value: AlgElement
    partition: tuple[int, ...]
    integrator_id: str
    integrand_id: str


def _check_pair(x: AdaptedProcess, f: AdaptedProcess) -> None:
    if x.filtration is not f.filtration:
        raise StructureError("integrator and integrand live on different filtrations")


def _sum(x: AdaptedProcess, f: AdaptedProcess, partition: Iterable[int], side: str) -> IntegralSum:
    _check_pair(x, f)
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}, got {side!r}")
    idx = as_partition(len(x.values), partition)
    total = x.filtration.algebra.zero()
    for a, b in zip(idx, idx[1:]):
        dx = x.values[b] - x.values[a]
        total = total + (dx @ f.values[a] if side == "left" else f.values[a] @ dx)
    return IntegralSum(side, total, idx, x.label, f.label)


def left_sum(x: AdaptedProcess, f: AdaptedProcess, partition: Iterable[int]) -> IntegralSum:
    """sum_k [X(t_k) - X(t_{k-1})] f(t_{k-1}) over consecutive partition points."""
    return _sum(x, f, partition, "left")


def right_sum(x: AdaptedProcess, f: AdaptedProcess, partition: Iterable[int]) -> IntegralSum:
    """sum_k f(t_{k-1}) [X(t_k) - X(t_{k-1})] over consecutive partition points."""
    return _sum(x, f, partition, "right")


def integral_process(x: AdaptedProcess, f: AdaptedProcess, side: str,
                     label: str = "") -> AdaptedProcess:
    """Partial integral sums over the full grid, as an adapted process.

    The integrator must pass the martingale check at 1e-9; the resulting
    process is then itself a martingale (a property the tests verify).
    """
    _check_pair(x, f)
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}, got {side!r}")
    ok, res = is_martingale(x, MARTINGALE_TOL)
    if not ok:
        raise DomainError(f"integrator fails the martingale check (residual {res:.2e})")
    values = [x.filtration.algebra.zero()]
    for k in range(1, len(x.values)):
        dx = x.values[k] - x.values[k - 1]
        term = dx @ f.values[k - 1] if side == "left" else f.values[k - 1] @ dx
        values.append(values[-1] + term)
    return AdaptedProcess(x.filtration, values, label=label or f"{side}_integral")


def integrand_bound(f: AdaptedProcess) -> float:
    """sup over grid times of the operator norm of the integrand."""
    return max(lp_norm(v, math.inf) for v in f.values)


def refinement_table(x: AdaptedProcess, f: AdaptedProcess, side: str,
                     chain: Sequence[Iterable[int]]) -> list[float]:
    """Cauchy-decay diagnostics along a nested partition chain.

    Entry i is ||S_{theta_{i+1}} - S_{theta_i}||_2 for consecutive chain
    members; the full grid is always appended as the final comparison
    target, so the last entry measures the distance to the finest sum and
    vanishes once the chain reaches it.
    """
    n = len(x.values)
    parts = [as_partition(n, c) for c in chain]
    if not parts:
        raise DomainError("empty partition chain")
    for a, b in zip(parts, parts[1:]):
        if not set(a) <= set(b):
            raise DomainError(f"partition chain is not nested: {a} is not a subset of {b}")
    parts.append(full_partition(x))
    sums = [_sum(x, f, p, side).value for p in parts]
    return [lp_norm(b - a, 2) for a, b in zip(sums, sums[1:])]
