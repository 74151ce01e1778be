"""Inequality ratios, projection certificates and continuity moduli.

The square-function and dual Doob constants are only known to exist, so
this module estimates the observed ratios over sweeps instead of asserting
numeric bounds.  The Chebyshev and Kolmogorov-type projection bounds, by
contrast, are theorems with explicit constants and are checked as stated
(strict inequalities relaxed to non-strict plus 1e-10, since only the
non-strict form is forced at degenerate equality).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .algebra import (AlgElement, Projection, abs2, loewner_psd, lp_norm,
                      proj_meet, psd_sqrt, spectral_projection, trace)
from .errors import DomainError, IdentityViolation, UndefinedRatioError
from .processes import AdaptedProcess, as_partition, increments, is_martingale

MARTINGALE_TOL = 1e-9
TRACE_BOUND_TOL = 1e-10
SUP_NORM_TOL = 1e-9
DENOMINATOR_FLOOR = 1e-12

SIDES = ("left", "right")
MODULUS_SIDES = ("left", "right", "weak")


@dataclass(frozen=True)
class ChebyshevCertificate:
    """Spectral tail projection of a positive element with its trace bound."""
    projection: Projection
    eta: float
    trace_value: float   # tau(e)
    trace_bound: float   # tau(x)/eta
    tail_norm: float     # ||(1-e) x (1-e)||_inf


@dataclass(frozen=True)
class ProjectionCertificate:
    """Kolmogorov-type uniform bound certificate for a finite martingale.

    ``meets`` is the decreasing chain f_1 >= f_2 >= ... >= f_m whose last
    member is the certified projection.
    """
    projection: Projection
    epsilon: float
    trace_defect: float          # tau(1 - e)
    trace_bound: float           # ||X_m||_2^2 / eps^2
    sup_norms: tuple[float, ...]  # compressed operator norm per step
    side: str
    meets: tuple[Projection, ...] = field(repr=False, default=())

    def __post_init__(self):
        if self.trace_defect > self.trace_bound + TRACE_BOUND_TOL:
            raise IdentityViolation(
                f"trace bound violated: {self.trace_defect:.6e} > {self.trace_bound:.6e}")
        worst = max(self.sup_norms, default=0.0)
        if worst > self.epsilon + SUP_NORM_TOL:
            raise IdentityViolation(
                f"sup-norm bound violated: {worst:.6e} > eps={self.epsilon:.6e}")


@dataclass(frozen=True)
class RatioEstimate:
    """Sweep statistics for one exponent p; ``ratio`` is the mean observed value."""
    p: float
    ratio: float
    instance_count: int
    max_ratio: float
    seed: int

    def __post_init__(self):
        if not (np.isfinite(self.ratio) and np.isfinite(self.max_ratio)
                and self.ratio >= 0.0 and self.max_ratio >= 0.0):
            raise IdentityViolation(
                f"ratio statistics must be finite and nonnegative: {self}")


def bg_ratio(x: AdaptedProcess, partition: Iterable[int], p: float) -> float:
    """||(sum_k |dX_k|^2)^(1/2)||_p / ||X(t_m)||_p for a martingale X.

    Requires p >= 2.  At p = 2 the ratio never exceeds 1 for X(0) = 0
    (the square sum then reproduces ||X_m||_2^2 - ||X_0||_2^2 exactly).
    """
    if p < 2:
        raise DomainError(f"square-function ratio needs p >= 2, got {p}")
    idx = as_partition(len(x.values), partition)
    square = x.filtration.algebra.zero()
    for dx in increments(x, idx):
        square = square + abs2(dx)
    numerator = lp_norm(psd_sqrt(square), p)
    denominator = lp_norm(x.values[idx[-1]], p)
    if denominator <= DENOMINATOR_FLOOR:
        raise UndefinedRatioError(f"terminal p-norm {denominator:.2e} too small")
    return numerator / denominator


def dual_doob_ratio(x: AdaptedProcess, partition: Iterable[int], p: float) -> float:
    """||sum_k E_{k-1}|dX_k|^2||_{p/2} / ||sum_k |dX_k|^2||_{p/2}.

    At p = 2 both p/2-norms are traces and agree exactly.
    """
    if p < 2:
        raise DomainError(f"dual Doob ratio needs p >= 2, got {p}")
    idx = as_partition(len(x.values), partition)
    levels = x.filtration.levels
    plain = x.filtration.algebra.zero()
    conditioned = x.filtration.algebra.zero()
    for i, j in zip(idx, idx[1:]):
        sq = abs2(x.values[j] - x.values[i])
        plain = plain + sq
        conditioned = conditioned + levels[i].expect(sq)
    denominator = lp_norm(plain, p / 2)
    if denominator <= DENOMINATOR_FLOOR:
        raise UndefinedRatioError(f"square-sum {p / 2}-norm {denominator:.2e} too small")
    return lp_norm(conditioned, p / 2) / denominator


def chebyshev_projection(x: AlgElement, eta: float) -> ChebyshevCertificate:
    """Tail spectral projection e = e_{[eta, inf)}(x) of a positive element.

    Asserts the trace bound tau(e) <= tau(x)/eta and the compression bound
    ||(1-e) x (1-e)||_inf <= eta, both up to 1e-10.
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    if not loewner_psd(x, 1e-10):
        raise DomainError("chebyshev projection needs a positive semidefinite element")
    e = spectral_projection(x, (eta, math.inf))
    trace_value = trace(e.element).real
    trace_bound = trace(x).real / eta
    comp = e.complement().element
    tail_norm = lp_norm(comp @ x @ comp, math.inf)
    if trace_value > trace_bound + TRACE_BOUND_TOL:
        raise IdentityViolation(
            f"Chebyshev trace bound violated: {trace_value:.6e} > {trace_bound:.6e}")
    if tail_norm > eta + TRACE_BOUND_TOL:
        raise IdentityViolation(
            f"Chebyshev compression bound violated: {tail_norm:.6e} > {eta:.6e}")
    return ChebyshevCertificate(e, eta, trace_value, trace_bound, tail_norm)


def kolmogorov_projection(x: AdaptedProcess, epsilon: float, side: str) -> ProjectionCertificate:
    """Uniform-bound projection for a finite martingale.

    Builds the inductive chain ``e_n`` of spectral projections of the
    compressed square values on [0, eps^2) and their running meets ``f_n``;
    the certificate carries e = f_m together with tau(1-e), the trace
    bound ||X_m||_2^2/eps^2 and the per-step compressed norms (``e X_n``
    for the left side, ``X_n e`` for the right side), all checked.
    """
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}, got {side!r}")
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    ok, res = is_martingale(x, MARTINGALE_TOL)
    if not ok:
        raise DomainError(f"certificate needs a martingale (residual {res:.2e})")

    steps = x.values[1:]
    if not steps:
        raise DomainError("martingale needs at least one step")
    cut = (0.0, epsilon * epsilon)
    meets: list[Projection] = []
    f = None
    for v in steps:
        sq = v @ v.adjoint() if side == "left" else v.adjoint() @ v
        if f is not None:
            sq = f.element @ sq @ f.element
        e_n = spectral_projection(sq, cut)
        f = e_n if f is None else proj_meet(f, e_n)
        meets.append(f)

    e = meets[-1]
    trace_defect = trace(e.complement().element).real
    trace_bound = lp_norm(x.values[-1], 2) ** 2 / (epsilon * epsilon)
    if side == "left":
        sup_norms = tuple(lp_norm(e.element @ v, math.inf) for v in steps)
    else:
        sup_norms = tuple(lp_norm(v @ e.element, math.inf) for v in steps)
    return ProjectionCertificate(e, epsilon, trace_defect, trace_bound,
                                 sup_norms, side, tuple(meets))


def epsilon_from_percentile(x: AdaptedProcess, percentile: float) -> float:
    """Threshold at the given percentile of the step operator norms.

    Keeps certificates nontrivial with high probability; floored at 1e-8
    so epsilon stays positive even for the zero process.
    """
    norms = [lp_norm(v, math.inf) for v in x.values[1:]]
    return max(float(np.percentile(norms, percentile)), 1e-8)


def segal_modulus(p: AdaptedProcess, e: Projection,
                  side: str = "weak") -> list[tuple[float, float]]:
    """Compressed-increment continuity moduli of a process.

    For every distinct gap width d between grid times, reports
    sup over |t - s| <= d of the compressed increment operator norm
    (e*(X(t)-X(s)) for ``left``, (X(t)-X(s))*e for ``right``,
    e*(X(t)-X(s))*e for ``weak``).  Monotone nondecreasing in d.
    """
    if side not in MODULUS_SIDES:
        raise DomainError(f"side must be one of {MODULUS_SIDES}, got {side!r}")
    times = p.filtration.grid.times
    pairs = []
    for j in range(1, len(times)):
        for i in range(j):
            delta = p.values[j] - p.values[i]
            if side == "left":
                comp = e.element @ delta
            elif side == "right":
                comp = delta @ e.element
            else:
                comp = e.element @ delta @ e.element
            pairs.append((times[j] - times[i], lp_norm(comp, math.inf)))
    pairs.sort(key=lambda gn: gn[0])
    table: list[tuple[float, float]] = []
    running = 0.0
    for gap, norm in pairs:
        running = max(running, norm)
        if table and table[-1][0] == gap:
            table[-1] = (gap, running)
        else:
            table.append((gap, running))
    return table
