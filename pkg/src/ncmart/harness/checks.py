"""The per-instance identity suite behind the ``verify`` command.

Each check computes a residual with its own code path (re-deriving both
sides rather than trusting the op under test), freezes the tolerance the
contract states, and emits one record.  Formula strings describe the
identity itself so a failing record is self-explanatory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..algebra import AlgElement, abs2, lp_norm, min_eigenvalue, trace
from ..conditional import SubalgebraLevel
from ..doob_meyer import (bracket_via_integrals, compensator, cross_variation,
                          doob_meyer_decompose, naturality_gap, naturality_pairing,
                          quadratic_variation_sum, uniqueness_residual)
from ..integrals import integral_process, left_sum, right_sum
from ..processes import (AdaptedProcess, Filtration, full_partition, increments,
                         lift_process, martingale_from_terminal, random_element,
                         refine_times, refined_filtration)


@dataclass(frozen=True)
class CheckRecord:
    check: str
    formula: str
    residual: float
    tolerance: float
    passed: bool
    instance: int


def record(check: str, formula: str, residual: float, tolerance: float,
           instance: int) -> CheckRecord:
    residual = float(residual)
    return CheckRecord(check, formula, residual, tolerance, residual <= tolerance, instance)


def _general_twin(level: SubalgebraLevel) -> SubalgebraLevel:
    # cache the Gram-engine twin on the level; filtrations are reused across instances
    twin = getattr(level, "_general_twin", None)
    if twin is None:
        twin = level.as_general()
        level._general_twin = twin
    return twin


def conditional_expectation_checks(filtration: Filtration, x: AlgElement, y: AlgElement,
                                   instance: int) -> list[CheckRecord]:
    """Trace duality/preservation, tower, module, Schwarz, contraction, engines."""
    levels = filtration.levels
    duality = preserve = tower = module = schwarz = contraction = engines = 0.0
    for k, level in enumerate(levels):
        ex = level.expect(x)
        duality = max(duality, abs(trace(ex @ y) - trace(x @ level.expect(y))))
        preserve = max(preserve, abs(trace(ex) - trace(x)))
        a = level.expect(y)
        b = level.expect(x @ y)
        module = max(module, lp_norm(level.expect(a @ x @ b) - a @ ex @ b, 2))
        schwarz = max(schwarz, -min_eigenvalue(level.expect(abs2(x)) - abs2(ex), tol=1e-8))
        for p in (1.0, 2.0, 4.0, math.inf):
            contraction = max(contraction, lp_norm(ex, p) - lp_norm(x, p))
        if level.kind != "general":
            engines = max(engines, lp_norm(ex - _general_twin(level).expect(x), 2))
        for s in range(k):
            tower = max(tower, lp_norm(levels[s].expect(ex) - levels[s].expect(x), 2))
    return [
        record("trace_duality", "tau((E_t x) y) == tau(x E_t y)", duality, 1e-10, instance),
        record("trace_preservation", "tau(E_t x) == tau(x)", preserve, 1e-10, instance),
        record("tower_property", "E_s(E_t x) == E_s x for s <= t", tower, 1e-10, instance),
        record("module_property", "E_t(a x b) == a (E_t x) b for a, b in level t",
               module, 1e-9, instance),
        record("schwarz_positivity", "E_t|x|^2 >= |E_t x|^2 (Loewner)",
               max(schwarz, 0.0), 1e-9, instance),
        record("norm_contraction", "||E_t x||_p <= ||x||_p for p in {1,2,4,inf}",
               max(contraction, 0.0), 1e-9, instance),
        record("engine_agreement", "closed-form E_t == Gram-engine E_t",
               engines, 1e-10, instance),
    ]


def martingale_checks(x: AdaptedProcess, instance: int) -> list[CheckRecord]:
    levels = x.filtration.levels
    grid = full_partition(x)
    dxs = increments(x, grid)
    sq = [abs2(v) for v in x.values]

    null_inc = max(lp_norm(levels[k - 1].expect(dx), 2) for k, dx in enumerate(dxs, 1))
    proj_id = max(
        lp_norm(levels[k - 1].expect(abs2(dx)) - levels[k - 1].expect(sq[k] - sq[k - 1]), 2)
        for k, dx in enumerate(dxs, 1))
    energy = abs(sum(trace(abs2(dx)).real for dx in dxs)
                 - (trace(sq[-1]).real - trace(sq[0]).real))
    monotone = 0.0
    for p in (2.0, 4.0):
        norms = [lp_norm(v, p) for v in x.values]
        monotone = max(monotone, max(a - b for a, b in zip(norms, norms[1:])))
    submart = 0.0
    for t in range(1, len(x.values)):
        for s in range(t):
            submart = max(submart, -min_eigenvalue(levels[s].expect(sq[t]) - sq[s], tol=1e-8))
    return [
        record("martingale_residual", "E_s X(t) == X(s)",
               x.martingale_residual(), 1e-10, instance),
        record("null_increments", "E_{k-1} dX_k == 0", null_inc, 1e-10, instance),
        record("increment_projection",
               "E_{k-1}|dX_k|^2 == E_{k-1}(|X_k|^2 - |X_{k-1}|^2)", proj_id, 1e-10, instance),
        record("increment_energy",
               "sum_k tau|dX_k|^2 == tau|X_m|^2 - tau|X_0|^2", energy, 1e-10, instance),
        record("norm_monotonicity", "||X(s)||_p <= ||X(t)||_p for p in {2,4}",
               max(monotone, 0.0), 1e-9, instance),
        record("submartingale_loewner", "E_s|X(t)|^2 >= |X(s)|^2 (Loewner)",
               max(submart, 0.0), 1e-9, instance),
    ]


def integral_checks(x: AdaptedProcess, f: AdaptedProcess, instance: int) -> list[CheckRecord]:
    grid = full_partition(x)

    # exact invariance under refinement past the finest grid
    fine, src = refined_filtration(x.filtration, refine_times(x.filtration.grid.times))
    xf, ff = lift_process(x, fine, src), lift_process(f, fine, src)
    orig_in_fine = [k for k, s in enumerate(src) if k == 0 or s != src[k - 1]]
    invariance = 0.0
    ortho = 0.0
    for side in ("left", "right"):
        sum_fn = left_sum if side == "left" else right_sum
        coarse = sum_fn(xf, ff, orig_in_fine).value
        finest = sum_fn(xf, ff, full_partition(xf)).value
        invariance = max(invariance, lp_norm(finest - coarse, 2))

    # cross terms of a genuine refinement difference vanish in the trace
    half = grid[::2] if grid[-1] in grid[::2] else tuple(grid[::2]) + (grid[-1],)
    if len(half) >= 2 and len(half) < len(grid):
        diff_terms = []
        for a, b in zip(half, half[1:]):
            for k in range(a, b):
                dx = x.values[k + 1] - x.values[k]
                diff_terms.append(dx @ (f.values[k] - f.values[a]))
        total = x.filtration.algebra.zero()
        for t in diff_terms:
            total = total + t
        lhs = lp_norm(total, 2) ** 2
        rhs = sum(lp_norm(t, 2) ** 2 for t in diff_terms)
        ortho = abs(lhs - rhs)

    left_proc = integral_process(x, f, "left")
    right_proc = integral_process(x, f, "right")
    return [
        record("refinement_invariance",
               "S_theta is fixed once theta contains every change index",
               invariance, 1e-12, instance),
        record("refinement_orthogonality",
               "||S_fine - S_coarse||_2^2 == sum of diagonal term norms",
               ortho, 1e-10, instance),
        record("integral_martingale_left", "partial left integral sums form a martingale",
               left_proc.martingale_residual(), 1e-9, instance),
        record("integral_martingale_right", "partial right integral sums form a martingale",
               right_proc.martingale_residual(), 1e-9, instance),
    ]


def doob_meyer_checks(x: AdaptedProcess, y: AdaptedProcess, partner: AlgElement,
                      instance: int) -> list[CheckRecord]:
    grid = full_partition(x)
    levels = x.filtration.levels
    out: list[CheckRecord] = []

    qv = quadratic_variation_sum(x, grid)
    bracket = bracket_via_integrals(x, grid)
    out.append(record("bracket_equals_qv",
                      "|X_m|^2 - |X_0|^2 - S^l(dX*, X) - S^r(X*, dX) == sum_k |dX_k|^2",
                      lp_norm(bracket - qv, 2), 1e-10, instance))

    a = compensator(x)
    lhs, rhs = naturality_pairing(a, partner, grid)
    out.append(record("naturality_pairing",
                      "sum_k tau(E_{k-1}(y) dA_k) == tau(y A_m) for predictable A",
                      abs(lhs - rhs), 1e-10, instance))

    # orthogonality and fourth-moment bound of the two-variant gap
    terms = []
    fourth = 0.0
    for k, dx in enumerate(increments(x, grid), 1):
        sq = abs2(dx)
        terms.append(sq - levels[k - 1].expect(sq))
        fourth += trace(sq @ sq).real
    total = x.filtration.algebra.zero()
    for t in terms:
        total = total + t
    g = lp_norm(total, 2)
    out.append(record("gap_orthogonality",
                      "g^2 == sum_k || |dX_k|^2 - E_{k-1}|dX_k|^2 ||_2^2",
                      abs(g ** 2 - sum(lp_norm(t, 2) ** 2 for t in terms)), 1e-9, instance))
    out.append(record("gap_fourth_moment", "g^2 <= 4 tau(sum_k |dX_k|^4)",
                      max(0.0, g ** 2 - 4.0 * fourth), 1e-9, instance))
    naturality_gap(x, grid)  # the op's own verification must agree

    comp_inc = max(lp_norm(levels[j - 1].expect(a.values[j] - a.values[j - 1])
                           - (levels[j - 1].expect(abs2(x.values[j])) - abs2(x.values[j - 1])), 2)
                   for j in range(1, len(a.values)))
    out.append(record("compensator_increment",
                      "E_{j-1} dA_j == E_{j-1}|X_j|^2 - |X_{j-1}|^2", comp_inc, 1e-10, instance))

    pair_gap = abs(trace(partner @ (a.values[-1] - qv)))
    out.append(record("pairing_gap_bound", "|tau(y (A_m - <X>_m))| <= ||y||_2 g",
                      max(0.0, pair_gap - lp_norm(partner, 2) * g), 1e-10, instance))

    herm = 0.5 * (x + x.adjoint())
    out.append(record("uniqueness_residual",
                      "tau(sum_k (dM_k)^2) == tau|M_m|^2 - tau|M_0|^2 for selfadjoint M",
                      uniqueness_residual(herm), 1e-10, instance))

    # cross variation against the second martingale, via independent routes
    direct = x.filtration.algebra.zero()
    for dx, dy in zip(increments(x, grid), increments(y, grid)):
        direct = direct + dx.adjoint() @ dy
    xs = x.adjoint()
    expansion = (xs.values[-1] @ y.values[-1] - xs.values[0] @ y.values[0]
                 - left_sum(xs, y, grid).value - right_sum(y, xs, grid).value)
    out.append(record("cross_expansion",
                      "sum_k dX_k* dY_k == X*Y|_0^m - S^l(dX*, Y) - S^r(X*, dY)",
                      lp_norm(direct - expansion, 2), 1e-10, instance))
    qvp = lambda p: quadratic_variation_sum(p, grid)
    polar = 0.25 * (qvp(x + y) - qvp(x - y) + 1j * (qvp(1j * x + y) - qvp(1j * x - y)))
    out.append(record("cross_polarization",
                      "4 <X,Y> == <X+Y> - <X-Y> + i(<iX+Y> - <iX-Y>)",
                      lp_norm(direct - polar, 2), 1e-10, instance))
    cross_variation(x, y, grid)  # the op's own verification must agree

    for variant in ("predictable", "bracket"):
        d = doob_meyer_decompose(x, variant)
        out.append(record(f"dm_reconstruction_{variant}", "|X_t|^2 == M_t + A_t",
                          d.residuals["reconstruction"], 1e-10, instance))
        out.append(record(f"dm_martingale_part_{variant}", "M is a martingale",
                          d.residuals["martingale_part"], 1e-9, instance))
        out.append(record(f"dm_initial_{variant}", "A(0) == 0",
                          d.residuals["initial"], 1e-10, instance))
        out.append(record(f"dm_increasing_{variant}", "dA_j >= 0 (Loewner)",
                          d.residuals["increment_psd_defect"], 1e-9, instance))
        if variant == "predictable":
            out.append(record("dm_predictable", "A(t_j) lies in level j-1",
                              d.residuals["predictability"], 1e-10, instance))
    return out


def instance_checks(filtration: Filtration, rng: np.random.Generator, instance: int,
                    terminal: AlgElement | None = None) -> list[CheckRecord]:
    """Run the whole identity suite for one seeded instance."""
    algebra = filtration.algebra
    x_term = terminal if terminal is not None else random_element(algebra, rng, "general")
    partner = random_element(algebra, rng, "general")
    y_term = random_element(algebra, rng, "general")

    x = martingale_from_terminal(filtration, x_term, label="X")
    y = martingale_from_terminal(filtration, y_term, label="Y")

    records = conditional_expectation_checks(filtration, x_term, partner, instance)
    records += martingale_checks(x, instance)
    records += integral_checks(x, y, instance)
    records += doob_meyer_checks(x, y, partner, instance)
    return records
