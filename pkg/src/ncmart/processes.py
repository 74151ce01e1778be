"""Time grids, filtrations, adapted processes and martingales.

Time is a finite grid; between grid points every filtration level and
every process value is constant, so refining-partition limits elsewhere in
the package become exact once a partition contains all grid indices.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .algebra import AlgElement, TracialAlgebra, abs2, lp_norm, min_eigenvalue
from .conditional import SubalgebraLevel
from .errors import DomainError, StructureError

ADAPTED_TOL = 1e-10
INCLUSION_TOL = 1e-10


class CheckResult(NamedTuple):
    ok: bool
    residual: float


class TimeGrid:
    """Strictly increasing nonnegative times ``t_0 < t_1 < ... < t_m``."""

    def __init__(self, times: Sequence[float]):
        ts = tuple(float(t) for t in times)
        if len(ts) < 2:
            raise StructureError("a time grid needs at least two points")
        if ts[0] < 0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise StructureError("times must be nonnegative and strictly increasing")
        self.times = ts

    def __len__(self) -> int:
        return len(self.times)

    @property
    def last_index(self) -> int:
        return len(self.times) - 1

    def __repr__(self) -> str:
        return f"TimeGrid({list(self.times)})"


class Filtration:
    """Increasing chain of subalgebra levels, one per grid time.

    Construction validates that each level's spanning basis is fixed
    elementwise by the next level's expectation (inclusion within 1e-10)
    and that the final level is the full algebra.
    """

    def __init__(self, grid: TimeGrid, levels: Sequence[SubalgebraLevel], validate: bool = True):
        levels = tuple(levels)
        if len(levels) != len(grid):
            raise StructureError("need exactly one level per grid time")
        algebra = levels[0].algebra
        for k, lv in enumerate(levels):
            if lv.algebra != algebra:
                raise StructureError(f"level {k} lives in a different algebra")
        if validate:
            for k in range(len(levels) - 1):
                if levels[k] is levels[k + 1]:
                    continue
                for b in levels[k].spanning_basis():
                    if not levels[k + 1].contains(b, INCLUSION_TOL):
                        raise StructureError(
                            f"levels not increasing: level {k} is not contained in level {k + 1}")
            if levels[-1].dim != algebra.dim:
                raise StructureError(
                    f"final level has dimension {levels[-1].dim}, expected full {algebra.dim}")
        self.grid = grid
        self.levels = levels
        self.algebra = algebra

    def level_index_at(self, time: float) -> int:
        """Index of the largest grid time <= ``time`` (step filtration)."""
        ts = self.grid.times
        if time < ts[0]:
            raise DomainError(f"time {time} precedes the grid")
        return int(np.searchsorted(ts, time, side="right")) - 1

    def __len__(self) -> int:
        return len(self.levels)

    def __repr__(self) -> str:
        return f"Filtration(times={len(self.grid)}, dims={[lv.dim for lv in self.levels]})"


class AdaptedProcess:
    """Sequence of algebra elements adapted to a filtration.

    Construction rejects values that are not fixed by their level's
    expectation within 1e-10.  Supports pointwise linear arithmetic between
    processes on the same filtration and the pointwise adjoint.
    """

    def __init__(self, filtration: Filtration, values: Sequence[AlgElement],
                 label: str = "", validate: bool = True):
        values = tuple(values)
        if len(values) != len(filtration):
            raise StructureError("need exactly one value per grid time")
        for k, v in enumerate(values):
            if v.algebra != filtration.algebra:
                raise StructureError(f"value {k} from a different algebra")
        if validate:
            for k, v in enumerate(values):
                gap = lp_norm(filtration.levels[k].expect(v) - v, 2)
                if gap > ADAPTED_TOL:
                    raise StructureError(
                        f"value {k} is not adapted (residual {gap:.2e} > {ADAPTED_TOL:g})")
        self.filtration = filtration
        self.values = values
        self.label = label
        self._mart_residual: float | None = None

    def value(self, k: int) -> AlgElement:
        return self.values[k]

    @property
    def terminal(self) -> AlgElement:
        return self.values[-1]

    def _combine(self, other: "AdaptedProcess", op) -> "AdaptedProcess":
        if not isinstance(other, AdaptedProcess):
            return NotImplemented
        if self.filtration is not other.filtration:
            raise StructureError("processes live on different filtrations")
        return AdaptedProcess(self.filtration,
                              [op(a, b) for a, b in zip(self.values, other.values)],
                              validate=False)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, scalar):
        return AdaptedProcess(self.filtration, [scalar * v for v in self.values], validate=False)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def adjoint(self) -> "AdaptedProcess":
        return AdaptedProcess(self.filtration, [v.adjoint() for v in self.values],
                              label=self.label + "*" if self.label else "", validate=False)

    def martingale_residual(self) -> float:
        """max over s < t of ||E_s X(t) - X(s)||_2 (cached)."""
        if self._mart_residual is None:
            worst = 0.0
            levels, values = self.filtration.levels, self.values
            for t in range(1, len(values)):
                for s in range(t):
                    worst = max(worst, lp_norm(levels[s].expect(values[t]) - values[s], 2))
            self._mart_residual = worst
        return self._mart_residual

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"AdaptedProcess({len(self.values)} values{name})"


def martingale_from_terminal(filtration: Filtration, x_terminal: AlgElement,
                             label: str = "") -> AdaptedProcess:
    """Closed martingale X(t_k) = E_k(x); a martingale by the tower property."""
    values = [lv.expect(x_terminal) for lv in filtration.levels]
    return AdaptedProcess(filtration, values, label=label, validate=False)


def is_martingale(p: AdaptedProcess, tol: float) -> CheckResult:
    """Whether E_s X(t) == X(s) holds for all s <= t, with the max residual."""
    res = p.martingale_residual()
    return CheckResult(res <= tol, res)


def submartingale_abs2_defect(p: AdaptedProcess) -> float:
    """Worst negative-eigenvalue margin of E_s|X(t)|^2 - |X(s)|^2 over s <= t."""
    worst = 0.0
    levels, values = p.filtration.levels, p.values
    sq = [abs2(v) for v in values]
    for t in range(1, len(values)):
        for s in range(t):
            lam = min_eigenvalue(levels[s].expect(sq[t]) - sq[s], tol=1e-8)
            worst = max(worst, -lam)
    return worst


def is_submartingale_abs2(p: AdaptedProcess, tol: float) -> bool:
    """Loewner submartingale check for (|X(t)|^2); p should be a martingale."""
    return submartingale_abs2_defect(p) <= tol


def as_partition(n_times: int, partition: Iterable[int]) -> tuple[int, ...]:
    """Validate a partition: strictly increasing grid indices, at least two."""
    idx = tuple(int(i) for i in partition)
    if len(idx) < 2:
        raise DomainError("a partition needs at least two indices")
    if any(i < 0 or i >= n_times for i in idx):
        raise DomainError(f"partition index out of range 0..{n_times - 1}: {idx}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise DomainError(f"partition indices must be strictly increasing: {idx}")
    return idx


def full_partition(p: AdaptedProcess | Filtration) -> tuple[int, ...]:
    n = len(p.values) if isinstance(p, AdaptedProcess) else len(p)
    return tuple(range(n))


def increments(p: AdaptedProcess, partition: Iterable[int]) -> list[AlgElement]:
    """Increments X(t_k) - X(t_{k-1}) over consecutive partition indices."""
    idx = as_partition(len(p.values), partition)
    return [p.values[b] - p.values[a] for a, b in zip(idx, idx[1:])]


RANDOM_KINDS = ("general", "hermitian", "positive", "projection-like")


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def spawn_generators(seed: int, n: int) -> list[np.random.Generator]:
    """n independent counter-based streams for reproducible parallel sweeps."""
    return [np.random.Generator(np.random.Philox(child))
            for child in np.random.SeedSequence(seed).spawn(n)]


def random_element(algebra: TracialAlgebra, seed, kind: str = "general") -> AlgElement:
    """Seeded random element with standard complex Gaussian entries per block.

    Kinds: ``general`` (plain Ginibre blocks), ``hermitian`` ((g+g*)/2),
    ``positive`` (g* g), ``projection-like`` (range projection of a random
    isometry, rank chosen uniformly in 1..n).  Deterministic for a fixed
    seed; pass a Generator to draw several elements from one stream.
    """
    if kind not in RANDOM_KINDS:
        raise DomainError(f"unknown random kind {kind!r}")
    rng = _as_generator(seed)
    blocks = []
    for n in algebra.block_dims:
        g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        if kind == "general":
            blocks.append(g)
        elif kind == "hermitian":
            blocks.append((g + g.conj().T) / 2.0)
        elif kind == "positive":
            # BLAS does not guarantee bitwise conjugate symmetry of g* g
            h = g.conj().T @ g
            blocks.append((h + h.conj().T) / 2.0)
        else:
            rank = int(rng.integers(1, n + 1))
            q, _ = np.linalg.qr(g)
            p = q[:, :rank] @ q[:, :rank].conj().T
            blocks.append((p + p.conj().T) / 2.0)
    return AlgElement(algebra, blocks)


def refine_times(times: Sequence[float], inserts_per_gap: int = 1) -> tuple[float, ...]:
    """Original times plus ``inserts_per_gap`` evenly spaced points per gap."""
    out = []
    for a, b in zip(times, times[1:]):
        out.append(float(a))
        for j in range(1, inserts_per_gap + 1):
            out.append(float(a) + (float(b) - float(a)) * j / (inserts_per_gap + 1))
    out.append(float(times[-1]))
    return tuple(out)


def refined_filtration(filtration: Filtration,
                       new_times: Sequence[float]) -> tuple[Filtration, tuple[int, ...]]:
    """Embed a step filtration into a finer grid containing its times.

    Each new time reuses the level of the largest original grid time below
    or equal to it.  Returns the refined filtration and the source index of
    every new grid point.
    """
    old = filtration.grid.times
    newgrid = TimeGrid(new_times)
    if not set(old) <= set(newgrid.times):
        raise DomainError("refined grid must contain every original time")
    src = tuple(filtration.level_index_at(t) for t in newgrid.times)
    levels = [filtration.levels[k] for k in src]
    return Filtration(newgrid, levels), src


def lift_process(p: AdaptedProcess, refined: Filtration,
                 src: Sequence[int]) -> AdaptedProcess:
    """Constant-in-between embedding of a process onto a refined filtration."""
    return AdaptedProcess(refined, [p.values[k] for k in src], label=p.label, validate=False)
