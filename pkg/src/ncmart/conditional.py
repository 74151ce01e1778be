"""Trace-preserving conditional expectations onto subalgebras.

Every expectation here is the orthogonal projection in the trace inner
product ``<a, b> = tau(a* b)``; for a *-subalgebra containing the identity
of a finite-dimensional tracial algebra that projection is automatically
the unique trace-preserving conditional expectation.  Partition-structured
subalgebras get closed forms; arbitrary spanned subalgebras go through a
Gram-system engine with a cached orthonormal basis.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import AlgElement, TracialAlgebra, lp_norm, trace
from .errors import DomainError, IdentityViolation, IllConditionedBasisError, StructureError

INCLUSION_TOL = 1e-10
COND_LIMIT = 1e12

LEVEL_KINDS = ("scalars", "block_scalar", "block_full", "general")


def _normalize_groups(algebra: TracialAlgebra, groups) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Validate a per-block coordinate partition and freeze it as tuples."""
    if len(groups) != algebra.nblocks:
        raise StructureError(f"need one partition per block, got {len(groups)}")
    normalized = []
    for n, block_groups in zip(algebra.block_dims, groups):
        seen: set[int] = set()
        frozen = []
        for g in block_groups:
            idx = tuple(int(i) for i in g)
            if not idx:
                raise StructureError("empty coordinate group")
            if any(i < 0 or i >= n for i in idx):
                raise StructureError(f"coordinate out of range for block of size {n}: {idx}")
            if seen & set(idx):
                raise StructureError(f"overlapping coordinate groups: {idx}")
            seen |= set(idx)
            frozen.append(idx)
        if seen != set(range(n)):
            raise StructureError(f"groups do not cover all {n} coordinates")
        normalized.append(tuple(frozen))
    return tuple(normalized)


class SubalgebraLevel:
    """A unital *-subalgebra together with its expectation engine.

    Use the classmethod constructors: :meth:`scalars`, :meth:`block_scalar`,
    :meth:`block_full`, :meth:`general`.
    """

    def __init__(self, algebra: TracialAlgebra, kind: str, groups=None, basis=None,
                 cond_limit: float = COND_LIMIT):
        if kind not in LEVEL_KINDS:
            raise StructureError(f"unknown level kind {kind!r}")
        self.algebra = algebra
        self.kind = kind
        self.groups = None
        self.basis: tuple[AlgElement, ...] | None = None
        self._masks = None       # block_full: boolean same-group masks per block
        self._onb = None         # general: orthonormal rows in scaled-vec space
        self.condition = 1.0
        self._span_cache: tuple[AlgElement, ...] | None = None

        if kind in ("block_scalar", "block_full"):
            if groups is None:
                raise StructureError(f"{kind} level requires a coordinate partition")
            self.groups = _normalize_groups(algebra, groups)
            if kind == "block_full":
                self._masks = []
                for n, block_groups in zip(algebra.block_dims, self.groups):
                    mask = np.zeros((n, n), dtype=bool)
                    for g in block_groups:
                        ix = np.array(g)
                        mask[np.ix_(ix, ix)] = True
                    self._masks.append(mask)
        elif kind == "general":
            if not basis:
                raise StructureError("general level requires a nonempty basis")
            self.basis = tuple(basis)
            for b in self.basis:
                if b.algebra != algebra:
                    raise StructureError("basis element from a different algebra")
            self._build_onb(cond_limit)
            self._validate_general()

    # -- constructors ----------------------------------------------------

    @classmethod
    def scalars(cls, algebra: TracialAlgebra) -> "SubalgebraLevel":
        """C*1: the trivial subalgebra of scalar multiples of the identity."""
        return cls(algebra, "scalars")

    @classmethod
    def block_scalar(cls, algebra: TracialAlgebra, groups) -> "SubalgebraLevel":
        """One scalar per coordinate group: span of the group projections."""
        return cls(algebra, "block_scalar", groups=groups)

    @classmethod
    def block_full(cls, algebra: TracialAlgebra, groups) -> "SubalgebraLevel":
        """All matrices supported on the diagonal group blocks."""
        return cls(algebra, "block_full", groups=groups)

    @classmethod
    def general(cls, algebra: TracialAlgebra, basis: Sequence[AlgElement],
                cond_limit: float = COND_LIMIT) -> "SubalgebraLevel":
        """Subalgebra spanned by ``basis``; must be *-closed and contain 1."""
        return cls(algebra, "general", basis=basis, cond_limit=cond_limit)

    # -- Gram engine ------------------------------------------------------

    def _scales(self) -> list[float]:
        alg = self.algebra
        return [np.sqrt(w / n) for w, n in zip(alg.block_weights, alg.block_dims)]

    def _uvec(self, x: AlgElement) -> np.ndarray:
        """Flatten to a vector in which the trace inner product is standard."""
        return np.concatenate([s * m.ravel() for s, m in zip(self._scales(), x.blocks)])

    def _unvec(self, v: np.ndarray) -> AlgElement:
        alg = self.algebra
        out, pos = [], 0
        for s, n in zip(self._scales(), alg.block_dims):
            out.append(v[pos:pos + n * n].reshape(n, n) / s)
            pos += n * n
        return AlgElement(alg, out)

    def _build_onb(self, cond_limit: float) -> None:
        rows = np.stack([self._uvec(b) for b in self.basis])
        gram = rows @ rows.conj().T
        w, v = np.linalg.eigh(gram)
        wmax = float(w[-1])
        wmin = float(w[0])
        cond = np.inf if wmin <= 0 else wmax / wmin
        if not np.isfinite(cond) or cond > cond_limit:
            raise IllConditionedBasisError("linearly dependent subalgebra basis", cond)
        self.condition = cond
        self._onb = (v.conj().T @ rows) / np.sqrt(w)[:, None]

    def _validate_general(self) -> None:
        one = self.algebra.identity()
        if lp_norm(self.expect(one) - one, 2) > INCLUSION_TOL:
            raise StructureError("identity is not in the span of the basis")
        for b in self.basis:
            adj = b.adjoint()
            if lp_norm(self.expect(adj) - adj, 2) > INCLUSION_TOL:
                raise StructureError("basis is not *-closed within tolerance")

    # -- expectation ------------------------------------------------------

    def expect(self, x: AlgElement) -> AlgElement:
        """Orthogonal projection of x onto the subalgebra.

        Closed forms: scalars -> tau(x)*1; block_full -> pinching by the
        group blocks; block_scalar -> group-normalized trace on each group.
        The general kind solves the Gram system through the cached
        orthonormal basis.
        """
        if x.algebra != self.algebra:
            raise StructureError("element from a different algebra")
        if self.kind == "scalars":
            return trace(x) * self.algebra.identity()
        if self.kind == "block_full":
            return AlgElement(self.algebra,
                              [np.where(mask, m, 0.0) for mask, m in zip(self._masks, x.blocks)])
        if self.kind == "block_scalar":
            out = []
            for n, block_groups, m in zip(self.algebra.block_dims, self.groups, x.blocks):
                r = np.zeros((n, n), dtype=complex)
                for g in block_groups:
                    ix = np.array(g)
                    r[ix, ix] = m[ix, ix].sum() / len(g)
                out.append(r)
            return AlgElement(self.algebra, out)
        coeff = self._onb.conj() @ self._uvec(x)
        return self._unvec(self._onb.T @ coeff)

    def contains(self, x: AlgElement, tol: float = INCLUSION_TOL) -> bool:
        return lp_norm(self.expect(x) - x, 2) <= tol

    @property
    def dim(self) -> int:
        if self.kind == "scalars":
            return 1
        if self.kind == "block_scalar":
            return sum(len(bg) for bg in self.groups)
        if self.kind == "block_full":
            return sum(len(g) ** 2 for bg in self.groups for g in bg)
        return self._onb.shape[0]

    def spanning_basis(self) -> tuple[AlgElement, ...]:
        """A basis of the subalgebra (canonical for the closed-form kinds)."""
        if self._span_cache is not None:
            return self._span_cache
        alg = self.algebra
        if self.kind == "scalars":
            basis = (alg.identity(),)
        elif self.kind == "general":
            basis = self.basis
        else:
            elems = []
            for b, (n, block_groups) in enumerate(zip(alg.block_dims, self.groups)):
                for g in block_groups:
                    if self.kind == "block_scalar":
                        m = np.zeros((n, n), dtype=complex)
                        ix = np.array(g)
                        m[ix, ix] = 1.0
                        elems.append(self._single_block(b, m))
                    else:
                        for i in g:
                            for j in g:
                                m = np.zeros((n, n), dtype=complex)
                                m[i, j] = 1.0
                                elems.append(self._single_block(b, m))
            basis = tuple(elems)
        self._span_cache = basis
        return basis

    def _single_block(self, b: int, mat: np.ndarray) -> AlgElement:
        blocks = [np.zeros((n, n), dtype=complex) for n in self.algebra.block_dims]
        blocks[b] = mat
        return AlgElement(self.algebra, blocks)

    def as_general(self) -> "SubalgebraLevel":
        """The same subalgebra rebuilt on the Gram engine (for cross-checks)."""
        return SubalgebraLevel.general(self.algebra, self.spanning_basis())

    def __repr__(self) -> str:
        return f"SubalgebraLevel(kind={self.kind!r}, dim={self.dim})"


def expect_chain(levels: Sequence[SubalgebraLevel], x: AlgElement,
                 s_index: int, t_index: int, tol: float = INCLUSION_TOL) -> AlgElement:
    """Iterated expectation E_s(E_t(x)) with the tower identity verified.

    Returns the level-s expectation of x; raises IdentityViolation if the
    chained and direct projections disagree beyond ``tol`` (which would
    mean the levels are not nested).
    """
    if not (0 <= s_index < len(levels) and 0 <= t_index < len(levels)):
        raise DomainError("level index out of range")
    if s_index > t_index:
        raise DomainError("s_index must not exceed t_index")
    chained = levels[s_index].expect(levels[t_index].expect(x))
    direct = levels[s_index].expect(x)
    gap = lp_norm(chained - direct, 2)
    if gap > tol:
        raise IdentityViolation(f"tower identity violated by {gap:.2e}")
    return direct
