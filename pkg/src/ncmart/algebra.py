"""Block matrix *-algebras with a normalized faithful trace.

An algebra here is a finite direct sum of full complex matrix blocks
``M_{n_1} (+) ... (+) M_{n_B}`` carrying the trace

    tau(x) = sum_b w_b * tr(x_b) / n_b,

a weighted average of normalized block traces, so ``tau(1) == 1`` and tau
is faithful whenever every weight is positive.  This module provides the
element arithmetic, Schatten-type p-norms, Hermitian functional calculus,
spectral projections and the projection-lattice meet that everything else
is built on.
"""

from __future__ import annotations

import math
import numbers
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, StructureError

HERMITIAN_TOL = 1e-10
PROJECTION_TOL = 1e-10
BOUNDARY_TOL = 1e-12
MEET_NULL_TOL = 1e-8


class TracialAlgebra:
    """Direct sum of full matrix blocks with a weighted normalized trace.

    Parameters
    ----------
    block_dims:
        Positive block sizes ``(n_1, ..., n_B)``.
    block_weights:
        Positive weights summing to 1; defaults to uniform ``1/B``.
    """

    def __init__(self, block_dims: Sequence[int], block_weights: Sequence[float] | None = None):
        dims = tuple(int(n) for n in block_dims)
        if not dims or any(n < 1 for n in dims):
            raise StructureError(f"block_dims must be positive integers, got {block_dims!r}")
        if block_weights is None:
            weights = tuple(1.0 / len(dims) for _ in dims)
        else:
            weights = tuple(float(w) for w in block_weights)
        if len(weights) != len(dims):
            raise StructureError("block_weights length must match block_dims")
        if any(w <= 0 for w in weights):
            raise StructureError("block_weights must be positive (trace faithfulness)")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise StructureError(f"block_weights must sum to 1, got {sum(weights)!r}")
        self.block_dims = dims
        self.block_weights = weights
        self._identity: AlgElement | None = None

    @property
    def nblocks(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension sum(n_b^2) of the algebra."""
        return sum(n * n for n in self.block_dims)

    def element(self, blocks: Iterable[np.ndarray]) -> "AlgElement":
        return AlgElement(self, blocks)

    def identity(self) -> "AlgElement":
        if self._identity is None:
            self._identity = AlgElement(self, [np.eye(n, dtype=complex) for n in self.block_dims])
        return self._identity

    def zero(self) -> "AlgElement":
        return AlgElement(self, [np.zeros((n, n), dtype=complex) for n in self.block_dims])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TracialAlgebra):
            return NotImplemented
        return self.block_dims == other.block_dims and self.block_weights == other.block_weights

    def __hash__(self) -> int:
        return hash((self.block_dims, self.block_weights))

    def __repr__(self) -> str:
        return f"TracialAlgebra(dims={self.block_dims}, weights={self.block_weights})"


class AlgElement:
    """Element of a :class:`TracialAlgebra`: one complex matrix per block.

    Immutable after construction; all arithmetic returns new elements.
    ``@`` is the algebra product, ``*`` is reserved for scalars.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: TracialAlgebra, blocks: Iterable[np.ndarray]):
        mats = []
        blocks = list(blocks)
        if len(blocks) != algebra.nblocks:
            raise StructureError(
                f"expected {algebra.nblocks} blocks, got {len(blocks)}")
        for n, b in zip(algebra.block_dims, blocks):
            m = np.array(b, dtype=complex, order="C")
            if m.shape != (n, n):
                raise StructureError(f"block of shape {m.shape} does not match size {n}")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "blocks", tuple(mats))

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("AlgElement is immutable")

    def block(self, b: int) -> np.ndarray:
        return self.blocks[b]

    def adjoint(self) -> "AlgElement":
        return AlgElement(self.algebra, [m.conj().T for m in self.blocks])

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return hermiticity_defect(self) <= tol

    def __add__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, scalar) -> "AlgElement":
        if isinstance(scalar, AlgElement):
            raise TypeError("use @ for the algebra product; * is scalar multiplication")
        if not isinstance(scalar, numbers.Complex):
            return NotImplemented
        return AlgElement(self.algebra, [complex(scalar) * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "AlgElement":
        if not isinstance(scalar, numbers.Complex):
            return NotImplemented
        return self * (1.0 / complex(scalar))

    def __matmul__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __repr__(self) -> str:
        return f"AlgElement(dims={self.algebra.block_dims})"


class Projection:
    """Orthogonal projection: a Hermitian idempotent element.

    Construction validates ``e == e* == e @ e`` within ``tol`` in operator
    norm and rejects anything else.
    """

    __slots__ = ("element",)

    def __init__(self, element: AlgElement, tol: float = PROJECTION_TOL):
        sym = hermiticity_defect(element)
        idem = lp_norm(element @ element - element, math.inf)
        if sym > tol or idem > tol:
            raise DomainError(
                f"not a projection: hermiticity defect {sym:.2e}, idempotency defect {idem:.2e}")
        object.__setattr__(self, "element", element)

    def __setattr__(self, name, value):
        raise AttributeError("Projection is immutable")

    @property
    def algebra(self) -> TracialAlgebra:
        return self.element.algebra

    def complement(self) -> "Projection":
        return Projection(self.algebra.identity() - self.element)

    def __repr__(self) -> str:
        return f"Projection(trace={trace(self.element).real:.6f})"


def _check_same_algebra(x: AlgElement, y: AlgElement) -> None:
    if x.algebra != y.algebra:
        raise StructureError("elements belong to different algebras")


def trace(x: AlgElement) -> complex:
    """Normalized trace tau(x) = sum_b w_b tr(x_b)/n_b."""
    alg = x.algebra
    return complex(sum(w * np.trace(m) / n
                       for w, n, m in zip(alg.block_weights, alg.block_dims, x.blocks)))


def hermiticity_defect(x: AlgElement) -> float:
    """Operator norm of x - x*."""
    return max(_opnorm(m - m.conj().T) for m in x.blocks)


def _opnorm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def lp_norm(x: AlgElement, p: float) -> float:
    """Noncommutative p-norm ||x||_p = [tau(|x|^p)]^(1/p).

    Computed from the singular values of the blocks; ``p == inf`` is the
    operator norm (largest singular value over blocks).  Requires p >= 1.
    """
    if p != math.inf and p < 1:
        raise DomainError(f"p must be >= 1 or inf, got {p}")
    if p == math.inf:
        return max(_opnorm(m) for m in x.blocks)
    alg = x.algebra
    if p == 2:
        # tau(x* x) as a weighted Frobenius mean; same value, no SVD needed
        val = sum(w * np.vdot(m, m).real / n
                  for w, n, m in zip(alg.block_weights, alg.block_dims, x.blocks))
        return math.sqrt(max(val, 0.0))
    total = 0.0
    for w, n, m in zip(alg.block_weights, alg.block_dims, x.blocks):
        s = np.linalg.svd(m, compute_uv=False)
        total += w * float(np.sum(s ** p)) / n
    return total ** (1.0 / p)


def abs2(x: AlgElement) -> AlgElement:
    """|x|^2 = x* x; Hermitian positive semidefinite."""
    return x.adjoint() @ x


def _hermitian_eigh(x: AlgElement, tol: float):
    defect = hermiticity_defect(x)
    if defect > tol:
        raise DomainError(f"element is not Hermitian within {tol:g} (defect {defect:.2e})")
    return [np.linalg.eigh(m) for m in x.blocks]


def hermitian_apply(x: AlgElement, fn: Callable[[np.ndarray], np.ndarray],
                    tol: float = HERMITIAN_TOL) -> AlgElement:
    """Functional calculus f(x) for Hermitian x via eigendecomposition.

    ``fn`` receives the eigenvalue vector of each block and must return a
    real vector of the same length.
    """
    out = []
    for w, v in _hermitian_eigh(x, tol):
        fw = np.asarray(fn(w), dtype=float)
        out.append((v * fw) @ v.conj().T)
    return AlgElement(x.algebra, out)


def psd_sqrt(x: AlgElement, tol: float = HERMITIAN_TOL) -> AlgElement:
    """Square root of a positive semidefinite element (negatives clipped at 0)."""
    return hermitian_apply(x, lambda w: np.sqrt(np.maximum(w, 0.0)), tol)


def min_eigenvalue(x: AlgElement, tol: float = HERMITIAN_TOL) -> float:
    """Smallest eigenvalue over all blocks of a Hermitian element."""
    return min(float(w[0]) for w, _ in _hermitian_eigh(x, tol))


def loewner_psd(h: AlgElement, tol: float) -> bool:
    """True iff h is Hermitian within tol and its spectrum is >= -tol."""
    return min_eigenvalue(h, tol) >= -tol


def spectral_projection(h: AlgElement, interval: tuple[float, float],
                        tol: float = HERMITIAN_TOL) -> Projection:
    """Spectral projection of a Hermitian element onto ``[a, b)``.

    Eigenvalues within ``1e-12`` of either endpoint are included, so the
    lower endpoint behaves as closed and ties just above the upper cut are
    assigned below it.  ``b`` may be ``inf``.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise DomainError(f"empty interval [{a}, {b})")
    out = []
    for w, v in _hermitian_eigh(h, tol):
        mask = (w >= a - BOUNDARY_TOL) & (w < b + BOUNDARY_TOL)
        vs = v[:, mask]
        out.append(vs @ vs.conj().T)
    return Projection(AlgElement(h.algebra, out))


def proj_meet(e: Projection, f: Projection) -> Projection:
    """Meet e ^ f: projection onto the intersection of the ranges.

    Computed per block from the near-null space of (1-e) + (1-f); exact at
    desk scale and symmetric in its arguments.
    """
    if e.algebra != f.algebra:
        raise StructureError("projections belong to different algebras")
    out = []
    for n, eb, fb in zip(e.algebra.block_dims, e.element.blocks, f.element.blocks):
        h = (np.eye(n) - eb) + (np.eye(n) - fb)
        w, v = np.linalg.eigh(h)
        vs = v[:, w < MEET_NULL_TOL]
        out.append(vs @ vs.conj().T)
    return Projection(AlgElement(e.algebra, out))
