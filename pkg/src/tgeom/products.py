"""Scalar products of vectors and multivectors, Gram determinants,
lengths, and the collinearity / parallelism residual family.

A vector here is an ordered pair of points; a multivector of order n is an
ordered tuple of n+1 points.  The scalar product of two order-n multivectors
is the determinant of the n x n matrix of pairwise vector products taken from
the common origins.  All predicates in this module are residual-valued
(signed defect, zero iff the relation holds) so that downstream tube and
membership logic can root-find on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexLengthError,
    DimensionMismatchError,
    OrderMismatchError,
)
from .worlds import WorldFunction

#: Relative tolerance for the boolean forms of the residual predicates.
PREDICATE_RTOL = 1e-9


@dataclass(frozen=True)
class Multivector:
    """Ordered tuple of n+1 points (order n >= 1).  Order is significant:
    swapping two points flips the sign of every scalar product."""

    points: np.ndarray  # (n+1, d)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise OrderMismatchError("a multivector needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DimensionMismatchError("multivector points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def order(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def swapped(self, i: int, k: int) -> "Multivector":
        pts = self.points.copy()
        pts[[i, k]] = pts[[k, i]]
        return Multivector(pts)


def _check_common_dim(w: WorldFunction, *points):
    for p in points:
        if np.asarray(p).shape[-1] != w.dim:
            raise DimensionMismatchError(
                f"point dimension {np.asarray(p).shape[-1]} != world dimension {w.dim}"
            )


def vector_product(w: WorldFunction, p0, p1, q0, q1) -> float:
    """Scalar product of the vectors p0->p1 and q0->q1.

    Antisymmetric under swapping p0<->p1 and under q0<->q1.  A constant
    antisymmetric component of the world cancels in the four-term sum.
    """
    _check_common_dim(w, p0, p1, q0, q1)
    return float(w(p0, q1) - w(p1, q1) - w(p0, q0) + w(p1, q0))


def vector_product_parts(w: WorldFunction, p0, p1, q0, q1) -> tuple[float, float]:
    """(symmetric, antisymmetric) parts of the vector product under exchange
    of the two vectors; they sum to vector_product."""
    _check_common_dim(w, p0, p1, q0, q1)

    def parts(a, b):
        return w.split(a, b)

    g01, a01 = parts(p0, q1)
    g11, a11 = parts(p1, q1)
    g00, a00 = parts(p0, q0)
    g10, a10 = parts(p1, q0)
    return float(g01 - g11 - g00 + g10), float(a01 - a11 - a00 + a10)


def product_matrix(w: WorldFunction, p: Multivector, q: Multivector) -> np.ndarray:
    """n x n matrix M_ik of vector products (p0->p_i . q0->q_k)."""
    if p.order != q.order:
        raise OrderMismatchError(f"orders differ: {p.order} != {q.order}")
    if p.dim != q.dim or p.dim != w.dim:
        raise DimensionMismatchError("multivector/world dimension mismatch")
    p0, q0 = p.points[0], q.points[0]
    pi = p.points[1:]  # (n, d)
    qk = q.points[1:]
    # M_ik = w(p0, q_k) + w(p_i, q0) - w(p0, q0) - w(p_i, q_k)
    w_p0_qk = w(np.broadcast_to(p0, qk.shape), qk)  # (n,)
    w_pi_q0 = w(pi, np.broadcast_to(q0, pi.shape))  # (n,)
    w_p0_q0 = w(p0, q0)  # scalar
    n = p.order
    w_pi_qk = w(pi[:, None, :], qk[None, :, :]).reshape(n, n)
    return (
        w_p0_qk[None, :] + w_pi_q0[:, None] - w_p0_q0 - w_pi_qk
    )


def _det(m: np.ndarray) -> float:
    """Determinant: closed cofactor forms for n <= 3 (exact small cases),
    pivoted LU for larger matrices."""
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if n == 3:
        return float(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
    return float(np.linalg.det(m))


def multivector_product(w: WorldFunction, p: Multivector, q: Multivector) -> float:
    """Scalar product of two order-n multivectors: det of the product matrix.

    Flips sign under any transposition of two points of either argument;
    vanishes identically when either argument repeats a point.
    """
    return _det(product_matrix(w, p, q))


def gram(w: WorldFunction, p: Multivector) -> float:
    """Squared-length determinant of a point tuple.

    Uses the origin-based symmetric entry combination, so the value is
    invariant under every permutation of the n+1 points.  For points in a
    flat symmetric world, sqrt(gram)/n! is the simplex volume.
    """
    if p.dim != w.dim:
        raise DimensionMismatchError("multivector/world dimension mismatch")
    p0 = p.points[0]
    rest = p.points[1:]
    n = p.order
    w_i0 = w(rest, np.broadcast_to(p0, rest.shape))
    w_0k = w(np.broadcast_to(p0, rest.shape), rest)
    w_ik = w(rest[:, None, :], rest[None, :, :]).reshape(n, n)
    m = w_i0[:, None] + w_0k[None, :] - w_ik
    return _det(m)


# Spec-facing alias: the Gram-determinant function F_n.
gram_fn = gram


def squared_length(w: WorldFunction, p: Multivector) -> tuple[float, bool]:
    """(value, timelike) where value is the Gram determinant of p and
    timelike reports value >= 0.  For order 1 the value is exactly the
    symmetrized pair separation (one length per vector, not two)."""
    value = gram(w, p)
    return value, bool(value >= 0.0)


def _real_length(value: float, what: str) -> float:
    if value < 0.0:
        raise ComplexLengthError(
            f"{what} has negative squared length {value}; real length undefined"
        )
    return float(np.sqrt(value))


def collinearity_residual(w: WorldFunction, kind: str, p: Multivector,
                          q: Multivector) -> float:
    """Signed collinearity defect; zero iff p and q are collinear in the
    requested sense.

    kind 'n' (neutral):  (p.q)(q.p) - |p|^2 |q|^2
    kind 'f' (future):   (p.q)^2    - |p|^2 |q|^2
    kind 'p' (past):     (q.p)^2    - |p|^2 |q|^2

    In a symmetric world the three kinds coincide; for asymmetric worlds the
    'f' residual of (p, q) equals the 'p' residual of (q, p).
    """
    if p.order != q.order:
        raise OrderMismatchError(f"orders differ: {p.order} != {q.order}")
    lp2 = gram(w, p)
    lq2 = gram(w, q)
    if kind == "n":
        return multivector_product(w, p, q) * multivector_product(w, q, p) - lp2 * lq2
    if kind == "f":
        return multivector_product(w, p, q) ** 2 - lp2 * lq2
    if kind == "p":
        return multivector_product(w, q, p) ** 2 - lp2 * lq2
    raise ValueError(f"unknown collinearity kind {kind!r}")


def parallelism_residual(w: WorldFunction, kind: str, sense: str,
                         p: Multivector, q: Multivector) -> float:
    """Signed parallelism defect; zero iff the relation holds.

    kind 'f' uses (p.q), kind 'p' uses (q.p); sense 'parallel' subtracts
    |p||q|, sense 'antiparallel' adds it.  Requires both squared lengths to
    be nonnegative (real lengths); raises ComplexLengthError otherwise.
    """
    if p.order != q.order:
        raise OrderMismatchError(f"orders differ: {p.order} != {q.order}")
    lp = _real_length(gram(w, p), "first multivector")
    lq = _real_length(gram(w, q), "second multivector")
    if kind == "f":
        prod = multivector_product(w, p, q)
    elif kind == "p":
        prod = multivector_product(w, q, p)
    else:
        raise ValueError(f"unknown parallelism kind {kind!r}")
    if sense == "parallel":
        return prod - lp * lq
    if sense == "antiparallel":
        return prod + lp * lq
    raise ValueError(f"unknown sense {sense!r}")


def _predicate_scale(lp2: float, lq2: float) -> float:
    scale = abs(lp2 * lq2)
    return scale if scale > 0.0 else 1.0


def is_collinear(w: WorldFunction, kind: str, p: Multivector, q: Multivector,
                 rtol: float = PREDICATE_RTOL) -> bool:
    """Boolean form of collinearity_residual with relative tolerance scaled
    by the product of the two squared lengths (or 1 when either vanishes)."""
    res = collinearity_residual(w, kind, p, q)
    return abs(res) <= rtol * _predicate_scale(gram(w, p), gram(w, q))


def is_parallel(w: WorldFunction, kind: str, sense: str, p: Multivector,
                q: Multivector, rtol: float = PREDICATE_RTOL) -> bool:
    res = parallelism_residual(w, kind, sense, p, q)
    return abs(res) <= rtol * _predicate_scale(gram(w, p), gram(w, q))
