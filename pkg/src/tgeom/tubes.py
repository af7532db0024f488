"""Point-set geometric objects built from the world function.

An order-n tube is the zero set of the order-(n+1) Gram determinant grown
from an n+1 point skeleton.  First-order tubes come in three kinds (neutral,
future, past), distinct only when the world has an antisymmetric part; they
factor into four first-degree pieces whose zero sets cut the tube into
segments.  This module also hosts the axisymmetric tube sampler used to
reproduce closed-form tube profiles, and broken world tubes (equal-length
chains with extremal continuation, built from world-function values alone).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import fd
from .errors import (
    ComplexLengthError,
    DegenerateSkeletonError,
    DimensionMismatchError,
    GeometryError,
    SolverError,
)
from .products import Multivector, gram
from .worlds import WorldFunction

TUBE_KINDS = ("n", "f", "p")

#: alpha coefficient of the factorization per kind
_ALPHA_Q = {"f": 1.0, "p": 1.0, "n": -1.0}


@dataclass(frozen=True)
class TubeSpec:
    """Skeleton points plus tube kind (kind only matters for order 1)."""

    skeleton: Multivector
    kind: str = "n"

    def __post_init__(self):
        if self.kind not in TUBE_KINDS:
            raise ValueError(f"unknown tube kind {self.kind!r}")


def membership_tolerance(w: WorldFunction, points: np.ndarray) -> float:
    """Residual tolerance for tube membership: 1e-9 x (characteristic
    scale)^4, scale = max pairwise root-mean separation.  The Gram residual
    of a first-order tube is degree four in distances."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    best = 1.0
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            sep = abs(2.0 * w.sym(pts[i], pts[k]))
            best = max(best, float(np.sqrt(sep)))
    return 1e-9 * best**4


def _skeleton_guard(w: WorldFunction, skeleton: Multivector):
    f_n = gram(w, skeleton)
    pts = skeleton.points
    scale = 1.0
    for i in range(pts.shape[0]):
        for k in range(i + 1, pts.shape[0]):
            scale = max(scale, abs(2.0 * float(w.sym(pts[i], pts[k]))))
    if abs(f_n) <= 1e-12 * scale ** skeleton.order:
        raise DegenerateSkeletonError(
            f"skeleton has vanishing squared length ({f_n!r})"
        )
    return f_n


def tube_residual(w: WorldFunction, spec: TubeSpec, point) -> float:
    """Gram residual of the skeleton extended by the probe point; zero iff
    the point lies on the tube.  Skeleton points themselves give zero."""
    _skeleton_guard(w, spec.skeleton)
    point = np.asarray(point, dtype=float)
    if point.shape != (w.dim,):
        raise DimensionMismatchError("probe point has wrong dimension")
    extended = Multivector(np.vstack([spec.skeleton.points, point[None, :]]))
    return gram(w, extended)


def _pair_values(w: WorldFunction, p0, p1, p2):
    """Symmetric separations and the triangle antisymmetry of a point triple."""
    g02 = float(w.sym(p0, p2))
    g10 = float(w.sym(p1, p0))
    g12 = float(w.sym(p1, p2))
    eta_f = float(w.asym(p1, p0) + w.asym(p0, p2) + w.asym(p2, p1))
    return g02, g10, g12, eta_f


def _eta_q(kind: str, g10: float, g02: float, eta_f: float) -> float:
    if kind == "f":
        return eta_f
    if kind == "p":
        return -eta_f
    prod = g10 * g02
    if prod < 0.0:
        raise ComplexLengthError("neutral eta needs a nonnegative separation product")
    return eta_f**2 / (np.sqrt(4.0 * prod + eta_f**2) + 2.0 * np.sqrt(prod))


def _sqrt_checked(value: float, what: str) -> float:
    if value < 0.0:
        raise ComplexLengthError(f"negative radicand in {what} (spacelike/complex branch)")
    return float(np.sqrt(value))


def first_order_factors(w: WorldFunction, kind: str, p0, p1, p2):
    """The four first-degree factors of the first-order tube residual and
    the triangle antisymmetry eta of the kind.

    minus the product of the four factors equals the direct Gram residual of
    the kind.  Raises ComplexLengthError on any negative radicand.
    """
    if kind not in TUBE_KINDS:
        raise ValueError(f"unknown tube kind {kind!r}")
    g02, g10, g12, eta_f = _pair_values(w, p0, p1, p2)
    eta = _eta_q(kind, g10, g02, eta_f)
    alpha = _ALPHA_Q[kind]
    r02 = _sqrt_checked(g02, "separation p0-p2")
    r10 = _sqrt_checked(g10, "separation p1-p0")
    ra = _sqrt_checked(g12 - eta, "kind radicand")
    rb = _sqrt_checked(g12 - alpha * eta, "kind radicand")
    f0 = r02 + r10 + ra
    f1 = r02 - r10 + rb
    f2 = r02 + r10 - ra
    f3 = r02 - r10 - rb
    return f0, f1, f2, f3, float(eta)


def first_order_residual(w: WorldFunction, kind: str, p0, p1, p2) -> float:
    """Direct first-order tube residual of the given kind (no square roots,
    valid on every branch)."""
    u2 = 2.0 * float(w.sym(p0, p1))
    v2 = 2.0 * float(w.sym(p0, p2))
    uv = float(w(p1, p0) + w(p0, p2) - w(p1, p2))
    vu = float(w(p2, p0) + w(p0, p1) - w(p2, p1))
    if kind == "n":
        return u2 * v2 - uv * vu
    if kind == "f":
        return u2 * v2 - uv * uv
    if kind == "p":
        return u2 * v2 - vu * vu
    raise ValueError(f"unknown tube kind {kind!r}")


def segment_residual(w: WorldFunction, kind: str, p0, p1, p2) -> float:
    """Residual of the tube segment between the two basic points: the factor
    sqrt(g02) - sqrt(g10) + sqrt(g12 - alpha_q eta_q); zero iff p2 lies on
    the segment."""
    if kind not in TUBE_KINDS:
        raise ValueError(f"unknown tube kind {kind!r}")
    g02, g10, g12, eta_f = _pair_values(w, p0, p1, p2)
    eta = _eta_q(kind, g10, g02, eta_f)
    return (
        _sqrt_checked(g02, "separation p0-p2")
        - _sqrt_checked(g10, "separation p1-p0")
        + _sqrt_checked(g12 - _ALPHA_Q[kind] * eta, "kind radicand")
    )


def sphere_residual(w: WorldFunction, p0, p1, point) -> float:
    """Envelope residual of the sphere through p1 centered at p0: distance
    from the center minus the radius.  Uses only symmetrized separations,
    so asymmetry of the world never enters."""
    a = float(w(p0, point) + w(point, p0))
    b = float(w(p0, p1) + w(p1, p0))
    return _sqrt_checked(a, "center separation") - _sqrt_checked(b, "radius separation")


def section_filter(w: WorldFunction, spec: TubeSpec, on_point, candidates,
                   tol: float) -> list:
    """Points among the candidates that share every skeleton separation with
    the given tube point (the tube section through it).

    The base point must itself lie on the tube within tol.
    """
    base_res = tube_residual(w, spec, on_point)
    scale_tol = max(tol, membership_tolerance(w, spec.skeleton.points))
    if abs(base_res) > scale_tol:
        raise GeometryError(
            f"section base point is off the tube (residual {base_res!r})"
        )
    on_point = np.asarray(on_point, dtype=float)
    result = []
    skel = spec.skeleton.points
    base_vals = np.array([float(w(pl, on_point)) for pl in skel])
    for cand in candidates:
        cand = np.asarray(cand, dtype=float)
        vals = np.array([float(w(pl, cand)) for pl in skel])
        if np.max(np.abs(vals - base_vals)) <= tol:
            result.append(cand)
    return result


# ---------------------------------------------------------------------------
# Axisymmetric sampling of first-order tubes
# ---------------------------------------------------------------------------


def _metric_of(w: WorldFunction) -> np.ndarray:
    if w.spec is None or w.spec.metric is None:
        raise GeometryError("sampler needs a world built from a WorldSpec")
    return np.asarray(w.spec.metric, dtype=float)


def spacelike_unit_normal(w: WorldFunction, y) -> np.ndarray:
    """Deterministic unit vector orthogonal to y in the world metric:
    Gram-Schmidt against y starting from the first coordinate axis that is
    not parallel to y.  Normalized to |g(e, e)| = 1."""
    g = _metric_of(w)
    y = np.asarray(y, dtype=float)
    y2 = float(y @ g @ y)
    if y2 == 0.0:
        raise GeometryError("cannot build a normal to a null vector")
    for axis in range(w.dim):
        e = np.zeros(w.dim)
        e[axis] = 1.0
        v = e - (float(e @ g @ y) / y2) * y
        norm2 = float(v @ g @ v)
        if np.max(np.abs(v)) > 1e-8 and abs(norm2) > 1e-12:
            return v / np.sqrt(abs(norm2))
    raise GeometryError("no coordinate axis is independent of y")


def reduced_asymmetry(w: WorldFunction, y) -> float:
    """Dimensionless asymmetry strength of the reduced tube profile,
    alpha |b.y| (equals alpha |y| for a unit anisotropy covector)."""
    if w.spec is None or w.spec.b is None or w.spec.alpha is None:
        return 0.0
    b = np.asarray(w.spec.b, dtype=float)
    return abs(float(w.spec.alpha)) * abs(float(b @ np.asarray(y, dtype=float)))


def sample_axisymmetric_tube(w: WorldFunction, y, kind: str, tau_grid: Sequence[float],
                             rmax: Optional[float] = None, probes: int = 256):
    """Radial profile of the first-order tube with skeleton (origin, y).

    For each tau, finds all r >= 0 such that the point tau*y + r*|y|*e_perp
    lies on the tube of the given kind, with e_perp the deterministic unit
    normal to y.  Roots are bracketed on a geometric grid, bisected to
    1e-12 and polished with one Newton step; roots closer than 1e-8 are
    merged (tangential root at a fold).

    Returns a list of (tau, [radii]) pairs.
    """
    if kind not in TUBE_KINDS:
        raise ValueError(f"unknown tube kind {kind!r}")
    if w.kind not in ("case1", "case2", "constant_a", "euclidean", "cubic_a"):
        raise GeometryError("sampler needs a world built from a WorldSpec")
    y = np.asarray(y, dtype=float)
    origin = np.zeros(w.dim)
    y2 = 2.0 * float(w.sym(origin, y))
    if y2 <= 0.0:
        raise GeometryError("y must be timelike (positive squared separation)")
    ynorm = float(np.sqrt(y2))
    if w.spec is not None and w.spec.b is not None:
        g = _metric_of(w)
        b = np.asarray(w.spec.b, dtype=float)
        y_cov = g @ y / ynorm
        kappa = float(b @ y) / ynorm
        if np.max(np.abs(b - kappa * y_cov)) > 1e-10 * (1.0 + np.max(np.abs(b))):
            raise GeometryError("anisotropy covector must be aligned with y")
    e_perp = spacelike_unit_normal(w, y)

    g_eff = reduced_asymmetry(w, y)
    if rmax is None:
        base = 10.0 * (1.0 + 1.0 / max(g_eff, 1e-2))
        span = 3.0 + 2.0 * np.sqrt(3.0) * float(np.max(np.abs(tau_grid)))
        rmax = max(base, span)

    def points_at(tau, rs):
        rs = np.atleast_1d(np.asarray(rs, dtype=float))
        return tau * y[None, :] + rs[:, None] * ynorm * e_perp[None, :]

    def residuals(tau, rs, with_magnitude=False):
        p2 = points_at(tau, rs)
        u2 = y2
        v2 = 2.0 * w.sym(np.broadcast_to(origin, p2.shape), p2)
        uv = w(y, origin) + w(np.broadcast_to(origin, p2.shape), p2) - w(
            np.broadcast_to(y, p2.shape), p2)
        vu = w(p2, np.broadcast_to(origin, p2.shape)) + w(origin, y) - w(
            p2, np.broadcast_to(y, p2.shape))
        if kind == "n":
            res = u2 * v2 - uv * vu
        elif kind == "f":
            res = u2 * v2 - uv * uv
        else:
            res = u2 * v2 - vu * vu
        if with_magnitude:
            return res, np.abs(u2 * v2) + np.abs(uv * vu)
        return res

    out = []
    grid0 = np.concatenate([[0.0], np.geomspace(1e-6, rmax, probes - 1)])
    eps = np.finfo(float).eps
    for tau in tau_grid:
        tau = float(tau)

        def f_scalar(r, _tau=tau):
            return float(residuals(_tau, [r])[0])

        vals, mags = residuals(tau, grid0, with_magnitude=True)
        roots = []
        # r = 0 is a root only when the residual vanishes to round-off
        # relative to the cancelling terms it is assembled from
        if abs(vals[0]) <= 64.0 * eps * max(mags[0], 1.0):
            roots.append(0.0)
        for i in range(len(grid0) - 1):
            a, b_ = grid0[i], grid0[i + 1]
            fa, fb = vals[i], vals[i + 1]
            if fa == 0.0 and a > 0.0:
                roots.append(float(a))
                continue
            if fa * fb < 0.0:
                root = brentq(f_scalar, a, b_, xtol=1e-12 * (1.0 + b_), rtol=1e-15)
                dr = 1e-7 * (1.0 + root)
                slope = (f_scalar(root + dr) - f_scalar(root - dr)) / (2.0 * dr)
                if slope != 0.0:
                    polished = root - f_scalar(root) / slope
                    if a <= polished <= b_ and abs(f_scalar(polished)) <= abs(f_scalar(root)):
                        root = polished
                sc4 = (y2 * (1.0 + tau * tau + root * root)) ** 2
                if abs(f_scalar(root)) > 1e-10 * sc4:
                    raise SolverError("tube root polish failed to meet tolerance")
                roots.append(float(root))
        merged = []
        for r in sorted(roots):
            if merged and abs(r - merged[-1]) < 1e-8 * (1.0 + r):
                continue  # fold: tangential root, multiplicity 2, reported once
            merged.append(r)
        out.append((tau, merged))
    return out


# ---------------------------------------------------------------------------
# Broken world tubes
# ---------------------------------------------------------------------------


@dataclass
class BrokenTube:
    """Chain of equal-length segments with extremal continuation.

    parallel_residuals holds the adjacent-segment parallelism defect of the
    chain's kind at each interior vertex; length_residuals the relative
    defect of each segment's kind length (the solved constraint), and
    sym_length_residuals the defect of the symmetrized length.  The two
    lengths agree exactly on symmetric worlds and to cubic order in mu on
    fine-antisymmetric ones.
    """

    vertices: np.ndarray
    mu: float
    kind: str
    parallel_residuals: np.ndarray
    length_residuals: np.ndarray
    sym_length_residuals: np.ndarray = None
    multiplicity_flags: list = field(default_factory=list)


def kind_length_sq(w: WorldFunction, kind: str, pa, pb) -> float:
    """Squared segment length of the kind: the full world function forward
    (future), backward (past), or its symmetric part (neutral)."""
    if kind == "f":
        return 2.0 * float(w(pa, pb))
    if kind == "p":
        return 2.0 * float(w(pb, pa))
    if kind == "n":
        return 2.0 * float(w.sym(pa, pb))
    raise ValueError(f"unknown tube kind {kind!r}")


def advance_seed(w: WorldFunction, kind: str, p0, direction, mu: float) -> np.ndarray:
    """Point at kind-length mu from p0 along the given direction (1-D Newton
    on the scaling); convenience for building chain seeds."""
    p0 = np.asarray(p0, dtype=float)
    direction = np.asarray(direction, dtype=float)
    base = kind_length_sq(w, kind, p0, p0 + direction)
    if base <= 0.0:
        raise GeometryError("direction is not timelike for this kind")
    t = mu / np.sqrt(base)
    for _ in range(60):
        val = kind_length_sq(w, kind, p0, p0 + t * direction) - mu * mu
        if abs(val) <= 1e-14 * mu * mu:
            return p0 + t * direction
        dt = 1e-7 * (1.0 + abs(t))
        slope = (kind_length_sq(w, kind, p0, p0 + (t + dt) * direction)
                 - kind_length_sq(w, kind, p0, p0 + (t - dt) * direction)) / (2.0 * dt)
        t -= val / slope
    raise SolverError("seed scaling did not converge")


def chain_parallel_residual(w: WorldFunction, kind: str, pa, pb, pc) -> float:
    """Adjacent-segment parallelism defect |ab||bc| - (scalar product) for
    the segment pair (pa->pb, pb->pc), with the product order set by kind."""
    lab = _sqrt_checked(2.0 * float(w.sym(pa, pb)), "segment length")
    lbc = _sqrt_checked(2.0 * float(w.sym(pb, pc)), "segment length")
    uv = float(w(pa, pc) - w(pb, pc) - w(pa, pb))  # (ab . bc)
    vu = float(w(pc, pa) - w(pc, pb) - w(pb, pa))  # (bc . ab)
    if kind == "f":
        return lab * lbc - uv
    if kind == "p":
        return lab * lbc - vu
    if kind == "n":
        prod = uv * vu
        return lab * lbc - np.sqrt(max(prod, 0.0))
    raise ValueError(f"unknown tube kind {kind!r}")


def _step_system(w: WorldFunction, kind: str, p_prev, p_mid, mu):
    """Residual and Jacobian builders for one extremal continuation step.

    Stationarity of the kind's end-to-end objective on the level set of the
    new segment's kind length, solved for (next vertex, multiplier).  The
    kind length (not the symmetrized one) is what makes the chain converge
    to the kind's gradient line as mu shrinks.
    """
    d = w.dim

    def objective_grad(p):
        if kind == "f":
            return fd.partial_tensor(w, p_prev, p, 0, 1)
        if kind == "p":
            return fd.partial_tensor(w, p, p_prev, 1, 0)
        return fd.partial_tensor(w.sym, p_prev, p, 0, 1)

    def objective_hess(p):
        if kind == "f":
            return fd.partial_tensor(w, p_prev, p, 0, 2)
        if kind == "p":
            return fd.partial_tensor(w, p, p_prev, 2, 0)
        return fd.partial_tensor(w.sym, p_prev, p, 0, 2)

    def constraint_grad(p):
        if kind == "f":
            return fd.partial_tensor(w, p_mid, p, 0, 1)
        if kind == "p":
            return fd.partial_tensor(w, p, p_mid, 1, 0)
        return fd.partial_tensor(w.sym, p_mid, p, 0, 1)

    def constraint_hess(p):
        if kind == "f":
            return fd.partial_tensor(w, p_mid, p, 0, 2)
        if kind == "p":
            return fd.partial_tensor(w, p, p_mid, 2, 0)
        return fd.partial_tensor(w.sym, p_mid, p, 0, 2)

    def residual(z):
        p, lam = z[:d], z[d]
        r = np.empty(d + 1)
        r[:d] = objective_grad(p) - lam * constraint_grad(p)
        r[d] = kind_length_sq(w, kind, p_mid, p) - mu * mu
        return r

    def jacobian(z):
        p, lam = z[:d], z[d]
        jac = np.zeros((d + 1, d + 1))
        jac[:d, :d] = objective_hess(p) - lam * constraint_hess(p)
        cg = constraint_grad(p)
        jac[:d, d] = -cg
        jac[d, :d] = 2.0 * cg
        return jac

    return residual, jacobian, objective_grad, constraint_grad


def _newton_solve(residual, jacobian, z0, scale, max_iter=60):
    z = z0.copy()
    r = residual(z)
    norm = np.linalg.norm(r)
    for _ in range(max_iter):
        if norm <= 1e-12 * scale:
            return z, norm
        try:
            step = np.linalg.solve(jacobian(z), -r)
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular Jacobian in chain continuation") from exc
        lam = 1.0
        for _ in range(40):
            z_trial = z + lam * step
            r_trial = residual(z_trial)
            n_trial = np.linalg.norm(r_trial)
            if n_trial < norm:
                z, r, norm = z_trial, r_trial, n_trial
                break
            lam *= 0.5
        else:
            raise SolverError("chain continuation stalled (damping exhausted)")
    if norm <= 1e-10 * scale:
        return z, norm
    raise SolverError(f"chain continuation did not converge (|r| = {norm:.3e})")


def build_broken_tube(w: WorldFunction, kind: str, p0, p1, mu: float,
                      steps: int) -> BrokenTube:
    """Extend the seed segment into a chain of `steps` additional vertices.

    Each new vertex extremizes the kind's end-to-end separation from the
    vertex two places back, holding the new segment length at mu; the
    Newton seed is the straight continuation.  A second solve from a
    transversally perturbed seed flags non-unique extrema.
    """
    if kind not in TUBE_KINDS:
        raise ValueError(f"unknown tube kind {kind!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    seed_sq = kind_length_sq(w, kind, p0, p1)
    if seed_sq <= 0.0:
        raise GeometryError("seed segment is not timelike for this kind")
    if abs(np.sqrt(seed_sq) - mu) > 1e-8 * mu:
        raise GeometryError(
            f"seed segment kind length {np.sqrt(seed_sq)!r} does not match mu={mu!r}"
        )
    d = w.dim
    verts = [p0, p1]
    flags = []
    scale = 1.0 + mu * mu
    for _ in range(steps):
        prev_p, mid = verts[-2], verts[-1]
        residual, jacobian, obj_grad, con_grad = _step_system(w, kind, prev_p, mid, mu)
        guess = 2.0 * mid - prev_p
        og = obj_grad(guess)
        cg = con_grad(guess)
        denom = float(cg @ cg)
        lam0 = float(og @ cg) / denom if denom > 0 else 1.0
        z0 = np.concatenate([guess, [lam0]])
        z, _ = _newton_solve(residual, jacobian, z0, scale)
        new_p = z[:d]

        # multiplicity probe: restart from a transversally shifted seed
        chord = mid - prev_p
        probe_dir = np.zeros(d)
        probe_dir[int(np.argmin(np.abs(chord)))] = 1.0
        probe_dir = probe_dir - (probe_dir @ chord) / (chord @ chord) * chord
        nrm = np.linalg.norm(probe_dir)
        flagged = False
        if nrm > 1e-12:
            z_alt0 = np.concatenate([guess + 0.05 * mu * probe_dir / nrm, [lam0]])
            try:
                z_alt, _ = _newton_solve(residual, jacobian, z_alt0, scale)
                if np.linalg.norm(z_alt[:d] - new_p) > 1e-6 * mu:
                    flagged = True
            except SolverError:
                pass
        flags.append(flagged)
        verts.append(new_p)

    verts = np.asarray(verts)
    par = np.array([
        chain_parallel_residual(w, kind, verts[i], verts[i + 1], verts[i + 2])
        for i in range(len(verts) - 2)
    ])
    lens = np.array([
        abs(np.sqrt(kind_length_sq(w, kind, verts[i], verts[i + 1])) - mu) / mu
        for i in range(len(verts) - 1)
    ])
    sym_lens = np.array([
        abs(np.sqrt(2.0 * float(w.sym(verts[i], verts[i + 1]))) - mu) / mu
        for i in range(len(verts) - 1)
    ])
    return BrokenTube(vertices=verts, mu=float(mu), kind=kind,
                      parallel_residuals=par, length_residuals=lens,
                      sym_length_residuals=sym_lens,
                      multiplicity_flags=flags)
