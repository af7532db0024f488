"""Finite-difference two-point tensor calculus on the chart.

Index conventions used throughout (documented once here):

* Derivative tensors store unprimed (first-argument) indices first, then
  primed (second-argument) indices, each group in differentiation order.
  ``t = partial (2, 1)`` means t[k, l, s] = d^3 w / dx^k dx^l dxp^s.
* The covariant fundamental metric is the mixed second derivative
  S[i, k] = d^2 w / dx^i dxp^k; the contravariant one is V = inv(S.T), so
  that sum_k V[i, k] S[l, k] = delta_il and sum_k V[k, i] S[k, l] = delta_il.
* Christoffel-like arrays are indexed [upper, lower1, lower2].
* Curvature arrays r[l, s, i, k] hold the component with upper index l,
  first lower s, and antisymmetric pair (i, k).

Coincidence limits are taken by centering every stencil at xp = x exactly;
all shipped world families are smooth there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fd
from .errors import SingularMetricError
from .worlds import WorldFunction

#: Feature gate for fourth-order objects (curvature bundle); tolerances on
#: those checks are relaxed because FD noise grows with derivative order.
CURVATURE_TOLERANCE = 5e-4

_PART_FNS = ("full", "sym", "asym")


def _part_fn(w: WorldFunction, part: str):
    if part == "full":
        return w
    if part == "sym":
        return w.sym
    if part == "asym":
        return w.asym
    raise ValueError(f"unknown world-function part {part!r}")


def _inv(m: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise SingularMetricError(f"{what} has non-finite entries")
    if abs(np.linalg.det(m)) < 1e-300 or np.linalg.cond(m) > 1e12:
        raise SingularMetricError(f"{what} is numerically singular")
    return np.linalg.inv(m)


# ---------------------------------------------------------------------------
# Derivative bundles
# ---------------------------------------------------------------------------

_ORDER_SLOTS = {
    1: [(1, 0), (0, 1)],
    2: [(2, 0), (1, 1), (0, 2)],
    3: [(3, 0), (2, 1), (1, 2), (0, 3)],
    4: [(2, 2)],
}


@dataclass
class DerivativeBundle:
    """Raw mixed partials of the world function and of its symmetric and
    antisymmetric parts, up to the requested order."""

    x: np.ndarray
    xp: np.ndarray
    max_order: int
    tensors: dict  # part -> {(nx, npr): ndarray}
    symmetry_defects: dict

    def get(self, part: str, nx: int, npr: int) -> np.ndarray:
        return self.tensors[part][(nx, npr)]


def fd_derivatives(w: WorldFunction, x, xp, max_order: int = 3,
                   h: Optional[float] = None) -> DerivativeBundle:
    """Central-difference derivative bundle at (x, xp), orders 1..max_order.

    The symmetry defect report compares first derivatives against the
    argument-swapped evaluation: the symmetric part must agree, the
    antisymmetric part must negate.
    """
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be in 1..4")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    orders = [slot for o in range(1, max_order + 1) for slot in _ORDER_SLOTS[o]]
    tensors = {}
    for part in _PART_FNS:
        tensors[part] = fd.partial_tensors(_part_fn(w, part), x, xp, orders, h=h)

    sym_fwd = tensors["sym"][(1, 0)]
    sym_rev = fd.partial_tensor(w.sym, xp, x, 0, 1, h=h)
    asym_fwd = tensors["asym"][(1, 0)]
    asym_rev = fd.partial_tensor(w.asym, xp, x, 0, 1, h=h)
    defects = {
        "sym_swap": float(np.max(np.abs(sym_fwd - sym_rev))),
        "asym_swap": float(np.max(np.abs(asym_fwd + asym_rev))),
    }
    return DerivativeBundle(x, xp, max_order, tensors, defects)


# ---------------------------------------------------------------------------
# Fundamental metrics and Christoffel symbols
# ---------------------------------------------------------------------------


@dataclass
class FundamentalMetric:
    """Mixed second derivatives of the world function (cov) and the inverse
    satisfying sum_k contra[i, k] cov[l, k] = delta (likewise for the
    symmetric part)."""

    cov: np.ndarray
    contra: np.ndarray
    g_cov: np.ndarray
    g_contra: np.ndarray


def _mixed_second(w, x, xp, part):
    return fd.partial_tensor(_part_fn(w, part), x, xp, 1, 1)


def fundamental_metric(w: WorldFunction, x, xp) -> FundamentalMetric:
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    cov = _mixed_second(w, x, xp, "full")
    g_cov = _mixed_second(w, x, xp, "sym")
    contra = _inv(cov.T, "covariant fundamental metric").T
    g_contra = _inv(g_cov.T, "symmetric covariant fundamental metric").T
    return FundamentalMetric(cov, contra, g_cov, g_contra)


@dataclass
class ChristoffelSet:
    """Two-point Christoffel symbols, each indexed [upper, lower1, lower2].

    tilde_x / tilde_xp derive from the full world function (unprimed /
    primed anchor); g_x / g_xp from its symmetric part.
    """

    tilde_x: np.ndarray
    tilde_xp: np.ndarray
    g_x: np.ndarray
    g_xp: np.ndarray


def christoffels(w: WorldFunction, x, xp) -> ChristoffelSet:
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    out = {}
    for part in ("full", "sym"):
        fn = _part_fn(w, part)
        t = fd.partial_tensors(fn, x, xp, [(1, 1), (2, 1), (1, 2)])
        s = t[(1, 1)]
        v = _inv(s.T, f"{part} fundamental metric").T
        # upper index from contraction with the contravariant metric
        gamma_x = np.einsum("is,kls->ikl", v, t[(2, 1)])
        gamma_xp = np.einsum("si,skl->ikl", v, t[(1, 2)])
        out[part] = (gamma_x, gamma_xp)
    return ChristoffelSet(
        tilde_x=out["full"][0],
        tilde_xp=out["full"][1],
        g_x=out["sym"][0],
        g_xp=out["sym"][1],
    )


def christoffel_derivative(w: WorldFunction, x, xp, part: str = "full") -> np.ndarray:
    """d Gamma^i_kl / dx^m for the unprimed-anchor Christoffel symbol,
    assembled from third and fourth derivatives (no nested differencing).

    Returns array [i, k, l, m].
    """
    fn = _part_fn(w, part)
    t = fd.partial_tensors(fn, np.asarray(x, float), np.asarray(xp, float),
                           [(1, 1), (2, 1), (3, 1)])
    s = t[(1, 1)]
    v = _inv(s.T, "fundamental metric").T
    t21 = t[(2, 1)]
    t31 = t[(3, 1)]
    # dS/dx^m has entries d^3 w / dx^k dx^m dxp^q = t21[k, m, q]
    # V S^T = I  =>  dV/dx^m = -V (dS/dx^m)^T V
    dv = -np.einsum("iq,kmq,ks->ism", v, t21, v)
    return (np.einsum("ism,kls->iklm", dv, t21)
            + np.einsum("is,klms->iklm", v, t31))


def flat_curvature_defect(w: WorldFunction, x, xp, part: str = "full") -> np.ndarray:
    """Curvature built from the unprimed-anchor two-point Christoffel symbol.

    Vanishes identically for every world function (the two-point connection
    is flat); the returned array [s, i, l, m] measures the numerical defect.
    """
    gamma = christoffels(w, x, xp)
    gam = gamma.tilde_x if part == "full" else gamma.g_x
    dgam = christoffel_derivative(w, x, xp, part=part)
    return (dgam.transpose(0, 1, 2, 3) - dgam.transpose(0, 1, 3, 2)
            + np.einsum("jil,sjm->silm", gam, gam)
            - np.einsum("jim,sjl->silm", gam, gam))


# ---------------------------------------------------------------------------
# Coincidence-limit coefficients
# ---------------------------------------------------------------------------


@dataclass
class CoincidenceCoefficients:
    """One-point fields extracted at xp = x.

    g_tilde_inv follows the first-index contraction convention:
    sum_i g_tilde_inv[i, l] g_tilde[i, k] = delta_lk.
    """

    x: np.ndarray
    a: np.ndarray            # coincidence gradient of the antisymmetric part
    g: np.ndarray            # metric tensor
    g_inv: np.ndarray
    g_tilde: np.ndarray      # metric from the mixed second derivative
    g_tilde_inv: np.ndarray
    sigma_f: np.ndarray      # unprimed-unprimed second derivative (not a tensor)
    sigma_p: np.ndarray      # primed-primed second derivative (not a tensor)
    gamma: np.ndarray        # Christoffel of the symmetric part
    beta: np.ndarray         # antisymmetric force tensor
    gamma_tilde_f: np.ndarray
    gamma_tilde_p: np.ndarray
    a3: np.ndarray           # third-order antisymmetry coefficients
    g3: np.ndarray           # third-order symmetric expansion coefficients
    a_grad: np.ndarray = field(default=None)   # a_{i,k}
    a_hess: np.ndarray = field(default=None)   # a_{i,kl}
    g_grad: np.ndarray = field(default=None)   # g_{ik,l}


def coincidence_coefficients(w: WorldFunction, x) -> CoincidenceCoefficients:
    """Extract the one-point fields at x by coincidence-centered stencils.

    Derivatives of the one-point fields (needed for the Christoffel and
    force tensors) are obtained by the chain rule over both argument slots,
    e.g. d/dx^l of [G_,ik] is [G_,ikl] + [G_,ikl'] -- direct stencils only.
    """
    x = np.asarray(x, dtype=float)
    sig = fd.partial_tensors(w, x, x, [(2, 0), (1, 1), (0, 2)])
    gpart = fd.partial_tensors(w.sym, x, x, [(2, 0), (3, 0), (2, 1)])
    apart = fd.partial_tensors(
        w.asym, x, x, [(1, 0), (2, 0), (1, 1), (3, 0), (2, 1), (1, 2)]
    )

    a = apart[(1, 0)]
    g = gpart[(2, 0)]
    g3 = gpart[(3, 0)]
    a3 = apart[(3, 0)]
    sigma_f = sig[(2, 0)]
    sigma_p = sig[(0, 2)]
    g_tilde = -sig[(1, 1)]

    g_inv = _inv(g, "coincidence metric")
    g_tilde_inv = _inv(g_tilde, "mixed coincidence metric").T

    # one-point field derivatives via the two-slot chain rule
    g_grad = gpart[(3, 0)] + gpart[(2, 1)]                   # g_{ik,l}
    a_grad = apart[(2, 0)] + apart[(1, 1)]                   # a_{i,k}
    a_hess = (apart[(3, 0)] + apart[(2, 1)]
              + apart[(2, 1)].transpose(0, 2, 1)
              + apart[(1, 2)])                               # a_{i,kl}

    # [k,s,l]-indexed combination g_{ks,l} + g_{sl,k} - g_{lk,s}
    half_sum = (np.einsum("ksl->ksl", g_grad)
                + np.einsum("slk->ksl", g_grad)
                - np.einsum("lks->ksl", g_grad))
    gamma = 0.5 * np.einsum("si,ksl->ikl", g_inv, half_sum)

    # -(a_{k,ls} + a_{l,ks})/2 + a_{kls}, indexed [k,l,s]
    sym_hess = -0.5 * (a_hess + np.einsum("lks->kls", a_hess))
    beta = np.einsum("si,kls->ikl", g_inv, a3 + sym_hess)

    mixed_f = np.einsum("is,ps->ip", g_tilde_inv, g)
    mixed_p = np.einsum("si,ps->ip", g_tilde_inv, g)
    gamma_tilde_f = np.einsum("ip,pkl->ikl", mixed_f, gamma + beta)
    gamma_tilde_p = np.einsum("ip,pkl->ikl", mixed_p, gamma - beta)

    return CoincidenceCoefficients(
        x=x, a=a, g=g, g_inv=g_inv, g_tilde=g_tilde, g_tilde_inv=g_tilde_inv,
        sigma_f=sigma_f, sigma_p=sigma_p, gamma=gamma, beta=beta,
        gamma_tilde_f=gamma_tilde_f, gamma_tilde_p=gamma_tilde_p,
        a3=a3, g3=g3, a_grad=a_grad, a_hess=a_hess, g_grad=g_grad,
    )


# ---------------------------------------------------------------------------
# Parallel transport
# ---------------------------------------------------------------------------

TRANSPORT_SPACES = ("tilde_xprime", "tilde_x", "g_xprime", "g_x")


def transport_matrix(w: WorldFunction, space: str, x, xp) -> np.ndarray:
    """Parallel-transport matrix for covectors in the selected flat space.

    tilde_xprime / g_xprime carry a covector given at xp to x (anchor xp);
    tilde_x / g_x carry a covector given at x to xp (anchor x).  At x = xp
    every transport reduces to the identity.
    """
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    part = "full" if space.startswith("tilde") else "sym"
    s = _mixed_second(w, x, xp, part)
    if space in ("tilde_xprime", "g_xprime"):
        anchor = _mixed_second(w, xp, xp, part)
        return s @ _inv(anchor, "anchor fundamental metric")
    if space in ("tilde_x", "g_x"):
        anchor = _mixed_second(w, x, x, part)
        return s.T @ _inv(anchor, "anchor fundamental metric")
    raise ValueError(f"unknown transport space {space!r}; expected one of {TRANSPORT_SPACES}")


def parallel_transport(w: WorldFunction, space: str, x, xp, covec) -> np.ndarray:
    covec = np.asarray(covec, dtype=float)
    return transport_matrix(w, space, x, xp) @ covec


def metric_by_transport(w: WorldFunction, x, xp, anchor_metric: np.ndarray) -> np.ndarray:
    """Reconstruct the flat-space metric at x by transporting a symmetric
    anchor metric from xp (the tilde space of the full world function)."""
    t = transport_matrix(w, "tilde_xprime", x, xp)
    return t @ np.asarray(anchor_metric, dtype=float) @ t.T


def metric_two_point_form(w: WorldFunction, x, xp, anchor_metric: np.ndarray) -> np.ndarray:
    """Same metric assembled directly from mixed second derivatives and the
    coincidence inverse; must agree with metric_by_transport."""
    s = _mixed_second(w, x, xp, "full")
    s0 = _mixed_second(w, xp, xp, "full")
    v0 = _inv(s0.T, "anchor fundamental metric").T
    inner = v0.T @ np.asarray(anchor_metric, dtype=float) @ v0
    return s @ inner @ s.T


# ---------------------------------------------------------------------------
# Curvature machinery
# ---------------------------------------------------------------------------


def f_tensor(w: WorldFunction, x, xp, part: str = "full") -> np.ndarray:
    """Two-point curvature-like tensor F[i, l, k, j] (primed pair last).

    F = w_{,il k'j'} - w_{,s j'k'} V[s, m] w_{,il m'}; identically zero for
    flat symmetric worlds in rectilinear charts.
    """
    fn = _part_fn(w, part)
    t = fd.partial_tensors(fn, np.asarray(x, float), np.asarray(xp, float),
                           [(1, 1), (2, 1), (1, 2), (2, 2)])
    v = _inv(t[(1, 1)].T, "fundamental metric").T
    return t[(2, 2)] - np.einsum("sjk,sm,ilm->ilkj", t[(1, 2)], v, t[(2, 1)])


def riemann_from_gamma(gamma: np.ndarray, gamma_derivs: np.ndarray) -> np.ndarray:
    """Curvature tensor r[l, s, i, k] from a connection and its derivatives.

    gamma is [upper, lower1, lower2] (symmetric in the lower pair);
    gamma_derivs is gamma.shape + (d,), last axis the derivative direction.

    r^l_{s.ik} = gamma^l_{si,k} - gamma^l_{sk,i}
                 + gamma^p_{si} gamma^l_{pk} - gamma^p_{sk} gamma^l_{pi}

    antisymmetric in the last index pair by construction.
    """
    gamma = np.asarray(gamma, dtype=float)
    gd = np.asarray(gamma_derivs, dtype=float)
    if gd.shape != gamma.shape + gamma.shape[:1]:
        raise ValueError("gamma_derivs must have shape gamma.shape + (d,)")
    if np.max(np.abs(gamma - gamma.transpose(0, 2, 1))) > 1e-8 * (1.0 + np.max(np.abs(gamma))):
        raise ValueError("gamma must be symmetric in its lower indices")
    return (gd - gd.transpose(0, 1, 3, 2)
            + np.einsum("psi,lpk->lsik", gamma, gamma)
            - np.einsum("psk,lpi->lsik", gamma, gamma))


@dataclass
class CurvatureBundle:
    """Fourth-order curvature objects at a point (feature-gated)."""

    f_tilde_twopoint: np.ndarray   # F of the full world function at (x, xp)
    f_tilde_coincident: np.ndarray
    f_coincident: np.ndarray       # F of the symmetric part at coincidence
    riemann: np.ndarray            # from gamma
    riemann_tilde_f: np.ndarray
    riemann_tilde_p: np.ndarray
    defects: dict


def curvature_bundle(w: WorldFunction, x, xp=None) -> CurvatureBundle:
    """Assemble coincidence curvature tensors and their consistency defects.

    Defects reported (all should be small for the shipped worlds):
      pair_symmetry       in-group index symmetry of the coincident tensor
      block_swap          swap of the unprimed and primed pairs
      mixed_relation      metric-contracted relation between the curvature
                          from gamma and the coincident F of the symmetric part
      tilde_relation_f    alternated coincident F vs curvature of gamma_tilde_f
      tilde_relation_p    same with the opposite contraction side (gamma_tilde_p)
    """
    x = np.asarray(x, dtype=float)
    xp_eff = x if xp is None else np.asarray(xp, dtype=float)

    f_two = f_tensor(w, x, xp_eff, part="full")
    f_tilde_co = f_tensor(w, x, x, part="full")
    f_co = f_tensor(w, x, x, part="sym")

    cc = coincidence_coefficients(w, x)

    def stacked(p):
        c = coincidence_coefficients(w, p)
        return np.stack([c.gamma, c.gamma_tilde_f, c.gamma_tilde_p])

    dstack = fd.field_derivative(stacked, x)
    r = riemann_from_gamma(cc.gamma, dstack[0])
    r_f = riemann_from_gamma(cc.gamma_tilde_f, dstack[1])
    r_p = riemann_from_gamma(cc.gamma_tilde_p, dstack[2])

    scale = 1.0 + float(np.max(np.abs(f_co)) + np.max(np.abs(f_tilde_co)))
    defects = {
        "pair_symmetry": float(max(
            np.max(np.abs(f_tilde_co - f_tilde_co.transpose(1, 0, 2, 3))),
            np.max(np.abs(f_tilde_co - f_tilde_co.transpose(0, 1, 3, 2))),
        ) / scale),
        "block_swap": float(
            np.max(np.abs(f_tilde_co - f_tilde_co.transpose(2, 3, 0, 1))) / scale
        ),
        # g_lp r^l_{s.ik} = -f_{ispk} + f_{kspi}
        "mixed_relation": float(np.max(np.abs(
            np.einsum("lp,lsik->psik", cc.g, r)
            + np.einsum("ispk->psik", f_co)
            - np.einsum("kspi->psik", f_co)
        )) / scale),
        # alternated coincident F vs the curvature of gamma_tilde_f:
        # f[i,l,k,j] - f[i,k,l,j] = gtilde[p,j] r_f[p,i,k,l]
        "tilde_relation_f": float(np.max(np.abs(
            f_tilde_co - f_tilde_co.transpose(0, 2, 1, 3)
            - np.einsum("pj,pikl->ilkj", cc.g_tilde, r_f)
        )) / scale),
        # f[i,l,k,j] - f[i,k,l,j] = gtilde[l,p] r_p[p,k,i,j]
        "tilde_relation_p": float(np.max(np.abs(
            f_tilde_co - f_tilde_co.transpose(0, 2, 1, 3)
            - np.einsum("lp,pkij->ilkj", cc.g_tilde, r_p)
        )) / scale),
    }
    return CurvatureBundle(
        f_tilde_twopoint=f_two,
        f_tilde_coincident=f_tilde_co,
        f_coincident=f_co,
        riemann=r,
        riemann_tilde_f=r_f,
        riemann_tilde_p=r_p,
        defects=defects,
    )
