"""World functions: the single source of geometric truth.

A world function is half the squared distance between two chart points,
w(x, x') = rho^2/2, vanishing on the diagonal but not necessarily symmetric
in its arguments.  Everything else in this package is computed from pointwise
evaluations of one of the closed-form families constructed here:

    euclidean    w = 1/2 g_ik xi^i xi^k                      (xi = x - x')
    constant_a   w = b_i xi^i + 1/2 g_ik xi^i xi^k
    case1        w = b.xi (1 + alpha xi^2) + 1/2 g xi xi
    case2        w = b.xi (1 + alpha / (1 + beta xi^2)) + 1/2 g xi xi
    cubic_a      w = 1/2 g xi xi + 1/6 a_ikl xi^i xi^k xi^l

with constant metric g (diagonal signature or full symmetric matrix),
xi^2 = g_ik xi^i xi^k.  The families are restricted to closed forms so that
every downstream computation has an analytic oracle.

All evaluators broadcast over leading axes: x and xp may have shape (..., d).
WorldFunction instances are immutable; evaluation is pure and thread-safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatchError, InvalidWorldSpecError

WORLD_KINDS = ("euclidean", "constant_a", "case1", "case2", "cubic_a")

# JSON keys each kind requires beyond "kind", "dim", "metric".
_REQUIRED = {
    "euclidean": (),
    "constant_a": ("b",),
    "case1": ("b", "alpha"),
    "case2": ("b", "alpha", "beta"),
    "cubic_a": ("a3",),
}


def _as_point(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise DimensionMismatchError(
            f"point has dimension {x.shape[-1]}, world has dimension {dim}"
        )
    if not np.all(np.isfinite(x)):
        raise DimensionMismatchError("point has non-finite coordinates")
    return x


@dataclass(frozen=True)
class WorldSpec:
    """Parameters selecting one world from the built-in families."""

    kind: str
    dim: int
    metric: np.ndarray  # (d, d) symmetric, non-singular
    b: Optional[np.ndarray] = None  # anisotropy covector
    alpha: Optional[float] = None  # antisymmetry intensity
    beta: Optional[float] = None  # screening constant
    a3: Optional[np.ndarray] = None  # rank-3 fully symmetric array
    metric_is_diagonal: bool = field(default=False, compare=False)

    def validate(self):
        if self.kind not in WORLD_KINDS:
            raise InvalidWorldSpecError(f"unknown world kind {self.kind!r}")
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise InvalidWorldSpecError("dim must be a positive integer")
        g = np.asarray(self.metric, dtype=float)
        if g.shape != (self.dim, self.dim):
            raise InvalidWorldSpecError("metric must be a d x d matrix")
        if not np.allclose(g, g.T, rtol=0, atol=1e-12):
            raise InvalidWorldSpecError("metric must be symmetric")
        if abs(np.linalg.det(g)) < 1e-12:
            raise InvalidWorldSpecError("metric is singular")
        for name in _REQUIRED[self.kind]:
            if getattr(self, name) is None:
                raise InvalidWorldSpecError(f"kind {self.kind!r} requires {name!r}")
        forbidden = {"b", "alpha", "beta", "a3"} - set(_REQUIRED[self.kind])
        for name in forbidden:
            if getattr(self, name) is not None:
                raise InvalidWorldSpecError(
                    f"kind {self.kind!r} does not take parameter {name!r}"
                )
        if self.b is not None and np.asarray(self.b).shape != (self.dim,):
            raise InvalidWorldSpecError("b must be a covector of length dim")
        if self.a3 is not None:
            a3 = np.asarray(self.a3, dtype=float)
            if a3.shape != (self.dim,) * 3:
                raise InvalidWorldSpecError("a3 must have shape (d, d, d)")
            for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
                if not np.allclose(a3, np.transpose(a3, perm), rtol=0, atol=1e-12):
                    raise InvalidWorldSpecError("a3 must be fully symmetric")

    # -- JSON wire format (the single config format consumed by the CLI) --

    @classmethod
    def from_dict(cls, doc: dict) -> "WorldSpec":
        if not isinstance(doc, dict):
            raise InvalidWorldSpecError("world spec must be a JSON object")
        try:
            kind = doc["kind"]
            dim = doc["dim"]
        except KeyError as exc:
            raise InvalidWorldSpecError(f"world spec missing key {exc}") from exc
        if not isinstance(dim, int):
            raise InvalidWorldSpecError("dim must be an integer")
        metric_doc = doc.get("metric")
        if metric_doc is None:
            raise InvalidWorldSpecError("world spec missing 'metric'")
        metric = np.asarray(metric_doc, dtype=float)
        diagonal = False
        if metric.ndim == 1:
            if metric.shape != (dim,):
                raise InvalidWorldSpecError("diagonal metric must have length dim")
            if not np.all(np.isin(metric, (1.0, -1.0))):
                raise InvalidWorldSpecError(
                    "diagonal metric entries must be +1/-1; "
                    "use a full matrix for a general constant metric"
                )
            metric = np.diag(metric)
            diagonal = True
        elif metric.ndim == 2:
            pass
        else:
            raise InvalidWorldSpecError("metric must be a vector or a matrix")

        def _opt_vec(key):
            v = doc.get(key)
            return None if v is None else np.asarray(v, dtype=float)

        a3 = doc.get("a3")
        if a3 is not None:
            a3 = np.asarray(a3, dtype=float)
            if a3.ndim == 1:  # flattened row-major
                if a3.size != dim**3:
                    raise InvalidWorldSpecError("flattened a3 must have length dim^3")
                a3 = a3.reshape((dim,) * 3)
        spec = cls(
            kind=kind,
            dim=dim,
            metric=metric,
            b=_opt_vec("b"),
            alpha=doc.get("alpha"),
            beta=doc.get("beta"),
            a3=a3,
            metric_is_diagonal=diagonal,
        )
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "WorldSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidWorldSpecError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        g = np.asarray(self.metric, dtype=float)
        if self.metric_is_diagonal or (
            np.allclose(g, np.diag(np.diag(g)))
            and np.all(np.isin(np.diag(g), (1.0, -1.0)))
        ):
            metric_doc = [float(v) for v in np.diag(g)]
        else:
            metric_doc = [[float(v) for v in row] for row in g]
        doc = {"kind": self.kind, "dim": self.dim, "metric": metric_doc}
        if self.b is not None:
            doc["b"] = [float(v) for v in self.b]
        if self.alpha is not None:
            doc["alpha"] = float(self.alpha)
        if self.beta is not None:
            doc["beta"] = float(self.beta)
        if self.a3 is not None:
            doc["a3"] = [float(v) for v in np.asarray(self.a3).ravel()]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class WorldFunction:
    """Immutable evaluator for a world function on a d-dimensional chart.

    ``w(x, xp)`` evaluates the world function; ``w.sym``/``w.asym`` give the
    symmetric and antisymmetric parts, with w = sym + asym exactly.
    """

    def __init__(self, evaluator: Callable, dim: int, spec: Optional[WorldSpec] = None,
                 label: str = "custom"):
        self._eval = evaluator
        self.dim = int(dim)
        self.spec = spec
        self.label = label

    @property
    def kind(self) -> str:
        return self.spec.kind if self.spec is not None else self.label

    def __call__(self, x, xp):
        x = _as_point(x, self.dim)
        xp = _as_point(xp, self.dim)
        return self._eval(x, xp)

    def sym(self, x, xp):
        """Symmetric part: the average of the two evaluation orders."""
        return 0.5 * (self(x, xp) + self(xp, x))

    def asym(self, x, xp):
        """Antisymmetric part: half the difference of the two orders."""
        return 0.5 * (self(x, xp) - self(xp, x))

    def split(self, x, xp):
        """Decompose w(x, xp) into (sym, asym).

        asym is defined as the forward value minus sym, so the recombination
        sym + asym reproduces w(x, xp) to one rounding.
        """
        fwd = self(x, xp)
        rev = self(xp, x)
        sym = 0.5 * (fwd + rev)
        return sym, fwd - sym

    def distance(self, x, xp):
        """Metric accessor: (sqrt(2w), True) when 2w >= 0, else (2w, False).

        Never produces a complex number; a negative squared separation is
        reported as the signed square with a flag.
        """
        two_w = 2.0 * self(x, xp)
        if np.ndim(two_w) == 0:
            if two_w >= 0.0:
                return float(np.sqrt(two_w)), True
            return float(two_w), False
        flag = two_w >= 0.0
        out = np.where(flag, np.sqrt(np.abs(two_w)), two_w)
        return out, flag

    def __repr__(self):
        return f"WorldFunction(kind={self.kind!r}, dim={self.dim})"


def _freeze(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def make_world(spec: WorldSpec) -> WorldFunction:
    """Build the evaluator for a validated WorldSpec."""
    spec.validate()
    g = _freeze(spec.metric)

    def quad(x, xp):
        xi = x - xp
        return 0.5 * np.einsum("...i,ij,...j", xi, g, xi)

    kind = spec.kind
    if kind == "euclidean":
        evaluator = quad
    elif kind == "constant_a":
        b = _freeze(spec.b)

        def evaluator(x, xp):
            xi = x - xp
            return np.einsum("...i,i", xi, b) + quad(x, xp)

    elif kind == "case1":
        b = _freeze(spec.b)
        alpha = float(spec.alpha)

        def evaluator(x, xp):
            xi = x - xp
            xi2 = np.einsum("...i,ij,...j", xi, g, xi)
            return np.einsum("...i,i", xi, b) * (1.0 + alpha * xi2) + 0.5 * xi2

    elif kind == "case2":
        b = _freeze(spec.b)
        alpha = float(spec.alpha)
        beta = float(spec.beta)

        def evaluator(x, xp):
            xi = x - xp
            xi2 = np.einsum("...i,ij,...j", xi, g, xi)
            f = 1.0 / (1.0 + beta * xi2)
            return np.einsum("...i,i", xi, b) * (1.0 + alpha * f) + 0.5 * xi2

    else:  # cubic_a
        a3 = _freeze(spec.a3)

        def evaluator(x, xp):
            xi = x - xp
            cubic = np.einsum("ikl,...i,...k,...l", a3, xi, xi, xi) / 6.0
            return quad(x, xp) + cubic

    return WorldFunction(evaluator, spec.dim, spec=spec, label=kind)


def world_from_callable(fn: Callable, dim: int, label: str = "custom") -> WorldFunction:
    """Wrap an arbitrary evaluator (test fixtures, transformed worlds).

    The callable must vanish on the diagonal and broadcast over leading axes.
    Not part of the JSON wire format; the shipped families remain the only
    CLI-accessible worlds.
    """
    return WorldFunction(fn, dim, spec=None, label=label)
