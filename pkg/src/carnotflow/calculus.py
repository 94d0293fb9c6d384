"""Horizontal calculus: jets, exact derivative propagation, and the operator.

A :class:`Jet` carries value, full spatial gradient, full spatial Hessian and
(optionally) the time derivative of a scalar field at one space-time point.
Closed-form fields are represented as small expression trees
(:class:`ScalarField`) that propagate second-order derivatives exactly;
grid data gets jets from central differences (:func:`numeric_jet`).

From a jet, the horizontal gradient and Hessian are

    Xu  = grad . sigma(x)            (a length-m row vector)
    X2u = t(sigma) hess sigma        (an m x m symmetric matrix)

which is valid in step two: sigma depends only on x_h and the first-order
correction terms cancel in the symmetrization.  The level-set curvature
operator is F(q, A) = -tr[(I - qq/|q|^2) A]; at q = 0 it is replaced by its
semicontinuous envelopes  -tr A + lambda_min(A)  and  -tr A + lambda_max(A).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, TYPE_CHECKING, Union

import numpy as np
import numpy.typing as npt

from .groups import GroupSpec, sigma

if TYPE_CHECKING:  # pragma: no cover
    from .solver import GridField

__all__ = [
    "Jet",
    "Expr",
    "Const",
    "Coord",
    "TimeVar",
    "ScalarField",
    "exact_jet",
    "numeric_jet",
    "horizontal_gradient",
    "horizontal_hessian",
    "mcf_operator_F",
    "envelope_lower",
    "envelope_upper",
    "EnvelopePair",
    "full_operator_G",
]

HESS_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class Jet:
    """Second-order data of a scalar field at one point.

    Attributes:
        value: field value.
        grad: full spatial gradient, length n.
        hess: full spatial Hessian, symmetric n x n.
        dt: time derivative, or None when unknown (e.g. grid snapshots).
    """

    value: float
    grad: npt.NDArray[np.float64]
    hess: npt.NDArray[np.float64]
    dt: float | None = None

    def __post_init__(self):
        defect = np.abs(self.hess - self.hess.T).max() if self.hess.size else 0.0
        if defect > HESS_SYMMETRY_TOL:
            raise ValueError(f"Hessian must be symmetric; defect {defect:.3e}")


# --------------------------------------------------------------------------
# Expression trees with exact second-order forward propagation.
#
# Each node evaluates to (value, grad, hess, dt) over the n spatial
# coordinates plus time.  Only the handful of forms the closed-form fields
# need is implemented: constants, coordinates, time, sums, products, powers.
# --------------------------------------------------------------------------


class Expr:
    """Base expression node; combine with +, -, *, ** and sqrt()."""

    def eval(self, x: npt.NDArray, t: float) -> tuple[float, npt.NDArray, npt.NDArray, float]:
        raise NotImplementedError

    # -- operator sugar ----------------------------------------------------
    def __add__(self, other) -> "Expr":
        return Sum(self, _wrap(other))

    def __radd__(self, other) -> "Expr":
        return Sum(_wrap(other), self)

    def __sub__(self, other) -> "Expr":
        return Sum(self, Product(Const(-1.0), _wrap(other)))

    def __rsub__(self, other) -> "Expr":
        return Sum(_wrap(other), Product(Const(-1.0), self))

    def __mul__(self, other) -> "Expr":
        return Product(self, _wrap(other))

    def __rmul__(self, other) -> "Expr":
        return Product(_wrap(other), self)

    def __neg__(self) -> "Expr":
        return Product(Const(-1.0), self)

    def __pow__(self, p) -> "Expr":
        return Power(self, float(p))


def _wrap(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float, np.floating)):
        return Const(float(v))
    raise TypeError(f"cannot use {type(v).__name__} in an expression")


class Const(Expr):
    def __init__(self, c: float):
        self.c = float(c)

    def eval(self, x, t):
        n = len(x)
        return self.c, np.zeros(n), np.zeros((n, n)), 0.0


class Coord(Expr):
    """The i-th spatial coordinate function x_i."""

    def __init__(self, i: int):
        self.i = int(i)

    def eval(self, x, t):
        n = len(x)
        g = np.zeros(n)
        g[self.i] = 1.0
        return float(x[self.i]), g, np.zeros((n, n)), 0.0


class TimeVar(Expr):
    """The time variable t."""

    def eval(self, x, t):
        n = len(x)
        return float(t), np.zeros(n), np.zeros((n, n)), 1.0


class Sum(Expr):
    def __init__(self, *terms: Expr):
        self.terms = terms

    def eval(self, x, t):
        n = len(x)
        v, g, H, dt = 0.0, np.zeros(n), np.zeros((n, n)), 0.0
        for term in self.terms:
            tv, tg, tH, tdt = term.eval(x, t)
            v += tv
            g += tg
            H += tH
            dt += tdt
        return v, g, H, dt


class Product(Expr):
    def __init__(self, a: Expr, b: Expr):
        self.a, self.b = a, b

    def eval(self, x, t):
        av, ag, aH, adt = self.a.eval(x, t)
        bv, bg, bH, bdt = self.b.eval(x, t)
        v = av * bv
        g = av * bg + bv * ag
        H = av * bH + bv * aH + np.outer(ag, bg) + np.outer(bg, ag)
        dt = av * bdt + bv * adt
        return v, g, H, dt


class Power(Expr):
    """base**p for real p; non-integer p requires a positive base."""

    def __init__(self, base: Expr, p: float):
        self.base, self.p = base, float(p)

    def eval(self, x, t):
        uv, ug, uH, udt = self.base.eval(x, t)
        p = self.p
        if p == 0.0:
            n = len(x)
            return 1.0, np.zeros(n), np.zeros((n, n)), 0.0
        if p != round(p) and uv <= 0.0:
            raise ValueError(
                f"fractional power {p} of a non-positive base {uv:.3e}"
            )
        if p == round(p) and p < 2 and uv == 0.0 and p != 1.0:
            raise ValueError(f"power {p} undefined at base 0")
        v = uv ** p
        du = p * uv ** (p - 1)
        d2u = p * (p - 1) * uv ** (p - 2) if p != 1.0 else 0.0
        g = du * ug
        H = du * uH + d2u * np.outer(ug, ug)
        return v, g, H, du * udt


def sqrt(e: Expr) -> Expr:
    """Square root node; defined where the argument is positive."""
    return Power(_wrap(e), 0.5)


def sq_norm(indices) -> Expr:
    """Sum of squared coordinates over the given index range."""
    return Sum(*(Coord(i) ** 2 for i in indices))


class ScalarField:
    """A closed-form space-time scalar field with exact jets.

    Args:
        expr: expression tree in the coordinates Coord(0..n-1) and TimeVar().
        group: the ambient group (fixes n and the horizontal split).
        domain: optional predicate point -> bool marking where jets are
            trustworthy; evaluation outside raises ValueError.
    """

    def __init__(self, expr: Expr, group: GroupSpec, domain=None):
        self.expr = expr
        self.group = group
        self.domain = domain

    def jet(self, x: npt.NDArray, t: float = 0.0) -> Jet:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.group.n,):
            raise ValueError(
                f"point has shape {x.shape}, expected ({self.group.n},)"
            )
        if self.domain is not None and not self.domain(x):
            raise ValueError(f"point {x} is outside the field's validity region")
        v, g, H, dt = self.expr.eval(x, t)
        H = 0.5 * (H + H.T)
        return Jet(value=v, grad=g, hess=H, dt=dt)

    def __call__(self, x: npt.NDArray, t: float = 0.0) -> float:
        return self.jet(x, t).value


def exact_jet(f: ScalarField, x: npt.NDArray, t: float = 0.0) -> Jet:
    """Exact jet of a closed-form field via second-order propagation."""
    return f.jet(x, t)


def numeric_jet(grid: "GridField", node: tuple[int, ...]) -> Jet:
    """Second-order central-difference jet at a grid node.

    Mixed derivatives use the symmetric four-point stencil, which keeps the
    numeric Hessian symmetric by construction; the whole jet is exact on
    quadratics.  The node must be at least one cell away from every face.

    Args:
        grid: sampled field (values, spacing per axis).
        node: multi-index of the target node.

    Returns:
        Jet with dt=None (a single snapshot carries no time derivative).

    Raises:
        ValueError: if the node touches the boundary.
    """
    u = grid.values
    idx = tuple(int(i) for i in node)
    n = u.ndim
    for a in range(n):
        if not 1 <= idx[a] <= u.shape[a] - 2:
            raise ValueError(f"node {idx} is on the boundary along axis {a}")
    h = grid.spacing

    def at(offsets) -> float:
        return float(u[tuple(idx[a] + offsets.get(a, 0) for a in range(n))])

    v = at({})
    g = np.zeros(n)
    H = np.zeros((n, n))
    for a in range(n):
        up, dn = at({a: 1}), at({a: -1})
        g[a] = (up - dn) / (2 * h[a])
        H[a, a] = (up - 2 * v + dn) / h[a] ** 2
        for b in range(a + 1, n):
            pp = at({a: 1, b: 1})
            pm = at({a: 1, b: -1})
            mp = at({a: -1, b: 1})
            mm = at({a: -1, b: -1})
            H[a, b] = H[b, a] = (pp - pm - mp + mm) / (4 * h[a] * h[b])
    return Jet(value=v, grad=g, hess=H, dt=None)


# --------------------------------------------------------------------------
# Horizontal projections and the curvature operator.
# --------------------------------------------------------------------------


def horizontal_gradient(g: GroupSpec, j: Jet, x: npt.NDArray) -> npt.NDArray:
    """Horizontal gradient Xu = grad . sigma(x), a length-m vector."""
    return j.grad @ sigma(g, x)


def horizontal_hessian(g: GroupSpec, j: Jet, x: npt.NDArray) -> npt.NDArray:
    """Horizontal Hessian X2u = t(sigma) hess sigma, symmetrized m x m."""
    s = sigma(g, x)
    A = s.T @ j.hess @ s
    return 0.5 * (A + A.T)


def mcf_operator_F(q: npt.NDArray, A: npt.NDArray) -> float:
    """Curvature operator F(q, A) = -tr[(I - qq/|q|^2) A].

    Raises:
        ValueError: when |q| = 0; callers must route singular states to the
            envelopes instead.
    """
    q = np.asarray(q, dtype=float)
    qq = float(q @ q)
    if qq == 0.0:
        raise ValueError("F is undefined at a vanishing horizontal gradient")
    return float(-np.trace(A) + (q @ A @ q) / qq)


def envelope_lower(A: npt.NDArray) -> float:
    """Lower envelope of F at q = 0:  -tr A + lambda_min(A)."""
    return float(-np.trace(A) + np.linalg.eigvalsh(A)[0])


def envelope_upper(A: npt.NDArray) -> float:
    """Upper envelope of F at q = 0:  -tr A + lambda_max(A)."""
    return float(-np.trace(A) + np.linalg.eigvalsh(A)[-1])


class EnvelopePair(NamedTuple):
    """Marker returned where the operator is singular (|Xu| = 0)."""

    lower: float
    upper: float


def full_operator_G(
    g: GroupSpec, x: npt.NDArray, j: Jet
) -> Union[float, EnvelopePair]:
    """Spatial operator of the level-set equation at one point.

    Returns F(Xu, X2u) when the horizontal gradient is nonzero, otherwise an
    :class:`EnvelopePair` with the lower/upper envelopes of X2u.  Singularity
    is reported by the marker, never by an exception, so hot loops stay
    branch-cheap.
    """
    q = horizontal_gradient(g, j, x)
    A = horizontal_hessian(g, j, x)
    if float(q @ q) > 0.0:
        return mcf_operator_F(q, A)
    return EnvelopePair(envelope_lower(A), envelope_upper(A))
