"""Pointwise viscosity verdicts for smooth space-time fields.

A smooth field f is tested against the level-set flow equation
f_t + F(Xf, X2f) = 0 with the sign conventions

    subsolution:   residual <= 0,    supersolution: residual >= 0.

At points where the horizontal gradient vanishes F is not defined, and the
equation is interpreted through the semicontinuous envelopes of F: when the
horizontal Hessian also vanishes both envelopes collapse and the residual
is just f_t; otherwise the envelope residuals are necessary bounds
(f_t + F_* for the subsolution side, f_t + F^* for the supersolution side)
rather than a full two-sided test, and the verdict records that regime.

The module also provides the homogeneous-norm lemma checks (closed-form
horizontal derivatives of N = |x_h|^4 + |x_v|^2 and the x/y symmetry of the
derivatives of the gauge distance to the fourth power) and the admissibility
filter for the restricted class of test functions whose first and second
horizontal derivatives both vanish wherever the gradient does.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from .calculus import (
    Coord,
    Const,
    ScalarField,
    envelope_lower,
    envelope_upper,
    horizontal_gradient,
    horizontal_hessian,
    sq_norm,
)
from .groups import GroupSpec, compose, inverse

__all__ = [
    "REGIME_REGULAR",
    "REGIME_CHAR_NULL",
    "REGIME_CHAR_ENVELOPE",
    "PointVerdict",
    "check_point",
    "SweepReport",
    "sweep",
    "NormLemmaReport",
    "check_norm_lemma",
    "restricted_test_class_filter",
]

REGIME_REGULAR = "regular"
REGIME_CHAR_NULL = "characteristic-null-hessian"
REGIME_CHAR_ENVELOPE = "characteristic-nonnull-hessian"

DEFAULT_EPS_SING = 1e-10


@dataclass(frozen=True)
class PointVerdict:
    """Residuals of the flow equation for one field at one point.

    sub_residual passes (as a subsolution) when <= tolerance; super_residual
    passes (as a supersolution) when >= -tolerance.  In the regular regime
    the two coincide; in the characteristic-nonnull-hessian regime they are
    envelope bounds, not equivalent conditions.
    """

    x: npt.NDArray
    t: float
    regime: str
    sub_residual: float
    super_residual: float


def check_point(
    g: GroupSpec,
    f: ScalarField,
    x,
    t: float = 0.0,
    eps_sing: float = DEFAULT_EPS_SING,
) -> PointVerdict:
    """Classify the point and evaluate the one-sided residuals of f there."""
    x = np.asarray(x, dtype=float)
    j = f.jet(x, t)
    q = horizontal_gradient(g, j, x)
    A = horizontal_hessian(g, j, x)
    ft = 0.0 if j.dt is None else j.dt
    qnorm = float(np.sqrt(q @ q))
    if qnorm > eps_sing:
        qhat = q / qnorm
        val = ft - float(np.trace(A)) + float(qhat @ A @ qhat)
        return PointVerdict(x, t, REGIME_REGULAR, val, val)
    spectral = float(np.max(np.abs(np.linalg.eigvalsh(A))))
    if spectral <= eps_sing:
        return PointVerdict(x, t, REGIME_CHAR_NULL, ft, ft)
    return PointVerdict(
        x, t, REGIME_CHAR_ENVELOPE, ft + envelope_lower(A), ft + envelope_upper(A)
    )


@dataclass
class SweepReport:
    """Aggregate of point verdicts against an expected classification."""

    expect: str
    tolerance: float
    n_points: int = 0
    regime_counts: dict = field(default_factory=dict)
    worst_sub: float = -np.inf
    worst_super: float = np.inf
    worst_sub_at: npt.NDArray | None = None
    worst_super_at: npt.NDArray | None = None

    def add(self, v: PointVerdict) -> None:
        self.n_points += 1
        self.regime_counts[v.regime] = self.regime_counts.get(v.regime, 0) + 1
        if v.sub_residual > self.worst_sub:
            self.worst_sub = v.sub_residual
            self.worst_sub_at = v.x
        if v.super_residual < self.worst_super:
            self.worst_super = v.super_residual
            self.worst_super_at = v.x

    @property
    def passed(self) -> bool:
        ok = True
        if self.expect in ("subsolution", "solution"):
            ok = ok and self.worst_sub <= self.tolerance
        if self.expect in ("supersolution", "solution"):
            ok = ok and self.worst_super >= -self.tolerance
        return ok

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} expected={self.expect} n={self.n_points} "
            f"regimes={self.regime_counts} worst_sub={self.worst_sub:.3e} "
            f"worst_super={self.worst_super:.3e} tol={self.tolerance:.1e}"
        )


def sweep(
    g: GroupSpec,
    f: ScalarField,
    points: Iterable,
    expect: str,
    tolerance: float = 1e-12,
    eps_sing: float = DEFAULT_EPS_SING,
    region=None,
) -> SweepReport:
    """Run check_point over (x,) or (x, t) samples and summarize.

    Points without an explicit time are evaluated at t = 0.  Samples where
    the optional region predicate is False are skipped (barriers with a
    region-restricted classification use this to stay on their own turf).
    """
    if expect not in ("subsolution", "supersolution", "solution"):
        raise ValueError(f"expect must be a classification, got {expect!r}")
    report = SweepReport(expect=expect, tolerance=tolerance)
    for p in points:
        if isinstance(p, tuple) and len(p) == 2 and np.ndim(p[0]) == 1:
            x, t = p
        else:
            x, t = p, 0.0
        x = np.asarray(x, dtype=float)
        if region is not None and not region(x):
            continue
        report.add(check_point(g, f, x, t, eps_sing))
    return report


# -------------------------------------------------- homogeneous-norm lemma ---


def _norm_expr(g: GroupSpec):
    """N = |x_h|^4 + |x_v|^2 as an expression tree."""
    return sq_norm(range(g.m)) ** 2 + sq_norm(range(g.m, g.n))


def _norm_hgrad_closed(g: GroupSpec, x) -> npt.NDArray:
    xh, xv = g.split(np.asarray(x, dtype=float))
    out = 4.0 * float(xh @ xh) * xh
    for k in range(g.nv):
        out = out + 2.0 * xv[k] * (g.B[k] @ xh)
    return out


def _norm_hhess_closed(g: GroupSpec, x) -> npt.NDArray:
    xh, _ = g.split(np.asarray(x, dtype=float))
    out = 4.0 * float(xh @ xh) * np.eye(g.m) + 8.0 * np.outer(xh, xh)
    for k in range(g.nv):
        b = g.B[k] @ xh
        out += 2.0 * np.outer(b, b)
    return out


def _quartic_distance_expr(g: GroupSpec, base: npt.NDArray, vary: str):
    """d^4(x, y) = N(x^-1 o y) as an expression in one argument.

    vary="x": base plays y and the expression varies the first argument;
    vary="y": base plays x and the expression varies the second.  Writing
    z = x^-1 o y out in coordinates gives z_h = y_h - x_h and
    z_v,k = y_v,k - x_v,k - (B^(k) x_h) . y_h, and each component is affine
    in the varying argument.
    """
    m, nv = g.m, g.nv
    bh, bv = g.split(base)
    hsq_terms = []
    for j in range(m):
        diff = (Coord(j) - Const(bh[j])) if vary == "y" else (Const(bh[j]) - Coord(j))
        hsq_terms.append(diff * diff)
    hsq = hsq_terms[0]
    for term in hsq_terms[1:]:
        hsq = hsq + term
    expr = hsq * hsq
    for k in range(nv):
        if vary == "y":
            # z_v,k = y_v,k - bv_k - (B^(k) bh) . y_h
            inner = Coord(m + k) - Const(bv[k])
            Bbh = g.B[k] @ bh
            for j in range(m):
                inner = inner - Const(Bbh[j]) * Coord(j)
        else:
            # z_v,k = bv_k - x_v,k - (B^(k) x_h) . bh = bv_k - x_v,k + x_h . (B^(k) bh)
            inner = Const(bv[k]) - Coord(m + k)
            Bbh = g.B[k] @ bh
            for j in range(m):
                inner = inner + Const(Bbh[j]) * Coord(j)
        expr = expr + inner * inner
    return expr


@dataclass
class NormLemmaReport:
    """Worst-case deviations of the homogeneous-norm derivative identities."""

    n_points: int
    n_pairs: int
    worst_grad: float
    worst_hess: float
    worst_lower_bound: float  # max of 16|x_h|^6 - |XN|^2 (should be <= 0)
    worst_axis: float
    worst_pair_grad: float
    worst_pair_hess: float

    def max_deviation(self) -> float:
        return max(
            self.worst_grad,
            self.worst_hess,
            self.worst_lower_bound,
            self.worst_axis,
            self.worst_pair_grad,
            self.worst_pair_hess,
        )


def check_norm_lemma(
    g: GroupSpec,
    n_points: int = 400,
    n_pairs: int = 200,
    rng: np.random.Generator | None = None,
    scale: float = 2.0,
) -> NormLemmaReport:
    """Verify the closed-form horizontal derivatives of N = |x_h|^4 + |x_v|^2.

    Checks, at random points: XN and X2N against their closed forms; the
    lower bound |XN|^2 >= 16 |x_h|^6; exact vanishing of both on the axis
    x_h = 0.  At random pairs: the x/y symmetry of the quartic distance
    d^4(x, y) = N(x^-1 o y), namely |X_x d^4| = |X_y d^4| (the gradients
    themselves differ) and X2_x d^4 = X2_y d^4, which follows from XN
    being odd and X2N even under x -> -x.
    """
    rng = np.random.default_rng(rng)
    N_field = ScalarField(_norm_expr(g), g)
    worst_grad = worst_hess = worst_lb = worst_axis = 0.0

    for _ in range(n_points):
        x = rng.uniform(-scale, scale, size=g.n)
        j = N_field.jet(x)
        q = horizontal_gradient(g, j, x)
        A = horizontal_hessian(g, j, x)
        worst_grad = max(worst_grad, float(np.max(np.abs(q - _norm_hgrad_closed(g, x)))))
        worst_hess = max(worst_hess, float(np.max(np.abs(A - _norm_hhess_closed(g, x)))))
        xh, _ = g.split(x)
        worst_lb = max(worst_lb, 16.0 * float(xh @ xh) ** 3 - float(q @ q))

        axis_pt = x.copy()
        axis_pt[: g.m] = 0.0
        ja = N_field.jet(axis_pt)
        qa = horizontal_gradient(g, ja, axis_pt)
        Aa = horizontal_hessian(g, ja, axis_pt)
        worst_axis = max(worst_axis, float(np.max(np.abs(qa))), float(np.max(np.abs(Aa))))

    worst_pg = worst_ph = 0.0
    for _ in range(n_pairs):
        x = rng.uniform(-scale, scale, size=g.n)
        y = rng.uniform(-scale, scale, size=g.n)
        fx = ScalarField(_quartic_distance_expr(g, y, vary="x"), g)
        fy = ScalarField(_quartic_distance_expr(g, x, vary="y"), g)
        jx = fx.jet(x)
        jy = fy.jet(y)
        qx = horizontal_gradient(g, jx, x)
        qy = horizontal_gradient(g, jy, y)
        Ax = horizontal_hessian(g, jx, x)
        Ay = horizontal_hessian(g, jy, y)
        # cross-check the expression trees really encode N(x^-1 o y)
        z = compose(g, inverse(x), y)
        ref = float((z[: g.m] @ z[: g.m]) ** 2 + z[g.m :] @ z[g.m :])
        worst_pg = max(worst_pg, abs(jx.value - ref), abs(jy.value - ref))
        worst_pg = max(
            worst_pg, abs(float(np.sqrt(qx @ qx)) - float(np.sqrt(qy @ qy)))
        )
        worst_ph = max(worst_ph, float(np.max(np.abs(Ax - Ay))))

    return NormLemmaReport(
        n_points=n_points,
        n_pairs=n_pairs,
        worst_grad=worst_grad,
        worst_hess=worst_hess,
        worst_lower_bound=worst_lb,
        worst_axis=worst_axis,
        worst_pair_grad=worst_pg,
        worst_pair_hess=worst_ph,
    )


# ------------------------------------------- restricted test-function class ---


def restricted_test_class_filter(
    g: GroupSpec,
    f: ScalarField,
    x,
    t: float = 0.0,
    rho: float = 1e-2,
    eps_sing: float = DEFAULT_EPS_SING,
) -> bool:
    """Admissibility of f for the restricted comparison class near x.

    Samples the lattice x + {-rho, 0, rho}^n and requires that at every
    sampled point where the horizontal gradient vanishes (|Xf| <= eps_sing)
    the horizontal Hessian vanishes too (spectral norm <= eps_sing).
    Fields in this class never hit the envelope regime, so the pointwise
    verdicts are two-sided everywhere on the sampled lattice.
    """
    x = np.asarray(x, dtype=float)
    offsets = np.array([-rho, 0.0, rho])
    grids = np.meshgrid(*([offsets] * g.n), indexing="ij")
    pts = np.stack([a.ravel() for a in grids], axis=-1)
    for dx in pts:
        p = x + dx
        j = f.jet(p, t)
        q = horizontal_gradient(g, j, p)
        if float(np.sqrt(q @ q)) <= eps_sing:
            A = horizontal_hessian(g, j, p)
            if float(np.max(np.abs(np.linalg.eigvalsh(A)))) > eps_sing:
                return False
    return True
