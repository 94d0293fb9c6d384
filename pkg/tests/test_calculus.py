"""Exact jets, horizontal projections, the operator F and its envelopes.

Jets from the expression layer are cross-checked against a plain
central-difference oracle (independent of the propagation rules), and the
horizontal quantities against hand values for the homogeneous-norm field
N = |x_h|^4 + |x_v|^2.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from carnotflow import (
    Const,
    Coord,
    EnvelopePair,
    GridField,
    Jet,
    ScalarField,
    TimeVar,
    envelope_lower,
    envelope_upper,
    exact_jet,
    full_operator_G,
    heisenberg,
    horizontal_gradient,
    horizontal_hessian,
    mcf_operator_F,
    numeric_jet,
    sq_norm,
    sqrt,
)

HEIS = heisenberg()

coord = st.floats(-2.0, 2.0, allow_nan=False)
vec2 = arrays(np.float64, 2, elements=coord)
sym2 = arrays(np.float64, (2, 2), elements=coord).map(lambda M: (M + M.T) / 2)


def fd_jet(fun, x, t, h=1e-4):
    """Central-difference value/gradient/Hessian oracle (space only)."""
    n = len(x)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    val = fun(x, t)
    for a in range(n):
        ea = np.zeros(n)
        ea[a] = h
        grad[a] = (fun(x + ea, t) - fun(x - ea, t)) / (2 * h)
        hess[a, a] = (fun(x + ea, t) - 2 * val + fun(x - ea, t)) / h**2
        for b in range(a + 1, n):
            eb = np.zeros(n)
            eb[b] = h
            mixed = (
                fun(x + ea + eb, t)
                - fun(x + ea - eb, t)
                - fun(x - ea + eb, t)
                + fun(x - ea - eb, t)
            ) / (4 * h * h)
            hess[a, b] = hess[b, a] = mixed
    return val, grad, hess


def norm_field(g):
    return ScalarField(sq_norm(range(g.m)) ** 2 + sq_norm(range(g.m, g.n)), g)


# ---------------------------------------------------------------------------
# expression layer
# ---------------------------------------------------------------------------


def test_jet_rejects_asymmetric_hessian():
    with pytest.raises(ValueError, match="symmetric"):
        Jet(0.0, np.zeros(2), np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestExpressions:
    def test_polynomial_jet_matches_fd(self):
        expr = (Coord(0) * Coord(1) - 2.0) * Coord(2) + Coord(0) ** 3
        f = ScalarField(expr, HEIS)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-2, 2, size=3)
            j = f.jet(x)
            val, grad, hess = fd_jet(lambda p, t: f(p, t), x, 0.0)
            assert j.value == pytest.approx(val, abs=1e-12)
            np.testing.assert_allclose(j.grad, grad, atol=1e-6)
            np.testing.assert_allclose(j.hess, hess, atol=1e-4)

    def test_sqrt_and_powers_match_fd(self):
        expr = sqrt(sq_norm(range(3)) + Const(0.5)) + sq_norm(range(2)) ** 1.5
        f = ScalarField(expr, HEIS)
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.uniform(0.2, 2, size=3)
            j = f.jet(x)
            val, grad, hess = fd_jet(lambda p, t: f(p, t), x, 0.0)
            np.testing.assert_allclose(j.grad, grad, atol=1e-6)
            np.testing.assert_allclose(j.hess, hess, atol=1e-4)

    def test_time_derivative_propagates(self):
        f = ScalarField(Const(-3.0) * TimeVar() + sq_norm(range(2)), HEIS)
        j = f.jet(np.array([1.0, 1.0, 0.0]), t=0.7)
        assert j.dt == pytest.approx(-3.0)
        assert j.value == pytest.approx(-2.1 + 2.0)

    def test_power_zero_is_constant_one(self):
        f = ScalarField(sq_norm(range(2)) ** 0, HEIS)
        j = f.jet(np.array([0.0, 0.0, 1.0]))
        assert j.value == 1.0
        assert not j.grad.any() and not j.hess.any()

    def test_fractional_power_needs_positive_base(self):
        f = ScalarField(sq_norm(range(2)) ** 0.5, HEIS)
        with pytest.raises(ValueError):
            f.jet(np.array([0.0, 0.0, 1.0]))

    def test_negative_power_at_zero_base_rejected(self):
        f = ScalarField(Coord(0) ** -1, HEIS)
        with pytest.raises(ValueError):
            f.jet(np.zeros(3))

    def test_domain_predicate_refuses_jet(self):
        f = ScalarField(sq_norm(range(3)), HEIS, domain=lambda x: x[0] > 0)
        f.jet(np.array([0.5, 0.0, 0.0]))
        with pytest.raises(ValueError, match="validity region"):
            f.jet(np.array([-0.5, 0.0, 0.0]))


# ---------------------------------------------------------------------------
# numeric jets on grids
# ---------------------------------------------------------------------------


class TestNumericJet:
    def _quadratic_grid(self):
        box = ((-1.0, 1.0),) * 3
        field = GridField(box, np.zeros((8, 8, 8)))
        xs = np.meshgrid(*[field.axis_coords(a) for a in range(3)], indexing="ij")
        vals = 2.0 * xs[0] ** 2 - xs[0] * xs[1] + 3.0 * xs[2] - xs[1] * xs[2] + 1.0
        return GridField(box, vals), xs

    def test_exact_on_quadratics(self):
        grid, xs = self._quadratic_grid()
        node = (3, 4, 2)
        j = numeric_jet(grid, node)
        x = np.array([xs[a][node] for a in range(3)])
        np.testing.assert_allclose(
            j.grad, [4 * x[0] - x[1], -x[0] - x[2], 3.0 - x[1]], atol=1e-12
        )
        expected_hess = np.array([[4.0, -1, 0], [-1, 0, -1], [0, -1, 0]])
        np.testing.assert_allclose(j.hess, expected_hess, atol=1e-11)
        assert j.dt is None

    def test_boundary_node_rejected(self):
        grid, _ = self._quadratic_grid()
        with pytest.raises(ValueError, match="boundary"):
            numeric_jet(grid, (0, 4, 4))
        with pytest.raises(ValueError, match="boundary"):
            numeric_jet(grid, (4, 4, 7))


# ---------------------------------------------------------------------------
# horizontal projections: hand values for N = |x_h|^4 + |x_v|^2
# ---------------------------------------------------------------------------


class TestHorizontal:
    def test_norm_gradient_and_hessian_at_unit_point(self):
        f = norm_field(HEIS)
        x = np.array([1.0, 0.0, 0.0])
        j = f.jet(x)
        np.testing.assert_allclose(horizontal_gradient(HEIS, j, x), [4.0, 0.0], atol=1e-13)
        np.testing.assert_allclose(
            horizontal_hessian(HEIS, j, x), [[12.0, 0.0], [0.0, 6.0]], atol=1e-13
        )

    def test_vertical_coordinate_enters_through_frame(self):
        f = norm_field(HEIS)
        x = np.array([1.0, 0.0, 2.0])
        j = f.jet(x)
        # XN = 4|x_h|^2 x_h + 2 x_v B x_h = (4, 0) + 2*2*(0, -1)
        np.testing.assert_allclose(horizontal_gradient(HEIS, j, x), [4.0, -4.0], atol=1e-13)

    def test_hessian_symmetrized(self):
        f = norm_field(HEIS)
        x = np.array([0.7, -0.3, 0.4])
        A = horizontal_hessian(HEIS, f.jet(x), x)
        np.testing.assert_array_equal(A, A.T)


# ---------------------------------------------------------------------------
# the operator and its envelopes
# ---------------------------------------------------------------------------


def test_operator_frozen_value():
    assert mcf_operator_F(np.array([1.0, 0.0]), np.diag([3.0, 5.0])) == pytest.approx(-5.0)


def test_operator_rejects_zero_gradient():
    with pytest.raises(ValueError):
        mcf_operator_F(np.zeros(2), np.eye(2))


def test_envelopes_frozen_value():
    A = np.diag([1.0, -1.0])
    assert envelope_lower(A) == pytest.approx(-1.0)
    assert envelope_upper(A) == pytest.approx(1.0)


@given(q=vec2, A=sym2, lam=st.floats(0.1, 3.0), mu=st.floats(-2.0, 2.0))
@settings(max_examples=100, deadline=None)
def test_operator_geometric(q, A, lam, mu):
    """F(lam q, lam A + mu q x q) = lam F(q, A): the level-set labeling drops out."""
    if float(q @ q) < 1e-8:
        return
    lhs = mcf_operator_F(lam * q, lam * A + mu * np.outer(q, q))
    assert lhs == pytest.approx(lam * mcf_operator_F(q, A), rel=1e-9, abs=1e-9)


@given(q=vec2, A=sym2, P=arrays(np.float64, (2, 2), elements=coord))
@settings(max_examples=100, deadline=None)
def test_operator_degenerate_elliptic(q, A, P):
    """Adding a PSD increment to the Hessian argument never raises F."""
    if float(q @ q) < 1e-8:
        return
    psd = P @ P.T
    assert mcf_operator_F(q, A + psd) <= mcf_operator_F(q, A) + 1e-10


@given(q=vec2, A=sym2)
@settings(max_examples=100, deadline=None)
def test_envelopes_bound_operator(q, A):
    if float(q @ q) < 1e-8:
        return
    val = mcf_operator_F(q, A)
    assert envelope_lower(A) - 1e-11 <= val <= envelope_upper(A) + 1e-11


def test_full_operator_returns_envelope_pair_at_characteristic_point():
    f = norm_field(HEIS)
    x = np.array([0.0, 0.0, 0.5])  # axis: XN = 0 and X2N = 0
    out = full_operator_G(HEIS, x, f.jet(x))
    assert isinstance(out, EnvelopePair)
    assert out.lower == pytest.approx(0.0, abs=1e-13)
    assert out.upper == pytest.approx(0.0, abs=1e-13)


def test_full_operator_matches_f_at_regular_point():
    f = norm_field(HEIS)
    x = np.array([0.8, -0.1, 0.3])
    j = f.jet(x)
    out = full_operator_G(HEIS, x, j)
    assert isinstance(out, float)
    q = horizontal_gradient(HEIS, j, x)
    A = horizontal_hessian(HEIS, j, x)
    assert out == pytest.approx(mcf_operator_F(q, A), abs=0)
