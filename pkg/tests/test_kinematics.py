"""Strain operators, including a symbolic re-derivation of the assumed shear field."""

from functools import lru_cache

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import parametric_points, sections
from plateforge.geometry import eval_section_frame
from plateforge.kinematics import (
    TYING_A,
    TYING_B,
    TYING_C,
    closed_form_ans_blocks,
    eval_ans_shear_operator,
    eval_standard_operators,
    plate_operators,
)
from plateforge.mesh import SectionArray


@lru_cache(maxsize=1)
def symbolic_ans_operator():
    """Assumed shear operator derived from scratch with sympy.

    Covariant shear strains are ``dw/da + bx dx/da - by dy/da`` for the
    parametric directions ``a``; the radial component is blended between
    the tying points on the two radial edges, the circumferential one is
    taken from the boundary midpoint and scaled by ``xi``.
    """
    xi, eta = sp.symbols("xi eta")
    coords = sp.symbols("x0 y0 x1 y1 x2 y2")
    x0, y0, x1, y1, x2, y2 = coords
    dofs = sp.symbols("w1 bx1 by1 w2 bx2 by2 w0 bx0 by0")
    w1, bx1, by1, w2, bx2, by2, w0, bx0, by0 = dofs
    n1, n2, n0 = xi * (1 - eta) / 2, xi * (1 + eta) / 2, 1 - xi
    x = n1 * x1 + n2 * x2 + n0 * x0
    y = n1 * y1 + n2 * y2 + n0 * y0
    w = n1 * w1 + n2 * w2 + n0 * w0
    bx = n1 * bx1 + n2 * bx2 + n0 * bx0
    by = n1 * by1 + n2 * by2 + n0 * by0

    def covariant(var):
        return sp.diff(w, var) + bx * sp.diff(x, var) - by * sp.diff(y, var)

    def at(expr, point):
        return expr.subs({xi: point[0], eta: point[1]})

    g_xi = (1 + eta) / 2 * at(covariant(xi), TYING_B) + (1 - eta) / 2 * at(covariant(xi), TYING_C)
    g_eta = xi * at(covariant(eta), TYING_A)
    jac = sp.Matrix([[sp.diff(x, xi), sp.diff(y, xi)], [sp.diff(x, eta), sp.diff(y, eta)]])
    gamma = sp.simplify(jac.inv() * sp.Matrix([g_xi, g_eta]))
    operator = gamma.jacobian(sp.Matrix(dofs))
    return sp.lambdify((xi, eta, *coords), operator, "numpy")


def _coords(sec):
    return (*sec.x0[0], *sec.x1[0], *sec.x2[0])


@given(sections(), parametric_points)
def test_ans_operator_matches_symbolic_oracle(sec, point):
    xi, eta = point
    oracle = np.array(symbolic_ans_operator()(xi, eta, *_coords(sec)), dtype=float)
    got = eval_ans_shear_operator(sec, xi, eta)[0]
    np.testing.assert_allclose(got, oracle, atol=1e-12 * max(1.0, np.abs(oracle).max()))


@given(sections(), parametric_points)
def test_closed_form_blocks_agree_with_tying_construction(sec, point):
    xi, eta = point
    one = type("S", (), {"x0": sec.x0[0], "x1": sec.x1[0], "x2": sec.x2[0]})
    blocks = np.concatenate(closed_form_ans_blocks(one, xi, eta), axis=1)
    inv = eval_section_frame(sec, xi, eta).inverse_jacobian[0]
    np.testing.assert_allclose(inv @ blocks, eval_ans_shear_operator(sec, xi, eta)[0], atol=1e-11)


def _rigid_modes(sec):
    pts = np.array([sec.x1[0], sec.x2[0], sec.x0[0]])
    x, y = pts[:, 0], pts[:, 1]
    one, zero = np.ones(3), np.zeros(3)
    return [np.column_stack(m).ravel() for m in ((one, zero, zero), (-x, one, zero), (y, zero, one))]


@given(sections(), parametric_points)
def test_rigid_modes_are_strain_free(sec, point):
    xi, eta = point
    ops = eval_standard_operators(sec, xi, eta)
    ans = eval_ans_shear_operator(sec, xi, eta)
    for mode in _rigid_modes(sec):
        for op in (ops.b_b[0], ops.b_s[0], ans[0]):
            assert np.abs(op @ mode).max() <= 1e-12 * max(1.0, np.abs(mode).max())


@given(sections(), parametric_points, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_constant_curvature_reproduced_and_shear_free(sec, point, k1, k2, k3):
    # Kirchhoff field: w quadratic, bx = -w_x, by = w_y gives constant curvature and zero shear
    xi, eta = point
    pts = np.array([sec.x1[0], sec.x2[0], sec.x0[0]])
    x, y = pts[:, 0], pts[:, 1]
    a, b, c = -k1 / 2, k2 / 2, -k3 / 2  # w = a x^2 + b y^2 + c x y
    w = a * x ** 2 + b * y ** 2 + c * x * y
    bx = -(2 * a * x + c * y)
    by = 2 * b * y + c * x
    d = np.column_stack([w, bx, by]).ravel()
    ops = plate_operators(sec, xi, eta, shear="ans")
    expected = np.array([-2 * a, -2 * b, -2 * c])
    np.testing.assert_allclose(ops.b_b[0] @ d, expected, atol=1e-10 * max(1, np.abs(d).max()))
    np.testing.assert_allclose(ops.b_s[0] @ d, 0.0, atol=1e-10 * max(1, np.abs(d).max()))


def test_pure_bending_patch_on_unit_square():
    corners = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    center = np.array([[0.5, 0.5]] * 4)
    secs = SectionArray(center, corners, np.roll(corners, -1, axis=0), np.arange(4), np.arange(4), np.zeros(4, int))

    def field(p):
        return np.array([-p[0] ** 2 / 2, p[0], 0.0])

    for s in range(4):
        d = np.concatenate([field(secs.x1[s]), field(secs.x2[s]), field(secs.x0[s])])
        for xi, eta in ((0.21, -0.57), (0.79, 0.57)):
            kappa = eval_standard_operators(secs.subset([s]), xi, eta).b_b[0] @ d
            np.testing.assert_allclose(kappa, [1.0, 0.0, 0.0], atol=1e-12)


@given(sections(), parametric_points)
def test_center_columns_of_scaled_parts_vanish(sec, point):
    xi, eta = point
    ops = eval_standard_operators(sec, xi, eta, with_membrane=True)
    for key in ("m2", "b2", "s2"):
        assert np.all(ops.parts[key][..., 10:15] == 0.0)
    tiny = eval_standard_operators(sec, 1e-8, eta, with_membrane=True)
    assert np.isfinite(tiny.b_b).all() and np.abs(tiny.b_b).max() < 1e3 * max(1.0, np.abs(ops.b_b).max())
    assert np.abs(tiny.b_m).max() < 1e3 * max(1.0, np.abs(ops.b_m).max())


@given(sections())
def test_ans_equals_standard_at_tying_points(sec):
    d = np.random.default_rng(1).normal(size=9)
    for (xi, eta), row in ((TYING_A, 1), (TYING_B, 0), (TYING_C, 0)):
        jac = eval_section_frame(sec, xi, eta).jacobian[0]
        std = jac @ (eval_standard_operators(sec, xi, eta).b_s[0] @ d)
        ans = jac @ (eval_ans_shear_operator(sec, xi, eta)[0] @ d)
        assert ans[row] == pytest.approx(std[row], abs=1e-12 * max(1.0, abs(std[row])))


@given(sections(), parametric_points)
def test_curvature_matches_finite_differences(sec, point):
    xi, eta = point
    xi = min(max(xi, 0.05), 0.95)
    eta = min(max(eta, -0.95), 0.95)
    d = np.random.default_rng(7).normal(size=9)
    nodal = d.reshape(3, 3)

    def interp(a, b):
        return np.array([a * (1 - b) / 2, a * (1 + b) / 2, 1 - a]) @ nodal

    h = 1e-6
    param = np.array([(interp(xi + h, eta) - interp(xi - h, eta)) / (2 * h),
                      (interp(xi, eta + h) - interp(xi, eta - h)) / (2 * h)])
    grad = eval_section_frame(sec, xi, eta).inverse_jacobian[0] @ param  # rows d/dx, d/dy
    kappa = [grad[0, 1], -grad[1, 2], grad[1, 1] - grad[0, 2]]
    got = eval_standard_operators(sec, xi, eta).b_b[0] @ d
    np.testing.assert_allclose(got, kappa, atol=1e-6 * max(1.0, np.abs(kappa).max()))


def test_membrane_layout_embeds_plate_columns(unit_triangle):
    plate = eval_standard_operators(unit_triangle, 0.4, 0.2)
    full = eval_standard_operators(unit_triangle, 0.4, 0.2, with_membrane=True)
    cols = [5 * a + k for a in range(3) for k in (2, 3, 4)]
    np.testing.assert_array_equal(full.b_b[..., cols], plate.b_b)
    np.testing.assert_array_equal(np.delete(full.b_b, cols, axis=-1), 0.0)
