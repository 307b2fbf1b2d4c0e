import math

import numpy as np
import pytest
from hypothesis import given

from conftest import parametric_points, sections
from plateforge.geometry import (
    DegenerateFrameError,
    eval_boundary_shapes,
    eval_radial_shapes,
    eval_section_frame,
    map_to_physical,
)
from plateforge.mesh import SectionArray


@pytest.mark.parametrize("eta, values", [(-1.0, (1, 0)), (0.0, (0.5, 0.5)), (1.0, (0, 1))])
def test_boundary_shapes_interpolate_nodes(eta, values):
    ev = eval_boundary_shapes(eta)
    np.testing.assert_allclose(ev.values, values)
    np.testing.assert_allclose(ev.derivatives, (-0.5, 0.5))


def test_boundary_shapes_reject_out_of_range():
    with pytest.raises(ValueError):
        eval_boundary_shapes(1.5)


def test_radial_shapes_partition_of_unity():
    ev = eval_radial_shapes(np.linspace(0, 1, 7))
    np.testing.assert_allclose(ev.values.sum(axis=-1), 1.0)


def test_frame_of_reference_triangle(unit_triangle):
    frame = eval_section_frame(unit_triangle, 1.0, 0.0)
    np.testing.assert_allclose(frame.jbar[0], [[0.5, 0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(frame.det_jbar[0], 0.5)
    np.testing.assert_allclose(frame.g1_contra[0], [1.0, 1.0])
    np.testing.assert_allclose(frame.g2_contra[0], [-1.0, 1.0])


def test_map_to_physical_hand_values(unit_triangle):
    np.testing.assert_allclose(map_to_physical(unit_triangle, 0.5, 0.0)[0], [0.25, 0.25])
    np.testing.assert_allclose(map_to_physical(unit_triangle, 1.0, -1.0)[0], [1.0, 0.0])
    for eta in (-1.0, 0.3, 1.0):
        np.testing.assert_allclose(map_to_physical(unit_triangle, 0.0, eta)[0], [0.0, 0.0])


def test_unit_square_sections_share_det():
    c = np.array([[0.5, 0.5]] * 4)
    corners = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    secs = SectionArray(c, corners, np.roll(corners, -1, axis=0), np.arange(4), np.arange(4), np.zeros(4, int))
    det = eval_section_frame(secs, 1.0, 0.0).det_jbar
    np.testing.assert_allclose(det, det[0])


def test_clockwise_section_raises():
    secs = SectionArray(np.array([[0.0, 0.0]]), np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]]),
                        np.array([0]), np.array([1]), np.array([0]))
    with pytest.raises(DegenerateFrameError):
        eval_section_frame(secs, 0.5, 0.0)


@given(sections(), parametric_points)
def test_contravariant_orthogonality(sec, point):
    xi, eta = point
    frame = eval_section_frame(sec, xi, eta)
    covariant = frame.jbar[0]
    contra = np.stack([frame.g1_contra[0], frame.g2_contra[0]])
    np.testing.assert_allclose(covariant @ contra.T, np.eye(2), atol=1e-12)


@given(sections(), parametric_points)
def test_inverse_jacobian_round_trip(sec, point):
    xi, eta = point
    frame = eval_section_frame(sec, xi, eta)
    np.testing.assert_allclose(frame.inverse_jacobian[0] @ frame.jacobian[0], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(frame.det_j[0], xi * frame.det_jbar[0], rtol=1e-12)


@given(sections(), parametric_points)
def test_jacobian_matches_finite_differences(sec, point):
    xi, eta = point
    xi = min(max(xi, 1e-3), 1 - 1e-3)
    eta = min(max(eta, -1 + 1e-3), 1 - 1e-3)
    h = 1e-6
    d_xi = (map_to_physical(sec, xi + h, eta) - map_to_physical(sec, xi - h, eta))[0] / (2 * h)
    d_eta = (map_to_physical(sec, xi, eta + h) - map_to_physical(sec, xi, eta - h))[0] / (2 * h)
    jac = eval_section_frame(sec, xi, eta).jacobian[0]
    np.testing.assert_allclose(jac[0], d_xi, atol=1e-6)
    np.testing.assert_allclose(jac[1], d_eta, atol=1e-6)


@given(sections(), parametric_points)
def test_rotation_rotates_contravariant_vectors(sec, point):
    xi, eta = point
    theta = 0.7
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    turned = SectionArray(sec.x0 @ rot.T, sec.x1 @ rot.T, sec.x2 @ rot.T, sec.node1, sec.node2, sec.element)
    a = eval_section_frame(sec, xi, eta)
    b = eval_section_frame(turned, xi, eta)
    np.testing.assert_allclose(b.det_jbar, a.det_jbar, rtol=1e-12)
    np.testing.assert_allclose(b.g1_contra[0], rot @ a.g1_contra[0], atol=1e-12)
    np.testing.assert_allclose(b.g2_contra[0], rot @ a.g2_contra[0], atol=1e-12)
