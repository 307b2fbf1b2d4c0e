import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import block_diag

from plateforge.material import (
    Elasticity3D,
    MaterialError,
    PlateMaterial2D,
    SolidMaterial3D,
    ThicknessMode,
    elasticity_3d,
    integrate_thickness_blocks,
    material_from_config,
    plate_constitutive_2d,
)

moduli = st.floats(1.0, 1e9)
poisson = st.floats(-0.9, 0.49)
thickness = st.floats(1e-3, 2.0)


def test_flexural_rigidity_of_clamped_square_material():
    assert PlateMaterial2D(10.92e6, 0.3, 0.01).D == pytest.approx(1.0, rel=1e-9)


def test_zero_poisson_membrane_matrix():
    c = PlateMaterial2D(200.0, 0.0, 0.5).c_m
    np.testing.assert_allclose(c, np.diag([100.0, 100.0, 50.0]))


@given(moduli, poisson, thickness)
def test_bending_is_scaled_membrane(E, nu, t):
    mat = plate_constitutive_2d(E, nu, t)
    np.testing.assert_allclose(mat.c_b, t ** 2 / 12 * mat.c_m, rtol=1e-12)
    np.testing.assert_allclose(mat.c_s, E * t * mat.k / (2 * (1 + nu)) * np.eye(2), rtol=1e-12)
    assert np.all(np.linalg.eigvalsh(mat.c_m) > 0)


@pytest.mark.parametrize("nu", [0.5, -1.0, 0.7])
def test_inadmissible_poisson_ratio(nu):
    with pytest.raises(MaterialError):
        PlateMaterial2D(1.0, nu, 1.0)
    with pytest.raises(MaterialError):
        elasticity_3d(1.0, nu)


def test_lame_constants():
    el = elasticity_3d(1.0, 0.25)
    assert el.lam == pytest.approx(0.4)
    assert el.mu == pytest.approx(0.4)
    el0 = Elasticity3D(2.0, 0.0)
    np.testing.assert_allclose(el0.cc, np.diag([2.0, 2.0, 2.0, 1.0, 1.0, 1.0]))


@given(moduli, poisson)
def test_elasticity_symmetric_positive(E, nu):
    cc = elasticity_3d(E, nu).cc
    np.testing.assert_allclose(cc, cc.T)
    assert np.all(np.linalg.eigvalsh(cc) > 0)


def test_thickness_block_closed_form():
    el = elasticity_3d(1e4, 0.3)
    blocks = integrate_thickness_blocks(el, 1.0, ThicknessMode.LINEAR)
    stiff = el.lam + 2 * el.mu
    np.testing.assert_allclose(blocks.d22, [[stiff, 0.0], [0.0, stiff / 12.0]], rtol=1e-12)


@given(moduli, poisson, thickness, st.sampled_from(list(ThicknessMode)))
def test_membrane_bending_coupling_vanishes(E, nu, t, mode):
    d11 = integrate_thickness_blocks(elasticity_3d(E, nu), t, mode).d11
    np.testing.assert_array_equal(d11[:3, 3:6], 0.0)


def test_zero_poisson_decouples_thickness_strain():
    d12 = integrate_thickness_blocks(elasticity_3d(5.0, 0.0), 0.3, ThicknessMode.LINEAR).d12
    np.testing.assert_array_equal(d12, 0.0)


@given(moduli, poisson, thickness)
def test_linear_mode_recovers_plane_stress(E, nu, t):
    solid = SolidMaterial3D(E, nu, t)
    plate = solid.as_plate()
    expected = block_diag(plate.c_m, plate.c_b, plate.c_s)
    np.testing.assert_allclose(solid.blocks.condensed(), expected, rtol=1e-10, atol=1e-10 * np.abs(expected).max())


@given(moduli, poisson, thickness)
def test_constant_mode_is_stiffer_in_bending_unless_nu_zero(E, nu, t):
    lin = SolidMaterial3D(E, nu, t, mode="linear").blocks.condensed()
    const = SolidMaterial3D(E, nu, t, mode="constant").blocks.condensed()
    if abs(nu) < 1e-12:
        np.testing.assert_allclose(const, lin, rtol=1e-12)
    else:
        assert const[3, 3] > lin[3, 3]


def test_constant_and_linear_identical_at_zero_poisson():
    lin = SolidMaterial3D(1e4, 0.0, 1.0, mode="linear").blocks.condensed()
    const = SolidMaterial3D(1e4, 0.0, 1.0, mode="constant").blocks.condensed()
    np.testing.assert_allclose(const, lin, rtol=1e-14)


def test_material_from_config_roundtrip():
    mat = material_from_config({"E": 1.0, "nu": 0.2, "t": 0.1, "law": "solid3d", "thickness_mode": "constant"})
    assert isinstance(mat, SolidMaterial3D) and mat.mode is ThicknessMode.CONSTANT and mat.with_membrane
    assert isinstance(material_from_config({"E": 1.0, "nu": 0.2, "t": 0.1}), PlateMaterial2D)
    with pytest.raises(MaterialError):
        material_from_config({"E": 1.0, "nu": 0.2, "t": 0.1, "law": "shell"})
