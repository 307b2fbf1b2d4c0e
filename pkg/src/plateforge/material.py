"""Linear elastic, isotropic constitutive laws for plates.

Two material laws are supported:

``PlateMaterial2D``
    plane stress imposed on the constitutive law; resultant matrices
    ``c_m`` (membrane), ``c_b`` (bending) and ``c_s`` (shear).
``SolidMaterial3D``
    the full 3D law with independent thickness-strain parameters, integrated
    analytically over the thickness.  Plane stress is recovered by static
    condensation of the thickness strains at section level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SHEAR_CORRECTION = 5.0 / 6.0


class MaterialError(ValueError):
    pass


def _check(E, nu, t=1.0, k=1.0):
    if not E > 0:
        raise MaterialError(f"Young's modulus must be positive, got {E}")
    if not -1.0 < nu < 0.5:
        raise MaterialError(f"Poisson's ratio must lie in (-1, 0.5), got {nu}")
    if not t > 0:
        raise MaterialError(f"thickness must be positive, got {t}")
    if not k > 0:
        raise MaterialError(f"shear correction must be positive, got {k}")


@dataclass(frozen=True)
class PlateMaterial2D:
    E: float
    nu: float
    t: float
    k: float = SHEAR_CORRECTION

    law = "plate2d"

    def __post_init__(self):
        _check(self.E, self.nu, self.t, self.k)

    @property
    def c_m(self) -> np.ndarray:
        nu = self.nu
        return self.E * self.t / (1.0 - nu ** 2) * np.array(
            [[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])

    @property
    def c_b(self) -> np.ndarray:
        return self.t ** 2 / 12.0 * self.c_m

    @property
    def c_s(self) -> np.ndarray:
        return self.E * self.t * self.k / (2.0 * (1.0 + self.nu)) * np.eye(2)

    @property
    def D(self) -> float:
        """Flexural rigidity ``E t^3 / (12 (1 - nu^2))``."""
        return self.E * self.t ** 3 / (12.0 * (1.0 - self.nu ** 2))

    @property
    def with_membrane(self) -> bool:
        return False

    def resultant_matrix(self) -> np.ndarray:
        """Block-diagonal 8x8 matrix acting on ``(eps, kappa, gamma)``."""
        c = np.zeros((8, 8))
        c[:3, :3] = self.c_m
        c[3:6, 3:6] = self.c_b
        c[6:, 6:] = self.c_s
        return c


def plate_constitutive_2d(E, nu, t, k=SHEAR_CORRECTION) -> PlateMaterial2D:
    return PlateMaterial2D(float(E), float(nu), float(t), float(k))


@dataclass(frozen=True)
class Elasticity3D:
    """Isotropic 6x6 law in Voigt order (11, 22, 33, 12, 13, 23), engineering shear."""

    E: float
    nu: float

    def __post_init__(self):
        _check(self.E, self.nu)

    @property
    def lam(self) -> float:
        return self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @property
    def mu(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def cc(self) -> np.ndarray:
        lam, mu = self.lam, self.mu
        c = np.zeros((6, 6))
        c[:3, :3] = lam
        c[[0, 1, 2], [0, 1, 2]] = lam + 2.0 * mu
        c[[3, 4, 5], [3, 4, 5]] = mu
        return c


def elasticity_3d(E, nu) -> Elasticity3D:
    return Elasticity3D(float(E), float(nu))


class ThicknessMode(enum.Enum):
    LINEAR = "linear"
    CONSTANT = "constant"

    @property
    def n_params(self) -> int:
        return 2 if self is ThicknessMode.LINEAR else 1


def transformation_matrices(mode: ThicknessMode):
    """Constant and linear-in-zeta parts of ``A1`` (6x8) and ``A2`` (6xm).

    ``A1`` maps ``(eps_xx, eps_yy, eps_xy, k_xx, k_yy, k_xy, g_xz, g_yz)``
    onto the 3D strain vector; ``A2`` maps the thickness-strain parameters.
    """
    a1_0 = np.zeros((6, 8))
    a1_1 = np.zeros((6, 8))
    a1_0[0, 0] = a1_0[1, 1] = a1_0[3, 2] = 1.0
    a1_1[0, 3] = a1_1[1, 4] = a1_1[3, 5] = 1.0
    a1_0[4, 6] = a1_0[5, 7] = 1.0
    m = mode.n_params
    a2_0 = np.zeros((6, m))
    a2_1 = np.zeros((6, m))
    a2_0[2, 0] = 1.0
    if mode is ThicknessMode.LINEAR:
        a2_1[2, 1] = 1.0
    return (a1_0, a1_1), (a2_0, a2_1)


@dataclass(frozen=True)
class IntegratedThicknessBlocks:
    d11: np.ndarray
    d12: np.ndarray
    d22: np.ndarray

    def condensed(self) -> np.ndarray:
        """Pointwise Schur complement ``d11 - d12 d22^-1 d21``."""
        return self.d11 - self.d12 @ np.linalg.solve(self.d22, self.d12.T)


def _zeta_moments(t):
    return t, 0.0, t ** 3 / 12.0


def integrate_thickness_blocks(cc, t, mode: ThicknessMode, k: float = 1.0) -> IntegratedThicknessBlocks:
    """Integrate ``A^T C A`` over ``zeta in [-t/2, t/2]`` in closed form.

    ``k`` scales the transverse shear moduli (rows/columns 13 and 23) before
    integration.
    """
    if not t > 0:
        raise MaterialError(f"thickness must be positive, got {t}")
    c = np.array(cc.cc if isinstance(cc, Elasticity3D) else cc, dtype=float)
    c[4:, :] *= np.sqrt(k)
    c[:, 4:] *= np.sqrt(k)
    mode = ThicknessMode(mode)
    (p0, p1), (q0, q1) = transformation_matrices(mode)
    m0, m1, m2 = _zeta_moments(t)

    def block(a0, a1, b0, b1):
        return (m0 * a0.T @ c @ b0 + m1 * (a0.T @ c @ b1 + a1.T @ c @ b0) + m2 * a1.T @ c @ b1)

    return IntegratedThicknessBlocks(block(p0, p1, p0, p1), block(p0, p1, q0, q1), block(q0, q1, q0, q1))


@dataclass(frozen=True)
class SolidMaterial3D:
    """3D isotropic law used through the two-field thickness-strain formulation."""

    E: float
    nu: float
    t: float
    k: float = SHEAR_CORRECTION
    mode: ThicknessMode = ThicknessMode.LINEAR

    law = "solid3d"

    def __post_init__(self):
        _check(self.E, self.nu, self.t, self.k)
        object.__setattr__(self, "mode", ThicknessMode(self.mode))

    @property
    def with_membrane(self) -> bool:
        return True

    @property
    def D(self) -> float:
        return self.E * self.t ** 3 / (12.0 * (1.0 - self.nu ** 2))

    @cached_property
    def blocks(self) -> IntegratedThicknessBlocks:
        blocks = integrate_thickness_blocks(elasticity_3d(self.E, self.nu), self.t, self.mode, self.k)
        if np.any(np.linalg.eigvalsh(blocks.d22) <= 0):
            raise MaterialError("thickness-strain block is not positive definite")
        return blocks

    def as_plate(self) -> PlateMaterial2D:
        return PlateMaterial2D(self.E, self.nu, self.t, self.k)


MaterialModel = PlateMaterial2D | SolidMaterial3D


def material_from_config(cfg: dict) -> MaterialModel:
    """Build a material from the benchmark-config material block."""
    law = cfg.get("law", "plate2d")
    k = cfg.get("k", SHEAR_CORRECTION)
    if law == "plate2d":
        return PlateMaterial2D(float(cfg["E"]), float(cfg["nu"]), float(cfg["t"]), float(k))
    if law == "solid3d":
        return SolidMaterial3D(float(cfg["E"]), float(cfg["nu"]), float(cfg["t"]), float(k),
                               ThicknessMode(cfg.get("thickness_mode", "linear")))
    raise MaterialError(f"unknown material law {law!r}")
