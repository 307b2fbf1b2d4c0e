"""Parameterization of a scaled-boundary section.

A section is the triangle spanned by the scaling center ``x0`` and the two
boundary nodes ``x1`` and ``x2``.  Points are addressed by the radial
coordinate ``xi`` (0 at the scaling center, 1 on the boundary) and the
circumferential coordinate ``eta`` in [-1, 1] along the boundary edge.

All functions broadcast: ``x0``, ``x1``, ``x2`` may carry leading batch
dimensions (``(..., 2)``), and ``xi``/``eta`` may be scalars or arrays that
broadcast against them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateFrameError(ValueError):
    """Raised when a section has a non-positive boundary Jacobian."""


@dataclass(frozen=True)
class BoundaryShapeEval:
    values: np.ndarray
    derivatives: np.ndarray


@dataclass(frozen=True)
class RadialShapeEval:
    values: np.ndarray
    derivatives: np.ndarray


@dataclass(frozen=True)
class SectionFrame:
    """Jacobian data of a section at one (or a batch of) parametric point(s).

    ``jbar`` holds the covariant rows ``[X(eta) - X0, dX/deta]``; ``g1_contra``
    and ``g2_contra`` are the matching contravariant vectors.
    """

    jbar: np.ndarray
    det_jbar: np.ndarray
    g1_contra: np.ndarray
    g2_contra: np.ndarray
    xi: np.ndarray

    @property
    def jacobian(self) -> np.ndarray:
        """Full Jacobian ``diag(1, xi) @ jbar``."""
        j = self.jbar.copy()
        j[..., 1, :] *= np.asarray(self.xi)[..., None]
        return j

    @property
    def det_j(self) -> np.ndarray:
        return self.xi * self.det_jbar

    @property
    def inverse_jacobian(self) -> np.ndarray:
        """``[G^1, G^2 / xi]`` as columns."""
        return np.stack([self.g1_contra, self.g2_contra / np.asarray(self.xi)[..., None]], axis=-1)


def eval_boundary_shapes(eta) -> BoundaryShapeEval:
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < -1.0) or np.any(eta > 1.0):
        raise ValueError(f"eta must lie in [-1, 1], got {eta}")
    values = np.stack([0.5 * (1.0 - eta), 0.5 * (1.0 + eta)], axis=-1)
    derivatives = np.broadcast_to(np.array([-0.5, 0.5]), values.shape).copy()
    return BoundaryShapeEval(values, derivatives)


def eval_radial_shapes(xi) -> RadialShapeEval:
    """Radial shape functions ``(xi, 1 - xi)`` for the boundary and center blocks."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0.0) or np.any(xi > 1.0):
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    values = np.stack([xi, 1.0 - xi], axis=-1)
    derivatives = np.broadcast_to(np.array([1.0, -1.0]), values.shape).copy()
    return RadialShapeEval(values, derivatives)


def _corners(section):
    return (np.asarray(section.x0, dtype=float),
            np.asarray(section.x1, dtype=float),
            np.asarray(section.x2, dtype=float))


def boundary_point(section, eta) -> np.ndarray:
    _, x1, x2 = _corners(section)
    eta = np.asarray(eta, dtype=float)[..., None]
    return 0.5 * (1.0 - eta) * x1 + 0.5 * (1.0 + eta) * x2


def map_to_physical(section, xi, eta) -> np.ndarray:
    """Physical coordinates ``X0 + xi (Xbar(eta) - X0)``."""
    xi_a = np.asarray(xi, dtype=float)
    eta_a = np.asarray(eta, dtype=float)
    if np.any(xi_a < 0.0) or np.any(xi_a > 1.0):
        raise ValueError("xi must lie in [0, 1]")
    if np.any(eta_a < -1.0) or np.any(eta_a > 1.0):
        raise ValueError("eta must lie in [-1, 1]")
    x0, _, _ = _corners(section)
    return x0 + xi_a[..., None] * (boundary_point(section, eta_a) - x0)


def eval_section_frame(section, xi, eta, check: bool = True) -> SectionFrame:
    """Evaluate the boundary Jacobian and contravariant basis.

    Parameters
    ----------
    section
        Any object with ``x0``, ``x1``, ``x2`` coordinate attributes.
    xi, eta
        Parametric point; ``xi`` must be strictly positive because the
        inverse Jacobian carries a ``1/xi`` factor.
    check
        Raise :class:`DegenerateFrameError` for ``det_jbar <= 0``.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0.0) or np.any(xi > 1.0):
        raise ValueError("frame evaluation requires xi in (0, 1]")
    x0, x1, x2 = _corners(section)
    xbar = boundary_point(section, eta)
    g1 = xbar - x0
    g2 = np.broadcast_to(0.5 * (x2 - x1), g1.shape)
    det = g1[..., 0] * g2[..., 1] - g1[..., 1] * g2[..., 0]
    if check and np.any(det <= 0.0):
        raise DegenerateFrameError(f"non-positive boundary Jacobian determinant {np.min(det)}")
    jbar = np.stack([g1, g2], axis=-2)
    inv = 1.0 / det
    g1_contra = np.stack([g2[..., 1], -g2[..., 0]], axis=-1) * inv[..., None]
    g2_contra = np.stack([-g1[..., 1], g1[..., 0]], axis=-1) * inv[..., None]
    return SectionFrame(jbar, det, g1_contra, g2_contra, np.broadcast_to(xi, det.shape))
