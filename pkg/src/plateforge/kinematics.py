"""Strain-displacement operators on a scaled-boundary section.

Section DOF vectors are ordered node-block-wise as ``[node1, node2, center]``.
Each block is either the plate layout ``(w, beta_x, beta_y)`` or the layout
with membrane terms ``(u_x, u_y, w, beta_x, beta_y)``.

Sign conventions::

    kappa = [beta_x,x, -beta_y,y, beta_x,y - beta_y,x]
    gamma = [w,x + beta_x, w,y - beta_y]

so the Kirchhoff constraint reads ``beta_x = -w,x`` and ``beta_y = w,y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import eval_boundary_shapes, eval_section_frame

PLATE_DOFS = ("w", "bx", "by")
FULL_DOFS = ("ux", "uy", "w", "bx", "by")

# tying points (xi, eta)
TYING_A = (1.0, 0.0)
TYING_B = (0.5, 1.0)
TYING_C = (0.5, -1.0)


@dataclass(frozen=True)
class DofLayout:
    names: tuple

    @property
    def ndof(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


PLATE_LAYOUT = DofLayout(PLATE_DOFS)
FULL_LAYOUT = DofLayout(FULL_DOFS)


def layout_for(with_membrane: bool) -> DofLayout:
    return FULL_LAYOUT if with_membrane else PLATE_LAYOUT


@dataclass(frozen=True)
class StrainOperatorSet:
    """Operators evaluated at one parametric point (or a batch of them).

    ``parts`` keeps the split ``B = B1 + B2 / xi (+ S3)`` for each operator
    under the keys ``"m1"``, ``"m2"``, ``"b1"``, ``"b2"``, ``"s1"``, ``"s2"``,
    ``"s3"``.
    """

    b_m: np.ndarray | None
    b_b: np.ndarray
    b_s: np.ndarray
    dof_layout: DofLayout
    parts: dict = field(default_factory=dict)


def _shape_products(xi, eta):
    """Per-node factors ``Nbar*Nhat_xi``, ``Nbar_eta*Nhat`` and ``Nbar*Nhat``."""
    xi = np.asarray(xi, dtype=float)
    bnd = eval_boundary_shapes(eta)
    n1, n2 = bnd.values[..., 0], bnd.values[..., 1]
    d1, d2 = bnd.derivatives[..., 0], bnd.derivatives[..., 1]
    n1, n2, d1, d2, xi = np.broadcast_arrays(n1, n2, d1, d2, xi)
    # radial: boundary blocks carry xi, center block carries (1 - xi) on both
    # boundary shape functions (the stacked identity)
    f_xi = np.stack([n1, n2, -(n1 + n2)], axis=-1)
    f_eta = np.stack([d1 * xi, d2 * xi, (d1 + d2) * (1.0 - xi)], axis=-1)
    f_val = np.stack([n1 * xi, n2 * xi, (n1 + n2) * (1.0 - xi)], axis=-1)
    return f_xi, f_eta, f_val


def _plate_blocks(gx, gy, f):
    """Bending and shear-gradient blocks for scalar derivative weights."""
    dx = gx[..., None] * f
    dy = gy[..., None] * f
    z = np.zeros_like(dx)
    bend = np.stack([
        np.stack([z, dx, z], axis=-1),
        np.stack([z, z, -dy], axis=-1),
        np.stack([z, dy, -dx], axis=-1),
    ], axis=-3)
    shear = np.stack([
        np.stack([dx, z, z], axis=-1),
        np.stack([dy, z, z], axis=-1),
    ], axis=-3)
    return bend, shear


def _membrane_block(gx, gy, f):
    dx = gx[..., None] * f
    dy = gy[..., None] * f
    z = np.zeros_like(dx)
    return np.stack([
        np.stack([dx, z], axis=-1),
        np.stack([z, dy], axis=-1),
        np.stack([dy, dx], axis=-1),
    ], axis=-3)


def _flatten(block):
    # (..., rows, 3 nodes, ndof) -> (..., rows, 3*ndof)
    return block.reshape(block.shape[:-2] + (block.shape[-2] * block.shape[-1],))


def embed_plate(op: np.ndarray) -> np.ndarray:
    """Scatter a plate-layout operator (``..., r, 9``) into the 15-column layout."""
    out = np.zeros(op.shape[:-1] + (15,))
    for a in range(3):
        out[..., 5 * a + 2:5 * a + 5] = op[..., 3 * a:3 * a + 3]
    return out


def embed_membrane(op: np.ndarray) -> np.ndarray:
    """Scatter a membrane-layout operator (``..., r, 6``) into the 15-column layout."""
    out = np.zeros(op.shape[:-1] + (15,))
    for a in range(3):
        out[..., 5 * a:5 * a + 2] = op[..., 2 * a:2 * a + 2]
    return out


def eval_standard_operators(section, xi, eta, with_membrane: bool = False) -> StrainOperatorSet:
    """Membrane, bending and shear operators of the displacement-based formulation."""
    frame = eval_section_frame(section, xi, eta)
    f_xi, f_eta, f_val = _shape_products(xi, eta)
    g1, g2 = frame.g1_contra, frame.g2_contra
    xi_b = np.broadcast_to(np.asarray(xi, dtype=float), frame.det_jbar.shape)

    b1, s1 = _plate_blocks(g1[..., 0], g1[..., 1], f_xi)
    b2, s2 = _plate_blocks(g2[..., 0], g2[..., 1], f_eta)
    z = np.zeros_like(f_val)
    s3 = np.stack([
        np.stack([z, f_val, z], axis=-1),
        np.stack([z, z, -f_val], axis=-1),
    ], axis=-3)
    b1, b2, s1, s2, s3 = (_flatten(b) for b in (b1, b2, s1, s2, s3))
    inv_xi = (1.0 / xi_b)[..., None, None]
    b_b = b1 + inv_xi * b2
    b_s = s1 + inv_xi * s2 + s3
    parts = {"b1": b1, "b2": b2, "s1": s1, "s2": s2, "s3": s3}

    if not with_membrane:
        return StrainOperatorSet(None, b_b, b_s, PLATE_LAYOUT, parts)

    m1 = _flatten(_membrane_block(g1[..., 0], g1[..., 1], f_xi))
    m2 = _flatten(_membrane_block(g2[..., 0], g2[..., 1], f_eta))
    parts = {k: embed_plate(v) for k, v in parts.items()}
    parts["m1"] = embed_membrane(m1)
    parts["m2"] = embed_membrane(m2)
    b_m = parts["m1"] + inv_xi * parts["m2"]
    return StrainOperatorSet(b_m, embed_plate(b_b), embed_plate(b_s), FULL_LAYOUT, parts)


def tying_point_strains(section) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Covariant shear strain rows at the tying points A, B and C.

    Returns three ``(..., 9)`` rows acting on the plate-layout section vector:
    ``gamma_eta`` at A and ``gamma_xi`` at B and C.  Each uses the nodal
    difference of ``w`` along the relevant edge and the average rotation of
    its two end nodes; rotations enter through ``r = (beta_x, -beta_y)``.
    """
    x0 = np.asarray(section.x0, dtype=float)
    x1 = np.asarray(section.x1, dtype=float)
    x2 = np.asarray(section.x2, dtype=float)
    shape = np.broadcast_shapes(x0.shape, x1.shape, x2.shape)[:-1]

    def edge_row(i, j, dw, tangent):
        # dw * (w_j - w_i) + 0.5 * dw * (r_i + r_j) . tangent; local node slots 0:1, 1:2, 2:0
        row = np.zeros(shape + (9,))
        slot = {1: 0, 2: 1, 0: 2}
        for node, sign in ((i, -1.0), (j, 1.0)):
            a = slot[node]
            row[..., 3 * a] += sign * dw
            row[..., 3 * a + 1] += 0.5 * dw * tangent[..., 0]
            row[..., 3 * a + 2] += -0.5 * dw * tangent[..., 1]
        return row

    # A: eta-derivative at the boundary midpoint, dX/deta = (x2 - x1)/2
    gamma_a = edge_row(1, 2, 0.5, np.broadcast_to(x2 - x1, shape + (2,)))
    # B (eta = +1) and C (eta = -1): xi-derivative along the edges to the center
    gamma_b = edge_row(0, 2, 1.0, np.broadcast_to(x2 - x0, shape + (2,)))
    gamma_c = edge_row(0, 1, 1.0, np.broadcast_to(x1 - x0, shape + (2,)))
    return gamma_a, gamma_b, gamma_c


def eval_ans_covariant(section, xi, eta) -> np.ndarray:
    """Interpolated covariant shear strains ``(gamma_xi, gamma_eta)`` as ``(..., 2, 9)``."""
    gamma_a, gamma_b, gamma_c = tying_point_strains(section)
    xi = np.asarray(xi, dtype=float)[..., None]
    eta = np.asarray(eta, dtype=float)[..., None]
    g_xi = 0.5 * (1.0 + eta) * gamma_b + 0.5 * (1.0 - eta) * gamma_c
    g_eta = xi * gamma_a
    g_xi, g_eta = np.broadcast_arrays(g_xi, g_eta)
    return np.stack([g_xi, g_eta], axis=-2)


def eval_ans_shear_operator(section, xi, eta, with_membrane: bool = False) -> np.ndarray:
    """Assumed-natural-strain shear operator ``J^-1 [gamma_xi; gamma_eta]``.

    The ``1/xi`` of the inverse Jacobian cancels against the ``xi`` of the
    interpolated ``gamma_eta``, so the operator is finite at ``xi = 0``.
    """
    xi_a = np.asarray(xi, dtype=float)
    if np.any(xi_a < 0.0) or np.any(xi_a > 1.0):
        raise ValueError("xi must lie in [0, 1]")
    # geometric frame is independent of xi; evaluate at xi = 1
    frame = eval_section_frame(section, np.ones_like(xi_a), eta)
    gamma_a, gamma_b, gamma_c = tying_point_strains(section)
    eta_a = np.asarray(eta, dtype=float)[..., None]
    g_xi = 0.5 * (1.0 + eta_a) * gamma_b + 0.5 * (1.0 - eta_a) * gamma_c
    op = frame.g1_contra[..., :, None] * g_xi[..., None, :] + frame.g2_contra[..., :, None] * gamma_a[..., None, :]
    op = np.broadcast_to(op, np.broadcast_shapes(op.shape, xi_a.shape + (1, 1))).copy()
    return embed_plate(op) if with_membrane else op


def closed_form_ans_blocks(section, xi, eta):
    """Coefficient blocks of the closed-form shear operator before ``J^-1``.

    Returns the 2x3 blocks ``(a, b, c)`` for node 1, node 2 and the center,
    with columns ``(w, beta_x, beta_y)``.  Used to cross-check the
    tying-point construction entry by entry.
    """
    x0, y0 = np.asarray(section.x0, dtype=float)
    x1, y1 = np.asarray(section.x1, dtype=float)
    x2, y2 = np.asarray(section.x2, dtype=float)
    a = np.array([
        [0.5 * (1 - eta), 0.25 * (1 - eta) * (x1 - x0), -0.25 * (1 - eta) * (y1 - y0)],
        [-0.5 * xi, 0.25 * xi * (x2 - x1), -0.25 * xi * (y2 - y1)],
    ])
    b = np.array([
        [0.5 * (1 + eta), 0.25 * (1 + eta) * (x2 - x0), -0.25 * (1 + eta) * (y2 - y0)],
        [0.5 * xi, 0.25 * xi * (x2 - x1), -0.25 * xi * (y2 - y1)],
    ])
    c = np.array([
        [-1.0,
         0.25 * (x2 + eta * x2 + x1 - eta * x1 - 2 * x0),
         -0.25 * (y2 + eta * y2 + y1 - eta * y1 - 2 * y0)],
        [0.0, 0.0, 0.0],
    ])
    return a, b, c


def plate_operators(section, xi, eta, shear: str = "standard", with_membrane: bool = False) -> StrainOperatorSet:
    """Standard operators with the shear part optionally replaced by the ANS operator."""
    ops = eval_standard_operators(section, xi, eta, with_membrane=with_membrane)
    if shear == "standard":
        return ops
    if shear != "ans":
        raise ValueError(f"unknown shear formulation {shear!r}")
    b_s = eval_ans_shear_operator(section, xi, eta, with_membrane=with_membrane)
    return StrainOperatorSet(ops.b_m, ops.b_b, b_s, ops.dof_layout, ops.parts)
