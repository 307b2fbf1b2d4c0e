"""Property suite behind ``plateforge verify``.

Each check draws random sections or meshes from a seeded generator and
compares an operator against an independent route to the same quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .assembly import (
    NORM_RULE,
    ElementOptions,
    LineLoad,
    PointLoad,
    UniformPressure,
    _accumulate,
    _btcb,
    assemble_loads,
    clamp,
    element_stiffness,
    run_static,
    section_stiffness,
)
from .geometry import eval_section_frame, map_to_physical
from .kinematics import (
    PLATE_LAYOUT,
    TYING_A,
    TYING_B,
    TYING_C,
    closed_form_ans_blocks,
    eval_ans_shear_operator,
    eval_standard_operators,
)
from .material import PlateMaterial2D, SolidMaterial3D
from .mesh import PolyMesh, Rectangle, SectionArray, generate_structured_mesh, generate_voronoi_mesh

FULL_PLATE_COLUMNS = np.array([5 * a + k for a in range(3) for k in (2, 3, 4)])


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    limit: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: worst {self.worst:.3e} (limit {self.limit:.0e})"


def random_sections(rng: np.random.Generator, n: int, min_angle: float = 0.2) -> SectionArray:
    """Counter-clockwise triangles (center, node1, node2) with bounded shape quality."""
    out = []
    while len(out) < n:
        center = rng.uniform(-2.0, 2.0, 2)
        r1, r2 = rng.uniform(0.3, 3.0, 2)
        a1 = rng.uniform(0.0, 2 * math.pi)
        a2 = a1 + rng.uniform(min_angle, math.pi - min_angle)
        p1 = center + r1 * np.array([math.cos(a1), math.sin(a1)])
        p2 = center + r2 * np.array([math.cos(a2), math.sin(a2)])
        out.append((center, p1, p2))
    x0, x1, x2 = (np.array([s[i] for s in out]) for i in range(3))
    zeros = np.zeros(n, dtype=np.int64)
    return SectionArray(x0, x1, x2, zeros, zeros + 1, np.arange(n))


def random_convex_polygon(rng: np.random.Generator, n_sides: int) -> PolyMesh:
    # jittered even spacing keeps edges comparable so no soft mode mimics a zero mode
    step = 2 * math.pi / n_sides
    angles = step * np.arange(n_sides) + rng.uniform(-0.3, 0.3, n_sides) * step + rng.uniform(0, 2 * math.pi)
    radius = rng.uniform(0.5, 2.0)
    nodes = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    mesh = PolyMesh(nodes, [list(range(n_sides))])
    return mesh.with_centers(mesh.centroids())


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _result(name, worst, limit) -> PropertyResult:
    return PropertyResult(name, bool(worst <= limit), float(worst), limit)


def check_symmetry(rng, n=100) -> PropertyResult:
    secs = random_sections(rng, n)
    worst = 0.0
    for mat, form in ((PlateMaterial2D(1e5, 0.3, 0.1), "ans"), (PlateMaterial2D(1e5, 0.3, 0.1), "standard"),
                      (SolidMaterial3D(1e5, 0.3, 0.1), "ans")):
        k = section_stiffness(secs, mat, ElementOptions(form))
        worst = max(worst, _rel(k, np.swapaxes(k, -1, -2)))
    return _result("stiffness symmetry", worst, 1e-10)


def rigid_modes(points: np.ndarray) -> np.ndarray:
    """Plate rigid-body modes ``(3, n_points*3)`` in the (w, bx, by) layout."""
    x, y = points[:, 0], points[:, 1]
    one, zero = np.ones_like(x), np.zeros_like(x)
    modes = [np.column_stack([one, zero, zero]), np.column_stack([-x, one, zero]), np.column_stack([y, zero, one])]
    return np.array([m.ravel() for m in modes])


def check_rigid_kernel(rng, n=50) -> PropertyResult:
    secs = random_sections(rng, n)
    worst = 0.0
    for s in range(n):
        modes = rigid_modes(np.array([secs.x1[s], secs.x2[s], secs.x0[s]]))
        sec = secs.subset([s])
        for xi, eta in ((0.2113, -0.577), (0.7887, 0.577), (0.5, 0.0), (1.0, 1.0)):
            ops = eval_standard_operators(sec, xi, eta)
            ans = eval_ans_shear_operator(sec, xi, eta)
            for op in (ops.b_b, ops.b_s, ans):
                worst = max(worst, float(np.max(np.abs(op[0] @ modes.T))))
    for n_sides in (3, 4, 5, 7):
        mesh = random_convex_polygon(rng, n_sides)
        k = element_stiffness(mesh, 0, PlateMaterial2D(1e5, 0.25, 0.01), condense=True).k_e
        eig = np.linalg.eigvalsh(k)
        zero_count = int(np.sum(np.abs(eig) <= 1e-8 * eig.max()))
        worst = max(worst, abs(zero_count - 3))
    return _result("rigid-body kernel", worst, 1e-12)


def check_rotation_objectivity(rng) -> PropertyResult:
    worst = 0.0
    theta = rng.uniform(0.1, 2 * math.pi)
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    mat = PlateMaterial2D(1e5, 0.3, 0.05)
    for n_sides in (4, 6):
        mesh = random_convex_polygon(rng, n_sides)
        turned = PolyMesh(mesh.nodes @ rot.T, mesh.elements, mesh.centers() @ rot.T)
        for form in ("ans", "standard"):
            e1 = np.linalg.eigvalsh(element_stiffness(mesh, 0, mat, ElementOptions(form)).k_e)
            e2 = np.linalg.eigvalsh(element_stiffness(turned, 0, mat, ElementOptions(form)).k_e)
            worst = max(worst, _rel(e2, e1))
    base = generate_structured_mesh(Rectangle((0, 0), (1, 1)), 4, 4)
    turned = PolyMesh(base.nodes @ rot.T, base.elements, base.centers() @ rot.T)
    w = [run_static(m, mat, [UniformPressure(1.0)], [clamp("boundary")]).at_node(np.array([0.5, 0.5]) @ r.T)
         for m, r in ((base, np.eye(2)), (turned, rot))]
    worst = max(worst, abs(w[1] - w[0]) / abs(w[0]))
    return _result("rotation objectivity", worst, 1e-9)


def check_removable_singularity(rng, n=50) -> PropertyResult:
    secs = random_sections(rng, n)
    ops = eval_standard_operators(secs, np.full(n, 0.5), rng.uniform(-1, 1, n), with_membrane=True)
    center_cols = slice(10, 15)
    worst = max(float(np.max(np.abs(ops.parts[k][..., center_cols]))) for k in ("b2", "s2", "m2"))
    near_zero = eval_standard_operators(secs, np.full(n, 1e-8), rng.uniform(-1, 1, n), with_membrane=True)
    scale = max(np.max(np.abs(ops.b_b)), np.max(np.abs(ops.b_m)))
    bounded = max(np.max(np.abs(near_zero.b_b)), np.max(np.abs(near_zero.b_m))) / scale
    if not np.isfinite(bounded) or bounded > 1e4:
        worst = max(worst, bounded)
    return _result("removable singularity", worst, 1e-12)


def check_ans_tying(rng, n=50) -> PropertyResult:
    """ANS covariant strains equal standard covariant strains at the tying points."""
    secs = random_sections(rng, n)
    worst = 0.0
    d = rng.normal(size=(n, 9))

    def covariant(op, xi, eta):
        frame = eval_section_frame(secs, np.full(n, xi), np.full(n, eta))
        return np.einsum("sij,sjk,sk->si", frame.jacobian, op, d)

    for (xi, eta), row in ((TYING_A, 1), (TYING_B, 0), (TYING_C, 0)):
        std = covariant(eval_standard_operators(secs, np.full(n, xi), np.full(n, eta)).b_s, xi, eta)
        ans = covariant(eval_ans_shear_operator(secs, np.full(n, xi), np.full(n, eta)), xi, eta)
        worst = max(worst, _rel(ans[:, row], std[:, row]))
    xi, eta = rng.uniform(0.05, 1, n), rng.uniform(-1, 1, n)
    frame = eval_section_frame(secs, xi, eta)
    for s in range(n):
        one = SimpleNamespace(x0=secs.x0[s], x1=secs.x1[s], x2=secs.x2[s])
        blocks = np.concatenate(closed_form_ans_blocks(one, xi[s], eta[s]), axis=1)
        closed = frame.inverse_jacobian[s] @ blocks
        op = eval_ans_shear_operator(secs.subset([s]), xi[s:s + 1], eta[s:s + 1])[0]
        worst = max(worst, _rel(op, closed))
    return _result("ANS tying-point consistency", worst, 1e-10)


def _interpolate(sec, xi, eta, d):
    shapes = np.array([0.5 * xi * (1 - eta), 0.5 * xi * (1 + eta), 1 - xi])
    return shapes @ d.reshape(3, 3)


def check_strain_finite_difference(rng, n=30, h=1e-6) -> PropertyResult:
    secs = random_sections(rng, n)
    worst = 0.0
    for s in range(n):
        sec = secs.subset([s])
        d = rng.normal(size=9)
        xi, eta = rng.uniform(0.2, 0.9), rng.uniform(-0.9, 0.9)
        dxi = (_interpolate(sec, xi + h, eta, d) - _interpolate(sec, xi - h, eta, d)) / (2 * h)
        deta = (_interpolate(sec, xi, eta + h, d) - _interpolate(sec, xi, eta - h, d)) / (2 * h)
        dx_dxi = (map_to_physical(sec, xi + h, eta) - map_to_physical(sec, xi - h, eta))[0] / (2 * h)
        dx_deta = (map_to_physical(sec, xi, eta + h) - map_to_physical(sec, xi, eta - h))[0] / (2 * h)
        grad = np.linalg.solve(np.array([dx_dxi, dx_deta]), np.array([dxi, deta]))  # rows d/dx, d/dy
        w_x, bx_x, by_x = grad[0]
        w_y, bx_y, by_y = grad[1]
        w, bx, by = _interpolate(sec, xi, eta, d)
        kappa = np.array([bx_x, -by_y, bx_y - by_x])
        gamma = np.array([w_x + bx, w_y - by])
        ops = eval_standard_operators(sec, xi, eta)
        worst = max(worst, _rel(ops.b_b[0] @ d, kappa), _rel(ops.b_s[0] @ d, gamma))
    return _result("finite-difference strains", worst, 1e-6)


def check_load_conservation(rng) -> PropertyResult:
    mesh = generate_voronoi_mesh(Rectangle((0, 0), (2, 1)), 20, seed=int(rng.integers(1 << 30)))
    q, p_val, line = 3.5, -2.0, 1.25
    f_q = assemble_loads(mesh, [UniformPressure(q)], PLATE_LAYOUT)
    corner = mesh.nodes[np.argmin(np.hypot(*(mesh.nodes - [2.0, 1.0]).T))]
    f_p = assemble_loads(mesh, [PointLoad(corner, p_val)], PLATE_LAYOUT)
    f_l = assemble_loads(mesh, [LineLoad(lambda pt: np.abs(pt[:, 0] - 2.0) < 1e-9, line)], PLATE_LAYOUT)
    worst = max(abs(f_q[0::3].sum() - q * 2.0) / (q * 2.0), abs(f_p[0::3].sum() - p_val) / abs(p_val),
                abs(f_l[0::3].sum() - line * 1.0) / line)
    return _result("load-resultant conservation", worst, 1e-12)


def check_plane_stress_equivalence(rng, n=100) -> PropertyResult:
    secs = random_sections(rng, n)
    worst = 0.0
    for form in ("ans", "standard"):
        for nu in (0.0, 0.3, 0.45):
            solid = SolidMaterial3D(2e5, nu, 0.1)
            k3 = section_stiffness(secs, solid, ElementOptions(form))
            k2 = section_stiffness(secs, solid.as_plate(), ElementOptions(form))
            plate_part = k3[:, FULL_PLATE_COLUMNS][:, :, FULL_PLATE_COLUMNS]
            worst = max(worst, _rel(plate_part, k2))
    return _result("plane-stress equivalence", worst, 1e-9)


def check_quadrature_sufficiency(rng, n=50) -> PropertyResult:
    secs = random_sections(rng, n)
    mat = PlateMaterial2D(1e5, 0.3, 0.1)
    k_full = section_stiffness(secs, mat, ElementOptions("ans", "full"))

    def build(xi, eta):
        ops = eval_standard_operators(secs, xi, eta)
        return _btcb(ops.b_b, mat.c_b) + _btcb(eval_ans_shear_operator(secs, xi, eta), mat.c_s)

    k_fine = _accumulate(secs, NORM_RULE, build)
    return _result("quadrature sufficiency", _rel(k_full, k_fine), 1e-10)


CHECKS = (
    check_symmetry,
    check_rigid_kernel,
    check_rotation_objectivity,
    check_removable_singularity,
    check_ans_tying,
    check_strain_finite_difference,
    check_load_conservation,
    check_plane_stress_equivalence,
    check_quadrature_sufficiency,
)


def run_properties(seed: int = 0) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    return [check(rng) for check in CHECKS]
