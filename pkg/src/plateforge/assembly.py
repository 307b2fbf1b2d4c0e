"""Section and element stiffness, loads, constraints and the global linear solve."""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import map_to_physical
from .kinematics import DofLayout, eval_ans_shear_operator, eval_standard_operators, layout_for
from .material import MaterialError, PlateMaterial2D, SolidMaterial3D
from .mesh.core import PolyMesh, Section, SectionArray, mesh_sections

log = logging.getLogger(__name__)


class AssemblyError(ValueError):
    pass


class LoadPlacementError(AssemblyError):
    pass


class CondensationError(ArithmeticError):
    pass


class SolverError(ArithmeticError):
    pass


# --------------------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class QuadratureRule:
    xi: np.ndarray
    eta: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return len(self.weight)


def gauss_rule(n_xi: int, n_eta: int | None = None) -> QuadratureRule:
    """Tensor Gauss-Legendre rule on ``xi in (0, 1)``, ``eta in (-1, 1)``."""
    n_eta = n_xi if n_eta is None else n_eta
    gx, wx = np.polynomial.legendre.leggauss(n_xi)
    ge, we = np.polynomial.legendre.leggauss(n_eta)
    xi, eta = np.meshgrid(0.5 * (gx + 1.0), ge, indexing="ij")
    w = np.outer(0.5 * wx, we)
    return QuadratureRule(xi.ravel(), eta.ravel(), w.ravel())


FULL_RULE = gauss_rule(2)
REDUCED_RULE = gauss_rule(1)
NORM_RULE = gauss_rule(3)


class QuadratureScheme(enum.Enum):
    FULL = "full"
    REDUCED = "reduced"
    SELECTIVE = "selective"

    @property
    def bending_rule(self) -> QuadratureRule:
        return REDUCED_RULE if self is QuadratureScheme.REDUCED else FULL_RULE

    @property
    def shear_rule(self) -> QuadratureRule:
        return FULL_RULE if self is QuadratureScheme.FULL else REDUCED_RULE


class Formulation(enum.Enum):
    STANDARD = "standard"
    ANS = "ans"


@dataclass(frozen=True)
class ElementOptions:
    formulation: Formulation = Formulation.ANS
    quadrature: QuadratureScheme = QuadratureScheme.FULL

    def __post_init__(self):
        object.__setattr__(self, "formulation", Formulation(self.formulation))
        object.__setattr__(self, "quadrature", QuadratureScheme(self.quadrature))


# --------------------------------------------------------------------------- section level

def _as_batch(sections):
    if isinstance(sections, SectionArray):
        return sections, False
    if isinstance(sections, Section):
        return SectionArray(sections.x0[None], sections.x1[None], sections.x2[None],
                            np.array([sections.nodes[0]]), np.array([sections.nodes[1]]),
                            np.array([sections.element])), True
    x0, x1, x2 = (np.atleast_2d(np.asarray(getattr(sections, k), dtype=float)) for k in ("x0", "x1", "x2"))
    n = len(x0)
    zeros = np.zeros(n, dtype=np.int64)
    single = np.asarray(sections.x0).ndim == 1
    return SectionArray(x0, x1, x2, zeros, zeros, zeros), single


def shear_operator(secs, xi, eta, formulation: Formulation, with_membrane: bool):
    if formulation is Formulation.ANS:
        return eval_ans_shear_operator(secs, xi, eta, with_membrane=with_membrane)
    return eval_standard_operators(secs, xi, eta, with_membrane=with_membrane).b_s


def _accumulate(secs, rule, build):
    total = None
    area = secs.area
    for xi, eta, w in zip(rule.xi, rule.eta, rule.weight):
        term = (w * xi * area)[:, None, None] * build(xi, eta)
        total = term if total is None else total + term
    return total


def _btcb(b, c):
    return np.einsum("sri,rq,sqj->sij", b, c, b)


def section_stiffness(sections, material, options: ElementOptions = ElementOptions()) -> np.ndarray:
    """Sectional stiffness matrices over the ``[node1, node2, center]`` DOF blocks.

    Accepts a single :class:`Section` (returns one matrix) or a
    :class:`SectionArray` (returns a stack).  For :class:`SolidMaterial3D`
    the thickness-strain parameters are condensed out section by section.
    """
    secs, single = _as_batch(sections)
    if isinstance(material, SolidMaterial3D):
        k = _solid_section_stiffness(secs, material, options)
    elif isinstance(material, PlateMaterial2D):
        k = _plate_section_stiffness(secs, material, options)
    else:
        raise MaterialError(f"unsupported material {type(material).__name__}")
    return k[0] if single else k


def _plate_section_stiffness(secs, mat: PlateMaterial2D, opt: ElementOptions) -> np.ndarray:
    c_b, c_s = mat.c_b, mat.c_s
    k_b = _accumulate(secs, opt.quadrature.bending_rule,
                      lambda xi, eta: _btcb(eval_standard_operators(secs, xi, eta).b_b, c_b))
    k_s = _accumulate(secs, opt.quadrature.shear_rule,
                      lambda xi, eta: _btcb(shear_operator(secs, xi, eta, opt.formulation, False), c_s))
    return k_b + k_s


def _solid_section_stiffness(secs, mat: SolidMaterial3D, opt: ElementOptions) -> np.ndarray:
    blocks = mat.blocks
    d11, d12, d22 = blocks.d11, blocks.d12, blocks.d22
    if np.any(d11[:6, 6:]) or np.any(d12[6:]):
        raise MaterialError("shear strains couple to in-plane or thickness strains; not supported")

    def in_plane(xi, eta):
        ops = eval_standard_operators(secs, xi, eta, with_membrane=True)
        return np.concatenate([ops.b_m, ops.b_b], axis=-2)

    k_dd = _accumulate(secs, opt.quadrature.bending_rule, lambda xi, eta: _btcb(in_plane(xi, eta), d11[:6, :6]))
    k_dd = k_dd + _accumulate(secs, opt.quadrature.shear_rule,
                              lambda xi, eta: _btcb(shear_operator(secs, xi, eta, opt.formulation, True), d11[6:, 6:]))
    # thickness-strain parameters are constant over the section
    k_dz = _accumulate(secs, opt.quadrature.bending_rule,
                       lambda xi, eta: np.einsum("sri,rm->sim", in_plane(xi, eta), d12[:6]))
    k_zz = secs.area[:, None, None] * d22
    return k_dd - k_dz @ np.linalg.solve(k_zz, np.swapaxes(k_dz, -1, -2))


# --------------------------------------------------------------------------- element level

@dataclass
class ElementStiffness:
    """Dense element matrix; DOF blocks follow the node loop, then the scaling center."""

    k_e: np.ndarray
    dof_map: np.ndarray
    ndof: int
    f_e: np.ndarray | None = None
    condensed: bool = False

    @property
    def n_points(self) -> int:
        return len(self.k_e) // self.ndof


def element_stiffness(mesh: PolyMesh, element: int, material, options: ElementOptions = ElementOptions(),
                      condense: bool = False) -> ElementStiffness:
    loop = mesh.elements[element]
    n = len(loop)
    secs = _element_sections(mesh, element)
    layout = layout_for(material.with_membrane)
    ndof = layout.ndof
    k_sec = section_stiffness(secs, material, options)
    k_e = np.zeros(((n + 1) * ndof, (n + 1) * ndof))
    for s in range(n):
        slots = np.concatenate([np.arange(ndof) + ndof * p for p in (s, (s + 1) % n, n)])
        k_e[np.ix_(slots, slots)] += k_sec[s]
    points = np.concatenate([loop, [mesh.n_nodes + element]])
    dof_map = (points[:, None] * ndof + np.arange(ndof)).ravel()
    out = ElementStiffness(k_e, dof_map, ndof)
    return condense_center(out) if condense else out


def _element_sections(mesh: PolyMesh, element: int) -> SectionArray:
    loop = mesh.elements[element]
    x0 = np.broadcast_to(mesh.centers()[element], (len(loop), 2)).copy()
    n2 = np.roll(loop, -1)
    return SectionArray(x0, mesh.nodes[loop], mesh.nodes[n2], loop, n2, np.full(len(loop), element))


def condense_center(elem: ElementStiffness) -> ElementStiffness:
    """Schur complement of the scaling-center block."""
    if elem.condensed:
        return elem
    nd = elem.ndof
    k = elem.k_e
    kbb, kbc, kcc = k[:-nd, :-nd], k[:-nd, -nd:], k[-nd:, -nd:]
    try:
        chol = np.linalg.cholesky(kcc)
    except np.linalg.LinAlgError as exc:
        raise CondensationError(f"scaling-center block is not positive definite: {exc}") from exc
    x = np.linalg.solve(chol, kbc.T)
    k_cond = kbb - x.T @ x
    f = None
    if elem.f_e is not None:
        f = elem.f_e[:-nd] - kbc @ np.linalg.solve(kcc, elem.f_e[-nd:])
    return ElementStiffness(0.5 * (k_cond + k_cond.T), elem.dof_map[:-nd], nd, f, True)


# --------------------------------------------------------------------------- loads

Selector = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class UniformPressure:
    q: float


@dataclass(frozen=True)
class PointLoad:
    point: tuple
    value: float
    dof: str = "w"


@dataclass(frozen=True)
class LineLoad:
    """Distributed load along boundary edges whose end points satisfy ``where``."""

    where: Selector
    intensity: float | Callable
    dof: str = "w"


def MomentLineLoad(where: Selector, m: float | Callable, dof: str = "bx") -> LineLoad:
    return LineLoad(where, m, dof)


@dataclass(frozen=True)
class FunctionLoad:
    f: Callable
    order: int = 3


LoadSpec = UniformPressure | PointLoad | LineLoad | FunctionLoad


def section_shape_values(xi, eta) -> np.ndarray:
    """Values of the (node1, node2, center) shape functions at ``(xi, eta)``."""
    return np.array([0.5 * xi * (1.0 - eta), 0.5 * xi * (1.0 + eta), 1.0 - xi])


def _surface_load(mesh, secs, n_points, ndof, w_slot, f_of_xy, rule):
    f = np.zeros(n_points * ndof)
    pids = secs.point_ids(mesh.n_nodes)
    area = secs.area
    for xi, eta, w in zip(rule.xi, rule.eta, rule.weight):
        xy = map_to_physical(secs, xi, eta)
        q = np.broadcast_to(np.asarray(f_of_xy(xy[:, 0], xy[:, 1]), dtype=float), (len(secs),))
        if not np.all(np.isfinite(q)):
            raise AssemblyError("surface load is not finite on the domain")
        contrib = (w * xi * area * q)[:, None] * section_shape_values(xi, eta)[None, :]
        np.add.at(f, pids * ndof + w_slot, contrib)
    return f


def _edge_load(mesh, load: LineLoad, n_points, ndof, layout: DofLayout):
    f = np.zeros(n_points * ndof)
    slot = layout.index(load.dof)
    g, wg = np.polynomial.legendre.leggauss(3)
    hit = False
    for a, b in mesh.boundary_edges():
        pa, pb = mesh.nodes[a], mesh.nodes[b]
        if not np.all(load.where(np.array([pa, pb, 0.5 * (pa + pb)]))):
            continue
        hit = True
        length = np.linalg.norm(pb - pa)
        pts = 0.5 * (1 - g)[:, None] * pa + 0.5 * (1 + g)[:, None] * pb
        val = load.intensity(pts[:, 0], pts[:, 1]) if callable(load.intensity) else np.full(len(g), load.intensity)
        jac = 0.5 * length
        f[a * ndof + slot] += np.sum(wg * 0.5 * (1 - g) * val) * jac
        f[b * ndof + slot] += np.sum(wg * 0.5 * (1 + g) * val) * jac
    if not hit:
        raise LoadPlacementError("line load selects no boundary edge")
    return f


def snap_node(mesh: PolyMesh, point, tol: float | None = None) -> int:
    tol = 1e-8 * mesh.diameter() if tol is None else tol
    d = np.linalg.norm(mesh.nodes - np.asarray(point, dtype=float), axis=1)
    i = int(np.argmin(d))
    if d[i] > tol:
        raise LoadPlacementError(f"no node within {tol:.3g} of {tuple(point)} (closest at distance {d[i]:.3g})")
    return i


def assemble_loads(mesh: PolyMesh, loads, layout: DofLayout, secs: SectionArray | None = None) -> np.ndarray:
    secs = mesh_sections(mesh) if secs is None else secs
    ndof = layout.ndof
    n_points = mesh.n_nodes + mesh.n_elements
    f = np.zeros(n_points * ndof)
    w_slot = layout.index("w")
    for load in loads:
        if isinstance(load, UniformPressure):
            f += _surface_load(mesh, secs, n_points, ndof, w_slot, lambda x, y, q=load.q: q, FULL_RULE)
        elif isinstance(load, FunctionLoad):
            f += _surface_load(mesh, secs, n_points, ndof, w_slot, load.f, gauss_rule(load.order))
        elif isinstance(load, LineLoad):
            f += _edge_load(mesh, load, n_points, ndof, layout)
        elif isinstance(load, PointLoad):
            f[snap_node(mesh, load.point) * ndof + layout.index(load.dof)] += load.value
        else:
            raise AssemblyError(f"unknown load type {type(load).__name__}")
    return f


# --------------------------------------------------------------------------- constraints

@dataclass(frozen=True)
class Constraint:
    """Prescribe ``dofs`` at the nodes picked by ``where``.

    ``where`` is a coordinate predicate, ``"boundary"``, ``"all"`` or an
    explicit array of node indices.  ``include_centers`` extends ``"all"``
    and predicates to the scaling-center points.
    """

    where: object
    dofs: tuple
    value: float = 0.0
    include_centers: bool = False


def clamp(where, membrane: bool = False) -> Constraint:
    dofs = ("w", "bx", "by") + (("ux", "uy") if membrane else ())
    return Constraint(where, dofs)


def _select_points(mesh: PolyMesh, c: Constraint) -> np.ndarray:
    if isinstance(c.where, str):
        if c.where == "boundary":
            return mesh.boundary_nodes()
        if c.where == "all":
            n = mesh.n_nodes + (mesh.n_elements if c.include_centers else 0)
            return np.arange(n)
        raise AssemblyError(f"unknown node selector {c.where!r}")
    if callable(c.where):
        pts = np.vstack([mesh.nodes, mesh.centers()]) if c.include_centers else mesh.nodes
        return np.flatnonzero(c.where(pts))
    return np.asarray(c.where, dtype=np.int64)


def constrained_dofs(mesh: PolyMesh, constraints, layout: DofLayout) -> dict:
    n_points = mesh.n_nodes + mesh.n_elements
    prescribed = {}
    for c in constraints:
        pts = _select_points(mesh, c)
        if len(pts) and (pts.min() < 0 or pts.max() >= n_points):
            raise AssemblyError("constraint refers to a nonexistent point")
        for name in c.dofs:
            if name not in layout.names:
                if name in ("ux", "uy"):
                    continue  # membrane terms absent in plate-only runs
                raise AssemblyError(f"constraint on nonexistent DOF {name!r}")
            slot = layout.index(name)
            for p in pts:
                prescribed[int(p) * layout.ndof + slot] = float(c.value(*mesh.nodes[p]) if callable(c.value) else c.value)
    return prescribed


# --------------------------------------------------------------------------- global system

@dataclass
class GlobalSystem:
    k: sp.csr_matrix
    f: np.ndarray
    constraints: dict
    layout: DofLayout
    mesh: PolyMesh
    material: object
    options: ElementOptions
    sections: SectionArray = field(repr=False, default=None)

    @property
    def ndof(self) -> int:
        return self.layout.ndof

    def dof(self, point: int, name: str) -> int:
        return point * self.layout.ndof + self.layout.index(name)


def _stiffness_chunks(secs, material, options, threads):
    n = len(secs)
    if threads <= 1 or n < 2 * threads:
        return section_stiffness(secs, material, options)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    chunks = [secs.subset(slice(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: section_stiffness(c, material, options), chunks))
    return np.concatenate(parts)


def assemble_stiffness(mesh: PolyMesh, material, options: ElementOptions = ElementOptions(),
                       threads: int = 1, secs: SectionArray | None = None) -> sp.csr_matrix:
    secs = mesh_sections(mesh) if secs is None else secs
    ndof = layout_for(material.with_membrane).ndof
    k_sec = _stiffness_chunks(secs, material, options, threads)
    dofs = (secs.point_ids(mesh.n_nodes)[:, :, None] * ndof + np.arange(ndof)).reshape(len(secs), -1)
    rows = np.repeat(dofs, dofs.shape[1], axis=1).ravel()
    cols = np.tile(dofs, (1, dofs.shape[1])).ravel()
    n = (mesh.n_nodes + mesh.n_elements) * ndof
    return sp.coo_matrix((k_sec.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_global(mesh: PolyMesh, material, loads=(), constraints=(),
                    options: ElementOptions = ElementOptions(), threads: int = 1) -> GlobalSystem:
    layout = layout_for(material.with_membrane)
    secs = mesh_sections(mesh)
    k = assemble_stiffness(mesh, material, options, threads, secs)
    f = assemble_loads(mesh, loads, layout, secs)
    prescribed = constrained_dofs(mesh, constraints, layout)
    return GlobalSystem(k, f, prescribed, layout, mesh, material, options, secs)


@dataclass
class FieldResult:
    """Solved nodal and scaling-center values with the data needed for recovery."""

    u: np.ndarray
    system: GlobalSystem
    residual: float = 0.0

    @property
    def mesh(self) -> PolyMesh:
        return self.system.mesh

    @property
    def layout(self) -> DofLayout:
        return self.system.layout

    def point_values(self) -> np.ndarray:
        return self.u.reshape(-1, self.layout.ndof)

    def nodal(self, name: str) -> np.ndarray:
        return self.point_values()[: self.mesh.n_nodes, self.layout.index(name)]

    def center(self, name: str) -> np.ndarray:
        return self.point_values()[self.mesh.n_nodes:, self.layout.index(name)]

    def at_node(self, point, name: str = "w") -> float:
        return float(self.nodal(name)[snap_node(self.mesh, point)])

    def section_vectors(self) -> np.ndarray:
        """``(n_sections, 3 * ndof)`` local DOF vectors in section order."""
        pids = self.system.sections.point_ids(self.mesh.n_nodes)
        return self.point_values()[pids].reshape(len(pids), -1)


def solve(system: GlobalSystem, refine: int = 5) -> FieldResult:
    n = system.k.shape[0]
    u = np.zeros(n)
    fixed = np.array(sorted(system.constraints), dtype=np.int64)
    if len(fixed):
        u[fixed] = [system.constraints[i] for i in fixed]
    free = np.setdiff1d(np.arange(n), fixed)
    if len(free) == 0:
        return FieldResult(u, system, 0.0)
    k_ff = system.k[free][:, free].tocsc()
    rhs = system.f[free] - system.k[free][:, fixed] @ u[fixed] if len(fixed) else system.f[free]
    try:
        lu = spla.splu(k_ff)
    except RuntimeError as exc:
        raise SolverError(f"factorization failed ({exc}); constraints may not remove all rigid-body modes") from exc
    diag = np.abs(lu.U.diagonal())
    if diag.min() <= 1e-13 * diag.max():
        raise SolverError(f"stiffness is singular: smallest pivot {diag.min():.3e} (largest {diag.max():.3e})")
    x = lu.solve(rhs)
    scale = max(np.linalg.norm(rhs), 1e-300)
    # thin plates are badly conditioned; a few refinement sweeps recover the residual
    for _ in range(refine):
        r = rhs - k_ff @ x
        if np.linalg.norm(r) <= 1e-12 * scale:
            break
        x = x + lu.solve(r)
    u[free] = x
    res = np.linalg.norm(k_ff @ x - rhs)
    # normwise backward error: the plain relative residual cannot drop below
    # eps * cond for very thin plates
    k_norm = spla.norm(k_ff, np.inf)
    if res > 1e-9 * (scale + k_norm * np.linalg.norm(x)):
        raise SolverError(f"residual {res:.3e} exceeds tolerance relative to load norm {scale:.3e}")
    return FieldResult(u, system, res / scale)


def run_static(mesh, material, loads, constraints, options: ElementOptions = ElementOptions(),
               threads: int = 1) -> FieldResult:
    return solve(assemble_global(mesh, material, loads, constraints, options, threads))
