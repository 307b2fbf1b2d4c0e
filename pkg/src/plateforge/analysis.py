"""Post-processing: eigen test, reference solutions, error norms, stress recovery, rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .assembly import (
    NORM_RULE,
    ElementOptions,
    FieldResult,
    Formulation,
    QuadratureRule,
    element_stiffness,
    shear_operator,
)
from .geometry import map_to_physical
from .kinematics import eval_standard_operators
from .material import PlateMaterial2D, SolidMaterial3D
from .mesh.library import regular_polygon


class LocationError(LookupError):
    pass


# --------------------------------------------------------------------------- eigen test

@dataclass(frozen=True)
class EigenReport:
    eigenvalues: np.ndarray
    tol_rel: float = 1e-8

    @property
    def zero_count(self) -> int:
        lam = self.eigenvalues
        return int(np.sum(np.abs(lam) <= self.tol_rel * np.abs(lam).max()))

    @property
    def nonzero(self) -> np.ndarray:
        lam = self.eigenvalues
        return lam[np.abs(lam) > self.tol_rel * np.abs(lam).max()]


def eigen_report(k: np.ndarray, tol_rel: float = 1e-8) -> EigenReport:
    k = np.asarray(k, dtype=float)
    return EigenReport(np.sort(np.linalg.eigvalsh(0.5 * (k + k.T))), tol_rel)


ZERO_ENERGY_MATERIAL = PlateMaterial2D(1e5, 0.25, 0.01)


def zero_energy_mode_test(shape, material=ZERO_ENERGY_MATERIAL, options: ElementOptions = ElementOptions(),
                          tol_rel: float = 1e-8) -> EigenReport:
    """Eigenvalues of a free element with its scaling center condensed.

    ``shape`` is a number of sides (regular polygon with unit circumradius)
    or a single-element :class:`PolyMesh`.
    """
    mesh = regular_polygon(int(shape)) if np.isscalar(shape) else shape
    k = element_stiffness(mesh, 0, material, options, condense=True).k_e
    return eigen_report(k, tol_rel)


# --------------------------------------------------------------------------- references

def cantilever_moment_reference(m: float, length: float, E: float, t: float, width: float = 1.0) -> float:
    return -m * length ** 2 / (2.0 * E * width * t ** 3 / 12.0)


def cantilever_udl_reference(q: float, length: float, E: float, nu: float, t: float,
                             width: float = 1.0, k: float = 5.0 / 6.0) -> float:
    """Tip deflection of a Timoshenko cantilever; ``q`` is the signed pressure."""
    inertia = width * t ** 3 / 12.0
    shear = E / (2.0 * (1.0 + nu)) * k * width * t
    return q * width * length ** 4 / (8.0 * E * inertia) + q * width * length ** 2 / (2.0 * shear)


def clamped_square_udl_reference(q: float, length: float, D: float) -> float:
    return 0.00126 * q * length ** 4 / D


def clamped_square_point_reference(P: float, length: float, D: float) -> float:
    return 0.0056 * P * length ** 2 / D


class ExactSolution:
    """Closed-form ``w``, rotations and their first derivatives."""

    def w(self, x, y):
        raise NotImplementedError

    def beta(self, x, y):
        raise NotImplementedError

    def grad_w(self, x, y):
        raise NotImplementedError

    def grad_beta(self, x, y):
        """``(bx_x, bx_y, by_x, by_y)``."""
        raise NotImplementedError

    def values(self, x, y) -> np.ndarray:
        bx, by = self.beta(x, y)
        return np.stack([self.w(x, y), bx, by], axis=-1)

    def derivatives(self, x, y) -> np.ndarray:
        wx, wy = self.grad_w(x, y)
        return np.stack([wx, wy, *self.grad_beta(x, y)], axis=-1)

    def strains(self, x, y):
        """Curvatures and shear strains under the solver's sign convention."""
        bx, by = self.beta(x, y)
        wx, wy = self.grad_w(x, y)
        bxx, bxy, byx, byy = self.grad_beta(x, y)
        kappa = np.stack([bxx, -byy, bxy - byx], axis=-1)
        gamma = np.stack([wx + bx, wy - by], axis=-1)
        return kappa, gamma


def _p(s):
    """``s (s - 1)`` and its building blocks for the square solution."""
    return s * (s - 1.0)


@dataclass(frozen=True)
class SquareLoadFunction(ExactSolution):
    """Clamped unit square under a polynomial load with a known thick-plate solution."""

    E: float = 1.092e7
    nu: float = 0.3
    t: float = 0.2

    @property
    def D(self) -> float:
        return self.E * self.t ** 3 / (12.0 * (1.0 - self.nu ** 2))

    @property
    def shear_factor(self) -> float:
        return 2.0 * self.t ** 2 / (5.0 * (1.0 - self.nu))

    def load(self, x, y):
        px, py = _p(x), _p(y)
        qx, qy = 5 * x ** 2 - 5 * x + 1, 5 * y ** 2 - 5 * y + 1
        return self.D * (12 * py * qx * (2 * py ** 2 + px * qy) + 12 * px * qy * (2 * px ** 2 + py * qx))

    def w(self, x, y):
        px, py = _p(x), _p(y)
        qx, qy = 5 * x ** 2 - 5 * x + 1, 5 * y ** 2 - 5 * y + 1
        return px ** 3 * py ** 3 / 3.0 - self.shear_factor * (py ** 3 * px * qx + px ** 3 * py * qy)

    def beta(self, x, y):
        px, py = _p(x), _p(y)
        return -py ** 3 * px ** 2 * (2 * x - 1), px ** 3 * py ** 2 * (2 * y - 1)

    def grad_w(self, x, y):
        px, py = _p(x), _p(y)
        dpx, dpy = 2 * x - 1, 2 * y - 1
        qx, qy = 5 * x ** 2 - 5 * x + 1, 5 * y ** 2 - 5 * y + 1
        dqx, dqy = 10 * x - 5, 10 * y - 5
        c = self.shear_factor
        wx = px ** 2 * dpx * py ** 3 - c * (py ** 3 * (dpx * qx + px * dqx) + 3 * px ** 2 * dpx * py * qy)
        wy = py ** 2 * dpy * px ** 3 - c * (px ** 3 * (dpy * qy + py * dqy) + 3 * py ** 2 * dpy * px * qx)
        return wx, wy

    def grad_beta(self, x, y):
        px, py = _p(x), _p(y)
        dpx, dpy = 2 * x - 1, 2 * y - 1
        # d/ds [p^2 (2s - 1)] = 2 p p' (2s - 1) + 2 p^2
        bxx = -py ** 3 * (2 * px * dpx * dpx + 2 * px ** 2)
        bxy = -3 * py ** 2 * dpy * px ** 2 * dpx
        byx = 3 * px ** 2 * dpx * py ** 2 * dpy
        byy = px ** 3 * (2 * py * dpy * dpy + 2 * py ** 2)
        return bxx, bxy, byx, byy


@dataclass(frozen=True)
class ClampedCircular(ExactSolution):
    """Clamped unit disk under uniform pressure ``q = 1``.

    ``lam = k E t^3 / (2 (1 + nu))``, so ``t^2 / (4 lam)`` is the Mindlin
    shear compliance term.
    """

    E: float = 10.92e6
    nu: float = 0.3
    t: float = 0.1
    k: float = 5.0 / 6.0

    @property
    def D(self) -> float:
        return self.E * self.t ** 3 / (12.0 * (1.0 - self.nu ** 2))

    @property
    def lam(self) -> float:
        return self.k * self.E * self.t ** 3 / (2.0 * (1.0 + self.nu))

    def w(self, x, y):
        r2 = x ** 2 + y ** 2
        s = self.t ** 2 / (4.0 * self.lam)
        return r2 ** 2 / (64.0 * self.D) - r2 * (s + 1.0 / (32.0 * self.D)) + s + 1.0 / (64.0 * self.D)

    def beta(self, x, y):
        f = (x ** 2 + y ** 2 - 1.0) / (16.0 * self.D)
        return -x * f, y * f

    def grad_w(self, x, y):
        r2 = x ** 2 + y ** 2
        g = 4.0 * r2 / (64.0 * self.D) - 2.0 * (self.t ** 2 / (4.0 * self.lam) + 1.0 / (32.0 * self.D))
        return x * g, y * g

    def grad_beta(self, x, y):
        c = 1.0 / (16.0 * self.D)
        r2m1 = x ** 2 + y ** 2 - 1.0
        bxx = -c * (r2m1 + 2 * x * x)
        bxy = -c * 2 * x * y
        byx = c * 2 * x * y
        byy = c * (r2m1 + 2 * y * y)
        return bxx, bxy, byx, byy


# --------------------------------------------------------------------------- section fields

def _plate_material(material):
    return material.as_plate() if isinstance(material, SolidMaterial3D) else material


def _barycentric_gradients(secs) -> np.ndarray:
    """``(S, 3, 2)`` gradients of the (node1, node2, center) shape functions."""
    e1 = secs.x1 - secs.x0
    e2 = secs.x2 - secs.x0
    m = np.stack([e1, e2], axis=-1)
    inv = np.linalg.inv(m)
    g1, g2 = inv[:, 0, :], inv[:, 1, :]
    return np.stack([g1, g2, -(g1 + g2)], axis=1)


def _plate_block(result: FieldResult) -> np.ndarray:
    """``(S, 3, 3)`` section values of ``(w, bx, by)`` for (node1, node2, center)."""
    layout = result.layout
    vals = result.point_values()[:, [layout.index("w"), layout.index("bx"), layout.index("by")]]
    return vals[result.system.sections.point_ids(result.mesh.n_nodes)]


def _plate_vector(result: FieldResult) -> np.ndarray:
    return _plate_block(result).reshape(len(result.system.sections), 9)


def section_strains(result: FieldResult, xi, eta):
    """Curvatures ``(S, 3)`` and shear strains ``(S, 2)`` at one parametric point."""
    secs = result.system.sections
    d = _plate_vector(result)
    kappa = np.einsum("sri,si->sr", eval_standard_operators(secs, xi, eta).b_b, d)
    gamma = np.einsum("sri,si->sr", shear_operator(secs, xi, eta, result.system.options.formulation, False), d)
    return kappa, gamma


def resultants(material, kappa, gamma):
    mat = _plate_material(material)
    return kappa @ mat.c_b.T, gamma @ mat.c_s.T


@dataclass(frozen=True)
class NormReport:
    l2_rel: float
    h1s_rel: float
    energy_rel: float
    h: float
    n_elements: int


def error_norms(result: FieldResult, exact: ExactSolution, rule: QuadratureRule = NORM_RULE) -> NormReport:
    """Relative L2, H1 semi-norm and energy errors by section quadrature."""
    secs = result.system.sections
    vals = _plate_block(result)
    grads = _barycentric_gradients(secs)
    dnum = np.einsum("sak,sad->sdk", grads, vals).reshape(len(secs), 6)  # (w,x w,y bx,x bx,y by,x by,y)
    mat = _plate_material(result.system.material)
    acc = np.zeros(6)
    for xi, eta, w in zip(rule.xi, rule.eta, rule.weight):
        xy = map_to_physical(secs, xi, eta)
        x, y = xy[:, 0], xy[:, 1]
        dA = w * xi * secs.area
        shape = np.array([0.5 * xi * (1 - eta), 0.5 * xi * (1 + eta), 1 - xi])
        v_h = np.einsum("a,sad->sd", shape, vals)
        v = exact.values(x, y)
        dv = exact.derivatives(x, y)
        kap, gam = exact.strains(x, y)
        m, q = resultants(mat, kap, gam)
        kap_h, gam_h = section_strains(result, xi, eta)
        m_h, q_h = resultants(mat, kap_h, gam_h)
        acc += [
            np.sum(dA * np.sum((v - v_h) ** 2, axis=1)),
            np.sum(dA * np.sum(v ** 2, axis=1)),
            np.sum(dA * np.sum((dv - dnum) ** 2, axis=1)),
            np.sum(dA * np.sum(dv ** 2, axis=1)),
            np.sum(dA * (np.sum((kap - kap_h) * (m - m_h), axis=1) + np.sum((gam - gam_h) * (q - q_h), axis=1))),
            np.sum(dA * (np.sum(kap * m, axis=1) + np.sum(gam * q, axis=1))),
        ]
    n_el = result.mesh.n_elements
    return NormReport(float(np.sqrt(acc[0] / acc[1])), float(np.sqrt(acc[2] / acc[3])),
                      float(np.sqrt(acc[4] / acc[5])), float(1.0 / np.sqrt(n_el)), n_el)


# --------------------------------------------------------------------------- recovery

def locate(secs, points, tol: float = 1e-10):
    """Containing section and ``(xi, eta)`` for each point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    e1 = secs.x1 - secs.x0
    e2 = secs.x2 - secs.x0
    inv = np.linalg.inv(np.stack([e1, e2], axis=-1))
    scale = np.sqrt(np.abs(secs.area).max())
    out_s, out_xi, out_eta = [], [], []
    for p in points:
        lam = np.einsum("sij,sj->si", inv, p - secs.x0)
        l1, l2 = lam[:, 0], lam[:, 1]
        worst = np.minimum(np.minimum(l1, l2), 1.0 - l1 - l2)
        s = int(np.argmax(worst))
        if worst[s] < -tol * max(scale, 1.0):
            raise LocationError(f"point {tuple(p)} lies outside the mesh")
        xi = l1[s] + l2[s]
        eta = (l2[s] - l1[s]) / xi if xi > 0 else 0.0
        out_s.append(s)
        out_xi.append(min(max(xi, 0.0), 1.0))
        out_eta.append(min(max(eta, -1.0), 1.0))
    return np.array(out_s), np.array(out_xi), np.array(out_eta)


@dataclass(frozen=True)
class StressField:
    points: np.ndarray
    m: np.ndarray
    q: np.ndarray
    n: np.ndarray | None = None

    @property
    def m_xx(self):
        return self.m[:, 0]


def _strains_at(result, sec_idx, xi, eta):
    """Strains of selected sections at per-section parametric points."""
    secs = result.system.sections.subset(sec_idx)
    d = _plate_vector(result)[sec_idx]
    xi_s = np.maximum(np.asarray(xi, dtype=float), 1e-12)
    b_b = eval_standard_operators(secs, 1.0, 0.0).b_b  # constant over a section
    b_s = shear_operator(secs, xi_s, np.asarray(eta, dtype=float), result.system.options.formulation, False)
    return np.einsum("sri,si->sr", b_b, d), np.einsum("sri,si->sr", b_s, d)


def recover_stress_resultants(result: FieldResult, sample="nodes") -> StressField:
    """Moments and shear forces at nodes (averaged), section centroids, or probe points."""
    secs = result.system.sections
    mat = result.system.material
    if isinstance(sample, str) and sample == "nodes":
        n_nodes = result.mesh.n_nodes
        pts, sums, counts = result.mesh.nodes, np.zeros((n_nodes, 5)), np.zeros(n_nodes)
        for node_key, eta in (("node1", -1.0), ("node2", 1.0)):
            idx = np.arange(len(secs))
            kap, gam = _strains_at(result, idx, np.ones(len(secs)), np.full(len(secs), eta))
            m, q = resultants(mat, kap, gam)
            ids = getattr(secs, node_key)
            np.add.at(sums, ids, np.hstack([m, q]))
            np.add.at(counts, ids, 1.0)
        avg = sums / np.maximum(counts, 1.0)[:, None]
        return StressField(pts, avg[:, :3], avg[:, 3:])
    if isinstance(sample, str) and sample == "quadrature":
        idx = np.arange(len(secs))
        xi = np.full(len(secs), 2.0 / 3.0)
        eta = np.zeros(len(secs))
        kap, gam = _strains_at(result, idx, xi, eta)
        m, q = resultants(mat, kap, gam)
        return StressField(map_to_physical(secs, 2.0 / 3.0, 0.0), m, q)
    pts = np.atleast_2d(np.asarray(sample, dtype=float))
    s, xi, eta = locate(secs, pts)
    kap, gam = _strains_at(result, s, xi, eta)
    m, q = resultants(mat, kap, gam)
    return StressField(pts, m, q)


def cell_resultants(result: FieldResult) -> StressField:
    """Area-weighted element averages of the section centroid resultants."""
    field = recover_stress_resultants(result, "quadrature")
    secs = result.system.sections
    n_el = result.mesh.n_elements
    w = secs.area
    tot = np.bincount(secs.element, w, n_el)
    m = np.column_stack([np.bincount(secs.element, w * field.m[:, j], n_el) for j in range(3)]) / tot[:, None]
    q = np.column_stack([np.bincount(secs.element, w * field.q[:, j], n_el) for j in range(2)]) / tot[:, None]
    return StressField(result.mesh.centers(), m, q)


def evaluate_field(result: FieldResult, points) -> np.ndarray:
    """Interpolated ``(w, bx, by)`` at arbitrary points inside the mesh."""
    secs = result.system.sections
    s, xi, eta = locate(secs, points)
    vals = _plate_block(result)[s]
    shape = np.stack([0.5 * xi * (1 - eta), 0.5 * xi * (1 + eta), 1 - xi], axis=1)
    return np.einsum("pa,pad->pd", shape, vals)


# --------------------------------------------------------------------------- rates

@dataclass(frozen=True)
class ConvergenceFit:
    slope: float
    intercept: float
    r2: float


def fit_convergence_rate(h, error) -> ConvergenceFit:
    """Least-squares line through ``(log h, log error)``."""
    h = np.asarray(h, dtype=float)
    error = np.asarray(error, dtype=float)
    if len(h) != len(error) or len(h) < 3:
        raise ValueError("need at least 3 (h, error) pairs")
    if np.any(h <= 0) or np.any(error <= 0):
        raise ValueError("mesh sizes and errors must be positive")
    fit = stats.linregress(np.log(h), np.log(error))
    return ConvergenceFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))
