"""Centroidal Voronoi meshes with seed reflection (a port of the PolyMesher idea)."""

from __future__ import annotations

import logging
from collections import Counter

import numpy as np
from scipy.spatial import Voronoi

from .core import PolyMesh, polygon_area, polygon_centroid, validate_mesh
from .domains import UNIFORM, DensityField, Domain, Rectangle

log = logging.getLogger(__name__)

COLLAPSE_ANGLE = 0.1
REFLECT_FACTOR = 1.5


class MeshGenerationError(RuntimeError):
    pass


def sample_seeds(domain: Domain, n: int, density: DensityField, rng: np.random.Generator,
                 max_rounds: int = 200) -> np.ndarray:
    """Rejection sampling of ``n`` seeds inside ``domain`` proportional to ``density``."""
    lo, hi = map(np.asarray, domain.bbox)
    seeds = np.empty((0, 2))
    ceiling = density.upper_bound
    for _ in range(max_rounds):
        batch = lo + rng.random((max(4 * n, 64), 2)) * (hi - lo)
        keep = domain.sdf(batch) < 0
        batch = batch[keep]
        keep = rng.random(len(batch)) < density(batch) / ceiling
        seeds = np.vstack([seeds, batch[keep]])
        if len(seeds) >= n:
            return seeds[:n]
    raise MeshGenerationError(
        f"only {len(seeds)} of {n} seeds placed after {max_rounds} sampling rounds; "
        f"domain area {domain.area():.3g} may be too small for the bounding box")


def reflect_seeds(domain: Domain, seeds: np.ndarray, alpha: float) -> np.ndarray:
    """Mirror seeds lying within ``alpha`` of a boundary piece to the outside."""
    eps = 1e-8 * domain.diameter
    d = domain.distances(seeds)
    gx = (domain.distances(seeds + [eps, 0.0]) - d) / eps
    gy = (domain.distances(seeds + [0.0, eps]) - d) / eps
    near = np.abs(d) < alpha
    idx, piece = np.nonzero(near)
    if len(idx) == 0:
        return np.empty((0, 2))
    grad = np.column_stack([gx[idx, piece], gy[idx, piece]])
    mirrored = seeds[idx] - 2.0 * d[idx, piece][:, None] * grad
    d_mirror = domain.sdf(mirrored)
    ok = (d_mirror > 0) & (np.abs(d_mirror) >= 0.9 * np.abs(d[idx, piece]))
    mirrored = mirrored[ok]
    if len(mirrored) == 0:
        return mirrored
    return np.unique(np.round(mirrored, 12), axis=0)


def _cells(seeds, mirrored):
    vor = Voronoi(np.vstack([seeds, mirrored]))
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        if len(region) == 0 or -1 in region:
            raise MeshGenerationError(f"Voronoi cell of seed {i} is unbounded; seed reflection failed")
        cells.append(np.asarray(region, dtype=np.int64))
    return vor.vertices, cells


def _weighted_centroids(vertices, cells, density):
    """Density-weighted centroids and areas by fan triangles and a midpoint rule."""
    n = len(cells)
    counts = np.array([len(c) for c in cells])
    owner = np.repeat(np.arange(n), counts)
    flat = np.concatenate(cells)
    nxt = np.concatenate([np.roll(c, -1) for c in cells])
    apex = np.array([vertices[c].mean(axis=0) for c in cells])[owner]
    a, b = vertices[flat], vertices[nxt]
    area = 0.5 * np.abs((a[:, 0] - apex[:, 0]) * (b[:, 1] - apex[:, 1])
                        - (a[:, 1] - apex[:, 1]) * (b[:, 0] - apex[:, 0]))
    tri_c = (a + b + apex) / 3.0
    mass = area * density(tri_c)
    cell_mass = np.bincount(owner, mass, n)
    cx = np.bincount(owner, mass * tri_c[:, 0], n) / cell_mass
    cy = np.bincount(owner, mass * tri_c[:, 1], n) / cell_mass
    return np.column_stack([cx, cy]), np.bincount(owner, area, n)


def _collapse_short_edges(vertices, cells, tol=COLLAPSE_ANGLE):
    """Merge edge end points that subtend less than ``tol`` radians from the cell centroid."""
    parent = np.arange(len(vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for cell in cells:
        c = vertices[cell].mean(axis=0)
        nxt = np.roll(cell, -1)
        u = vertices[cell] - c
        v = vertices[nxt] - c
        ang = np.arccos(np.clip(np.sum(u * v, axis=1) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)), -1, 1))
        for k in np.flatnonzero(ang < tol):
            ra, rb = find(cell[k]), find(nxt[k])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(len(vertices))])
    merged = []
    for cell in cells:
        loop = roots[cell]
        keep = loop != np.roll(loop, 1)
        if not keep.any():
            keep[0] = True
        merged.append(loop[keep])
    return merged


def _finalize(vertices, cells, domain):
    used = np.unique(np.concatenate(cells))
    remap = -np.ones(len(vertices), dtype=np.int64)
    remap[used] = np.arange(len(used))
    nodes = vertices[used].copy()
    elements = [remap[c] for c in cells]
    # vertices on edges owned by a single cell belong to the boundary; the
    # reflected Voronoi vertices only approximate it, so snap them onto it
    count = Counter((min(a, b), max(a, b)) for loop in elements for a, b in zip(loop, np.roll(loop, -1)))
    on_boundary = np.unique([v for edge, n in count.items() if n == 1 for v in edge])
    stray = domain.sdf(nodes) > -1e-12 * domain.diameter
    stray[on_boundary] = True
    nodes[stray] = domain.project(nodes[stray])
    for corner in domain.corners:
        nearest = on_boundary[np.argmin(np.linalg.norm(nodes[on_boundary] - corner, axis=1))]
        nodes[nearest] = corner
    fixed = []
    for loop in elements:
        if polygon_area(nodes[loop]) < 0:
            loop = loop[::-1]
        fixed.append(loop)
    return nodes, fixed


def lloyd_error(area, old, new, domain_area):
    n = len(area)
    return float(np.sqrt(np.sum(area ** 2 * np.sum((new - old) ** 2, axis=1))) * n / domain_area ** 1.5)


def generate_voronoi_mesh(domain: Domain, n_elements: int, density: DensityField = UNIFORM,
                          max_lloyd_iters: int = 100, seed: int = 0, tol: float = 5e-3,
                          max_retries: int = 5, history: list | None = None) -> PolyMesh:
    """Centroidal Voronoi tessellation of ``domain`` into ``n_elements`` polygons.

    ``history``, if given, receives the Lloyd convergence measure per
    iteration.  Scaling centers are set to the (unweighted) cell centroids.
    """
    if int(n_elements) != n_elements or n_elements < 1:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements}")
    n_elements = int(n_elements)
    if n_elements == 1 and isinstance(domain, Rectangle) and not domain.holes:
        lo, hi = domain.bbox
        nodes = np.array([lo, (hi[0], lo[1]), hi, (lo[0], hi[1])], dtype=float)
        mesh = PolyMesh(nodes, [[0, 1, 2, 3]])
        return mesh.with_centers(mesh.centroids())

    dom_area = domain.area()
    alpha = REFLECT_FACTOR * np.sqrt(dom_area / n_elements)
    last_error = None
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        try:
            seeds = sample_seeds(domain, n_elements, density, rng)
            err = np.inf
            for it in range(max_lloyd_iters):
                vertices, cells = _cells(seeds, reflect_seeds(domain, seeds, alpha))
                centroids, areas = _weighted_centroids(vertices, cells, density)
                err = lloyd_error(areas, seeds, centroids, dom_area)
                if history is not None:
                    history.append(err)
                seeds = centroids
                if err < tol:
                    break
            vertices, cells = _cells(seeds, reflect_seeds(domain, seeds, alpha))
            cells = _collapse_short_edges(vertices, cells)
            nodes, elements = _finalize(vertices, cells, domain)
            mesh = PolyMesh(nodes, elements, meta={"seed": seed, "lloyd_error": err, "attempt": attempt})
            if any(len(e) < 3 for e in mesh.elements):
                raise MeshGenerationError("edge collapse produced a cell with fewer than 3 vertices")
            mesh = mesh.with_centers(np.array([polygon_centroid(mesh.nodes[e]) for e in mesh.elements]))
            problems = validate_mesh(mesh)
            if problems:
                raise MeshGenerationError(f"invalid mesh: {problems[0]}")
            return mesh
        except (MeshGenerationError, ValueError) as exc:
            log.debug("voronoi attempt %d failed: %s", attempt, exc)
            last_error = exc
    raise MeshGenerationError(
        f"mesh generation failed after {max_retries} attempts (n={n_elements}, seed={seed}): {last_error}")
