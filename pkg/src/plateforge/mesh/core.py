"""Polygonal meshes and their decomposition into scaled-boundary sections."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MESH_FORMAT_VERSION = 1
DEGENERATE_TOL = 1e-12


class MeshError(ValueError):
    pass


class DegenerateSectionError(MeshError):
    def __init__(self, element, edge, area):
        super().__init__(f"element {element}, edge {edge}: section area {area:.3e} is not positive")
        self.element = element
        self.edge = edge
        self.area = area


class SingularConfigurationError(MeshError):
    pass


def polygon_area(xy: np.ndarray) -> float:
    """Signed shoelace area (positive for counter-clockwise loops)."""
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(xy: np.ndarray) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * a)


@dataclass(frozen=True)
class Section:
    """Triangle (scaling center, boundary node 1, boundary node 2) of an element."""

    x0: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    nodes: tuple[int, int]
    element: int
    edge: int

    @property
    def area(self) -> float:
        d1, d2 = self.x1 - self.x0, self.x2 - self.x0
        return 0.5 * float(d1[0] * d2[1] - d1[1] * d2[0])

    def global_dof_slots(self, n_nodes: int, ndof: int) -> np.ndarray:
        """Global DOF indices for the (node1, node2, scaling-center) blocks."""
        points = np.array([self.nodes[0], self.nodes[1], n_nodes + self.element])
        return (points[:, None] * ndof + np.arange(ndof)).ravel()


@dataclass(frozen=True)
class PolyMesh:
    """Nodes, counter-clockwise polygon loops and optional scaling centers.

    Without explicit scaling centers each element uses its area centroid.
    """

    nodes: np.ndarray
    elements: tuple
    scaling_centers: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        elements = tuple(np.asarray(e, dtype=np.int64) for e in self.elements)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        if self.scaling_centers is not None:
            sc = np.asarray(self.scaling_centers, dtype=float).reshape(-1, 2)
            if len(sc) != len(elements):
                raise MeshError(f"{len(sc)} scaling centers for {len(elements)} elements")
            object.__setattr__(self, "scaling_centers", sc)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_coords(self, e: int) -> np.ndarray:
        return self.nodes[self.elements[e]]

    def element_area(self, e: int) -> float:
        return polygon_area(self.element_coords(e))

    def centroids(self) -> np.ndarray:
        return np.array([polygon_centroid(self.element_coords(e)) for e in range(self.n_elements)])

    def centers(self) -> np.ndarray:
        """Scaling centers actually used (explicit ones, else centroids)."""
        if self.scaling_centers is not None:
            return self.scaling_centers
        return self.centroids()

    def with_centers(self, centers) -> PolyMesh:
        return PolyMesh(self.nodes, self.elements, centers, dict(self.meta))

    def total_area(self) -> float:
        return sum(self.element_area(e) for e in range(self.n_elements))

    def diameter(self) -> float:
        ext = self.nodes.max(axis=0) - self.nodes.min(axis=0)
        return float(np.hypot(*ext))

    def edges(self) -> dict:
        """Map sorted node pair -> list of (element, local edge index)."""
        out: dict = {}
        for e, loop in enumerate(self.elements):
            n = len(loop)
            for k in range(n):
                a, b = int(loop[k]), int(loop[(k + 1) % n])
                out.setdefault((min(a, b), max(a, b)), []).append((e, k))
        return out

    def boundary_edges(self) -> list[tuple[int, int]]:
        """Directed (counter-clockwise) edges owned by exactly one element."""
        result = []
        for owners in self.edges().values():
            if len(owners) == 1:
                e, k = owners[0]
                loop = self.elements[e]
                result.append((int(loop[k]), int(loop[(k + 1) % len(loop)])))
        return result

    def boundary_nodes(self) -> np.ndarray:
        return np.unique(np.array(self.boundary_edges(), dtype=np.int64).ravel())


def decompose_into_sections(mesh: PolyMesh, element_index: int, center=None) -> list[Section]:
    """Split one polygon into one triangular section per edge."""
    loop = mesh.elements[element_index]
    xy = mesh.nodes[loop]
    x0 = np.asarray(mesh.centers()[element_index] if center is None else center, dtype=float)
    ref = abs(polygon_area(xy))
    sections = []
    n = len(loop)
    for k in range(n):
        a, b = int(loop[k]), int(loop[(k + 1) % n])
        sec = Section(x0, mesh.nodes[a], mesh.nodes[b], (a, b), element_index, k)
        if not sec.area > DEGENERATE_TOL * ref:
            raise DegenerateSectionError(element_index, k, sec.area)
        sections.append(sec)
    return sections


@dataclass
class SectionArray:
    """All sections of a mesh as flat arrays (batch form used by assembly)."""

    x0: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    node1: np.ndarray
    node2: np.ndarray
    element: np.ndarray

    def __len__(self):
        return len(self.element)

    def subset(self, idx) -> SectionArray:
        return SectionArray(self.x0[idx], self.x1[idx], self.x2[idx],
                            self.node1[idx], self.node2[idx], self.element[idx])

    @property
    def area(self) -> np.ndarray:
        d1 = self.x1 - self.x0
        d2 = self.x2 - self.x0
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def point_ids(self, n_nodes: int) -> np.ndarray:
        """``(n, 3)`` point indices of (node1, node2, center); centers follow the nodes."""
        return np.stack([self.node1, self.node2, n_nodes + self.element], axis=1)


def mesh_sections(mesh: PolyMesh, check: bool = True) -> SectionArray:
    centers = mesh.centers()
    n1, n2, el = [], [], []
    for e, loop in enumerate(mesh.elements):
        n1.append(loop)
        n2.append(np.roll(loop, -1))
        el.append(np.full(len(loop), e))
    n1 = np.concatenate(n1)
    n2 = np.concatenate(n2)
    el = np.concatenate(el)
    secs = SectionArray(centers[el], mesh.nodes[n1], mesh.nodes[n2], n1, n2, el)
    if check:
        areas = secs.area
        ref = np.array([abs(mesh.element_area(e)) for e in range(mesh.n_elements)])[el]
        bad = np.flatnonzero(~(areas > DEGENERATE_TOL * ref))
        if len(bad):
            i = bad[0]
            edge = int(i - np.flatnonzero(el == el[i])[0])
            raise DegenerateSectionError(int(el[i]), edge, float(areas[i]))
    return secs


def validate_mesh(mesh: PolyMesh) -> list[str]:
    """Return a list of human-readable problems; empty for a valid mesh."""
    report = []
    if not np.all(np.isfinite(mesh.nodes)):
        bad = np.flatnonzero(~np.all(np.isfinite(mesh.nodes), axis=1))
        report.append(f"non-finite coordinates at nodes {bad.tolist()}")
    if mesh.scaling_centers is not None and not np.all(np.isfinite(mesh.scaling_centers)):
        report.append("non-finite scaling center coordinates")
    for e, loop in enumerate(mesh.elements):
        if len(loop) < 3:
            report.append(f"element {e}: fewer than 3 nodes")
            continue
        if np.any(loop < 0) or np.any(loop >= mesh.n_nodes):
            report.append(f"element {e}: node index out of range")
            continue
        if len(np.unique(loop)) != len(loop):
            report.append(f"element {e}: repeated node index (degenerate loop)")
        if np.any(loop == np.roll(loop, -1)):
            report.append(f"element {e}: duplicate consecutive nodes")
        xy = mesh.nodes[loop]
        if not np.all(np.isfinite(xy)):
            continue
        area = polygon_area(xy)
        scale = max(float(np.ptp(xy, axis=0).max()) ** 2, 1e-300)
        if abs(area) <= DEGENERATE_TOL * scale:
            report.append(f"element {e}: zero area")
            continue
        if area < 0:
            report.append(f"element {e}: clockwise orientation (orientation violation)")
            continue
        x0 = mesh.centers()[e] if mesh.scaling_centers is not None else polygon_centroid(xy)
        d1 = xy - x0
        d2 = np.roll(xy, -1, axis=0) - x0
        sec_area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        for k in np.flatnonzero(~(sec_area > DEGENERATE_TOL * area)):
            report.append(f"element {e}: degenerate section at edge {int(k)}")
    return report


def generate_structured_mesh(rect, nx: int, ny: int, shape: str = "quad") -> PolyMesh:
    """Axis-aligned grid on a rectangle; ``shape='tri'`` splits each cell along a diagonal."""
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be at least 1")
    (xa, ya), (xb, yb) = _rect_bounds(rect)
    xs = np.linspace(xa, xb, nx + 1)
    ys = np.linspace(ya, yb, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i, j):
        return j * (nx + 1) + i

    elements = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)
            if shape == "quad":
                elements.append([a, b, c, d])
            elif shape == "tri":
                elements.append([a, b, c])
                elements.append([a, c, d])
            else:
                raise ValueError(f"unknown structured element shape {shape!r}")
    return PolyMesh(nodes, elements)


def _rect_bounds(rect):
    if hasattr(rect, "lower") and hasattr(rect, "upper"):
        return tuple(rect.lower), tuple(rect.upper)
    lo, hi = rect
    return tuple(lo), tuple(hi)


def distort_center_node(mesh: PolyMesh, s: float, node: int | None = None,
                        centers: str | np.ndarray = "moving", tol: float = 1e-9) -> PolyMesh:
    """Move the interior node shared by four quads by ``(+s, -s)``.

    ``centers='moving'`` recomputes centroids; ``'fixed'`` keeps the current
    centers; an explicit array pins them.  A fixed center closer than
    ``tol * diameter`` to the moved node raises
    :class:`SingularConfigurationError`.
    """
    if node is None:
        counts = np.bincount(np.concatenate(mesh.elements), minlength=mesh.n_nodes)
        candidates = np.flatnonzero(counts == 4)
        if len(candidates) != 1:
            raise MeshError("could not identify a unique node shared by four elements")
        node = int(candidates[0])
    if isinstance(centers, str) and centers == "fixed":
        fixed = mesh.centers().copy()
    elif isinstance(centers, str):
        if centers != "moving":
            raise ValueError(f"unknown center policy {centers!r}")
        fixed = None
    else:
        fixed = np.asarray(centers, dtype=float)
    nodes = mesh.nodes.copy()
    nodes[node] = nodes[node] + np.array([s, -s])
    out = PolyMesh(nodes, mesh.elements, fixed, dict(mesh.meta))
    if fixed is not None:
        gap = np.linalg.norm(fixed - nodes[node], axis=1).min()
        if gap <= tol * mesh.diameter():
            raise SingularConfigurationError(
                f"displaced node {node} at {nodes[node].tolist()} coincides with a fixed scaling center")
        report = validate_mesh(out)
        if report:
            raise SingularConfigurationError("; ".join(report))
    return out


def mesh_to_dict(mesh: PolyMesh) -> dict:
    doc = {
        "version": MESH_FORMAT_VERSION,
        "nodes": mesh.nodes.tolist(),
        "elements": [loop.tolist() for loop in mesh.elements],
    }
    if mesh.scaling_centers is not None:
        doc["scaling_centers"] = mesh.scaling_centers.tolist()
    return doc


def mesh_from_dict(doc: dict) -> PolyMesh:
    version = doc.get("version")
    if version != MESH_FORMAT_VERSION:
        raise MeshError(f"unsupported mesh format version {version!r}")
    return PolyMesh(doc["nodes"], doc["elements"], doc.get("scaling_centers"))


def save_mesh(mesh: PolyMesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)))


def load_mesh(path) -> PolyMesh:
    return mesh_from_dict(json.loads(Path(path).read_text()))
