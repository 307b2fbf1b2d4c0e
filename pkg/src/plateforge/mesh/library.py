"""Fixed meshes used by the benchmark cases."""

from __future__ import annotations

import numpy as np

from .core import PolyMesh, generate_structured_mesh
from .domains import Rectangle

# six polygons on the 2 x 1 cantilever strip (0-based node indices)
CANTILEVER_SIX_NODES = np.array([
    [0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0],
    [1.0 / 3.0, 1.0 / 6.0], [1.5, 0.25], [4.0 / 3.0, 2.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0],
    [0.75, 0.125], [1.25, 7.0 / 24.0], [1.0, 0.75],
])
CANTILEVER_SIX_ELEMENTS = (
    (0, 8, 4),
    (0, 1, 5, 9, 8),
    (1, 2, 6, 5),
    (2, 3, 7, 10, 6),
    (3, 0, 4, 7),
    (4, 8, 9, 5, 6, 10, 7),
)


def cantilever_six_polygons() -> PolyMesh:
    return PolyMesh(CANTILEVER_SIX_NODES, CANTILEVER_SIX_ELEMENTS)


def regular_polygon(n_sides: int, circumradius: float = 1.0, rotation: float | None = None) -> PolyMesh:
    """Single regular polygon centred at the origin with a flat bottom edge."""
    if n_sides < 3:
        raise ValueError("a polygon needs at least 3 sides")
    if rotation is None:
        rotation = -np.pi / 2 - np.pi / n_sides
    ang = rotation + 2.0 * np.pi * np.arange(n_sides) / n_sides
    nodes = circumradius * np.column_stack([np.cos(ang), np.sin(ang)])
    return PolyMesh(nodes, [list(range(n_sides))])


def regular_polygon_with_side(n_sides: int, side: float = 1.0) -> PolyMesh:
    return regular_polygon(n_sides, side / (2.0 * np.sin(np.pi / n_sides)))


def quarter_plate_mesh(half_length: float = 50.0, n: int = 2) -> PolyMesh:
    """``n x n`` quads on the quarter ``[0, half_length]^2``."""
    return generate_structured_mesh(Rectangle((0.0, 0.0), (half_length, half_length)), n, n)
