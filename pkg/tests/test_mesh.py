import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plateforge.mesh import (
    Circle,
    DegenerateSectionError,
    LBracket,
    PolyMesh,
    Rectangle,
    SingularConfigurationError,
    cantilever_six_polygons,
    decompose_into_sections,
    distort_center_node,
    generate_structured_mesh,
    generate_voronoi_mesh,
    load_mesh,
    mesh_sections,
    polygon_area,
    quarter_plate_mesh,
    regular_polygon,
    save_mesh,
    validate_mesh,
)


def shoelace(xy):
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def test_structured_counts():
    mesh = generate_structured_mesh(Rectangle((0, 0), (1, 1)), 16, 16)
    assert (mesh.n_elements, mesh.n_nodes) == (256, 289)
    tri = generate_structured_mesh(Rectangle((0, 0), (1, 1)), 4, 4, "tri")
    assert tri.n_elements == 32
    assert tri.total_area() == pytest.approx(1.0)
    assert not validate_mesh(tri)


@pytest.mark.parametrize("center", [None, (0.9, 0.5)])
def test_section_areas_sum_to_polygon_area(center):
    mesh = PolyMesh([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2, 3]])
    secs = decompose_into_sections(mesh, 0, center)
    assert sum(s.area for s in secs) == pytest.approx(1.0)
    for s in secs:
        assert s.area == pytest.approx(shoelace(np.array([s.x0, s.x1, s.x2])))


@given(st.integers(3, 12), st.floats(0.1, 5.0))
def test_regular_polygon_area(n, radius):
    mesh = regular_polygon(n, radius)
    expected = 0.5 * n * radius ** 2 * np.sin(2 * np.pi / n)
    assert polygon_area(mesh.nodes) == pytest.approx(expected, rel=1e-12)
    assert mesh_sections(mesh).area.sum() == pytest.approx(expected, rel=1e-12)


def test_six_polygon_cantilever_is_valid():
    mesh = cantilever_six_polygons()
    assert not validate_mesh(mesh)
    assert mesh.total_area() == pytest.approx(2.0)
    assert sorted(len(e) for e in mesh.elements) == [3, 4, 4, 5, 5, 7]


def test_distortion_round_trip():
    base = quarter_plate_mesh(50.0, 2)
    moved = distort_center_node(base, 5.0)
    back = distort_center_node(moved, -5.0)
    np.testing.assert_allclose(back.nodes, base.nodes, atol=1e-12)


def test_fixed_center_policy_detects_singularity():
    base = quarter_plate_mesh(50.0, 2)
    with pytest.raises(SingularConfigurationError):
        distort_center_node(base, 12.5, centers="fixed")
    with pytest.raises(SingularConfigurationError):
        distort_center_node(base, -14.0, centers="fixed")
    moved = distort_center_node(base, 12.5, centers="moving")
    secs = mesh_sections(moved)
    assert len(secs) == 16 and np.all(secs.area > 0)


@pytest.mark.parametrize("mesh, fragment", [
    (PolyMesh([[0, 0], [1, 0], [0, 1]], [[0, 2, 1]]), "clockwise"),
    (PolyMesh([[0, 0], [1, 0], [2, 0]], [[0, 1, 2]]), "zero area"),
    (PolyMesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 1, 2]]), "repeated"),
    (PolyMesh([[0, 0], [1, 0], [np.nan, 1]], [[0, 1, 2]]), "non-finite"),
    (PolyMesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]], [[2.0, 2.0]]), "degenerate section"),
])
def test_validate_mesh_reports_defects(mesh, fragment):
    assert any(fragment in msg for msg in validate_mesh(mesh))


def test_degenerate_section_raises_on_assembly_geometry():
    mesh = PolyMesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]], [[0.5, 0.0]])
    with pytest.raises(DegenerateSectionError):
        mesh_sections(mesh)


def test_voronoi_single_element_is_the_square():
    mesh = generate_voronoi_mesh(Rectangle((0, 0), (1, 1)), 1)
    assert mesh.n_elements == 1 and mesh.total_area() == pytest.approx(1.0)


def test_voronoi_circle_covers_domain():
    circle = Circle((0, 0), 1.0)
    mesh = generate_voronoi_mesh(circle, 28, seed=3)
    assert mesh.n_elements == 28
    assert not validate_mesh(mesh)
    # boundary edges are chords, so the mesh is slightly smaller than the disc
    assert 0.95 * np.pi < mesh.total_area() < np.pi
    boundary = mesh.nodes[mesh.boundary_nodes()]
    np.testing.assert_allclose(np.hypot(*boundary.T), 1.0, atol=1e-9)


def test_voronoi_bracket_respects_holes():
    bracket = LBracket()
    mesh = generate_voronoi_mesh(bracket, 300, seed=0, max_lloyd_iters=60)
    assert mesh.n_elements == 300 and not validate_mesh(mesh)
    diam = bracket.diameter
    assert np.all(bracket.sdf(mesh.nodes) < 1e-9 * diam)
    for hole in bracket.holes:
        assert np.all(np.hypot(*(mesh.nodes - hole.center).T) >= hole.radius - 1e-9)
    for corner in bracket.corners:
        assert np.min(np.linalg.norm(mesh.nodes - corner, axis=1)) < 1e-12
    assert mesh.total_area() == pytest.approx(bracket.area(), rel=0.01)


def test_voronoi_is_deterministic():
    a = generate_voronoi_mesh(Rectangle((0, 0), (2, 1)), 40, seed=11)
    b = generate_voronoi_mesh(Rectangle((0, 0), (2, 1)), 40, seed=11)
    np.testing.assert_array_equal(a.nodes, b.nodes)


@pytest.mark.parametrize("n, seed", [(40, 11), (100, 0), (300, 1)])
def test_lloyd_measure_mostly_decreases(n, seed):
    history = []
    generate_voronoi_mesh(Rectangle((0, 0), (2, 1)), n, seed=seed, history=history)
    assert len(history) > 3
    assert np.mean(np.diff(history) <= 0) >= 0.9
    assert history[-1] < 5e-3 < history[0]


def test_mesh_json_round_trip(tmp_path):
    mesh = distort_center_node(quarter_plate_mesh(50.0, 2), 3.0, centers="fixed")
    path = tmp_path / "m.json"
    save_mesh(mesh, path)
    loaded = load_mesh(path)
    np.testing.assert_array_equal(loaded.nodes, mesh.nodes)
    np.testing.assert_array_equal(loaded.scaling_centers, mesh.scaling_centers)
    assert [list(e) for e in loaded.elements] == [list(e) for e in mesh.elements]
