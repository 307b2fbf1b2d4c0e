from .core import (
    DegenerateSectionError,
    MeshError,
    PolyMesh,
    Section,
    SectionArray,
    SingularConfigurationError,
    decompose_into_sections,
    distort_center_node,
    generate_structured_mesh,
    load_mesh,
    mesh_from_dict,
    mesh_sections,
    mesh_to_dict,
    polygon_area,
    polygon_centroid,
    save_mesh,
    validate_mesh,
)
from .domains import Circle, DensityField, Domain, HoleSpec, LBracket, Rectangle, domain_from_config, density_from_config
from .library import cantilever_six_polygons, quarter_plate_mesh, regular_polygon, regular_polygon_with_side
from .voronoi import MeshGenerationError, generate_voronoi_mesh

__all__ = [name for name in dir() if not name.startswith("_")]
