"""Instance-space pipeline: normalization, feature selection, 2-D projection,
and boundary/footprint geometry."""

from .normalize import (
    NormalizationParams,
    apply_normalization,
    fit_normalization,
    identity_normalization,
)
from .sifted import SiftedResult, sifted_select
from .projection import (
    ProjectionModel,
    fit_projection,
    load_external_matrix,
    project,
    project_many,
    read_projection_model,
    write_projection_model,
)
from .geometry import (
    Footprint,
    cloister_boundary,
    convex_hull,
    footprint,
    points_in_polygon,
    polygon_area,
)

__all__ = [
    "NormalizationParams",
    "fit_normalization",
    "apply_normalization",
    "identity_normalization",
    "SiftedResult",
    "sifted_select",
    "ProjectionModel",
    "fit_projection",
    "load_external_matrix",
    "project",
    "project_many",
    "write_projection_model",
    "read_projection_model",
    "Footprint",
    "convex_hull",
    "cloister_boundary",
    "polygon_area",
    "points_in_polygon",
    "footprint",
]
