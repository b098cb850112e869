"""Convex geometry over the projected instance space.

The instance-space boundary is the convex hull of the projected points
(counter-clockwise); per-solver footprints are hulls over the instances
where that solver performs well, summarized by shoelace area, instance
density, and purity against a point-in-polygon test that includes the
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices in counter-clockwise order (monotone chain).

    Needs at least 3 distinct, non-collinear points.  Collinear points
    on hull edges are dropped, so every returned vertex is a corner.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("points must be an N x 2 array")
    if not np.isfinite(pts).all():
        raise GeometryError("non-finite coordinates")
    if pts.shape[0] < 3:
        raise GeometryError("need at least 3 distinct points")

    def cross(o, a, b) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    ordered = [tuple(p) for p in pts]  # np.unique sorted lexicographically
    lower: list[tuple[float, float]] = []
    for p in ordered:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(ordered):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise GeometryError("all points are collinear")
    return np.array(hull)


def cloister_boundary(points: np.ndarray) -> np.ndarray:
    """Boundary polygon of the instance space: the hull of all points."""
    return convex_hull(points)


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of a simple polygon (positive for CCW order)."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
        raise GeometryError("polygon needs at least 3 vertices")
    x, y = v[:, 0], v[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Inclusive membership of each point in a CCW convex polygon."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    inside = np.ones(p.shape[0], dtype=bool)
    for i in range(v.shape[0]):
        a = v[i]
        b = v[(i + 1) % v.shape[0]]
        cross = (b[0] - a[0]) * (p[:, 1] - a[1]) - (b[1] - a[1]) * (p[:, 0] - a[0])
        inside &= cross >= 0.0
    return inside


@dataclass(frozen=True)
class Footprint:
    solver_id: str
    polygon: tuple[tuple[float, float], ...]  # CCW; empty when degenerate
    area: float
    density: float  # good instances per unit area
    purity: float  # good fraction among all instances inside the polygon

    @property
    def empty(self) -> bool:
        return not self.polygon


def footprint(solver_id: str, points: np.ndarray, good: np.ndarray) -> Footprint:
    """Hull-based footprint of one solver over the projected corpus.

    ``points`` holds every instance's (Z1, Z2); ``good`` flags the
    instances where this solver performs well.  Fewer than 3 good
    instances, or collinear ones, give the empty footprint with
    area = density = purity = 0.
    """
    points = np.asarray(points, dtype=float)
    good = np.asarray(good, dtype=bool)
    if points.ndim != 2 or points.shape[1] != 2:
        raise GeometryError("points must be an N x 2 array")
    if good.shape != (points.shape[0],):
        raise GeometryError("good flags are not aligned with points")
    good_points = points[good]
    try:
        hull = convex_hull(good_points)
    except GeometryError:
        return Footprint(solver_id, (), 0.0, 0.0, 0.0)
    area = polygon_area(hull)
    enclosed = points_in_polygon(points, hull)
    n_inside = int(enclosed.sum())
    n_good_inside = int((enclosed & good).sum())
    return Footprint(
        solver_id=solver_id,
        polygon=tuple((float(x), float(y)) for x, y in hull),
        area=area,
        density=float(good.sum()) / area,
        purity=n_good_inside / n_inside,
    )
