"""2D geometry primitives: convex hulls, separating-axis tests, containment.

All polygons are lists of (x, y) tuples in meters. Convex polygons are
counter-clockwise. Coordinates are plain floats; callers that need canonical
output round at serialization time.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .errors import DegenerateInput

Point = tuple[float, float]
Polygon = list[Point]

_EPS = 1e-9


def cross(o: Point, a: Point, b: Point) -> float:
    """Cross product of vectors o->a and o->b."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Point]) -> Polygon:
    """Minimal convex CCW polygon containing all points.

    Vertices start from the lexicographically smallest point. Raises
    DegenerateInput for fewer than 3 points or an all-collinear set.
    """
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        raise DegenerateInput(f"need >= 3 distinct points, got {len(pts)}")

    # Andrew's monotone chain.
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= _EPS:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= _EPS:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points collinear")
    return hull


def polygon_signed_area(poly: Sequence[Point]) -> float:
    """Shoelace area; positive for CCW polygons."""
    area = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        area += x0 * y1 - x1 * y0
    return area / 2.0


def polygon_area(poly: Sequence[Point]) -> float:
    return abs(polygon_signed_area(poly))


def is_ccw(poly: Sequence[Point]) -> bool:
    return polygon_signed_area(poly) > 0.0


def is_convex_ccw(poly: Sequence[Point]) -> bool:
    """Cross-product test: every turn is a left turn (collinear allowed)."""
    n = len(poly)
    if n < 3:
        return False
    for i in range(n):
        if cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < -_EPS:
            return False
    return is_ccw(poly)


def polygon_bounds(poly: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return min(xs), min(ys), max(xs), max(ys)


def polygon_centroid(poly: Sequence[Point]) -> Point:
    a = polygon_signed_area(poly)
    if abs(a) < _EPS:
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        return sum(xs) / len(xs), sum(ys) / len(ys)
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return cx / (6.0 * a), cy / (6.0 * a)


def point_in_polygon(pt: Point, poly: Sequence[Point], include_boundary: bool = True) -> bool:
    """Ray-casting containment with explicit boundary handling."""
    x, y = pt
    n = len(poly)
    on_boundary = any(
        point_segment_distance(pt, poly[i], poly[(i + 1) % n]) <= _EPS for i in range(n)
    )
    if on_boundary:
        return include_boundary
    inside = False
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xcross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xcross > x:
                inside = not inside
    return inside


def point_segment_distance(pt: Point, a: Point, b: Point) -> float:
    px, py = pt
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 < _EPS:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_polygon_boundary_distance(pt: Point, poly: Sequence[Point]) -> float:
    n = len(poly)
    return min(point_segment_distance(pt, poly[i], poly[(i + 1) % n]) for i in range(n))


def point_solid_distance(pt: Point, poly: Sequence[Point]) -> float:
    """Distance to a polygon treated as a solid: 0 inside, else boundary distance."""
    if point_in_polygon(pt, poly, include_boundary=True):
        return 0.0
    return point_polygon_boundary_distance(pt, poly)


def _project(poly: Sequence[Point], ax: float, ay: float) -> tuple[float, float]:
    dots = [px * ax + py * ay for px, py in poly]
    return min(dots), max(dots)


def hulls_intersect(a: Sequence[Point], b: Sequence[Point]) -> bool:
    """True iff the interiors of two convex CCW polygons intersect.

    Separating-axis test over both polygons' edge normals; shared edges or
    vertices (zero-area contact) count as non-intersecting.
    """
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            # outward normal of a CCW edge
            ax, ay = y1 - y0, x0 - x1
            norm = math.hypot(ax, ay)
            if norm < _EPS:
                continue
            ax, ay = ax / norm, ay / norm
            amin, amax = _project(a, ax, ay)
            bmin, bmax = _project(b, ax, ay)
            if min(amax, bmax) - max(amin, bmin) <= _EPS:
                return False
    return True


def rect_polygon(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    """Axis-aligned rectangle as a CCW polygon."""
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def transform_hull(hull: Sequence[Point], rotation_deg: int, tx: float, ty: float) -> Polygon:
    """Rotate (right angles only) about the origin, then translate."""
    if rotation_deg % 90 != 0:
        raise ValueError(f"rotation must be a right angle, got {rotation_deg}")
    r = rotation_deg % 360
    out: Polygon = []
    for x, y in hull:
        if r == 0:
            rx, ry = x, y
        elif r == 90:
            rx, ry = -y, x
        elif r == 180:
            rx, ry = -x, -y
        else:
            rx, ry = y, -x
        out.append((rx + tx, ry + ty))
    return out


def polygon_contains_polygon(outer: Sequence[Point], inner: Sequence[Point]) -> bool:
    """Convex containment: every inner vertex inside (boundary allowed)."""
    return all(point_in_polygon(p, outer, include_boundary=True) for p in inner)


def overlap_1d(a0: float, a1: float, b0: float, b1: float) -> float:
    """Length of the overlap of intervals [a0,a1] and [b0,b1]."""
    return max(0.0, min(a1, b1) - max(a0, b0))
