"""Planar primitives used by bilateration, trilateration and sensing-disk tests.

Coordinates live in the unit square, so the absolute tolerances below are
meaningful without any rescaling.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import DegenerateCenters

EPS_GEOM = 1e-9
# threshold on twice the triangle area
EPS_COLLINEAR = 1e-7


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float


# An intersection is reported as a tuple of points:
#   ()        disjoint or nested circles
#   (p,)      tangent circles
#   (p, q)    transversal intersection, p left of the center line, q right
IntersectionResult = tuple


def distance(a: Point2, b: Point2) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def cross(o: Point2, a: Point2, b: Point2) -> float:
    """Z component of (a - o) x (b - o), i.e. twice the signed triangle area."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def is_collinear(a: Point2, b: Point2, c: Point2) -> bool:
    return abs(cross(a, b, c)) <= EPS_COLLINEAR


def in_disk(p: Point2, disk: Circle) -> bool:
    """Closed-disk membership with an EPS_GEOM allowance on the boundary."""
    return distance(p, disk.center) <= disk.radius + EPS_GEOM


def reflect(p: Point2, a: Point2, b: Point2) -> Point2:
    """Mirror ``p`` across the line through ``a`` and ``b``."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)
    fx, fy = a[0] + t * dx, a[1] + t * dy
    return Point2(2.0 * fx - p[0], 2.0 * fy - p[1])


def circle_intersection(c1: Circle, c2: Circle) -> IntersectionResult:
    """Intersect two circles with distinct centers.

    Returns an empty tuple when the circles miss each other (disjoint or one
    nested in the other), a 1-tuple for tangency within ``EPS_GEOM`` and a
    2-tuple otherwise.  In the 2-tuple the first point lies to the left of the
    directed line ``c1.center -> c2.center``.

    Raises:
        DegenerateCenters: if the centers coincide within ``EPS_GEOM``.
    """
    (x1, y1), r1 = c1
    (x2, y2), r2 = c2
    dx, dy = x2 - x1, y2 - y1
    d = math.hypot(dx, dy)
    if d <= EPS_GEOM:
        raise DegenerateCenters(f"circle centers coincide: {c1.center} / {c2.center}")

    ux, uy = dx / d, dy / d
    # signed offset of the chord midpoint from c1 along the center line
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    if abs(d - (r1 + r2)) <= EPS_GEOM or abs(d - abs(r1 - r2)) <= EPS_GEOM:
        return (Point2(x1 + a * ux, y1 + a * uy),)
    if d > r1 + r2 or d < abs(r1 - r2):
        return ()

    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx, my = x1 + a * ux, y1 + a * uy
    if 2.0 * h <= EPS_GEOM:
        return (Point2(mx, my),)
    return (
        Point2(mx - h * uy, my + h * ux),
        Point2(mx + h * uy, my - h * ux),
    )
