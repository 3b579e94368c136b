"""Planar primitives in a North-East frame.

Vectors are ordered (north, east). Headings are degrees clockwise from
North, so a positive rotation turns North toward East (starboard).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Vec2:
    n: float
    e: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.n + other.n, self.e + other.e)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.n - other.n, self.e - other.e)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.n * s, self.e * s)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.n, -self.e)

    def __iter__(self):
        yield self.n
        yield self.e

    def dot(self, other: Vec2) -> float:
        return self.n * other.n + self.e * other.e

    def cross(self, other: Vec2) -> float:
        return self.n * other.e - self.e * other.n

    def norm(self) -> float:
        return math.hypot(self.n, self.e)

    def unit(self) -> Vec2:
        length = math.hypot(self.n, self.e)
        if length == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.n / length, self.e / length)

    def bearing_deg(self) -> float:
        """Compass bearing of the vector, degrees clockwise from North in [0, 360)."""
        return math.degrees(math.atan2(self.e, self.n)) % 360.0

    def to_list(self) -> list[float]:
        return [self.n, self.e]

    @classmethod
    def from_heading(cls, heading_deg: float, speed: float) -> Vec2:
        h = math.radians(heading_deg)
        return cls(speed * math.cos(h), speed * math.sin(h))


ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class Disc:
    center: Vec2
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disc radius must be positive, got {self.radius}")

    def contains(self, p: Vec2) -> bool:
        return (p - self.center).norm() <= self.radius


@dataclass(frozen=True, slots=True)
class HalfPlane:
    """Feasible set {v : normal . (v - anchor) >= 0}; ``normal`` is unit length."""

    normal: Vec2
    anchor: Vec2
    tag: str = ""

    def __post_init__(self):
        if abs(self.normal.norm() - 1.0) > 1e-9:
            raise ValueError("half-plane normal must be a unit vector")

    @property
    def offset(self) -> float:
        return self.normal.dot(self.anchor)

    def margin(self, p: Vec2) -> float:
        return self.normal.dot(p - self.anchor)


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Vec2, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            raise ValueError("first vertex must not be repeated at the end")
        if len(verts) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)
        if signed_area(self) == 0.0:
            raise ValueError("polygon has zero signed area")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> Polygon:
        return cls(tuple(Vec2(float(n), float(e)) for n, e in pairs))

    def to_pairs(self) -> list[list[float]]:
        return [v.to_list() for v in self.vertices]

    def as_array(self) -> np.ndarray:
        return np.array([[v.n, v.e] for v in self.vertices], dtype=float)

    def bbox(self) -> tuple[float, float, float, float]:
        """(min_n, min_e, max_n, max_e)."""
        arr = self.as_array()
        lo = arr.min(axis=0)
        hi = arr.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def rotate(v: Vec2, theta: float) -> Vec2:
    """Rotate ``v`` by ``theta`` radians; positive turns North toward East."""
    c = math.cos(theta)
    s = math.sin(theta)
    return Vec2(c * v.n - s * v.e, s * v.n + c * v.e)


def half_plane_contains(h: HalfPlane, p: Vec2) -> bool:
    return h.margin(p) >= -BOUNDARY_TOL


def signed_area(poly: Polygon) -> float:
    verts = poly.vertices
    total = 0.0
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        total += a.n * b.e - b.n * a.e
    return 0.5 * total


def polygon_area(poly: Polygon) -> float:
    return abs(signed_area(poly))


def _point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ab = b - a
    denom = ab.dot(ab)
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, (p - a).dot(ab) / denom))
    return (p - (a + ab * t)).norm()


def polygon_contains(poly: Polygon, p: Vec2) -> bool:
    """Even-odd membership; points on the boundary count as inside."""
    verts = poly.vertices
    inside = False
    m = len(verts)
    for i in range(m):
        a = verts[i]
        b = verts[(i + 1) % m]
        if _point_segment_distance(p, a, b) <= BOUNDARY_TOL:
            return True
        if (a.e > p.e) != (b.e > p.e):
            n_cross = a.n + (p.e - a.e) * (b.n - a.n) / (b.e - a.e)
            if p.n < n_cross:
                inside = not inside
    return inside


def polygon_contains_many(poly: Polygon, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`polygon_contains` over an (N, 2) array of (n, e) points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    pn = pts[:, 0]
    pe = pts[:, 1]
    verts = poly.as_array()
    an = verts[:, 0]
    ae = verts[:, 1]
    bn = np.roll(an, -1)
    be = np.roll(ae, -1)
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    for k in range(len(verts)):
        dn = bn[k] - an[k]
        de = be[k] - ae[k]
        seg_sq = dn * dn + de * de
        t = ((pn - an[k]) * dn + (pe - ae[k]) * de) / seg_sq
        t = np.clip(t, 0.0, 1.0)
        dist = np.hypot(pn - (an[k] + t * dn), pe - (ae[k] + t * de))
        on_edge |= dist <= BOUNDARY_TOL
        straddle = (ae[k] > pe) != (be[k] > pe)
        if de != 0.0:
            n_cross = an[k] + (pe - ae[k]) * dn / de
            inside ^= straddle & (pn < n_cross)
    return inside | on_edge


def segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    """Closed-segment intersection test (touching counts)."""

    def orient(a: Vec2, b: Vec2, c: Vec2) -> float:
        return (b - a).cross(c - a)

    def on_segment(a: Vec2, b: Vec2, c: Vec2) -> bool:
        return (
            min(a.n, b.n) - BOUNDARY_TOL <= c.n <= max(a.n, b.n) + BOUNDARY_TOL
            and min(a.e, b.e) - BOUNDARY_TOL <= c.e <= max(a.e, b.e) + BOUNDARY_TOL
        )

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False


def is_simple(poly: Polygon) -> bool:
    """True when no two non-adjacent edges touch."""
    verts = poly.vertices
    m = len(verts)
    edges = [(verts[i], verts[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def is_convex(poly: Polygon) -> bool:
    verts = poly.vertices
    m = len(verts)
    sign = 0
    for i in range(m):
        a, b, c = verts[i], verts[(i + 1) % m], verts[(i + 2) % m]
        turn = (b - a).cross(c - b)
        if turn != 0.0:
            s = 1 if turn > 0 else -1
            if sign == 0:
                sign = s
            elif s != sign:
                return False
    return True
