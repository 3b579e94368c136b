"""Collision cones and velocity obstacles with bounded state uncertainty.

Position uncertainty (a disc of radius ``eps_p``) widens the cone; velocity
uncertainty (a disc of radius ``eps_v``) is applied as a Minkowski expansion
of the translated cone. The two supporting half-planes are the linear
certificates the planner actually uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import ZERO, Disc, HalfPlane, Vec2, rotate


class AlreadyInConflict(Exception):
    """The ego is already inside the inflated obstacle; no velocity is safe."""


@dataclass(frozen=True, slots=True)
class UncertaintyBounds:
    eps_p: float = 50.0
    eps_v: float = 0.5

    def __post_init__(self):
        if self.eps_p < 0 or self.eps_v < 0:
            raise ValueError("uncertainty radii must be non-negative")


@dataclass(frozen=True, slots=True)
class CollisionCone:
    axis: Vec2
    half_angle: float
    distance: float = 0.0
    inflated_radius: float = 0.0
    apex_rel: Vec2 = ZERO


@dataclass(frozen=True, slots=True)
class VelocityObstacleRegion:
    apex: Vec2
    cone: CollisionCone
    eps_v: float
    left: HalfPlane
    right: HalfPlane


@dataclass(frozen=True, slots=True)
class StaticTarget:
    position: Vec2
    radius: float
    velocity: Vec2 = ZERO


def build_collision_cone(p_a: Vec2, p_b_hat: Vec2, r_a: float, r_b: float, eps_p: float = 0.0) -> CollisionCone:
    rel = p_b_hat - p_a
    dist = rel.norm()
    inflated = r_a + r_b + eps_p
    if dist <= inflated:
        raise AlreadyInConflict(f"separation {dist:.3f} m within inflated radius {inflated:.3f} m")
    return CollisionCone(
        axis=Vec2(rel.n / dist, rel.e / dist),
        half_angle=math.asin(inflated / dist),
        distance=dist,
        inflated_radius=inflated,
    )


def supporting_half_planes(cone: CollisionCone, v_b_hat: Vec2, eps_v: float = 0.0) -> tuple[HalfPlane, HalfPlane]:
    """Left and right tangent half-planes; feasible sides exclude the expanded cone."""
    swing = cone.half_angle + math.pi / 2
    n_left = rotate(cone.axis, -swing)
    n_right = rotate(cone.axis, swing)
    left = HalfPlane(n_left, v_b_hat + n_left * eps_v, "L")
    right = HalfPlane(n_right, v_b_hat + n_right * eps_v, "R")
    return left, right


def velocity_obstacle(
    p_a: Vec2, r_a: float, p_b_hat: Vec2, v_b_hat: Vec2, r_b: float, eps_p: float = 0.0, eps_v: float = 0.0
) -> VelocityObstacleRegion:
    cone = build_collision_cone(p_a, p_b_hat, r_a, r_b, eps_p)
    left, right = supporting_half_planes(cone, v_b_hat, eps_v)
    return VelocityObstacleRegion(apex=v_b_hat, cone=cone, eps_v=eps_v, left=left, right=right)


def cone_distance(cone: CollisionCone, w: Vec2) -> float:
    """Euclidean distance from ``w`` to the closed cone in relative-velocity space."""
    r = w.norm()
    if r == 0.0:
        return 0.0
    along = w.dot(cone.axis)
    across = abs(w.cross(cone.axis))
    angle = math.atan2(across, along)
    if angle <= cone.half_angle:
        return 0.0
    if angle - cone.half_angle >= math.pi / 2:
        return r
    return r * math.sin(angle - cone.half_angle)


def vo_contains(vo: VelocityObstacleRegion, v_a: Vec2) -> bool:
    return cone_distance(vo.cone, v_a - vo.apex) <= vo.eps_v


def grounding_obstacle(circle: Disc, ego_position: Vec2, ego_radius: float, eps_p: float = 0.0) -> StaticTarget:
    """Wrap a shallow-water circle as a stationary target for the VO pipeline."""
    if (ego_position - circle.center).norm() <= circle.radius + ego_radius + eps_p:
        raise AlreadyInConflict("ego inside an inflated shallow-water circle")
    return StaticTarget(position=circle.center, radius=circle.radius)
