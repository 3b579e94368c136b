"""Safe-velocity selection: half-plane assembly, exact projection, rate limiting."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import risk
from .colregs import ColregsConfig, EncounterKind, Side, argmax_side, classify, select_side
from .geometry import ZERO, Disc, HalfPlane, Vec2
from .velocity_obstacle import AlreadyInConflict, UncertaintyBounds, grounding_obstacle, velocity_obstacle
from .vessel import VesselState

FEASIBILITY_TOL = 1e-7


class Infeasible(Exception):
    """The half-plane intersection is empty."""


@dataclass(frozen=True)
class ConstraintSet:
    half_planes: tuple[HalfPlane, ...] = ()

    def __len__(self):
        return len(self.half_planes)

    def tags(self) -> list[str]:
        return [h.tag for h in self.half_planes]


@dataclass(frozen=True)
class PlannerParams:
    v_max: float = 12.0
    n_poly: int = 16
    d_max: float = 0.05
    cruise_speed: float = 10.0
    v_ref_policy: str = "toward-goal-at-cruise"
    goal_radius: float = 100.0

    def __post_init__(self):
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")
        if self.n_poly < 8:
            raise ValueError("n_poly must be at least 8")
        if not 0 < self.d_max <= self.v_max:
            raise ValueError("d_max must lie in (0, v_max]")
        if self.v_ref_policy not in ("toward-goal-at-cruise", "fixed-profile"):
            raise ValueError(f"unknown v_ref policy {self.v_ref_policy!r}")


@dataclass(frozen=True)
class Encounter:
    target_id: str
    kind: EncounterKind
    side: Side


@dataclass(frozen=True)
class PlanOutcome:
    v_ref: Vec2
    v_star: Vec2
    v_next: Vec2
    feasible: bool
    active_constraints: tuple[str, ...]
    solve_time: float
    encounters: tuple[Encounter, ...] = field(default=())


def speed_polygon(v_max: float, n_poly: int) -> list[HalfPlane]:
    """Inscribed regular polygon as half-planes: n_k . v <= v_max cos(pi / n_poly)."""
    apothem = v_max * math.cos(math.pi / n_poly)
    planes = []
    for k in range(n_poly):
        ang = 2.0 * math.pi * k / n_poly
        outward = Vec2(math.cos(ang), math.sin(ang))
        planes.append(HalfPlane(-outward, outward * apothem, f"speed:{k}"))
    return planes


def solve_projection(constraints: ConstraintSet | Sequence[HalfPlane], v_ref: Vec2) -> Vec2:
    """Exact Euclidean projection of ``v_ref`` onto an intersection of half-planes.

    The optimum is ``v_ref`` itself, the foot of ``v_ref`` on one boundary
    line, or an intersection of two boundary lines; all candidates are
    enumerated and the nearest feasible one returned.
    """
    planes = constraints.half_planes if isinstance(constraints, ConstraintSet) else tuple(constraints)
    if not planes:
        return v_ref
    normals = np.array([[h.normal.n, h.normal.e] for h in planes])
    offsets = np.array([h.offset for h in planes])
    ref = np.array([v_ref.n, v_ref.e])

    slack = normals @ ref - offsets
    if np.all(slack >= -FEASIBILITY_TOL):
        return v_ref

    feet = ref - slack[:, None] * normals

    i, j = np.triu_indices(len(planes), k=1)
    det = normals[i, 0] * normals[j, 1] - normals[i, 1] * normals[j, 0]
    ok = np.abs(det) > 1e-12
    i, j, det = i[ok], j[ok], det[ok]
    vertices = np.empty((len(i), 2))
    vertices[:, 0] = (offsets[i] * normals[j, 1] - offsets[j] * normals[i, 1]) / det
    vertices[:, 1] = (normals[i, 0] * offsets[j] - normals[j, 0] * offsets[i]) / det

    candidates = np.vstack([feet, vertices])
    feasible = np.all(candidates @ normals.T - offsets >= -FEASIBILITY_TOL, axis=1)
    if not feasible.any():
        raise Infeasible("no velocity satisfies every half-plane")
    pool = candidates[feasible]
    d2 = np.sum((pool - ref) ** 2, axis=1)
    best = pool[int(np.argmin(d2))]
    return Vec2(float(best[0]), float(best[1]))


def limit_acceleration(v_curr: Vec2, v_star: Vec2, d_max: float) -> Vec2:
    delta = v_star - v_curr
    dist = delta.norm()
    if dist <= d_max:
        return v_star
    return v_curr + delta * (d_max / dist)


def reference_velocity(ego: VesselState, goal: Vec2, params: PlannerParams) -> Vec2:
    to_goal = goal - ego.position
    dist = to_goal.norm()
    if dist == 0.0:
        return ZERO
    if params.v_ref_policy == "fixed-profile":
        return Vec2.from_heading(ego.heading, params.cruise_speed)
    return to_goal * (params.cruise_speed / dist)


def grounding_thresholds(th: risk.RiskThresholds, circle: Disc) -> risk.RiskThresholds:
    # DCPA for terrain is measured to the circle edge, not its center
    return risk.RiskThresholds(th.tcpa_max, th.dcpa_max + circle.radius)


def plan_step(
    ego: VesselState,
    targets: Sequence[tuple[VesselState, UncertaintyBounds]],
    grounding: Sequence[Disc],
    goal: Vec2,
    params: PlannerParams,
    thresholds: risk.RiskThresholds,
    colregs_cfg: ColregsConfig = ColregsConfig(),
    grounding_eps_p: float = 0.0,
) -> PlanOutcome:
    t0 = time.perf_counter()
    v_curr = ego.velocity
    v_ref = reference_velocity(ego, goal, params)
    planes = speed_polygon(params.v_max, params.n_poly)
    encounters = []

    try:
        for target, unc in targets:
            rk = risk.RelativeKinematics.between(ego.position, v_curr, target.position, target.velocity)
            if not risk.is_active_threat(rk, thresholds):
                continue
            vo = velocity_obstacle(
                ego.position, ego.radius, target.position, target.velocity, target.radius, unc.eps_p, unc.eps_v
            )
            kind = classify(ego, target, colregs_cfg)
            sel = select_side(kind, vo, v_curr)
            chosen = vo.right if sel.side is Side.R else vo.left
            planes.append(HalfPlane(chosen.normal, chosen.anchor, f"{target.id}:{sel.side.value}"))
            encounters.append(Encounter(target.id, kind, sel.side))

        for g, circle in enumerate(grounding):
            obstacle = grounding_obstacle(circle, ego.position, ego.radius, grounding_eps_p)
            rk = risk.RelativeKinematics.between(ego.position, v_curr, obstacle.position, obstacle.velocity)
            if not risk.is_active_threat(rk, grounding_thresholds(thresholds, circle)):
                continue
            vo = velocity_obstacle(
                ego.position, ego.radius, obstacle.position, obstacle.velocity, obstacle.radius, grounding_eps_p, 0.0
            )
            side = argmax_side(vo, v_curr)
            chosen = vo.right if side is Side.R else vo.left
            planes.append(HalfPlane(chosen.normal, chosen.anchor, f"G{g}:{side.value}"))

        v_star = solve_projection(planes, v_ref)
        feasible = True
    except (AlreadyInConflict, Infeasible):
        v_star = ZERO
        feasible = False

    v_next = limit_acceleration(v_curr, v_star, params.d_max)
    active = tuple(
        h.tag for h in planes if not h.tag.startswith("speed:") or abs(h.margin(v_star)) <= 1e-6
    ) if feasible else tuple(h.tag for h in planes if not h.tag.startswith("speed:"))
    return PlanOutcome(
        v_ref=v_ref,
        v_star=v_star,
        v_next=v_next,
        feasible=feasible,
        active_constraints=active,
        solve_time=time.perf_counter() - t0,
        encounters=tuple(encounters),
    )
