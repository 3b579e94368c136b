"""Fixed-step kinematic simulation of a planner-driven ego among constant-velocity targets."""

from __future__ import annotations

import csv
import gc
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circle_cover import CoverConfig, convexify
from .colregs import ColregsConfig
from .geometry import Disc, Polygon, Vec2, polygon_contains_many
from .risk import RiskThresholds
from .safe_velocity import PlannerParams, plan_step
from .velocity_obstacle import UncertaintyBounds
from .vessel import VesselState

__all__ = [
    "Metrics",
    "Scenario",
    "ScenarioInvalid",
    "StepRecord",
    "TrajectoryLog",
    "VesselState",
    "check_collision_free",
    "compute_metrics",
    "run",
    "step",
    "write_csv",
]


class ScenarioInvalid(Exception):
    """The scenario cannot be simulated as given."""


@dataclass(frozen=True)
class Scenario:
    ego: VesselState
    goal: Vec2
    targets: tuple[VesselState, ...] = ()
    regions: tuple[Polygon, ...] = ()
    # precomputed cover circles for all regions; None means convexify on demand
    circles: tuple[Disc, ...] | None = None
    dt: float = 0.1
    horizon: float = 1000.0
    planner: PlannerParams = PlannerParams()
    risk: RiskThresholds = RiskThresholds()
    uncertainty: UncertaintyBounds = UncertaintyBounds()
    colregs: ColregsConfig = ColregsConfig()
    cover_config: CoverConfig = CoverConfig()
    grounding_eps_p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ScenarioInvalid("dt must be positive")
        if not self.horizon > 0:
            raise ScenarioInvalid("horizon must be positive")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ScenarioInvalid(f"horizon {self.horizon} is not a whole number of {self.dt} s steps")
        ids = [self.ego.id] + [t.id for t in self.targets]
        if len(set(ids)) != len(ids):
            raise ScenarioInvalid("vessel ids must be unique")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class StepRecord:
    t: float
    ego: VesselState
    targets: tuple[VesselState, ...]
    v_ref: Vec2
    v_star: Vec2
    v_next: Vec2
    feasible: bool
    active_constraints: tuple[str, ...]
    qp_solve_time: float
    encounters: tuple = ()


@dataclass
class TrajectoryLog:
    """Per-step records (state before the step plus that step's plan) and the final state."""

    dt: float
    goal: Vec2
    regions: tuple[Polygon, ...]
    records: list[StepRecord] = field(default_factory=list)
    final_ego: VesselState | None = None
    final_targets: tuple[VesselState, ...] = ()
    goal_reached: bool = False
    goal_time: float | None = None

    @property
    def target_ids(self) -> list[str]:
        src = self.records[0].targets if self.records else self.final_targets
        return [t.id for t in src]

    def ego_positions(self) -> np.ndarray:
        pts = [r.ego.position for r in self.records]
        if self.final_ego is not None:
            pts.append(self.final_ego.position)
        return np.array([[p.n, p.e] for p in pts]).reshape(-1, 2)

    def target_positions(self, idx: int) -> np.ndarray:
        pts = [r.targets[idx].position for r in self.records]
        if self.final_ego is not None:
            pts.append(self.final_targets[idx].position)
        return np.array([[p.n, p.e] for p in pts]).reshape(-1, 2)


@dataclass(frozen=True)
class Metrics:
    min_separation: float  # +inf without targets
    path_length: float
    goal_reached: bool
    goal_time: float | None
    mean_qp_solve_time: float
    max_qp_solve_time: float
    grounding_violations: int
    colregs_events: tuple[tuple[float, str, str, str], ...]
    steps: int

    def to_dict(self, with_timing: bool = True) -> dict:
        return {
            "min_separation_m": None if math.isinf(self.min_separation) else self.min_separation,
            "path_length_m": self.path_length,
            "goal_reached": self.goal_reached,
            "goal_time_s": self.goal_time,
            "mean_qp_solve_time_s": self.mean_qp_solve_time if with_timing else None,
            "max_qp_solve_time_s": self.max_qp_solve_time if with_timing else None,
            "grounding_violations": self.grounding_violations,
            "colregs_events": [{"t_s": t, "target": tid, "kind": k, "side": s} for t, tid, k, s in self.colregs_events],
            "steps": self.steps,
        }


def step(ego: VesselState, targets: Sequence[VesselState], v_next: Vec2, dt: float):
    """Advance one explicit Euler step; the ego takes ``v_next`` first, targets keep theirs."""
    ego = ego.with_velocity(v_next).advanced(dt)
    return ego, tuple(t.advanced(dt) for t in targets)


def _circles_for(scn: Scenario) -> tuple[Disc, ...]:
    if scn.circles is not None:
        return scn.circles
    out: list[Disc] = []
    for poly in scn.regions:
        out.extend(convexify(poly, scn.cover_config).circles)
    return tuple(out)


def run(scn: Scenario) -> tuple[TrajectoryLog, Metrics]:
    # the control loop allocates no reference cycles; pausing the cyclic
    # collector keeps its pauses out of the per-step latency figures
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        log = _simulate(scn)
    finally:
        if was_enabled:
            gc.enable()
    return log, compute_metrics(log)


def _simulate(scn: Scenario) -> TrajectoryLog:
    circles = _circles_for(scn)
    ego = scn.ego
    targets = tuple(scn.targets)
    for t in targets:
        gap = (t.position - ego.position).norm()
        if gap <= ego.radius + t.radius + scn.uncertainty.eps_p:
            raise ScenarioInvalid(f"ego already in conflict with {t.id} at t=0 (distance {gap:.1f} m)")
    for c in circles:
        if (ego.position - c.center).norm() <= c.radius + ego.radius + scn.grounding_eps_p:
            raise ScenarioInvalid("ego starts inside an inflated shallow-water circle")

    log = TrajectoryLog(dt=scn.dt, goal=scn.goal, regions=tuple(scn.regions))
    tagged = [(t, scn.uncertainty) for t in targets]
    for k in range(scn.n_steps):
        if (ego.position - scn.goal).norm() <= scn.planner.goal_radius:
            log.goal_reached = True
            log.goal_time = round(k * scn.dt, 9)
            break
        plan = plan_step(
            ego, tagged, circles, scn.goal, scn.planner, scn.risk, scn.colregs, scn.grounding_eps_p
        )
        log.records.append(
            StepRecord(
                t=round(k * scn.dt, 9),
                ego=ego,
                targets=targets,
                v_ref=plan.v_ref,
                v_star=plan.v_star,
                v_next=plan.v_next,
                feasible=plan.feasible,
                active_constraints=plan.active_constraints,
                qp_solve_time=plan.solve_time,
                encounters=plan.encounters,
            )
        )
        ego, targets = step(ego, targets, plan.v_next, scn.dt)
        tagged = [(t, scn.uncertainty) for t in targets]
    else:
        if (ego.position - scn.goal).norm() <= scn.planner.goal_radius:
            log.goal_reached = True
            log.goal_time = round(scn.n_steps * scn.dt, 9)
    log.final_ego = ego
    log.final_targets = targets
    return log


def compute_metrics(log: TrajectoryLog) -> Metrics:
    min_sep = math.inf
    path = 0.0
    times = []
    events = []
    last_seen: dict[str, tuple[str, str]] = {}
    for r in log.records:
        for t in r.targets:
            min_sep = min(min_sep, (t.position - r.ego.position).norm())
        path += r.v_next.norm() * log.dt
        times.append(r.qp_solve_time)
        for enc in r.encounters:
            key = (enc.kind.value, enc.side.value)
            if last_seen.get(enc.target_id) != key:
                events.append((r.t, enc.target_id, *key))
                last_seen[enc.target_id] = key
    if log.final_ego is not None:
        for t in log.final_targets:
            min_sep = min(min_sep, (t.position - log.final_ego.position).norm())
    return Metrics(
        min_separation=min_sep,
        path_length=path,
        goal_reached=log.goal_reached,
        goal_time=log.goal_time,
        mean_qp_solve_time=float(np.mean(times)) if times else 0.0,
        max_qp_solve_time=float(np.max(times)) if times else 0.0,
        grounding_violations=grounding_violations(log),
        colregs_events=tuple(events),
        steps=len(log.records),
    )


def grounding_violations(log: TrajectoryLog) -> int:
    """Number of logged ego positions inside (or on) an original shallow polygon."""
    pts = log.ego_positions()
    if not len(pts) or not log.regions:
        return 0
    inside = np.zeros(len(pts), dtype=bool)
    for poly in log.regions:
        inside |= polygon_contains_many(poly, pts)
    return int(inside.sum())


def _segment_min_distance(d0: np.ndarray, d1: np.ndarray) -> np.ndarray:
    """Closest approach to the origin of each segment d0 -> d1 (rows)."""
    seg = d1 - d0
    L2 = np.einsum("ij,ij->i", seg, seg)
    s = np.where(L2 > 0, -np.einsum("ij,ij->i", d0, seg) / np.where(L2 > 0, L2, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = d0 + s[:, None] * seg
    return np.hypot(closest[:, 0], closest[:, 1])


def _path_touches_polygon(path: np.ndarray, poly: Polygon) -> bool:
    if polygon_contains_many(poly, path).any():
        return True
    if len(path) < 2:
        return False
    verts = poly.as_array()
    a0, a1 = path[:-1], path[1:]
    b0, b1 = verts, np.roll(verts, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    # every path segment against every polygon edge
    P0, P1 = a0[:, None, :], a1[:, None, :]
    Q0, Q1 = b0[None, :, :], b1[None, :, :]
    o1 = orient(P0, P1, Q0)
    o2 = orient(P0, P1, Q1)
    o3 = orient(Q0, Q1, P0)
    o4 = orient(Q0, Q1, P1)
    # endpoints inside were handled above, so collinear touching reduces to <= 0 products
    return bool(np.any((o1 * o2 <= 0) & (o3 * o4 <= 0)))


def check_collision_free(
    log: TrajectoryLog,
    combined_radius_fn: Callable[[str], float] | None = None,
    regions: Sequence[Polygon] | None = None,
) -> bool:
    """Audit a log: vessels keep strictly apart and the ego never enters a shallow polygon.

    Separation is checked over each whole step, not only at logged instants,
    since both vessels move linearly within a step. ``combined_radius_fn``
    maps a target id to the required center distance (default: sum of radii).
    """
    ego_path = log.ego_positions()
    if not len(ego_path):
        return True
    ego_radius = (log.records[0].ego if log.records else log.final_ego).radius
    targets0 = log.records[0].targets if log.records else log.final_targets
    for idx, t in enumerate(targets0):
        limit = combined_radius_fn(t.id) if combined_radius_fn else ego_radius + t.radius
        rel = log.target_positions(idx) - ego_path
        if len(rel) == 1:
            dist = np.hypot(rel[:, 0], rel[:, 1])
        else:
            dist = _segment_min_distance(rel[:-1], rel[1:])
        if np.any(dist <= limit):
            return False
    polys = log.regions if regions is None else regions
    return not any(_path_touches_polygon(ego_path, poly) for poly in polys)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_csv(log: TrajectoryLog, stream=None, with_timing: bool = False) -> str:
    """Trajectory CSV with a fixed column order; ``qp_ms`` stays blank unless timing is requested."""
    buf = io.StringIO() if stream is None else stream
    writer = csv.writer(buf, lineterminator="\n")
    ids = log.target_ids
    header = ["t", "ego_n", "ego_e", "ego_vn", "ego_ve"]
    for tid in ids:
        header += [f"{tid}_n", f"{tid}_e"]
    header += ["feasible", "qp_ms", "tags"]
    writer.writerow(header)
    for r in log.records:
        row = [_fmt(r.t), _fmt(r.ego.position.n), _fmt(r.ego.position.e), _fmt(r.v_next.n), _fmt(r.v_next.e)]
        for t in r.targets:
            row += [_fmt(t.position.n), _fmt(t.position.e)]
        row += [
            "1" if r.feasible else "0",
            f"{r.qp_solve_time * 1e3:.4f}" if with_timing else "",
            ";".join(r.active_constraints),
        ]
        writer.writerow(row)
    if log.final_ego is not None:
        t_end = round(len(log.records) * log.dt, 9)
        e = log.final_ego
        row = [_fmt(t_end), _fmt(e.position.n), _fmt(e.position.e), _fmt(e.velocity.n), _fmt(e.velocity.e)]
        for t in log.final_targets:
            row += [_fmt(t.position.n), _fmt(t.position.e)]
        row += ["", "", ""]
        writer.writerow(row)
    return buf.getvalue() if stream is None else ""
