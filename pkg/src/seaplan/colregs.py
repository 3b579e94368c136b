"""Encounter classification (Rules 13-15) and VO side selection."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .geometry import Vec2
from .velocity_obstacle import VelocityObstacleRegion
from .vessel import VesselState


class EncounterKind(str, enum.Enum):
    HEAD_ON = "HeadOn"
    CROSSING_GIVE_WAY = "CrossingGiveWay"
    CROSSING_STAND_ON = "CrossingStandOn"
    OVERTAKING = "Overtaking"
    OVERTAKEN = "Overtaken"
    NO_RULE = "NoRule"


class Side(str, enum.Enum):
    L = "L"
    R = "R"


STARBOARD_KINDS = frozenset({EncounterKind.HEAD_ON, EncounterKind.CROSSING_GIVE_WAY, EncounterKind.OVERTAKING})


@dataclass(frozen=True, slots=True)
class ColregsConfig:
    headon_band_deg: float = 5.0
    headon_bearing_deg: float = 22.5
    crossing_min_deg: float = 5.0
    beam_limit_deg: float = 112.5
    overtaking_bearing_deg: float = 67.5
    overtaking_heading_deg: float = 22.5


@dataclass(frozen=True, slots=True)
class SideSelection:
    side: Side
    reason: EncounterKind


def wrap_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    a = angle % 360.0
    return a - 360.0 if a > 180.0 else a


def relative_bearing(ego: VesselState, target: VesselState) -> float:
    return wrap_deg((target.position - ego.position).bearing_deg() - ego.heading)


def classify(ego: VesselState, target: VesselState, cfg: ColregsConfig = ColregsConfig()) -> EncounterKind:
    beta = relative_bearing(ego, target)
    dh = wrap_deg(target.heading - ego.heading)
    abs_beta = abs(beta)

    if abs_beta <= cfg.headon_bearing_deg and 180.0 - abs(dh) <= cfg.headon_band_deg:
        return EncounterKind.HEAD_ON
    if abs_beta <= cfg.overtaking_bearing_deg and abs(dh) <= cfg.overtaking_heading_deg and ego.speed > target.speed:
        return EncounterKind.OVERTAKING
    if cfg.crossing_min_deg < beta <= cfg.beam_limit_deg:
        return EncounterKind.CROSSING_GIVE_WAY
    if -cfg.beam_limit_deg <= beta < -cfg.crossing_min_deg:
        return EncounterKind.CROSSING_STAND_ON
    if abs_beta > cfg.beam_limit_deg and target.speed > ego.speed:
        return EncounterKind.OVERTAKEN
    return EncounterKind.NO_RULE


def select_side(kind: EncounterKind, vo: VelocityObstacleRegion, v_curr: Vec2) -> SideSelection:
    if kind in STARBOARD_KINDS:
        return SideSelection(Side.R, kind)
    return SideSelection(argmax_side(vo, v_curr), kind)


def argmax_side(vo: VelocityObstacleRegion, v_curr: Vec2) -> Side:
    """Side whose half-plane the current velocity violates least; ties go to R."""
    margin_r = vo.right.margin(v_curr)
    margin_l = vo.left.margin(v_curr)
    return Side.L if margin_l > margin_r else Side.R
