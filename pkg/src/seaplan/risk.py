"""Closest-point-of-approach risk gate."""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Vec2

DEGENERATE_SPEED = 1e-6


@dataclass(frozen=True, slots=True)
class RelativeKinematics:
    p_ab: Vec2  # target position minus ego position
    v_ab: Vec2  # ego velocity minus target velocity

    @classmethod
    def between(cls, p_a: Vec2, v_a: Vec2, p_b: Vec2, v_b: Vec2) -> RelativeKinematics:
        return cls(p_b - p_a, v_a - v_b)


@dataclass(frozen=True, slots=True)
class RiskThresholds:
    tcpa_max: float = 600.0
    dcpa_max: float = 1000.0

    def __post_init__(self):
        if not (self.tcpa_max > 0 and self.dcpa_max > 0):
            raise ValueError("risk thresholds must be positive")


def tcpa(rk: RelativeKinematics) -> float:
    """Time minimizing ||p_ab - v_ab t||; negative when the vessels diverge."""
    vv = rk.v_ab.dot(rk.v_ab)
    if vv < DEGENERATE_SPEED * DEGENERATE_SPEED:
        return 0.0
    return rk.p_ab.dot(rk.v_ab) / vv


def dcpa(rk: RelativeKinematics) -> float:
    t = max(tcpa(rk), 0.0)
    return (rk.p_ab - rk.v_ab * t).norm()


def is_active_threat(rk: RelativeKinematics, th: RiskThresholds) -> bool:
    """Whether the target must contribute a constraint this step.

    A target already inside the DCPA threshold is always active, regardless
    of where the closest approach lies in time.
    """
    if rk.p_ab.norm() <= th.dcpa_max:
        return True
    t = tcpa(rk)
    return 0.0 <= t <= th.tcpa_max and dcpa(rk) <= th.dcpa_max
