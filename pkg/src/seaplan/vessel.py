from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import Vec2


@dataclass(frozen=True, slots=True)
class VesselState:
    id: str
    position: Vec2
    velocity: Vec2
    heading: float  # degrees clockwise from North
    speed: float
    radius: float = 250.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"vessel {self.id}: radius must be positive")
        expected = Vec2.from_heading(self.heading, self.speed)
        if (expected - self.velocity).norm() > 1e-6:
            raise ValueError(f"vessel {self.id}: velocity inconsistent with heading/speed")

    @classmethod
    def from_heading(cls, id: str, position: Vec2, heading: float, speed: float, radius: float = 250.0) -> VesselState:
        return cls(id, position, Vec2.from_heading(heading, speed), heading % 360.0, speed, radius)

    def with_velocity(self, velocity: Vec2) -> VesselState:
        """Same vessel with a new velocity; heading is kept when the vessel stops."""
        speed = velocity.norm()
        heading = self.heading if speed == 0.0 else math.degrees(math.atan2(velocity.e, velocity.n)) % 360.0
        return replace(self, velocity=velocity, heading=heading, speed=speed)

    def advanced(self, dt: float) -> VesselState:
        return replace(self, position=self.position + self.velocity * dt)
