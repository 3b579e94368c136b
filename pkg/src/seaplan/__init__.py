"""Velocity-space motion planning for surface vessels: collision, COLREGs and grounding constraints."""

from .geometry import Disc, HalfPlane, Polygon, Vec2
from .vessel import VesselState

__all__ = ["Disc", "HalfPlane", "Polygon", "Vec2", "VesselState"]
__version__ = "0.1.0"
