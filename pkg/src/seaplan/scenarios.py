"""The two bundled encounter configurations, with seeded shallow-water regions."""

from __future__ import annotations

from dataclasses import replace

from .circle_cover import CoverConfig, convexify, generate_region
from .geometry import Polygon, Vec2
from .simulator import Scenario
from .vessel import VesselState

EGO_START = Vec2(0.0, 0.0)
GOAL = Vec2(7000.0, 0.0)

# (seed, r0, center); regions sit on the port side of the nominal track so the
# starboard manoeuvres stay open while grounding constraints still activate
CASE_A_REGIONS = ((11, 450.0, Vec2(3000.0, -1300.0)),)
CASE_B_REGIONS = (
    (21, 400.0, Vec2(1800.0, -1300.0)),
    (22, 350.0, Vec2(4300.0, -1500.0)),
    (23, 400.0, Vec2(6200.0, -1500.0)),
)


def default_ego() -> VesselState:
    return VesselState.from_heading("ego", EGO_START, 0.0, 10.0)


def regions_for(specs) -> tuple[Polygon, ...]:
    return tuple(generate_region(seed, r0, center=center) for seed, r0, center in specs)


def _with_covers(scn: Scenario, cfg: CoverConfig) -> tuple[Scenario, list]:
    covers = [convexify(poly, cfg) for poly in scn.regions]
    circles = tuple(c for cover in covers for c in cover.circles)
    return replace(scn, circles=circles), covers


def case_a(cover_config: CoverConfig = CoverConfig()) -> tuple[Scenario, list]:
    """Single head-on encounter; returns the scenario and one cover per region."""
    scn = Scenario(
        ego=default_ego(),
        goal=GOAL,
        targets=(VesselState.from_heading("V1", Vec2(6000.0, 0.0), 180.0, 10.0),),
        regions=regions_for(CASE_A_REGIONS),
        cover_config=cover_config,
    )
    return _with_covers(scn, cover_config)


def case_b(cover_config: CoverConfig = CoverConfig()) -> tuple[Scenario, list]:
    """Head-on plus starboard crossing; returns the scenario and one cover per region."""
    scn = Scenario(
        ego=default_ego(),
        goal=GOAL,
        targets=(
            VesselState.from_heading("V1", Vec2(3500.0, 2500.0), 270.0, 10.0),
            VesselState.from_heading("V2", Vec2(6000.0, 0.0), 180.0, 10.0),
        ),
        regions=regions_for(CASE_B_REGIONS),
        cover_config=cover_config,
    )
    return _with_covers(scn, cover_config)


CASES = {"case_a": case_a, "case_b": case_b}
