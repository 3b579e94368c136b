import json

import pytest

from seaplan import scenario_io
from seaplan.circle_cover import CoverConfig
from seaplan.geometry import Vec2
from seaplan.scenario_io import SchemaError
from seaplan.scenarios import case_a
from seaplan.simulator import Scenario
from seaplan.vessel import VesselState

SQUARE = [[0, 0], [300, 0], [300, 300], [0, 300]]


def minimal_doc(**extra):
    doc = {
        "ego": {"id": "ego", "position_ne": [0, 0], "heading_deg": 0, "speed_mps": 10},
        "goal_ne": [7000, 0],
        "targets": [{"id": "V1", "position_ne": [6000, 0], "heading_deg": 180, "speed_mps": 10}],
        "dt_s": 0.1,
        "horizon_s": 1000,
    }
    doc.update(extra)
    return doc


def test_minimal_document_uses_defaults():
    scn = scenario_io.scenario_from_dict(minimal_doc())
    assert scn.ego.radius == 250.0
    assert scn.targets[0].velocity.n == pytest.approx(-10.0)
    assert scn.uncertainty.eps_p == 50.0 and scn.uncertainty.eps_v == 0.5
    assert scn.risk.tcpa_max == 600.0 and scn.risk.dcpa_max == 1000.0
    assert scn.planner.v_max == 12.0
    assert scn.circles == ()


def test_round_trip_preserves_scenario():
    scn, covers = case_a()
    docs = [scenario_io.cover_to_dict(c, p) for c, p in zip(covers, scn.regions)]
    doc = scenario_io.scenario_to_dict(scn, covers=docs, name="case_a")
    scenario_io.validate(doc, "scenario")
    text = scenario_io.dumps(doc)
    back = scenario_io.scenario_from_dict(json.loads(text))
    assert back == scn
    assert scenario_io.dumps(scenario_io.scenario_to_dict(back, covers=docs, name="case_a")) == text


def test_region_without_cover_is_convexified():
    doc = minimal_doc(regions=[{"polygon_ne": [[p[0] + 2000, p[1] - 1500] for p in SQUARE]}])
    scn = scenario_io.scenario_from_dict(doc)
    assert len(scn.regions) == 1 and len(scn.circles) >= 1


def test_cover_file_reference(tmp_path):
    poly = [[p[0] + 2000, p[1] - 1500] for p in SQUARE]
    cover = {
        "region_ne": poly,
        "circles": [{"center_ne": [2150, -1350], "radius_m": 300}],
        "spill_ratio": 2.14,
        "solver": {"total_cost": 12.0, "proven_optimal": True, "timed_out": False, "iterations": 1},
    }
    (tmp_path / "c.json").write_text(json.dumps(cover))
    scn = scenario_io.scenario_from_dict(minimal_doc(cover_file="c.json"), base_dir=tmp_path)
    assert scn.circles[0].center == Vec2(2150, -1350)
    assert scn.regions[0].to_pairs() == [list(map(float, p)) for p in poly]


def test_cover_file_without_region_is_rejected(tmp_path):
    cover = {
        "circles": [{"center_ne": [0, 0], "radius_m": 300}],
        "spill_ratio": 0.0,
        "solver": {"total_cost": 1.0, "proven_optimal": True, "timed_out": False, "iterations": 1},
    }
    (tmp_path / "c.json").write_text(json.dumps(cover))
    with pytest.raises(SchemaError, match="region_ne"):
        scenario_io.scenario_from_dict(minimal_doc(cover_file=["c.json"]), base_dir=tmp_path)


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d["ego"].__setitem__("position_ne", [0, "x"]), "$.ego.position_ne[1]"),
        (lambda d: d.pop("dt_s"), "'dt_s' is a required property"),
        (lambda d: d["targets"][0].__setitem__("speed_mps", -1), "$.targets[0].speed_mps"),
        (lambda d: d.__setitem__("uncertainty", {"eps_p_m": -5}), "$.uncertainty.eps_p_m"),
        (lambda d: d.__setitem__("extra", 1), "extra"),
    ],
)
def test_errors_name_the_field(mutate, where):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(SchemaError) as exc:
        scenario_io.scenario_from_dict(doc)
    assert where in str(exc.value)
    assert str(exc.value).startswith("scenario: ")


def test_regions_and_cover_file_are_exclusive():
    doc = minimal_doc(regions=[{"polygon_ne": SQUARE}], cover_file="x.json")
    with pytest.raises(SchemaError):
        scenario_io.validate(doc, "scenario")


def test_domain_errors_become_schema_errors():
    doc = minimal_doc(planner={"d_max_mps": 50.0})
    with pytest.raises(SchemaError, match="d_max"):
        scenario_io.scenario_from_dict(doc)
    with pytest.raises(SchemaError, match="polygon_ne"):
        scenario_io.region_from_dict({"polygon_ne": [[0, 0], [1, 1], [2, 2]]})


def test_cover_config_round_trip():
    cfg = CoverConfig(fine_res=20, coarse_res=40, radii=(100.0, 200.0), alpha=5, beta=0.2, margin=300)
    assert scenario_io.cover_config_from_dict(scenario_io.cover_config_to_dict(cfg)) == cfg
    assert scenario_io.cover_config_from_dict({}) == CoverConfig()
    with pytest.raises(SchemaError):
        scenario_io.cover_config_from_dict({"fine_res_m": 50, "coarse_res_m": 25})


def test_vessel_round_trip():
    v = VesselState.from_heading("T9", Vec2(1.5, -2.5), 37.0, 4.25, 120.0)
    assert scenario_io.vessel_from_dict(scenario_io.vessel_to_dict(v)) == v


def test_dumps_refuses_nan():
    with pytest.raises(ValueError):
        scenario_io.dumps({"x": float("nan")})


def test_scenario_equality_independent_of_json_ints():
    a = scenario_io.scenario_from_dict(minimal_doc())
    b = Scenario(
        ego=VesselState.from_heading("ego", Vec2(0, 0), 0.0, 10.0),
        goal=Vec2(7000, 0),
        targets=(VesselState.from_heading("V1", Vec2(6000, 0), 180.0, 10.0),),
        circles=(),
    )
    assert a == b
