"""JSON documents: schema validation and conversion to and from domain objects."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

from .circle_cover import CircleCover, CoverConfig, convexify
from .colregs import ColregsConfig
from .geometry import Disc, Polygon, Vec2
from .risk import RiskThresholds
from .safe_velocity import PlannerParams
from .simulator import Scenario
from .velocity_obstacle import UncertaintyBounds
from .vessel import VesselState

SCHEMA_NAMES = ("scenario", "cover", "cover_config", "region", "metrics")


class SchemaError(ValueError):
    """A document does not match its schema; the message names the offending field."""


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("seaplan.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    pairs = [(f"{n}.schema.json", Resource.from_contents(load_schema(n))) for n in SCHEMA_NAMES]
    return Registry().with_resources(pairs)


def _where(path) -> str:
    parts = [f"[{p}]" if isinstance(p, int) else f".{p}" for p in path]
    return "$" + "".join(parts)


def validate(doc, name: str) -> None:
    """Raise SchemaError with a path-qualified message for the first violation."""
    validator = jsonschema.Draft202012Validator(load_schema(name), registry=_registry())
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if err is not None:
        raise SchemaError(f"{name}: {_where(err.absolute_path)}: {err.message}")


def read_json(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


# vessels and geometry


def vessel_to_dict(v: VesselState) -> dict:
    return {
        "id": v.id,
        "position_ne": v.position.to_list(),
        "heading_deg": v.heading,
        "speed_mps": v.speed,
        "radius_m": v.radius,
    }


def vessel_from_dict(d: dict) -> VesselState:
    return VesselState.from_heading(
        d["id"], Vec2(*map(float, d["position_ne"])), float(d["heading_deg"]), float(d["speed_mps"]),
        float(d.get("radius_m", 250.0)),
    )


def polygon_from_pairs(pairs, where: str) -> Polygon:
    try:
        return Polygon.from_pairs(pairs)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def region_from_dict(d: dict) -> Polygon:
    validate(d, "region")
    return polygon_from_pairs(d["polygon_ne"], "region: $.polygon_ne")


def region_to_dict(poly: Polygon) -> dict:
    return {"polygon_ne": poly.to_pairs()}


# covers


def cover_config_from_dict(d: dict | None) -> CoverConfig:
    d = d or {}
    validate(d, "cover_config")
    base = CoverConfig()
    try:
        return CoverConfig(
            fine_res=float(d.get("fine_res_m", base.fine_res)),
            coarse_res=float(d.get("coarse_res_m", base.coarse_res)),
            radii=tuple(float(r) for r in d.get("radii_m", base.radii)),
            alpha=float(d.get("alpha", base.alpha)),
            beta=float(d.get("beta", base.beta)),
            margin=float(d["margin_m"]) if "margin_m" in d else None,
        )
    except ValueError as exc:
        raise SchemaError(f"cover_config: {exc}") from exc


def cover_config_to_dict(cfg: CoverConfig) -> dict:
    out = {
        "fine_res_m": cfg.fine_res,
        "coarse_res_m": cfg.coarse_res,
        "radii_m": list(cfg.radii),
        "alpha": cfg.alpha,
        "beta": cfg.beta,
    }
    if cfg.margin is not None:
        out["margin_m"] = cfg.margin
    return out


def cover_to_dict(cover: CircleCover, region: Polygon | None = None) -> dict:
    out = {}
    if region is not None:
        out["region_ne"] = region.to_pairs()
    out.update(cover.to_dict())
    return out


def circles_from_dict(d: dict) -> tuple[Disc, ...]:
    validate(d, "cover")
    return tuple(Disc(Vec2(*map(float, c["center_ne"])), float(c["radius_m"])) for c in d["circles"])


# scenarios


def scenario_to_dict(scn: Scenario, covers: list[dict] | None = None, name: str | None = None) -> dict:
    """Serialize a scenario; ``covers`` (one cover dict per region) are embedded when given."""
    p, r, u, c = scn.planner, scn.risk, scn.uncertainty, scn.colregs
    doc: dict = {}
    if name is not None:
        doc["name"] = name
    doc.update(
        {
            "ego": vessel_to_dict(scn.ego),
            "goal_ne": scn.goal.to_list(),
            "targets": [vessel_to_dict(t) for t in scn.targets],
            "regions": [],
            "dt_s": scn.dt,
            "horizon_s": scn.horizon,
            "planner": {
                "v_max_mps": p.v_max,
                "n_poly": p.n_poly,
                "d_max_mps": p.d_max,
                "cruise_speed_mps": p.cruise_speed,
                "v_ref_policy": p.v_ref_policy,
                "goal_radius_m": p.goal_radius,
            },
            "risk": {"tcpa_max_s": r.tcpa_max, "dcpa_max_m": r.dcpa_max},
            "uncertainty": {"eps_p_m": u.eps_p, "eps_v_mps": u.eps_v},
            "colregs": {
                "headon_band_deg": c.headon_band_deg,
                "headon_bearing_deg": c.headon_bearing_deg,
                "crossing_min_deg": c.crossing_min_deg,
                "beam_limit_deg": c.beam_limit_deg,
                "overtaking_bearing_deg": c.overtaking_bearing_deg,
                "overtaking_heading_deg": c.overtaking_heading_deg,
            },
            "cover_config": cover_config_to_dict(scn.cover_config),
            "grounding_eps_p_m": scn.grounding_eps_p,
            "seed": scn.seed,
        }
    )
    for i, poly in enumerate(scn.regions):
        entry = {"polygon_ne": poly.to_pairs()}
        if covers is not None:
            entry["cover"] = {k: v for k, v in covers[i].items() if k != "region_ne"}
        doc["regions"].append(entry)
    return doc


def scenario_from_dict(doc: dict, base_dir: Path | str = ".") -> Scenario:
    """Build a Scenario; regions without an embedded cover are convexified here."""
    validate(doc, "scenario")
    cover_cfg = cover_config_from_dict(doc.get("cover_config"))
    regions: list[Polygon] = []
    circles: list[Disc] = []
    for i, entry in enumerate(doc.get("regions", [])):
        poly = polygon_from_pairs(entry["polygon_ne"], f"scenario: $.regions[{i}].polygon_ne")
        regions.append(poly)
        if "cover" in entry:
            circles.extend(circles_from_dict(entry["cover"]))
        else:
            circles.extend(convexify(poly, cover_cfg).circles)
    files = doc.get("cover_file", [])
    for i, name in enumerate([files] if isinstance(files, str) else files):
        path = Path(base_dir) / name
        try:
            cover = read_json(path)
        except OSError as exc:
            raise SchemaError(f"scenario: $.cover_file: cannot read {path}: {exc.strerror}") from exc
        circles.extend(circles_from_dict(cover))
        if "region_ne" not in cover:
            raise SchemaError(f"scenario: $.cover_file: {path} carries no region_ne polygon")
        regions.append(polygon_from_pairs(cover["region_ne"], f"{path}: $.region_ne"))

    p = doc.get("planner", {})
    base_p = PlannerParams()
    r = doc.get("risk", {})
    u = doc.get("uncertainty", {})
    c = doc.get("colregs", {})
    base_c = ColregsConfig()
    try:
        return Scenario(
            ego=vessel_from_dict(doc["ego"]),
            goal=Vec2(*map(float, doc["goal_ne"])),
            targets=tuple(vessel_from_dict(t) for t in doc["targets"]),
            regions=tuple(regions),
            circles=tuple(circles),
            dt=float(doc["dt_s"]),
            horizon=float(doc["horizon_s"]),
            planner=PlannerParams(
                v_max=float(p.get("v_max_mps", base_p.v_max)),
                n_poly=int(p.get("n_poly", base_p.n_poly)),
                d_max=float(p.get("d_max_mps", base_p.d_max)),
                cruise_speed=float(p.get("cruise_speed_mps", base_p.cruise_speed)),
                v_ref_policy=p.get("v_ref_policy", base_p.v_ref_policy),
                goal_radius=float(p.get("goal_radius_m", base_p.goal_radius)),
            ),
            risk=RiskThresholds(float(r.get("tcpa_max_s", 600.0)), float(r.get("dcpa_max_m", 1000.0))),
            uncertainty=UncertaintyBounds(float(u.get("eps_p_m", 50.0)), float(u.get("eps_v_mps", 0.5))),
            colregs=ColregsConfig(**{k: float(c.get(k, getattr(base_c, k))) for k in c}),
            cover_config=cover_cfg,
            grounding_eps_p=float(doc.get("grounding_eps_p_m", 0.0)),
            seed=int(doc.get("seed", 0)),
        )
    except ValueError as exc:
        # invariant violations inside the domain types (radius, d_max, ...)
        raise SchemaError(f"scenario: {exc}") from exc
