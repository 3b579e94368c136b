"""``seaplan`` command line: convexify, simulate, plot, scenarios, report.

Exit codes: 0 success, 1 input/schema/I/O error, 2 uncoverable region,
3 time limit hit (incumbent written), 4 simulated run not collision-free.
Every flag may also come from an environment variable named
``SEAPLAN_<FLAG>`` (e.g. ``SEAPLAN_TIME_LIMIT``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import scenario_io
from .circle_cover import DegeneratePolygon, UncoverableRegion, convexify
from .plotting import LogFormatError, read_log_csv, render_svg
from .scenarios import CASES
from .simulator import ScenarioInvalid, check_collision_free, run, write_csv

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNCOVERABLE = 2
EXIT_TIMEOUT = 3
EXIT_UNSAFE = 4

ENV_PREFIX = "SEAPLAN_"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _env_name(flag: str) -> str:
    return ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper()


def _add(parser: argparse.ArgumentParser, flag: str, required: bool = False, **kw) -> None:
    """Add a flag whose default comes from the matching environment variable."""
    env = os.environ.get(_env_name(flag))
    if kw.get("action") == "store_true":
        if env is not None:
            kw["default"] = env.strip().lower() in ("1", "true", "yes", "on")
    elif kw.get("action") == "append":
        if env is not None:
            kw["default"] = [p for p in env.split(os.pathsep) if p]
    elif env is not None:
        kw["default"] = env
        required = False
    parser.add_argument(flag, required=required, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seaplan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convexify", help="cover a shallow-water polygon with circles")
    _add(p, "--region", required=True, help="region JSON with polygon_ne")
    _add(p, "--config", help="cover configuration JSON (defaults apply when omitted)")
    _add(p, "--out", required=True, help="output cover JSON")
    _add(p, "--time-limit", type=float, help="solver wall-clock limit in seconds")

    p = sub.add_parser("simulate", help="run a scenario and write trajectory.csv and metrics.json")
    _add(p, "--scenario", required=True)
    _add(p, "--out-dir", required=True)
    _add(p, "--with-timing", action="store_true", help="record wall-clock solve times (outputs become non-reproducible)")

    p = sub.add_parser("plot", help="render a trajectory log as SVG")
    _add(p, "--log", required=True)
    _add(p, "--cover", action="append", help="cover JSON; repeat for several regions")
    _add(p, "--scenario", help="scenario JSON supplying the goal marker and region outlines")
    _add(p, "--out", required=True)

    p = sub.add_parser("scenarios", help="emit the bundled encounter scenarios")
    _add(p, "--emit", required=True, help="output directory")

    p = sub.add_parser("report", help="tabulate metrics.json from one or more run directories")
    _add(p, "--runs", action="append", help="run directory or metrics.json; repeatable")
    _add(p, "--out", help="also write the table as JSON")
    return parser


def _load(path: str) -> object:
    try:
        return scenario_io.read_json(path)
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_INPUT, f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot write {path}: {exc.strerror}") from exc


def cmd_convexify(args) -> int:
    poly = scenario_io.region_from_dict(_load(args.region))
    cfg = scenario_io.cover_config_from_dict(_load(args.config) if args.config else {})
    time_limit = float(args.time_limit) if args.time_limit is not None else None
    try:
        cover = convexify(poly, cfg, time_limit=time_limit)
    except UncoverableRegion as exc:
        print(f"error: uncoverable region: {exc}", file=sys.stderr)
        return EXIT_UNCOVERABLE
    except DegeneratePolygon as exc:
        raise _Fail(EXIT_INPUT, f"region: $.polygon_ne: {exc}") from exc
    doc = scenario_io.cover_to_dict(cover, poly)
    scenario_io.validate(doc, "cover")
    _write(Path(args.out), scenario_io.dumps(doc))
    rep = cover.solver_report
    radii = ",".join(f"{c.radius:g}" for c in cover.circles)
    print(
        f"circles={len(cover.circles)} radii=[{radii}] cost={rep.total_cost:.3f} "
        f"spill_ratio={cover.spill_ratio:.4f} time={rep.solve_time:.2f}s proven_optimal={str(rep.proven_optimal).lower()}"
    )
    if rep.timed_out:
        print("warning: time limit reached; wrote best cover found", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_simulate(args) -> int:
    path = Path(args.scenario)
    doc = _load(str(path))
    try:
        scn = scenario_io.scenario_from_dict(doc, base_dir=path.parent)
        log, metrics = run(scn)
    except ScenarioInvalid as exc:
        raise _Fail(EXIT_INPUT, f"invalid scenario: {exc}") from exc
    safe = check_collision_free(log)
    out_dir = Path(args.out_dir)
    _write(out_dir / "trajectory.csv", write_csv(log, with_timing=args.with_timing))
    mdoc = metrics.to_dict(with_timing=args.with_timing)
    mdoc["collision_free"] = safe
    scenario_io.validate(mdoc, "metrics")
    _write(out_dir / "metrics.json", scenario_io.dumps(mdoc))
    sep = "inf" if mdoc["min_separation_m"] is None else f"{metrics.min_separation:.1f}m"
    print(
        f"goal_reached={str(metrics.goal_reached).lower()} steps={metrics.steps} min_sep={sep} "
        f"path={metrics.path_length:.1f}m grounding={metrics.grounding_violations} "
        f"collision_free={str(safe).lower()} qp_mean={metrics.mean_qp_solve_time * 1e3:.3f}ms "
        f"qp_max={metrics.max_qp_solve_time * 1e3:.3f}ms"
    )
    return EXIT_OK if safe else EXIT_UNSAFE


def cmd_plot(args) -> int:
    try:
        text = Path(args.log).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {args.log}: {exc.strerror}") from exc
    try:
        table = read_log_csv(text)
    except LogFormatError as exc:
        raise _Fail(EXIT_INPUT, f"{args.log}: {exc}") from exc
    circles, regions = [], []
    for cpath in args.cover or []:
        cdoc = _load(cpath)
        scenario_io.validate(cdoc, "cover")
        circles += [(c["center_ne"][0], c["center_ne"][1], c["radius_m"]) for c in cdoc["circles"]]
        if "region_ne" in cdoc:
            regions.append(cdoc["region_ne"])
    goal = None
    if args.scenario:
        sdoc = _load(args.scenario)
        scenario_io.validate(sdoc, "scenario")
        goal = tuple(sdoc["goal_ne"])
        known = {tuple(map(tuple, r)) for r in regions}
        for entry in sdoc.get("regions", []):
            if tuple(map(tuple, entry["polygon_ne"])) not in known:
                regions.append(entry["polygon_ne"])
    svg = render_svg(table, circles=circles, regions=regions, goal=goal)
    _write(Path(args.out), svg)
    print(f"wrote {args.out}: {len(table.tracks)} trajectories, {len(regions)} regions, {len(circles)} circles")
    return EXIT_OK


def cmd_scenarios(args) -> int:
    out = Path(args.emit)
    for name, build in CASES.items():
        scn, covers = build()
        cover_docs = [scenario_io.cover_to_dict(c, poly) for c, poly in zip(covers, scn.regions)]
        doc = scenario_io.scenario_to_dict(scn, covers=cover_docs, name=name)
        scenario_io.validate(doc, "scenario")
        _write(out / f"{name}.json", scenario_io.dumps(doc))
        print(f"wrote {out / (name + '.json')}: {len(scn.targets)} targets, {len(scn.regions)} regions, "
              f"{sum(len(c.circles) for c in covers)} circles")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = []
    for entry in args.runs or []:
        p = Path(entry)
        mpath = p / "metrics.json" if p.is_dir() else p
        doc = _load(str(mpath))
        scenario_io.validate(doc, "metrics")
        rows.append({"run": str(p), **{k: v for k, v in doc.items() if k != "colregs_events"},
                     "encounters": sorted({f"{e['target']}:{e['kind']}" for e in doc["colregs_events"]})})
    if not rows:
        raise _Fail(EXIT_INPUT, "report: no runs given (use --runs)")
    cols = ["run", "goal_reached", "min_separation_m", "path_length_m", "grounding_violations", "collision_free", "steps"]
    print("  ".join(cols))
    for r in rows:
        vals = []
        for c in cols:
            v = r[c]
            vals.append(f"{v:.1f}" if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else str(v))
        print("  ".join(vals))
    if args.out:
        _write(Path(args.out), scenario_io.dumps(rows))
    return EXIT_OK


COMMANDS = {
    "convexify": cmd_convexify,
    "simulate": cmd_simulate,
    "plot": cmd_plot,
    "scenarios": cmd_scenarios,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except scenario_io.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
