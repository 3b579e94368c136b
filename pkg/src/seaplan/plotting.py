"""Deterministic SVG rendering of trajectory logs, shallow regions and circle covers."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

PALETTE = ("#1f4e9c", "#c0392b", "#27834a", "#8e44ad", "#d35400", "#16a085")


class LogFormatError(ValueError):
    """The trajectory CSV cannot be parsed."""


@dataclass
class TrajectoryTable:
    """Positions parsed back from a trajectory CSV, one (T, 2) array per vessel."""

    t: np.ndarray
    tracks: dict[str, np.ndarray] = field(default_factory=dict)


def read_log_csv(text: str) -> TrajectoryTable:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise LogFormatError("empty log: no header row")
    header = rows[0]
    if header[:5] != ["t", "ego_n", "ego_e", "ego_vn", "ego_ve"] or header[-3:] != ["feasible", "qp_ms", "tags"]:
        raise LogFormatError("unexpected header: expected t, ego_n, ego_e, ego_vn, ego_ve, ..., feasible, qp_ms, tags")
    middle = header[5:-3]
    if len(middle) % 2:
        raise LogFormatError("target columns must come in _n/_e pairs")
    ids = []
    for a, b in zip(middle[::2], middle[1::2]):
        if not (a.endswith("_n") and b.endswith("_e") and a[:-2] == b[:-2]):
            raise LogFormatError(f"bad target column pair {a!r}, {b!r}")
        ids.append(a[:-2])
    body = rows[1:]
    if not body:
        raise LogFormatError("empty log: header only")
    try:
        data = np.array([[float(x) for x in row[: len(header) - 3]] for row in body])
    except ValueError as exc:
        raise LogFormatError(f"non-numeric value: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(header) - 3:
        raise LogFormatError("rows have inconsistent lengths")
    table = TrajectoryTable(t=data[:, 0], tracks={"ego": data[:, 1:3]})
    for k, tid in enumerate(ids):
        table.tracks[tid] = data[:, 5 + 2 * k : 7 + 2 * k]
    return table


def _num(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def render_svg(
    table: TrajectoryTable,
    circles=(),
    regions=(),
    goal=None,
    width: int = 800,
    pad: int = 20,
) -> str:
    """SVG with North up: one polyline per vessel, polygons for regions, circles for the cover.

    ``circles`` holds ``(n, e, radius)`` triples and ``regions`` lists of
    ``(n, e)`` vertices. Start and goal markers are drawn as rect/path
    elements so that ``circle`` is reserved for cover circles.
    """
    pts = [trk for trk in table.tracks.values()]
    pts += [np.asarray(r, dtype=float) for r in regions]
    for n, e, r in circles:
        pts.append(np.array([[n - r, e - r], [n + r, e + r]]))
    if goal is not None:
        pts.append(np.array([goal], dtype=float))
    allp = np.vstack(pts)
    lo_n, lo_e = allp.min(axis=0)
    hi_n, hi_e = allp.max(axis=0)
    span = max(hi_n - lo_n, hi_e - lo_e, 1.0)
    scale = (width - 2 * pad) / span
    height = int(round((hi_n - lo_n) * scale)) + 2 * pad

    def xy(n, e):
        return _num(pad + (e - lo_e) * scale), _num(height - pad - (n - lo_n) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    out.append('<g id="regions">')
    for verts in regions:
        coords = " ".join(",".join(xy(n, e)) for n, e in verts)
        out.append(f'<polygon class="shallow" points="{coords}" fill="#e8d9a8" stroke="#8a7a3d" stroke-width="1"/>')
    out.append("</g>")
    out.append('<g id="cover">')
    for n, e, r in circles:
        cx, cy = xy(n, e)
        out.append(
            f'<circle class="cover" cx="{cx}" cy="{cy}" r="{_num(r * scale)}" '
            f'fill="none" stroke="#8a7a3d" stroke-dasharray="4 3"/>'
        )
    out.append("</g>")
    out.append('<g id="trajectories">')
    for k, (vid, trk) in enumerate(table.tracks.items()):
        coords = " ".join(",".join(xy(n, e)) for n, e in trk)
        color = PALETTE[k % len(PALETTE)]
        out.append(
            f'<polyline class="trajectory" data-vessel="{vid}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="2"/>'
        )
    out.append("</g>")
    out.append('<g id="markers">')
    for k, (vid, trk) in enumerate(table.tracks.items()):
        x, y = xy(*trk[0])
        out.append(
            f'<rect class="start" data-vessel="{vid}" x="{_num(float(x) - 4)}" y="{_num(float(y) - 4)}" '
            f'width="8" height="8" fill="{PALETTE[k % len(PALETTE)]}"/>'
        )
    if goal is not None:
        x, y = (float(v) for v in xy(*goal))
        d = f"M {_num(x - 6)} {_num(y - 6)} L {_num(x + 6)} {_num(y + 6)} M {_num(x - 6)} {_num(y + 6)} L {_num(x + 6)} {_num(y - 6)}"
        out.append(f'<path class="goal" d="{d}" stroke="#000000" stroke-width="2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
