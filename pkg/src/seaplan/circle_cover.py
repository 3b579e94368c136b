"""Multi-radius circle covers of nonconvex shallow-water polygons.

Candidate circles sit on a coarse grid of centers with radii from a fixed
set. Interior samples of the polygon must be covered; exterior samples that
a circle reaches are charged to it, so each candidate's cost is
``alpha + beta * (exterior samples covered)`` and the selection is a plain
weighted set cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import Disc, Polygon, Vec2, is_simple, polygon_contains_many
from .ilp_solver import CoverSolution, SetCoverInstance, solve_bnb

DEFAULT_RADII = tuple(float(r) for r in range(100, 1300, 100))


class DegeneratePolygon(Exception):
    """No interior samples at the chosen resolution."""


class UncoverableRegion(Exception):
    """Some interior sample lies outside every candidate circle."""


@dataclass(frozen=True)
class CoverConfig:
    fine_res: float = 25.0
    coarse_res: float = 100.0
    radii: tuple[float, ...] = DEFAULT_RADII
    alpha: float = 10.0
    beta: float = 0.1
    margin: float | None = None  # defaults to the largest radius

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not self.fine_res > 0:
            raise ValueError("fine_res must be positive")
        if self.coarse_res < self.fine_res:
            raise ValueError("coarse_res must be at least fine_res")
        if not self.radii or any(r <= 0 for r in self.radii):
            raise ValueError("radii must be non-empty and positive")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")

    @property
    def box_margin(self) -> float:
        return self.radii[-1] if self.margin is None else self.margin


@dataclass(frozen=True)
class Grid:
    """Axis-aligned lattice ``origin + (i * step, j * step)``."""

    origin_n: float
    origin_e: float
    step: float
    rows: int
    cols: int

    @classmethod
    def over(cls, lo_n: float, lo_e: float, hi_n: float, hi_e: float, step: float) -> Grid:
        rows = int(math.floor((hi_n - lo_n) / step + 1e-9)) + 1
        cols = int(math.floor((hi_e - lo_e) / step + 1e-9)) + 1
        return cls(lo_n, lo_e, step, rows, cols)

    def n_values(self) -> np.ndarray:
        return self.origin_n + np.arange(self.rows, dtype=float) * self.step

    def e_values(self) -> np.ndarray:
        return self.origin_e + np.arange(self.cols, dtype=float) * self.step

    def points(self) -> np.ndarray:
        nn, ee = np.meshgrid(self.n_values(), self.e_values(), indexing="ij")
        return np.column_stack([nn.ravel(), ee.ravel()])

    def __len__(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class SampledDomain:
    x_in: np.ndarray  # (N_in, 2)
    x_out: np.ndarray  # (N_out, 2)
    centers: np.ndarray  # (M, 2)
    fine: Grid
    coarse: Grid


@dataclass(frozen=True)
class Coverage:
    """Sparse interior incidence plus exterior counts per (center, radius) candidate.

    Candidate ``(i, k)`` has column/id ``i * K + k``.
    """

    a_in: sp.csc_matrix  # (N_in, M * K) boolean
    out_counts: np.ndarray  # (M * K,)
    domain: SampledDomain
    radii: tuple[float, ...]

    def a_out(self) -> sp.csc_matrix:
        """Materialize the exterior incidence matrix (memory heavy at full scale)."""
        return _incidence(self.domain.x_out, self.domain.centers, self.radii)


@dataclass(frozen=True)
class CircleCover:
    circles: tuple[Disc, ...]
    spill_ratio: float
    solver_report: CoverSolution
    stats: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        rep = self.solver_report
        return {
            "circles": [{"center_ne": c.center.to_list(), "radius_m": c.radius} for c in self.circles],
            "spill_ratio": self.spill_ratio,
            "solver": {
                "total_cost": rep.total_cost,
                "proven_optimal": rep.proven_optimal,
                "timed_out": rep.timed_out,
                "iterations": rep.iterations,
            },
        }


def sample_domain(poly: Polygon, cfg: CoverConfig) -> SampledDomain:
    lo_n, lo_e, hi_n, hi_e = poly.bbox()
    m = cfg.box_margin
    box = (lo_n - m, lo_e - m, hi_n + m, hi_e + m)
    fine = Grid.over(*box, cfg.fine_res)
    coarse = Grid.over(*box, cfg.coarse_res)
    pts = fine.points()
    inside = polygon_contains_many(poly, pts)
    if not inside.any():
        raise DegeneratePolygon(f"no interior samples at {cfg.fine_res} m resolution")
    return SampledDomain(x_in=pts[inside], x_out=pts[~inside], centers=coarse.points(), fine=fine, coarse=coarse)


def _incidence(points: np.ndarray, centers: np.ndarray, radii, chunk: int = 512) -> sp.csc_matrix:
    """Exact ``hypot(p - c) <= R`` incidence, columns ordered (center, radius)."""
    k_count = len(radii)
    r_arr = np.asarray(radii, dtype=float)
    rows_all, cols_all = [], []
    for start in range(0, len(centers), chunk):
        block = centers[start : start + chunk]
        d = np.hypot(points[:, None, 0] - block[None, :, 0], points[:, None, 1] - block[None, :, 1])
        pi, ci = np.nonzero(d <= r_arr[-1])
        # first radius reaching each pair; every larger radius covers it too
        k_min = np.searchsorted(r_arr, d[pi, ci], side="left")
        reps = k_count - k_min
        total = int(reps.sum())
        group_start = np.repeat(np.cumsum(reps) - reps, reps)
        k = np.repeat(k_min, reps) + (np.arange(total) - group_start)
        rows_all.append(np.repeat(pi, reps))
        cols_all.append(np.repeat(ci + start, reps) * k_count + k)
    rows = np.concatenate(rows_all) if rows_all else np.empty(0, dtype=np.int64)
    cols = np.concatenate(cols_all) if cols_all else np.empty(0, dtype=np.int64)
    return sp.csc_matrix(
        (np.ones(len(rows), dtype=bool), (rows, cols)), shape=(len(points), len(centers) * k_count)
    )


def lattice_counts(grid: Grid, centers: np.ndarray, radii) -> np.ndarray:
    """Number of grid points with ``hypot(p - c) <= R`` for every (center, radius).

    Counts rows analytically, then corrects each row's end points with the
    exact predicate so the result matches brute-force enumeration.
    """
    n_vals = grid.n_values()
    f = grid.step
    out = np.zeros((len(centers), len(radii)), dtype=np.int64)
    for k, radius in enumerate(radii):
        dn = n_vals[None, :] - centers[:, 0:1]  # (M, rows)
        live = np.abs(dn) <= radius
        half = np.sqrt(np.maximum(radius * radius - dn * dn, 0.0))
        ce = centers[:, 1:2]
        j_lo = np.ceil((ce - half - grid.origin_e) / f).astype(np.int64)
        j_hi = np.floor((ce + half - grid.origin_e) / f).astype(np.int64)

        def inside(j):
            e = grid.origin_e + j.astype(float) * f
            return np.hypot(dn, e - ce) <= radius

        # the analytic ends can be off by one lattice step through rounding
        j_lo = np.where(inside(j_lo - 1), j_lo - 1, j_lo)
        j_lo = np.where(~inside(j_lo) & (j_lo <= j_hi), j_lo + 1, j_lo)
        j_hi = np.where(inside(j_hi + 1), j_hi + 1, j_hi)
        j_hi = np.where(~inside(j_hi) & (j_hi >= j_lo), j_hi - 1, j_hi)
        j_lo = np.clip(j_lo, 0, grid.cols)
        j_hi = np.clip(j_hi, -1, grid.cols - 1)
        out[:, k] = np.where(live, np.maximum(j_hi - j_lo + 1, 0), 0).sum(axis=1)
    return out


def coverage_matrices(dom: SampledDomain, radii) -> Coverage:
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    a_in = _incidence(dom.x_in, dom.centers, radii)
    in_counts = np.diff(a_in.indptr)
    total = lattice_counts(dom.fine, dom.centers, radii).ravel()
    return Coverage(a_in=a_in, out_counts=total - in_counts, domain=dom, radii=radii)


def build_instance(cov: Coverage, cfg: CoverConfig) -> SetCoverInstance:
    useful = np.flatnonzero(np.diff(cov.a_in.indptr) > 0)
    costs = cfg.alpha + cfg.beta * cov.out_counts[useful].astype(float)
    return SetCoverInstance.from_matrix(len(cov.domain.x_in), [int(j) for j in useful], costs, cov.a_in[:, useful])


def convexify(poly: Polygon, cfg: CoverConfig = CoverConfig(), time_limit: float | None = None) -> CircleCover:
    dom = sample_domain(poly, cfg)
    cov = coverage_matrices(dom, cfg.radii)
    reach = np.diff(cov.a_in.tocsr().indptr)
    if np.any(reach == 0):
        bad = dom.x_in[int(np.flatnonzero(reach == 0)[0])]
        raise UncoverableRegion(f"interior sample ({bad[0]:.1f}, {bad[1]:.1f}) lies outside every candidate circle")
    inst = build_instance(cov, cfg)
    sol = solve_bnb(inst, time_limit)
    k_count = len(cfg.radii)
    circles = []
    for cid in sorted(sol.selected):
        i, k = divmod(cid, k_count)
        c = dom.centers[i]
        circles.append(Disc(Vec2(float(c[0]), float(c[1])), cfg.radii[k]))
    spill = spill_ratio(circles, poly, cfg.fine_res / 5.0)
    return CircleCover(
        circles=tuple(circles),
        spill_ratio=spill,
        solver_report=sol,
        stats={"n_in": len(dom.x_in), "n_out": len(dom.x_out), "n_centers": len(dom.centers), **sol.stats},
    )


def spill_ratio(circles, poly: Polygon, res: float) -> float:
    """Area the circles add outside ``poly``, relative to the area of ``poly``.

    Both areas are counted on one grid of cell centers over the joint
    bounding box, so discretization errors largely cancel.
    """
    circles = list(circles)
    if not circles:
        raise ValueError("spill ratio needs at least one circle")
    lo_n, lo_e, hi_n, hi_e = poly.bbox()
    for c in circles:
        lo_n = min(lo_n, c.center.n - c.radius)
        lo_e = min(lo_e, c.center.e - c.radius)
        hi_n = max(hi_n, c.center.n + c.radius)
        hi_e = max(hi_e, c.center.e + c.radius)
    n_vals = np.arange(lo_n + res / 2, hi_n, res)
    e_vals = np.arange(lo_e + res / 2, hi_e, res)
    in_poly_total = 0
    spill_total = 0
    # row bands keep memory flat for fine resolutions
    band = max(1, 200_000 // max(len(e_vals), 1))
    for s in range(0, len(n_vals), band):
        nn, ee = np.meshgrid(n_vals[s : s + band], e_vals, indexing="ij")
        pts = np.column_stack([nn.ravel(), ee.ravel()])
        in_poly = polygon_contains_many(poly, pts)
        in_circles = np.zeros(len(pts), dtype=bool)
        for c in circles:
            in_circles |= np.hypot(pts[:, 0] - c.center.n, pts[:, 1] - c.center.e) <= c.radius
        in_poly_total += int(in_poly.sum())
        spill_total += int((in_circles & ~in_poly).sum())
    if in_poly_total == 0:
        raise DegeneratePolygon("polygon has no area at the spill resolution")
    return spill_total / in_poly_total


def generate_region(
    seed: int,
    r0: float,
    n_harmonics: int = 5,
    amp_max: float = 0.45,
    center: Vec2 = Vec2(0.0, 0.0),
    n_vertices: int = 64,
) -> Polygon:
    """Randomized Fourier-perturbed radial polygon.

    ``r(theta) = r0 (1 + sum a_n cos(n theta + phi_n))`` for harmonics
    ``n = 2 .. n_harmonics + 1``, with ``a_n ~ U[-amp_max/n, amp_max/n]`` and
    radii clamped to at least ``0.1 r0``. A non-simple draw advances the seed.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if not 0 <= amp_max < 0.9:
        raise ValueError("amp_max must lie in [0, 0.9)")
    if n_vertices < 24:
        raise ValueError("need at least 24 vertices")
    theta = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    while True:
        rng = np.random.default_rng(seed)
        r = np.ones(n_vertices)
        for n in range(2, n_harmonics + 2):
            a = rng.uniform(-amp_max / n, amp_max / n)
            phi = rng.uniform(0.0, 2.0 * np.pi)
            r += a * np.cos(n * theta + phi)
        r = np.maximum(r0 * r, 0.1 * r0)
        poly = Polygon(
            tuple(Vec2(float(center.n + ri * np.cos(t)), float(center.e + ri * np.sin(t))) for ri, t in zip(r, theta))
        )
        if is_simple(poly):
            return poly
        seed += 1
