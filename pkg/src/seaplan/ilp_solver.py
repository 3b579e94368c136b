"""Exact 0-1 weighted set cover by branch-and-bound.

Points are indexed ``0 .. n_points - 1``. Large instances are held as a
sparse point-by-candidate incidence matrix; the search itself runs on a
reduced instance whose coverage sets are Python integer bitmasks.

Pipeline: greedy incumbent, exact pruning (cost bound, Lagrangian
reduced-cost fixing, forced candidates, row/column dominance), then a
depth-first search that branches on the first uncovered point.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

COST_TOL = 1e-9


class InfeasibleInstance(Exception):
    """Some point is covered by no candidate."""


@dataclass(frozen=True)
class Candidate:
    id: Hashable
    points: frozenset[int]
    cost: float


class SetCoverInstance:
    """Universe ``range(n_points)`` and candidate sets with non-negative costs.

    Candidates are kept sorted by id; every tie in the solvers resolves toward
    the lower id.
    """

    def __init__(self, n_points: int, candidates: Iterable[Candidate]):
        cands = sorted(candidates, key=lambda c: c.id)
        rows, cols = [], []
        for j, c in enumerate(cands):
            for p in c.points:
                if not 0 <= p < n_points:
                    raise ValueError(f"candidate {c.id} references point {p} outside the universe")
                rows.append(p)
                cols.append(j)
        matrix = sp.csc_matrix(
            (np.ones(len(rows), dtype=bool), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(n_points, len(cands)),
        )
        self._init(n_points, [c.id for c in cands], np.array([c.cost for c in cands], dtype=float), matrix)

    def _init(self, n_points, ids, costs, matrix):
        if np.any(costs < 0):
            raise ValueError("candidate costs must be non-negative")
        if len(set(ids)) != len(ids):
            raise ValueError("candidate ids must be unique")
        self.n_points = int(n_points)
        self.ids = list(ids)
        self.costs = costs
        self.matrix = sp.csc_matrix(matrix, dtype=bool)
        self.matrix.sort_indices()

    @classmethod
    def from_matrix(cls, n_points: int, ids: Sequence[Hashable], costs: np.ndarray, matrix) -> SetCoverInstance:
        order = sorted(range(len(ids)), key=lambda j: ids[j])
        inst = cls.__new__(cls)
        m = sp.csc_matrix(matrix, dtype=bool)
        inst._init(n_points, [ids[j] for j in order], np.asarray(costs, dtype=float)[order], m[:, order])
        return inst

    @property
    def n_candidates(self) -> int:
        return len(self.ids)

    def points_of(self, j: int) -> np.ndarray:
        m = self.matrix
        return m.indices[m.indptr[j] : m.indptr[j + 1]]

    @property
    def candidates(self) -> tuple[Candidate, ...]:
        return tuple(
            Candidate(self.ids[j], frozenset(int(p) for p in self.points_of(j)), float(self.costs[j]))
            for j in range(self.n_candidates)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_points": self.n_points,
                "candidates": [
                    {"id": c.id, "points": sorted(c.points), "cost": c.cost} for c in self.candidates
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> SetCoverInstance:
        raw = json.loads(text)
        return cls(
            int(raw["n_points"]),
            [Candidate(c["id"], frozenset(int(p) for p in c["points"]), float(c["cost"])) for c in raw["candidates"]],
        )


@dataclass(frozen=True)
class CoverSolution:
    selected: frozenset
    total_cost: float
    proven_optimal: bool
    iterations: int = 0
    solve_time: float = 0.0
    timed_out: bool = False
    stats: dict = field(default_factory=dict, compare=False)


def _check_feasible(inst: SetCoverInstance) -> None:
    counts = np.asarray(inst.matrix.sum(axis=1)).ravel()
    missing = np.flatnonzero(counts == 0)
    if len(missing):
        raise InfeasibleInstance(f"point {int(missing[0])} is not covered by any candidate")


def _greedy_columns(matrix: sp.csc_matrix, costs: np.ndarray, uncovered: np.ndarray) -> list[int]:
    csr_t = matrix.T.tocsr().astype(np.int32)
    uncovered = uncovered.copy()
    picked = []
    while uncovered.any():
        gain = csr_t @ uncovered.astype(np.int32)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(gain > 0, costs / np.maximum(gain, 1), np.inf)
        j = int(np.argmin(ratio))
        if not np.isfinite(ratio[j]):
            raise InfeasibleInstance("greedy could not complete the cover")
        picked.append(j)
        uncovered[matrix.indices[matrix.indptr[j] : matrix.indptr[j + 1]]] = False
    return picked


def greedy_cover(inst: SetCoverInstance) -> CoverSolution:
    """Pick the candidate with the lowest cost per newly covered point until done."""
    t0 = time.perf_counter()
    _check_feasible(inst)
    picked = _greedy_columns(inst.matrix, inst.costs, np.ones(inst.n_points, dtype=bool))
    return CoverSolution(
        selected=frozenset(inst.ids[j] for j in picked),
        total_cost=math.fsum(float(inst.costs[j]) for j in picked),
        proven_optimal=False,
        iterations=len(picked),
        solve_time=time.perf_counter() - t0,
    )


def _drop_redundant(matrix: sp.csc_matrix, costs: np.ndarray, cols: list[int]) -> list[int]:
    """Remove selected columns (most expensive first) whose points stay covered."""
    cols = list(cols)
    cover = np.zeros(matrix.shape[0], dtype=np.int64)
    for j in cols:
        cover[matrix.indices[matrix.indptr[j] : matrix.indptr[j + 1]]] += 1
    for j in sorted(cols, key=lambda j: (-costs[j], j)):
        pts = matrix.indices[matrix.indptr[j] : matrix.indptr[j + 1]]
        if np.all(cover[pts] >= 2):
            cover[pts] -= 1
            cols.remove(j)
    return cols


def lagrangian_bound(
    matrix,
    costs: np.ndarray,
    upper: float,
    max_iter: int = 400,
    u0: np.ndarray | None = None,
    lam: float = 2.0,
    heuristic_every: int = 10,
) -> tuple[float, np.ndarray, float, list[int] | None, float]:
    """Subgradient ascent on the Lagrangian dual of the covering rows.

    Starts from the per-point cheapest share ``min c_S / |S|`` (whose
    Lagrangian value equals the plain share bound) and only keeps
    improvements, so the result is never weaker than that bound. Returns
    ``(bound, multipliers, best_upper, best_cover_columns, step_scale)``;
    the step scale lets a later call resume where this one stopped.
    """
    matrix = sp.csc_matrix(matrix)
    csr = matrix.tocsr().astype(np.float64)
    csr_t = matrix.T.tocsr().astype(np.float64)
    u = share_multipliers(matrix, costs) if u0 is None else u0.copy()
    best_lb = -math.inf
    best_u = u.copy()
    best_ub = upper
    best_cols = None
    stall = 0
    for it in range(max_iter):
        red = costs - csr_t @ u
        x = red < 0
        lb = float(u.sum() + red[x].sum())
        if lb > best_lb + 1e-12:
            best_lb, best_u = lb, u.copy()
            stall = 0
        else:
            stall += 1
            if stall >= 20:
                lam *= 0.5
                stall = 0
        if best_lb >= best_ub - COST_TOL or lam < 1e-4:
            break
        covered = csr @ x.astype(np.float64)
        g = 1.0 - covered
        g[(u <= 0) & (g < 0)] = 0.0
        gg = float(g @ g)
        if gg == 0.0:
            break
        if it % heuristic_every == 0:
            # primal heuristic: repair the Lagrangian solution greedily
            cols = list(np.flatnonzero(x))
            unc = covered < 0.5
            if unc.any():
                cols += _greedy_columns(matrix, np.maximum(red, 0) + 1e-12 * costs, unc)
            cols = _drop_redundant(matrix, costs, cols)
            val = math.fsum(float(costs[j]) for j in cols)
            if val < best_ub - COST_TOL:
                best_ub, best_cols = val, cols
        step = lam * (1.05 * best_ub - lb) / gg
        u = np.maximum(0.0, u + step * g)
    return best_lb, best_u, best_ub, best_cols, lam


def share_multipliers(matrix: sp.csc_matrix, costs: np.ndarray) -> np.ndarray:
    """Per point, the cheapest ``cost / |points|`` over candidates covering it."""
    sizes = np.diff(matrix.indptr).astype(float)
    share = np.where(sizes > 0, costs / np.maximum(sizes, 1.0), np.inf)
    u = np.full(matrix.shape[0], np.inf)
    col_of_entry = np.repeat(np.arange(matrix.shape[1]), np.diff(matrix.indptr))
    np.minimum.at(u, matrix.indices, share[col_of_entry])
    return u


class _Reduced:
    """Forced picks plus dominance pruning on a small instance, as bitmasks.

    ``cols`` index the caller's column space. Rows are renumbered so that
    row 0 is the one covered by the fewest candidates.
    """

    def __init__(self, n_rows: int, col_points: dict[int, list[int]], costs: np.ndarray, cols: list[int]):
        self.forced: list[int] = []
        cost = {j: float(costs[j]) for j in cols}
        masks = {j: _mask(col_points[j]) for j in cols}
        rows = list(range(n_rows))
        alive = [j for j in cols if masks[j]]

        while True:
            changed = False
            alive = self._dedupe_and_dominate(alive, masks, cost)
            owner_bits = self._owner_bits(rows, alive, masks)
            forced_now = sorted({alive[ob.bit_length() - 1] for ob in owner_bits.values() if ob.bit_count() == 1})
            if forced_now:
                covered = 0
                for j in forced_now:
                    self.forced.append(j)
                    covered |= masks[j]
                rows = [r for r in rows if not (covered >> r) & 1]
                keep = _mask(rows)
                alive = [j for j in alive if j not in forced_now and masks[j] & keep]
                for j in alive:
                    masks[j] &= keep
                changed = True
                owner_bits = self._owner_bits(rows, alive, masks)
            order = sorted(rows, key=lambda r: (owner_bits[r].bit_count(), r))
            kept: list[int] = []
            for r in order:
                ob = owner_bits[r]
                if not any(owner_bits[s] & ob == owner_bits[s] for s in kept):
                    kept.append(r)
            if len(kept) != len(rows):
                rows = sorted(kept)
                keep = _mask(rows)
                for j in alive:
                    masks[j] &= keep
                alive = [j for j in alive if masks[j]]
                changed = True
            if not changed:
                break

        owner_bits = self._owner_bits(rows, alive, masks)
        rows.sort(key=lambda r: (owner_bits[r].bit_count(), r))
        pos = {r: k for k, r in enumerate(rows)}
        self.n_rows = len(rows)
        self.cols = alive
        self.cost = [cost[j] for j in alive]
        self.masks = []
        for j in alive:
            m = 0
            for r in _bits(masks[j]):
                m |= 1 << pos[r]
            self.masks.append(m)
        self.row_owners: list[list[int]] = [[] for _ in range(self.n_rows)]
        for k, m in enumerate(self.masks):
            for r in _bits(m):
                self.row_owners[r].append(k)

    @staticmethod
    def _owner_bits(rows, alive, masks):
        owner_bits = {r: 0 for r in rows}
        for k, j in enumerate(alive):
            for r in _bits(masks[j]):
                owner_bits[r] |= 1 << k
        return owner_bits

    @staticmethod
    def _dedupe_and_dominate(alive, masks, cost):
        best_for_mask: dict[int, int] = {}
        for j in alive:
            m = masks[j]
            i = best_for_mask.get(m)
            if i is None or cost[j] < cost[i]:
                best_for_mask[m] = j
        alive = sorted(best_for_mask.values())
        order = sorted(alive, key=lambda j: (-masks[j].bit_count(), cost[j], j))
        kept: list[int] = []
        for j in order:
            mj = masks[j]
            cj = cost[j]
            if not any(cost[i] <= cj and mj & masks[i] == mj for i in kept):
                kept.append(j)
        return sorted(kept)


def _mask(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << int(p)
    return m


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def solve_bnb(inst: SetCoverInstance, time_limit: float | None = None) -> CoverSolution:
    """Minimum-cost cover, proven optimal unless ``time_limit`` expires first.

    The search branches on the lowest-index uncovered point (points are
    renumbered by ascending number of covering candidates) over each
    candidate covering it, most cost-effective first; earlier siblings are
    excluded from later subtrees. A node is pruned when its cost plus a lower
    bound on covering the rest reaches the incumbent. The bound is the larger
    of the per-point cheapest-share sum and a Lagrangian bound warm-started
    from the parent node.
    """
    t0 = time.perf_counter()
    deadline = math.inf if time_limit is None else t0 + time_limit
    _check_feasible(inst)
    matrix = inst.matrix
    costs = inst.costs
    stats: dict = {"n_points": inst.n_points, "n_candidates": inst.n_candidates}

    incumbent = _greedy_columns(matrix, costs, np.ones(inst.n_points, dtype=bool))
    incumbent = _drop_redundant(matrix, costs, incumbent)
    best_cost = math.fsum(float(costs[j]) for j in incumbent)

    def finish(cols: list[int], proven: bool, iterations: int) -> CoverSolution:
        return CoverSolution(
            selected=frozenset(inst.ids[j] for j in cols),
            total_cost=math.fsum(float(costs[j]) for j in cols),
            proven_optimal=proven,
            iterations=iterations,
            solve_time=time.perf_counter() - t0,
            timed_out=not proven,
            stats=stats,
        )

    if time.perf_counter() > deadline:
        return finish(incumbent, False, 0)

    sizes = np.diff(matrix.indptr)
    alive = np.flatnonzero((sizes > 0) & (costs <= best_cost + COST_TOL))

    if len(alive) > 64:
        # subgradient rounds, each followed by reduced-cost fixing; bounds on
        # the shrunken column set stay valid for every strictly better cover
        u = None
        lam = 2.0
        prev_lb = -math.inf
        for _ in range(20):
            sub = matrix[:, alive]
            sub_costs = costs[alive]
            lb, u, ub, cols, lam = lagrangian_bound(sub, sub_costs, best_cost, max_iter=60, u0=u, lam=lam)
            if cols is not None and ub < best_cost - COST_TOL:
                incumbent = sorted(int(alive[j]) for j in cols)
                best_cost = ub
            stats["root_bound"] = max(lb, stats.get("root_bound", -math.inf))
            if lb >= best_cost - COST_TOL:
                return finish(incumbent, True, 0)
            reduced = sub_costs - sub.T.tocsr() @ u
            keep = lb + np.maximum(reduced, 0.0) < best_cost - COST_TOL
            shrunk = len(keep) - int(keep.sum())
            alive = alive[keep]
            if time.perf_counter() > deadline or lam < 1e-3 or len(alive) <= 64:
                break
            if shrunk == 0 and lb <= prev_lb + 1e-6 * max(1.0, abs(lb)):
                break
            prev_lb = lb
    stats["after_fixing"] = int(len(alive))
    if time.perf_counter() > deadline:
        return finish(incumbent, False, 0)

    # the surviving candidates cannot cover everything: the incumbent is optimal
    coverable = np.zeros(inst.n_points, dtype=bool)
    col_points = {}
    for j in alive:
        pts = inst.points_of(int(j))
        col_points[int(j)] = pts.tolist()
        coverable[pts] = True
    if not coverable.all():
        return finish(incumbent, True, 0)

    red = _Reduced(inst.n_points, col_points, costs, [int(j) for j in alive])
    stats["reduced_rows"] = red.n_rows
    stats["reduced_candidates"] = len(red.cols)
    stats["forced"] = len(red.forced)
    forced_cost = math.fsum(float(costs[j]) for j in red.forced)

    search = _Search(red, best_cost - forced_cost, deadline)
    search.run()
    stats["nodes"] = search.iterations
    if search.best_sel is not None:
        incumbent = list(red.forced) + [red.cols[k] for k in search.best_sel]
    return finish(incumbent, not search.timed_out, search.iterations)


class _Search:
    """Depth-first branch-and-bound over a reduced instance."""

    NODE_SUBGRADIENT_STEPS = 6

    def __init__(self, red: _Reduced, upper: float, deadline: float):
        self.n_rows = red.n_rows
        self.n_cols = len(red.cols)
        self.masks = red.masks
        self.cost = np.array(red.cost, dtype=float)
        self.row_owners = red.row_owners
        a = np.zeros((self.n_rows, self.n_cols), dtype=float)
        for k, m in enumerate(red.masks):
            a[list(_bits(m)), k] = 1.0
        self.a = a
        self.a_t = np.ascontiguousarray(a.T)
        sizes = a.sum(axis=0)
        self.share = self.cost / np.maximum(sizes, 1.0)
        self.best_cost = upper
        self.best_sel: list[int] | None = None
        self.deadline = deadline
        self.iterations = 0
        self.timed_out = False
        self.chosen: list[int] = []

    def run(self) -> None:
        if self.n_rows == 0:
            if 0.0 < self.best_cost - COST_TOL:
                self.best_sel = []
            return
        unc = np.ones(self.n_rows, dtype=bool)
        allowed = np.ones(self.n_cols, dtype=bool)
        u = np.where(self.a > 0, self.share[None, :], np.inf).min(axis=1)
        self._node(0, 0.0, unc, allowed, u, 2.0)

    def _bound(self, unc, allowed, u, lam, gap_cost):
        """Best Lagrangian value over a few warm-started steps, and its multipliers."""
        a, a_t, cost = self.a, self.a_t, self.cost
        target = self.best_cost - gap_cost
        u = np.where(unc, u, 0.0)
        best = -math.inf
        best_u = u
        for _ in range(self.NODE_SUBGRADIENT_STEPS):
            red = np.where(allowed, cost - a_t @ u, 0.0)
            x = red < 0
            lb = float(u.sum() + red[x].sum())
            if lb > best:
                best, best_u = lb, u
            if best >= target - COST_TOL:
                break
            g = np.where(unc, 1.0 - a @ x, 0.0)
            g[(u <= 0) & (g < 0)] = 0.0
            gg = float(g @ g)
            if gg == 0.0:
                break
            u = np.maximum(0.0, u + lam * (1.05 * target - lb) / gg * g)
        return best, best_u

    def _share_bound(self, unc, allowed):
        rows = np.flatnonzero(unc)
        sub = self.a[np.ix_(rows, np.flatnonzero(allowed))]
        if sub.size == 0:
            return math.inf
        shares = np.where(sub > 0, self.share[allowed][None, :], np.inf).min(axis=1)
        return float(shares.sum())

    def _node(self, covered: int, cost: float, unc, allowed, u, lam) -> None:
        self.iterations += 1
        if time.perf_counter() > self.deadline:
            self.timed_out = True
            return
        if not unc.any():
            if cost < self.best_cost - COST_TOL:
                self.best_cost = cost
                self.best_sel = list(self.chosen)
            return
        lag, u = self._bound(unc, allowed, u, lam, cost)
        share = self._share_bound(unc, allowed)
        if cost + max(lag, share) >= self.best_cost - COST_TOL:
            return
        # columns whose inclusion alone would lift the bound past the incumbent
        reduced = self.cost - self.a_t @ u
        allowed = allowed & (cost + lag + np.maximum(reduced, 0.0) < self.best_cost - COST_TOL)

        uncovered_bits = ((1 << self.n_rows) - 1) & ~covered
        r = (uncovered_bits & -uncovered_bits).bit_length() - 1
        options = [k for k in self.row_owners[r] if allowed[k]]
        options.sort(key=lambda k: (self.cost[k] / (self.masks[k] & uncovered_bits).bit_count(), k))
        allowed = allowed.copy()
        for k in options:
            if cost + self.cost[k] < self.best_cost - COST_TOL:
                self.chosen.append(k)
                child_unc = unc & (self.a[:, k] == 0)
                child_allowed = allowed.copy()
                child_allowed[k] = False
                self._node(covered | self.masks[k], cost + float(self.cost[k]), child_unc, child_allowed, u, lam * 0.5)
                self.chosen.pop()
                if self.timed_out:
                    return
            allowed[k] = False


def verify_cover(inst: SetCoverInstance, sol: CoverSolution) -> bool:
    index = {cid: j for j, cid in enumerate(inst.ids)}
    if any(s not in index for s in sol.selected):
        return False
    covered = np.zeros(inst.n_points, dtype=bool)
    for s in sol.selected:
        covered[inst.points_of(index[s])] = True
    if not covered.all():
        return False
    return abs(math.fsum(float(inst.costs[index[s]]) for s in sol.selected) - sol.total_cost) <= 1e-9
