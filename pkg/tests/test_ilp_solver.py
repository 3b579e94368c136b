import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import Bounds, LinearConstraint, milp

from seaplan.ilp_solver import (
    Candidate,
    CoverSolution,
    InfeasibleInstance,
    SetCoverInstance,
    greedy_cover,
    solve_bnb,
    verify_cover,
)


def inst(n, sets):
    return SetCoverInstance(n, [Candidate(name, frozenset(pts), cost) for name, pts, cost in sets])


# points renumbered from 1-based to 0-based
GREEDY_ONE = inst(3, [("S1", {0, 1}, 10.5), ("S2", {1, 2}, 10.2), ("S3", {0, 1, 2}, 10.9)])
GREEDY_THREE = inst(2, [("S1", {0}, 1.0), ("S2", {1}, 1.0), ("S3", {0, 1}, 2.1)])
TRAP = inst(4, [("A", {0, 1}, 1.0), ("B", {2, 3}, 1.0), ("C", {0, 1, 2}, 1.4), ("D", {3}, 0.2)])


def exhaustive(instance):
    """Brute-force optimum over every subset (bitmask coverage)."""
    m = instance.n_candidates
    masks = [sum(1 << int(p) for p in instance.points_of(j)) for j in range(m)]
    full = (1 << instance.n_points) - 1
    best = None
    for r in range(m + 1):
        for combo in itertools.combinations(range(m), r):
            cov = 0
            for j in combo:
                cov |= masks[j]
            if cov == full:
                c = sum(instance.costs[j] for j in combo)
                if best is None or c < best:
                    best = c
    return best


def test_greedy_examples():
    g = greedy_cover(GREEDY_ONE)
    assert g.selected == {"S3"} and g.total_cost == 10.9 and not g.proven_optimal
    g = greedy_cover(GREEDY_THREE)
    assert g.selected == {"S1", "S2"} and g.total_cost == 2.0
    single = inst(3, [("only", {0, 1, 2}, 4.0)])
    assert greedy_cover(single).selected == {"only"}


def test_bnb_examples():
    s = solve_bnb(GREEDY_ONE)
    assert s.selected == {"S3"} and s.total_cost == 10.9 and s.proven_optimal
    s = solve_bnb(GREEDY_THREE)
    assert s.selected == {"S1", "S2"} and s.total_cost == 2.0 and s.proven_optimal


def test_greedy_trap_instance():
    # brute force: {C, D} covers all four points for 1.6, cheaper than {A, B} at 2.0
    assert exhaustive(TRAP) == pytest.approx(1.6)
    s = solve_bnb(TRAP)
    assert s.selected == {"C", "D"}
    assert s.total_cost == pytest.approx(1.6)
    assert greedy_cover(TRAP).total_cost >= s.total_cost


def test_greedy_is_trapped_where_bnb_is_not():
    trap = inst(4, [("A", {0, 1}, 1.0), ("B", {2, 3}, 1.0), ("C", {0, 1, 2}, 1.4), ("D", {3}, 0.9)])
    g = greedy_cover(trap)
    s = solve_bnb(trap)
    assert g.selected == {"C", "D"} and g.total_cost == pytest.approx(2.3)
    assert s.selected == {"A", "B"} and s.total_cost == exhaustive(trap) == 2.0


def test_infeasible_instance():
    bad = inst(3, [("S1", {0, 1}, 1.0)])
    with pytest.raises(InfeasibleInstance):
        greedy_cover(bad)
    with pytest.raises(InfeasibleInstance):
        solve_bnb(bad)


def test_verify_cover():
    s = solve_bnb(TRAP)
    assert verify_cover(TRAP, s)
    assert verify_cover(TRAP, CoverSolution(frozenset({"A", "B"}), 2.0, False))
    assert not verify_cover(TRAP, CoverSolution(frozenset({"A"}), 1.0, False))
    assert not verify_cover(TRAP, CoverSolution(frozenset(), 0.0, False))
    assert not verify_cover(TRAP, CoverSolution(frozenset({"A", "B"}), 2.5, False))


def test_instance_validation():
    with pytest.raises(ValueError):
        inst(2, [("a", {0, 5}, 1.0)])
    with pytest.raises(ValueError):
        inst(2, [("a", {0, 1}, -1.0)])
    with pytest.raises(ValueError):
        inst(2, [("a", {0}, 1.0), ("a", {1}, 1.0)])


def test_json_round_trip():
    text = TRAP.to_json()
    raw = json.loads(text)
    assert raw["n_points"] == 4
    assert [c["id"] for c in raw["candidates"]] == ["A", "B", "C", "D"]
    again = SetCoverInstance.from_json(text)
    assert again.candidates == TRAP.candidates


def random_instance(rng, n_points, n_cands):
    sets = []
    for j in range(n_cands):
        size = int(rng.integers(1, max(2, n_points // 2)))
        pts = set(rng.choice(n_points, size=size, replace=False).tolist())
        # dyadic costs keep every subset sum exact in floating point
        sets.append((j, pts, float(rng.integers(1, 40)) * 0.25))
    covered = set().union(*(s[1] for s in sets))
    for p in set(range(n_points)) - covered:
        sets[int(rng.integers(n_cands))][1].add(p)
    return inst(n_points, sets)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_matches_exhaustive_and_greedy_bound(seed):
    rng = np.random.default_rng(seed)
    instance = random_instance(rng, int(rng.integers(3, 16)), int(rng.integers(2, 11)))
    s = solve_bnb(instance)
    g = greedy_cover(instance)
    assert s.proven_optimal
    assert s.total_cost == exhaustive(instance)
    assert g.total_cost >= s.total_cost
    assert verify_cover(instance, s) and verify_cover(instance, g)


def test_independent_of_input_order():
    rng = np.random.default_rng(9)
    base = random_instance(rng, 20, 14)
    cands = list(base.candidates)
    rng.shuffle(cands)
    shuffled = SetCoverInstance(base.n_points, cands)
    assert solve_bnb(base).selected == solve_bnb(shuffled).selected


def test_tie_breaks_toward_lower_id():
    tied = inst(2, [(2, {0, 1}, 1.0), (1, {0, 1}, 1.0)])
    assert solve_bnb(tied).selected == {1}
    assert greedy_cover(tied).selected == {1}


def test_medium_instances_match_milp_oracle():
    # larger than exhaustive enumeration allows; HiGHS gives the reference optimum
    rng = np.random.default_rng(21)
    for _ in range(5):
        n, m = 60, 80
        instance = random_instance(rng, n, m)
        res = milp(
            instance.costs,
            constraints=LinearConstraint(instance.matrix.astype(float).toarray(), lb=1),
            integrality=np.ones(m),
            bounds=Bounds(0, 1),
        )
        s = solve_bnb(instance)
        assert s.proven_optimal
        assert s.total_cost == pytest.approx(res.fun, abs=1e-9)


def test_time_limit_returns_incumbent():
    rng = np.random.default_rng(4)
    instance = random_instance(rng, 200, 300)
    s = solve_bnb(instance, time_limit=0.0)
    assert s.timed_out and not s.proven_optimal
    assert verify_cover(instance, s)
