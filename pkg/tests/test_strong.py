import itertools

import pytest
from helpers import EXAMPLE, EXAMPLE_D, EXAMPLE_H, TABLE_DEMAND, TABLE_WEIGHTS, random_case

from ilpce import oracle, strong, weak
from ilpce.model import (
    MODES,
    FavoredSpace,
    MutableSpace,
    PresentProblem,
    check_strong,
)

EVERYTHING = FavoredSpace.positive([])


def test_objective_example():
    H = MutableSpace.build(EXAMPLE, "objective", c_box=tuple((v - 2, v + 2) for v in EXAMPLE.c_hat))
    res = strong.solve_objective_mutable_strong(EXAMPLE, EXAMPLE_D, H)
    assert res.optimal and res.cost == 2
    assert check_strong(EXAMPLE, EXAMPLE_D, res.params).yes


def test_objective_everything_and_degenerate():
    H = MutableSpace.build(EXAMPLE, "objective", c_box=tuple((v - 2, v + 2) for v in EXAMPLE.c_hat))
    assert strong.solve_objective_mutable_strong(EXAMPLE, EVERYTHING, H).cost == 0
    H0 = MutableSpace.build(EXAMPLE, "objective")
    assert strong.solve_objective_mutable_strong(EXAMPLE, EXAMPLE_D, H0).status == "Infeasible"


def test_master_example():
    res = strong.solve_master_strong(2, EXAMPLE, EXAMPLE_D, EXAMPLE_H)
    assert res is not None and res.cost == 2
    assert check_strong(EXAMPLE, EXAMPLE_D, (EXAMPLE.c_hat, res.a, res.b)).yes
    assert strong.solve_master_strong(2, EXAMPLE, EXAMPLE_D, EXAMPLE_H, incumbent_cost=1) is None


def test_master_everything_is_plain_feasibility():
    # no complement, no cuts: cheapest (a, b) admitting some x with value v
    for v in range(0, 7):
        want = None
        for a2, a3 in itertools.product(range(5), repeat=2):
            for x in itertools.product((0, 1), repeat=3):
                if x[0] + 2 * x[1] + 2 * x[2] == v and x[0] + a2 * x[1] + a3 * x[2] >= 3:
                    d = abs(a2 - 3) + abs(a3 - 2)
                    want = d if want is None else min(want, d)
        res = strong.solve_master_strong(v, EXAMPLE, EVERYTHING, EXAMPLE_H)
        assert (None if res is None else res.cost) == want, v


def test_lower_bound_strong_example():
    assert strong.lower_bound_strong(2, EXAMPLE, EXAMPLE_D, EXAMPLE_H) == 1
    assert strong.lower_bound_strong(-1, EXAMPLE, EXAMPLE_D, EXAMPLE_H) == 0


def test_lower_bound_strong_monotone():
    for seed in range(15):
        p, D, H = random_case(seed, "constraint", kind="strong")
        vr = weak.value_range(p, D, H)
        if vr is None:
            continue
        lbs = [strong.lower_bound_strong(v, p, D, H) for v in range(vr.c_lo - 1, vr.c_hi + 2)]
        assert lbs == sorted(lbs)


def test_constraint_example():
    res = strong.solve_constraint_mutable_strong(EXAMPLE, EXAMPLE_D, EXAMPLE_H)
    assert res.optimal and res.cost == 2
    assert check_strong(EXAMPLE, EXAMPLE_D, res.params).yes


def test_constraint_present_already_strong():
    p = PresentProblem((1, 2, 2), (1, 2, 3), 3)
    H = MutableSpace.build(p, "constraint", a_box=((1, 1), (0, 4), (0, 4)))
    res = strong.solve_constraint_mutable_strong(p, EXAMPLE_D, H)
    assert res.cost == 0 and res.params == p.params


def test_constraint_table_instance_item0():
    p = PresentProblem([w + 100 for w in TABLE_WEIGHTS], TABLE_WEIGHTS, TABLE_DEMAND)
    H = MutableSpace.build(p, "constraint", a_box=tuple((max(0, w - 50), w + 50) for w in TABLE_WEIGHTS))
    D = FavoredSpace.positive([0])
    res = strong.solve_constraint_mutable_strong(p, D, H)
    assert res.optimal and res.cost == 44
    assert check_strong(p, D, res.params).yes
    new = [i for i, x in enumerate(res.witness) if x]
    assert 0 in new


def test_rhs_delegates_to_constraint_sweep():
    p = PresentProblem((1, 2), (2, 3), 2)
    D = FavoredSpace.positive([1])
    H = MutableSpace.build(p, "rhs", b_box=(0, 5))
    truth = oracle.optimal_cost(oracle.enumerate(p, D, H), kind="strong")
    res = strong.solve(p, D, H)
    assert res.cost == truth


def test_all_mutable_matches_constraint_mode():
    H = MutableSpace.build(EXAMPLE, "all", c_box=EXAMPLE_H.c_box, a_box=EXAMPLE_H.a_box, b_box=EXAMPLE_H.b_box)
    assert strong.solve_all_mutable_strong(EXAMPLE, EXAMPLE_D, H).cost == 2
    assert strong.solve_all_mutable_strong(EXAMPLE, EVERYTHING, H).cost == 0


def test_all_mutable_three_items_against_grid():
    p = PresentProblem((3, 2, 4), (2, 3, 1), 4)
    D = FavoredSpace.positive([2])
    H = MutableSpace.build(p, "all", c_box=tuple((v - 1, v + 1) for v in p.c_hat),
                           a_box=tuple((v - 1, v + 1) for v in p.a_hat), b_box=(3, 5))
    truth = oracle.optimal_cost(oracle.enumerate(p, D, H), kind="strong")
    assert strong.solve_all_mutable_strong(p, D, H).cost == truth


@pytest.mark.parametrize("mode", MODES)
def test_oracle_equivalence_and_dominance(mode):
    for seed in range(12):
        p, D, H = random_case(300 + seed, mode, kind="strong")
        region = oracle.enumerate(p, D, H)
        truth = oracle.optimal_cost(region, kind="strong")
        res = strong.solve(p, D, H)
        assert (res.cost if res.optimal else None) == truth, seed
        w = weak.solve(p, D, H)
        if res.optimal:
            assert check_strong(p, D, res.params).yes
            assert H.contains(res.params)
            assert w.optimal and w.cost <= res.cost
