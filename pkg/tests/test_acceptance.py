"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
happen; they are also repeated in the terminal summary.
"""

import csv
import itertools
import math
import time
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path

import numpy as np
from helpers import EXAMPLE, EXAMPLE_D, EXAMPLE_H, random_case

from ilpce import cli, instances, mip, oracle, strong, weak
from ilpce.dp import dp_restricted_min
from ilpce.model import (
    KINDS,
    MODES,
    Distance,
    FavoredSpace,
    MutableSpace,
    PresentProblem,
    check_strong,
    check_weak,
)

DATA = Path(__file__).resolve().parent.parent / "data"


def _solver(kind):
    return strong if kind == "strong" else weak


def _check(kind):
    return check_strong if kind == "strong" else check_weak


# --- 1: region map of the three-item example -------------------------------------

# rows a2 = 0..4, columns a3 = 0..4; S strong, w weak only, . outside
FIG_LABELS = [
    "..SSS",
    ".SSSS",
    "..wSS",
    "...ww",
    "...ww",
]
# optimal item sets (1-based, alternatives split by |) and values; - means infeasible
FIG_SOLUTIONS = [
    ["-", "-", "13", "3", "3"],
    ["-", "123", "13", "3", "3"],
    ["12", "12", "12|13", "3", "3"],
    ["2", "2", "2", "2|3", "2|3"],
    ["2", "2", "2", "2|3", "2|3"],
]
LABEL_CODE = {"S": oracle.STRONG, "w": oracle.WEAK, ".": oracle.OUTSIDE}


def _solution_sets(code, n=3):
    if code == "-":
        return frozenset()
    out = set()
    for alt in code.split("|"):
        out.add(tuple(int(str(i + 1) in alt) for i in range(n)))
    return frozenset(out)


def test_criterion_1_region_map(report):
    t0 = time.perf_counter()
    region = oracle.enumerate(EXAMPLE, EXAMPLE_D, EXAMPLE_H)
    problems = []
    if region.axes != ("a1", "a2"):
        problems.append(f"axes {region.axes}")
    for a2, a3 in itertools.product(range(5), range(5)):
        k = region.index([a2, a3])
        want = LABEL_CODE[FIG_LABELS[a2][a3]]
        if region.labels[k] != want:
            problems.append(f"label at a2={a2},a3={a3}: {region.labels[k]} != {want}")
        sets = _solution_sets(FIG_SOLUTIONS[a2][a3])
        if region.optimal_solutions(k) != sets:
            problems.append(f"solutions at a2={a2},a3={a3}")
        want_value = min((2 * x[1] + 2 * x[2] + x[0] for x in sets), default=None)
        if region.values[k] != want_value:
            problems.append(f"value at a2={a2},a3={a3}: {region.values[k]} != {want_value}")
    counts = region.counts()
    if counts != {oracle.OUTSIDE: 11, oracle.WEAK: 5, oracle.STRONG: 9}:
        problems.append(f"counts {counts}")
    oc = (oracle.optimal_cost(region, kind="weak"), oracle.optimal_cost(region, kind="strong"))
    w = weak.solve_constraint_mutable(EXAMPLE, EXAMPLE_D, EXAMPLE_H)
    s = strong.solve_constraint_mutable_strong(EXAMPLE, EXAMPLE_D, EXAMPLE_H)
    elapsed = time.perf_counter() - t0
    if oc != (1, 2) or (w.cost, s.cost) != (1, 2):
        problems.append(f"oracle costs {oc}, algorithm costs {(w.cost, s.cost)}")
    if elapsed >= 1.0:
        problems.append(f"took {elapsed:.2f}s")
    ok = not problems
    report(1, ok, f"counts {counts}, weak={w.cost} strong={s.cost}, {elapsed:.2f}s"
           + ("" if ok else "; " + "; ".join(problems)))
    assert ok, problems


# --- 2: the ten-item cover instance ------------------------------------------------

def test_criterion_2_table_instance(report):
    raw = instances.parse_kplib((DATA / "table1.txt").read_text())
    p = instances.to_cover(raw)
    sol = instances.present_solution(p)
    chosen = [i for i in range(p.n) if sol.assignment[i]]
    ok = chosen == [1, 2, 7] and sol.objective == 2701
    report(2, ok, f"optimum {chosen}, value {sol.objective}")
    assert ok


# --- 3: strong costs of single-item fixations -------------------------------------

TABLE_ITEMS = (0, 4, 5, 6, 8, 3, 9)
TABLE_COSTS = (44, 44, 44, 44, 51, 64, 65)


def _table_costs(p, basis):
    H = instances.build_mutable(p, "constraint", 5, basis)
    out = []
    for i in TABLE_ITEMS:
        D = FavoredSpace.positive([i])
        res = strong.solve_constraint_mutable_strong(p, D, H, time_limit=600)
        if res.optimal:
            assert check_strong(p, D, res.params).yes
            assert H.contains(res.params)
        out.append(res.cost)
    return tuple(out)


def test_criterion_3_table_strong_costs(report):
    p = instances.to_cover(instances.parse_kplib((DATA / "table1.txt").read_text()))
    t0 = time.perf_counter()
    got = _table_costs(p, "range")
    detail = f"data-range basis costs {got}, expected {TABLE_COSTS}"
    if got != TABLE_COSTS:
        print("OPEN QUESTION: the 5% mutable box may be per coefficient rather than a share "
              "of the data range; retrying with the per-coefficient basis")
        got = _table_costs(p, "coefficient")
        detail += f"; per-coefficient basis costs {got}"
    elapsed = time.perf_counter() - t0
    ok = got == TABLE_COSTS and elapsed < 600
    report(3, ok, f"{detail}, {elapsed:.1f}s")
    assert got == TABLE_COSTS
    assert elapsed < 600


# --- 4: oracle equivalence ---------------------------------------------------------

def test_criterion_4_oracle_equivalence(report):
    t0 = time.perf_counter()
    agree, failures, sizes = 0, [], []
    for k in range(200):
        mode = MODES[k % 4]
        kind = KINDS[(k // 4) % 2]
        p, D, H = random_case(4000 + k, mode, kind=kind)
        assert p.n <= 8 and H.size <= 10**5
        sizes.append(H.size)
        truth = oracle.optimal_cost(oracle.enumerate(p, D, H), kind=kind)
        res = _solver(kind).solve(p, D, H, time_limit=600)
        got = res.cost if res.optimal else None
        ok = res.status != "BudgetExceeded" and got == truth
        if ok and res.optimal:
            ok = H.contains(res.params) and _check(kind)(p, D, res.params, method="enumerate").yes
        if ok:
            agree += 1
        else:
            failures.append((k, mode, kind, got, truth))
    elapsed = time.perf_counter() - t0
    ok = agree == 200 and elapsed < 1800
    report(4, ok, f"{agree}/200 agree, max |H| {max(sizes)}, {elapsed:.1f}s"
           + (f"; first failures {failures[:3]}" if failures else ""))
    assert agree == 200, failures
    assert elapsed < 1800


# --- 5: lower bound monotonicity and ablation --------------------------------------

def test_criterion_5_lower_bounds(report):
    monotone, ablation_ok, reductions, problems = 0, 0, [], []
    for k in range(50):
        p, D, H = random_case(5000 + k, "constraint", kind=KINDS[k % 2])
        vr = weak.value_range(p, D, H)
        good = True
        if vr is not None:
            vs = range(vr.c_lo - 1, vr.c_hi + 2)
            for name, fn in (("weak", lambda v: weak.lower_bound(v, p, H)),
                             ("strong", lambda v: strong.lower_bound_strong(v, p, D, H))):
                lbs = [fn(v) for v in vs]
                if any(x > y for x, y in zip(lbs, lbs[1:])):
                    good = False
                    problems.append((k, name, lbs))
        monotone += good
        pair_ok = True
        for kind in KINDS:
            solve = weak.solve_constraint_mutable if kind == "weak" else strong.solve_constraint_mutable_strong
            with_lb = solve(p, D, H, use_lower_bound=True)
            without = solve(p, D, H, use_lower_bound=False)
            n_with, n_without = len(with_lb.stats.values_examined), len(without.stats.values_examined)
            if with_lb.cost != without.cost or n_with > n_without:
                pair_ok = False
                problems.append((k, kind, with_lb.cost, without.cost, n_with, n_without))
            if n_without:
                reductions.append(1 - n_with / n_without)
        ablation_ok += pair_ok
    mean_red = 100 * sum(reductions) / len(reductions)
    ok = monotone == 50 and ablation_ok == 50
    report(5, ok, f"monotone {monotone}/50, ablation {ablation_ok}/50, "
                  f"mean iteration reduction {mean_red:.1f}% (reported only)")
    assert ok, problems[:5]


# --- 6: dynamic program against the solver -----------------------------------------

def _mip_restricted_min(c, a, b, rows):
    m = mip.MipModel()
    xs = [m.add_binary(f"x{i}") for i in range(len(c))]
    m.add_constraint(dict(zip(xs, a)), ">=", b)
    for q, rhs in rows:
        m.add_constraint(dict(zip(xs, q)), ">=", rhs)
    m.set_objective(dict(zip(xs, c)))
    sol = mip.solve(m)
    return sol.objective if sol.optimal else None


def test_criterion_6_dp_agrees_with_solver(report):
    rng = np.random.default_rng(6)
    agree, failures = 0, []
    for k in range(500):
        n = int(rng.integers(1, 11))
        c = rng.integers(-3, 20, n).tolist()
        a = rng.integers(0, 16, n).tolist()
        b = int(rng.integers(0, 51))
        rows = [(rng.integers(0, 3, n).tolist(), int(rng.integers(0, 4))) for _ in range(int(rng.integers(0, 3)))]
        p = PresentProblem(c, a, b)
        got = dp_restricted_min(p, rows)
        want = _mip_restricted_min(c, a, b, rows)
        if got == want:
            agree += 1
        else:
            failures.append((k, got, want))
    # operation count per right-hand side value, for growing b
    p = PresentProblem(rng.integers(1, 30, 10).tolist(), rng.integers(1, 20, 10).tolist(), 0)
    rows = [([1] * 5 + [0] * 5, 2), ([0] * 5 + [1] * 5, 1)]
    per_b = [dp_restricted_min(p, rows, bb, return_ops=True)[1] / (bb + 1) for bb in (10, 20, 40, 80, 160)]
    linear = max(per_b) <= per_b[0] * 1.0001
    ok = agree == 500 and linear
    report(6, ok, f"{agree}/500 agree, ops/(b+1) over b=10..160: "
                  f"{', '.join(f'{x:.0f}' for x in per_b)}")
    assert agree == 500, failures[:5]
    assert linear, per_b


# --- 7: exactness of the integer solver ----------------------------------------------

def _random_model(rng):
    n = int(rng.integers(1, 13))
    m = mip.MipModel()
    while True:
        widths = rng.integers(0, 5, n)
        if np.prod(widths + 1, dtype=float) <= 10**6:
            break
    for i in range(n):
        lo = int(rng.integers(-3, 3))
        m.add_var(f"v{i}", lo, lo + int(widths[i]))

    def coeff():
        v = int(rng.integers(-6, 7))
        return Fraction(v, int(rng.choice([2, 3]))) if rng.random() < 0.1 else v

    for _ in range(int(rng.integers(0, 6))):
        m.add_constraint([coeff() for _ in range(n)], str(rng.choice(["<=", ">=", "=="])),
                         int(rng.integers(-8, 9)))
    m.set_objective([coeff() for _ in range(n)], str(rng.choice(["min", "max"])))
    return m


def _scaled(coeffs):
    """Integer row and its scale factor for a list of ints and Fractions."""
    den = math.lcm(*(Fraction(v).denominator for v in coeffs))
    return np.array([int(v * den) for v in coeffs], dtype=np.int64), den


def _brute_force(m):
    grids = [np.arange(v.lower, v.upper + 1) for v in m.variables]
    X = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(grids))
    ok = np.ones(len(X), dtype=bool)
    for con in m.constraints:
        row, den = _scaled(con.dense(m.num_vars))
        act, rhs = X @ row, con.rhs * den
        ok &= {"<=": act <= rhs, ">=": act >= rhs, "==": act == rhs}[con.comparator]
    if not ok.any():
        return None
    row, den = _scaled([m.objective.get(j, 0) for j in range(m.num_vars)])
    vals = X[ok] @ row
    return Fraction(int(vals.min() if m.sense == "min" else vals.max()), den)


def test_criterion_7_mip_exactness(report):
    rng = np.random.default_rng(7)
    agree, failures = 0, []
    for k in range(1000):
        m = _random_model(rng)
        want = _brute_force(m)
        sol = mip.solve(m)
        got = sol.objective if sol.optimal else None
        if got == want and (not sol.optimal or m.is_feasible(sol.assignment)):
            agree += 1
        else:
            failures.append((k, got, want))
    report(7, agree == 1000, f"{agree}/1000 agree")
    assert agree == 1000, failures[:5]


# --- 8: mode consistency -------------------------------------------------------------

def test_criterion_8_mode_consistency(report):
    agree, failures = 0, []
    for k in range(50):
        base = "constraint" if k % 2 == 0 else "objective"
        p, D, H = random_case(8000 + k, base, n=3 + k % 3)
        H_all = MutableSpace.build(p, "all", c_box=H.c_box, a_box=H.a_box, b_box=H.b_box)
        ok = True
        for kind in KINDS:
            narrow = _solver(kind).solve(p, D, H, time_limit=600)
            wide = _solver(kind).solve(p, D, H_all, time_limit=600)
            if narrow.status != wide.status or narrow.cost != wide.cost or narrow.status == "BudgetExceeded":
                ok = False
                failures.append((k, base, kind, narrow.cost, wide.cost))
        agree += ok
    report(8, agree == 50, f"{agree}/50 cases agree (weak and strong)")
    assert agree == 50, failures[:5]


# --- 9: desk-scale benchmark ----------------------------------------------------------

def test_criterion_9_benchmark(report, tmp_path):
    t0 = time.perf_counter()
    code = cli.main(["bench", "--sizes", "10", "--correlations", "uncorrelated,strong",
                     "--per-cell", "10", "--kinds", "weak,strong", "--seed", "0",
                     "--out-dir", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    problems = []
    with open(tmp_path / "runs.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != cli.RUN_FIELDS:
            problems.append(f"columns {reader.fieldnames}")
        rows = list(reader)
    if len(rows) != 40:
        problems.append(f"{len(rows)} rows")
    checked = 0
    for r in rows:
        if r["status"] != "Optimal":
            continue
        p = instances.to_cover(instances.generate(10, 1000, r["correlation"], int(r["seed"])))
        D = instances.build_favored(p, "D+", int(r["seed"]))
        H = instances.build_mutable(p, "constraint", 5, "range")
        params = cli.parse_changes(r["changes"], p)
        ok = (_check(r["kind"])(p, D, params).yes and H.contains(params)
              and Distance().cost(params, p.params) == int(r["cost"]) and r["verified"] == "1")
        checked += ok
        if not ok:
            problems.append(f"row {r['instance_id']} {r['kind']} does not re-check")
    optimal = sum(r["status"] == "Optimal" for r in rows)
    for name in ("runtime.svg", "progress_weak.svg", "progress_strong.svg"):
        root = ET.parse(tmp_path / name).getroot()
        if root.tag != "{http://www.w3.org/2000/svg}svg":
            problems.append(f"{name} root {root.tag}")
    rate = {c: sum(r["status"] == "Optimal" for r in rows if r["correlation"] == c) / 20
            for c in ("uncorrelated", "strong")}
    ok = code == 0 and not problems and elapsed < 3600
    report(9, ok, f"{len(rows)} rows, {optimal} optimal, {checked} re-checked, "
                  f"feasible rate uncorrelated {rate['uncorrelated']:.2f} strong {rate['strong']:.2f}, "
                  f"{elapsed:.0f}s")
    assert code == 0
    assert not problems, problems[:5]
    assert elapsed < 3600
