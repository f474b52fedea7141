"""Command-line interface: solve, verify, gen and bench.

Exit codes: 0 optimal / success, 1 usage or input error, 2 infeasible,
3 budget exceeded, 4 oracle ceiling exceeded, 5 algorithm and oracle disagree.
Data goes to stdout (or ``--out``); diagnostics go to stderr, with verbosity
taken from the ``CE_LOG`` environment variable (e.g. ``CE_LOG=debug``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from . import instances, oracle, plots, strong, weak
from .model import (
    KINDS,
    MODES,
    CeResult,
    Distance,
    FavoredSpace,
    MutableSpace,
    Params,
    PresentProblem,
    check_strong,
    check_weak,
)

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_CEILING, EXIT_DISAGREE = 0, 1, 2, 3, 4, 5
STATUS_EXIT = {"Optimal": EXIT_OK, "Infeasible": EXIT_INFEASIBLE, "BudgetExceeded": EXIT_BUDGET}
DEFAULT_TIME_LIMIT = 600.0
RUN_FIELDS = [
    "instance_id", "seed", "correlation", "n", "kind", "mode", "status", "cost", "relative_change_pct",
    "values_examined", "range_size", "cuts", "wall_time", "lower_bound", "changes", "verified", "error",
]

log = logging.getLogger("ilpce")


class UsageError(ValueError):
    pass


def _setup_logging() -> None:
    level = os.environ.get("CE_LOG", "warning").upper()
    log.setLevel(getattr(logging, level, logging.WARNING))
    for h in [h for h in log.handlers if getattr(h, "ilpce_cli", False)]:
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.ilpce_cli = True
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.propagate = False


# --- option mini-languages -----------------------------------------------------------

def _index_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad index list {text!r}") from None


def parse_favored(spec: str, p: PresentProblem) -> FavoredSpace:
    """``fix+:3,7`` | ``fix-:2`` | ``atleast:1,4,9>=1`` | ``auto:D+:seed=5``."""
    kind, _, rest = spec.partition(":")
    if kind == "fix+":
        D = FavoredSpace.positive(_index_list(rest))
    elif kind == "fix-":
        D = FavoredSpace.negative(_index_list(rest))
    elif kind == "atleast":
        items, sep, beta = rest.partition(">=")
        if not sep:
            raise UsageError("atleast needs '>=BETA', e.g. atleast:1,4>=1")
        alpha = [0] * p.n
        for i in _index_list(items):
            if not 0 <= i < p.n:
                raise UsageError(f"index {i} out of range")
            alpha[i] = 1
        try:
            D = FavoredSpace.at_least(alpha, int(beta))
        except ValueError:
            raise UsageError(f"bad beta {beta!r}") from None
    elif kind == "auto":
        which, _, opts = rest.partition(":")
        seed = 0
        if opts:
            key, _, val = opts.partition("=")
            if key != "seed":
                raise UsageError(f"unknown auto option {key!r}")
            try:
                seed = int(val)
            except ValueError:
                raise UsageError(f"bad seed {val!r}") from None
        if which not in instances.FAVORED_KINDS:
            raise UsageError(f"auto kind must be one of {instances.FAVORED_KINDS}")
        try:
            D = instances.build_favored(p, which, seed)
        except ValueError as err:
            raise UsageError(str(err)) from None
    else:
        raise UsageError(f"unknown favored space {spec!r}")
    try:
        D.check_size(p.n)
    except ValueError as err:
        raise UsageError(str(err)) from None
    return D


def parse_mutable(spec: Optional[str], p: PresentProblem, mode: Optional[str]) -> MutableSpace:
    """``mode=constraint;pct=5;basis=range;R=1000;b=0``; missing keys take defaults."""
    opts = {}
    for part in (spec or "").split(";"):
        if not part.strip():
            continue
        key, sep, val = part.partition("=")
        if not sep:
            raise UsageError(f"bad mutable option {part!r}")
        opts[key.strip()] = val.strip()
    unknown = set(opts) - {"mode", "pct", "basis", "R", "b"}
    if unknown:
        raise UsageError(f"unknown mutable options {sorted(unknown)}")
    mode = opts.get("mode", mode or "constraint")
    if mode not in MODES:
        raise UsageError(f"mode must be one of {MODES}")
    basis = opts.get("basis", "range")
    if basis not in instances.BASES:
        raise UsageError(f"basis must be one of {instances.BASES}")
    b_flag = opts.get("b")
    mutable_b = None if b_flag is None else b_flag in ("1", "true", "yes")
    try:
        return instances.build_mutable(p, mode, opts.get("pct", "5"), basis,
                                       R=int(opts.get("R", instances.DEFAULT_RANGE)),
                                       mutable_b=mutable_b)
    except ValueError as err:
        raise UsageError(str(err)) from None


# --- shared helpers ------------------------------------------------------------------

def solve_ce(p, D, H, kind, *, time_limit=DEFAULT_TIME_LIMIT, use_lower_bound=True) -> CeResult:
    module = strong if kind == "strong" else weak
    return module.solve(p, D, H, time_limit=time_limit, use_lower_bound=use_lower_bound)


def result_json(res: CeResult, p: PresentProblem) -> dict:
    st = res.stats
    doc = {
        "schema": SCHEMA,
        "status": res.status,
        "kind": res.kind,
        "mode": res.mode,
        "cost": res.cost,
        "params": None,
        "changes": None,
        "witness": None if res.witness is None else list(res.witness),
        "stats": {
            "values_examined": len(st.values_examined),
            "value_range": None if st.value_range is None else list(st.value_range),
            "range_size": st.range_size,
            "cuts": st.cuts_total,
            "subproblem_solves": st.subproblem_solves,
            "wall_time": st.wall_time,
            "lower_bound": st.lower_bound_enabled,
            "trace": [
                {"v": v, "primal": prim, "dual": None if dual is None or dual == float("inf") else dual,
                 "dual_infinite": dual == float("inf")}
                for v, prim, dual in st.trace
            ],
        },
    }
    if res.params is not None:
        c, a, b = res.params
        doc["params"] = {"c": list(c), "a": list(a), "b": b}
        doc["changes"] = changes(res.params, p)
    return doc


def changes(params, p: PresentProblem) -> dict:
    """Nonzero deviations from the present parameters, keyed ``c3``, ``a0``, ``b``."""
    c, a, b = params
    out = {f"c{i}": x - y for i, (x, y) in enumerate(zip(c, p.c_hat)) if x != y}
    out.update({f"a{i}": x - y for i, (x, y) in enumerate(zip(a, p.a_hat)) if x != y})
    if b != p.b_hat:
        out["b"] = b - p.b_hat
    return out


def format_changes(ch: dict) -> str:
    return " ".join(f"{k}:{v:+d}" for k, v in ch.items())


def parse_changes(text: str, p: PresentProblem):
    """Inverse of :func:`format_changes` applied to the present parameters."""
    c, a, b = list(p.c_hat), list(p.a_hat), p.b_hat
    for tok in text.split():
        key, delta = tok.split(":")
        if key == "b":
            b += int(delta)
        else:
            (c if key[0] == "c" else a)[int(key[1:])] += int(delta)
    return Params(tuple(c), tuple(a), b)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    try:
        text = Path(args.instance).read_text()
    except OSError as err:
        raise UsageError(f"cannot read {args.instance}: {err.strerror}") from None
    try:
        p, favored, mutable, meta = instances.read_problem(text, args.format)
    except ValueError as err:
        raise UsageError(str(err)) from None
    if args.favored:
        favored = parse_favored(args.favored, p)
    if favored is None:
        raise UsageError("no favored space: pass --favored or use an instance that stores one")
    if args.mutable or mutable is None or (args.mode and args.mode != mutable.mode):
        mutable = parse_mutable(args.mutable, p, args.mode)
    return p, favored, mutable


# --- commands ------------------------------------------------------------------------

def cmd_solve(args) -> int:
    p, D, H = _load(args)
    res = solve_ce(p, D, H, args.kind, time_limit=args.time_limit,
                   use_lower_bound=not args.no_lower_bound)
    log.info("status %s cost %s after %.2fs", res.status, res.cost, res.stats.wall_time)
    for v, prim, dual in res.stats.trace:
        log.debug("v=%s primal=%s dual=%s", v, prim, dual)
    _emit(json.dumps(result_json(res, p), indent=1) + "\n", args.out)
    return STATUS_EXIT[res.status]


def cmd_verify(args) -> int:
    p, D, H = _load(args)
    try:
        region = oracle.enumerate(p, D, H, ceiling=args.ceiling)
    except oracle.CeilingExceeded as err:
        print(f"REFUSED {err}", file=sys.stderr)
        return EXIT_CEILING
    if args.map_out:
        region.to_csv(args.map_out)
    if args.map_svg:
        try:
            Path(args.map_svg).write_text(plots.region_map_svg(region))
        except ValueError as err:
            log.warning("no region map plot: %s", err)
    words, agree = [], True
    for kind in args.kinds.split(","):
        if kind not in KINDS:
            raise UsageError(f"unknown kind {kind!r}")
        truth = oracle.optimal_cost(region, kind=kind)
        res = solve_ce(p, D, H, kind, time_limit=args.time_limit)
        got = res.cost if res.status == "Optimal" else None
        ok = res.status != "BudgetExceeded" and got == truth
        if ok and got is not None:
            ok = region.label(_point(region, res.params)) in (("strong",) if kind == "strong" else ("weak", "strong"))
        words.append(f"{kind}={'none' if got is None else got}")
        if not ok:
            agree = False
            words[-1] += f"(oracle={'none' if truth is None else truth})"
            hit = _cheapest_point(region, kind)
            if hit is not None:
                words[-1] += f"[counterexample {dict(zip(region.axes, hit))}]"
    print(("AGREE " if agree else "DISAGREE ") + " ".join(words))
    return EXIT_OK if agree else EXIT_DISAGREE


def _point(region, params) -> list:
    return [plots._coord(params, name) for name in region.axes]


def _cheapest_point(region, kind):
    import numpy as np

    ok = region.labels == "strong"
    if kind == "weak":
        ok = ok | (region.labels == "weak")
    if not ok.any():
        return None
    idx = np.flatnonzero(ok)
    k = idx[np.argmin(region.costs[idx])]
    return region.points[k].tolist()


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise UsageError(f"cannot create {out}: {err.strerror}") from None
    manifest = []
    for k in range(args.count):
        seed = args.seed + k
        raw = instances.generate(args.n, args.range, args.correlation, seed)
        name = f"{args.correlation}_n{args.n}_s{seed}.txt"
        try:
            (out / name).write_text(instances.serialize_kplib(raw))
        except OSError as err:
            raise UsageError(f"cannot write {out / name}: {err.strerror}") from None
        manifest.append({"file": name, "seed": seed, "n": args.n, "range": args.range,
                         "correlation": args.correlation})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    print(json.dumps({"schema": SCHEMA, "files": [m["file"] for m in manifest]}))
    return EXIT_OK


def _bench_row(task) -> list:
    inst_id, corr, n, seed, kinds, ablate, time_limit, favored_kind, pct, basis, R = task
    raw = instances.generate(n, R, corr, seed)
    p = instances.to_cover(raw)
    rows, traces = [], []
    base = {"instance_id": inst_id, "seed": seed, "correlation": corr, "n": n, "mode": "constraint"}
    try:
        D = instances.build_favored(p, favored_kind, seed)
        H = instances.build_mutable(p, "constraint", pct, basis, R=R)
    except ValueError as err:
        for kind in kinds:
            rows.append({**base, "kind": kind, "status": "Error", "error": str(err)})
        return rows, traces
    for kind in kinds:
        for use_lb in ((True, False) if ablate else (True,)):
            row = {**base, "kind": kind, "lower_bound": int(use_lb)}
            try:
                res = solve_ce(p, D, H, kind, time_limit=time_limit, use_lower_bound=use_lb)
            except Exception as err:  # recorded per row, the sweep goes on
                row.update(status="Error", error=f"{type(err).__name__}: {err}")
                rows.append(row)
                continue
            st = res.stats
            row.update(
                status=res.status,
                cost="" if res.cost is None else res.cost,
                relative_change_pct="" if res.cost is None else
                f"{100 * res.cost / max(sum(abs(v) for v in p.a_hat), 1):.4f}",
                values_examined=len(st.values_examined),
                range_size="" if st.range_size is None else st.range_size,
                cuts=st.cuts_total,
                wall_time=f"{st.wall_time:.4f}",
                changes="" if res.params is None else format_changes(changes(res.params, p)),
                error="",
            )
            if res.status == "Optimal":
                check = check_strong if kind == "strong" else check_weak
                row["verified"] = int(check(p, D, res.params).yes
                                      and Distance().cost(res.params, p.params) == res.cost
                                      and H.contains(res.params))
            else:
                row["verified"] = ""
            rows.append(row)
            if use_lb and res.status == "Optimal" and st.value_range and res.cost:
                lo, hi = st.value_range
                size = hi - lo + 1
                traces.append({
                    "instance_id": inst_id, "kind": kind,
                    "points": [((v - lo + 1) / size,
                                None if prim is None else prim / res.cost,
                                None if dual is None or dual == float("inf") else dual / res.cost)
                               for v, prim, dual in st.trace],
                })
    return rows, traces


def cmd_bench(args) -> int:
    kinds = args.kinds.split(",")
    corrs = args.correlations.split(",")
    for k in kinds:
        if k not in KINDS:
            raise UsageError(f"unknown kind {k!r}")
    for c in corrs:
        if c not in instances.CORRELATIONS:
            raise UsageError(f"unknown correlation {c!r}")
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise UsageError(f"bad sizes {args.sizes!r}") from None
    tasks = []
    for n in sizes:
        for corr in corrs:
            for k in range(args.per_cell):
                seed = args.seed + 1000 * n + 100 * corrs.index(corr) + k
                tasks.append((f"{corr}_n{n}_{k}", corr, n, seed, kinds, args.ablate_lb,
                              args.time_limit, args.favored_kind, args.pct, args.basis, args.range))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_bench_row, tasks))
    else:
        results = [_bench_row(t) for t in tasks]
    rows = [r for rs, _ in results for r in rs]
    traces = [t for _, ts in results for t in ts]

    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise UsageError(f"cannot create {out}: {err.strerror}") from None
    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RUN_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in RUN_FIELDS})
    with open(out / "progress.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance_id", "kind", "x", "primal", "dual"])
        for t in traces:
            for x, prim, dual in t["points"]:
                w.writerow([t["instance_id"], t["kind"], f"{x:.6f}",
                            "" if prim is None else f"{prim:.6f}", "" if dual is None else f"{dual:.6f}"])
    groups = {}
    for r in rows:
        if r.get("status") == "Optimal" and r.get("lower_bound", 1):
            groups.setdefault(f"{r['kind']} {r['correlation'][:5]} n{r['n']}", []).append(float(r["wall_time"]))
    (out / "runtime.svg").write_text(plots.boxplot_svg(groups, "Runtime of optimal runs"))
    for kind in kinds:
        series = [([x for x, _, _ in t["points"]], [pr for _, pr, _ in t["points"]],
                   [du for _, _, du in t["points"]]) for t in traces if t["kind"] == kind]
        (out / f"progress_{kind}.svg").write_text(plots.progress_svg(series, f"Bound progress ({kind})"))

    summary = {"schema": SCHEMA, "rows": len(rows),
               "optimal": sum(r.get("status") == "Optimal" for r in rows),
               "verified": sum(r.get("verified") == 1 for r in rows)}
    if args.ablate_lb:
        pairs = {}
        for r in rows:
            if r.get("status") in ("Optimal",):
                pairs.setdefault((r["instance_id"], r["kind"]), {})[r["lower_bound"]] = r["values_examined"]
        reductions = [1 - d[1] / d[0] for d in pairs.values() if 0 in d and 1 in d and d[0]]
        summary["lb_pairs"] = len(reductions)
        summary["lb_monotone"] = all(d[1] <= d[0] for d in pairs.values() if 0 in d and 1 in d)
        summary["lb_mean_reduction"] = sum(reductions) / len(reductions) if reductions else None
    print(json.dumps(summary))
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------------

def _instance_args(sp) -> None:
    sp.add_argument("--instance", required=True, help="native JSON instance or kplib file")
    sp.add_argument("--format", choices=instances.FORMATS, default="profit-weight",
                    help="kplib column order")
    sp.add_argument("--favored", help="fix+:I,J | fix-:I | atleast:I,J>=B | auto:D+:seed=S")
    sp.add_argument("--mutable", help="mode=M;pct=P;basis=range|coefficient;R=1000;b=0|1")
    sp.add_argument("--mode", choices=MODES)
    sp.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ilpce", description="Counterfactual explanations for binary ILPs")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="compute an optimal weak or strong CE")
    _instance_args(sp)
    sp.add_argument("--kind", choices=KINDS, default="weak")
    sp.add_argument("--no-lower-bound", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="compare the algorithms with brute force")
    _instance_args(sp)
    sp.add_argument("--kinds", default="weak,strong")
    sp.add_argument("--ceiling", type=int, default=oracle.DEFAULT_CEILING)
    sp.add_argument("--map-out", help="write the region map as CSV")
    sp.add_argument("--map-svg", help="write the region map as SVG (two varying coordinates)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="generate random cover instances")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--range", type=int, default=instances.DEFAULT_RANGE)
    sp.add_argument("--correlation", choices=instances.CORRELATIONS, default="uncorrelated")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="benchmark sweep over generated instances")
    sp.add_argument("--sizes", default="10")
    sp.add_argument("--correlations", default="uncorrelated,strong")
    sp.add_argument("--per-cell", type=int, default=5)
    sp.add_argument("--kinds", default="weak,strong")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ablate-lb", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    sp.add_argument("--favored-kind", choices=instances.FAVORED_KINDS, default="D+")
    sp.add_argument("--pct", default="5")
    sp.add_argument("--basis", choices=instances.BASES, default="range")
    sp.add_argument("--range", type=int, default=instances.DEFAULT_RANGE)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
