import csv
import json
from pathlib import Path

import pytest

from ilpce import cli, instances
from ilpce.cli import UsageError, main, parse_favored, parse_mutable
from ilpce.model import FavoredSpace, check_strong, check_weak

DATA = Path(__file__).resolve().parent.parent / "data"
EXAMPLE_FILE = str(DATA / "example1.json")
TABLE_FILE = str(DATA / "table1.txt")


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("kind,cost", [("weak", 1), ("strong", 2)])
def test_solve_example(capsys, kind, cost):
    code, out, _ = _run(capsys, "solve", "--instance", EXAMPLE_FILE, "--kind", kind, "--mode", "constraint")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == 1 and doc["status"] == "Optimal" and doc["cost"] == cost
    assert doc["stats"]["trace"] and doc["stats"]["range_size"] == 4


def test_solve_output_rechecks(tmp_path, capsys):
    out = tmp_path / "res.json"
    assert main(["solve", "--instance", EXAMPLE_FILE, "--kind", "strong", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    p, D, _, _ = instances.read_problem(Path(EXAMPLE_FILE).read_text())
    params = (tuple(doc["params"]["c"]), tuple(doc["params"]["a"]), doc["params"]["b"])
    assert check_strong(p, D, params).yes and check_weak(p, D, params).yes
    assert cli.parse_changes(cli.format_changes(doc["changes"]), p) == params


def test_solve_time_limit_zero(capsys):
    code, out, _ = _run(capsys, "solve", "--instance", EXAMPLE_FILE, "--time-limit", "0")
    assert code == 3
    doc = json.loads(out)
    assert doc["status"] == "BudgetExceeded" and doc["params"] is None


def test_solve_infeasible(capsys):
    code, out, _ = _run(capsys, "solve", "--instance", EXAMPLE_FILE, "--mutable", "mode=constraint;pct=0")
    assert code == 2 and json.loads(out)["status"] == "Infeasible"


def test_solve_kplib_with_specs(capsys):
    code, out, _ = _run(capsys, "solve", "--instance", TABLE_FILE, "--favored", "fix+:0",
                        "--mutable", "mode=constraint;pct=5;basis=range", "--kind", "weak")
    doc = json.loads(out)
    assert code == 0 and doc["cost"] <= 44
    assert all(k.startswith("a") for k in doc["changes"])


def test_solve_without_lower_bound(capsys):
    code, out, _ = _run(capsys, "solve", "--instance", EXAMPLE_FILE, "--no-lower-bound")
    doc = json.loads(out)
    assert code == 0 and doc["cost"] == 1 and doc["stats"]["lower_bound"] is False


def test_verify_example(tmp_path, capsys):
    csv_path, svg_path = tmp_path / "map.csv", tmp_path / "map.svg"
    code, out, _ = _run(capsys, "verify", "--instance", EXAMPLE_FILE,
                        "--map-out", str(csv_path), "--map-svg", str(svg_path))
    assert code == 0
    assert out.strip() == "AGREE weak=1 strong=2"
    with open(csv_path, newline="") as fh:
        labels = [row["label"] for row in csv.DictReader(fh)]
    assert labels.count("strong") == 9 and labels.count("weak") == 5 and labels.count("outside") == 11
    assert svg_path.read_text().startswith("<?xml")


def test_verify_degenerate_and_ceiling(capsys):
    code, out, _ = _run(capsys, "verify", "--instance", EXAMPLE_FILE, "--mutable", "pct=0")
    assert code == 0 and out.startswith("AGREE")
    code, out, err = _run(capsys, "verify", "--instance", EXAMPLE_FILE, "--ceiling", "10")
    assert code == 4 and out == "" and "REFUSED" in err


def test_verify_random_batch(tmp_path, capsys):
    from helpers import random_case

    for seed in range(20):
        p, D, H = random_case(seed, ["constraint", "objective", "rhs", "all"][seed % 4])
        path = tmp_path / f"case{seed}.json"
        path.write_text(instances.dump_instance(p, D, H))
        code, out, _ = _run(capsys, "verify", "--instance", str(path))
        assert code == 0, out


def test_gen(tmp_path, capsys):
    code, out, _ = _run(capsys, "gen", "--n", "10", "--correlation", "strong", "--count", "3",
                        "--seed", "7", "--out-dir", str(tmp_path / "a"))
    assert code == 0
    files = json.loads(out)["files"]
    assert len(files) == 3
    main(["gen", "--n", "10", "--correlation", "strong", "--count", "3", "--seed", "7",
          "--out-dir", str(tmp_path / "b")])
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert [m["seed"] for m in manifest] == [7, 8, 9]
    for name in files:
        text = (tmp_path / "a" / name).read_text()
        assert text == (tmp_path / "b" / name).read_text()
        raw = instances.parse_kplib(text)
        assert raw.n == 10 and all(c - w == 100 for c, w in raw.items)


def test_gen_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = _run(capsys, "gen", "--n", "3", "--out-dir", str(blocker / "sub"))
    assert code == 1 and "error" in err


def test_bench_small(tmp_path, capsys):
    code, out, _ = _run(capsys, "bench", "--sizes", "6", "--per-cell", "2", "--kinds", "weak,strong",
                        "--ablate-lb", "--out-dir", str(tmp_path))
    assert code == 0
    summary = json.loads(out)
    assert summary["rows"] == 16 and summary["lb_monotone"] is True
    with open(tmp_path / "runs.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16
    assert all(r["verified"] == "1" for r in rows if r["status"] == "Optimal")
    for r in rows:
        if r["range_size"]:
            assert int(r["range_size"]) >= int(r["values_examined"]) or r["lower_bound"] == "0"
    for name in ("progress.csv", "runtime.svg", "progress_weak.svg", "progress_strong.svg"):
        assert (tmp_path / name).exists()


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["solve"]) == 1
    assert main(["solve", "--instance", "/nonexistent/file"]) == 1
    assert main(["solve", "--instance", TABLE_FILE]) == 1  # no favored space
    assert main(["solve", "--instance", TABLE_FILE, "--favored", "auto:D+:seed=x"]) == 1
    assert main(["bench", "--kinds", "medium", "--out-dir", "/tmp/none"]) == 1
    capsys.readouterr()


def test_parse_favored():
    p = instances.to_cover(instances.parse_kplib(Path(TABLE_FILE).read_text()))
    assert parse_favored("fix+:3,7", p) == FavoredSpace.positive([3, 7])
    assert parse_favored("fix-:2", p) == FavoredSpace.negative([2])
    D = parse_favored("atleast:1,4,9>=1", p)
    assert D.alpha == (0, 1, 0, 0, 1, 0, 0, 0, 0, 1) and D.beta == 1
    assert parse_favored("auto:D+:seed=5", p) == instances.build_favored(p, "D+", 5)
    for bad in ("fix+:12", "atleast:1", "nope:1", "fix+:a", "auto:D*"):
        with pytest.raises(UsageError):
            parse_favored(bad, p)


def test_parse_mutable():
    p = instances.to_cover(instances.parse_kplib(Path(TABLE_FILE).read_text()))
    H = parse_mutable("mode=constraint;pct=5;basis=range", p, None)
    assert H == instances.build_mutable(p, "constraint", 5, "range")
    assert parse_mutable(None, p, "objective").mode == "objective"
    H = parse_mutable("pct=10;R=200;b=1", p, "constraint")
    assert H.a_box[0] == (115, 155) and H.b_box == (p.b_hat - 20, p.b_hat + 20)
    for bad in ("mode=x", "pct", "basis=other", "colour=red"):
        with pytest.raises(UsageError):
            parse_mutable(bad, p, None)


def test_log_level_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("CE_LOG", "debug")
    code, out, err = _run(capsys, "solve", "--instance", EXAMPLE_FILE)
    assert code == 0 and "v=" in err
    assert json.loads(out)["cost"] == 1
