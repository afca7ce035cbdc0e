import csv

import pytest

from ipndn.cli import (
    EXIT_INVALID,
    EXIT_MISSING,
    EXIT_UNWRITABLE,
    UsageError,
    main,
    parse_duration,
    parse_seeds,
)

DUP = """\
nodes:
  - {id: a, role: ndn-router}
  - {id: a, role: ndn-router}
links: []
"""


def test_parse_duration():
    assert parse_duration("10s") == 10_000
    assert parse_duration("500ms") == 500
    assert parse_duration("2") == 2000
    assert parse_duration("0.25s") == 250
    for bad in ("0", "0ms", "-1s", "ten", ""):
        with pytest.raises(UsageError):
            parse_duration(bad)


def test_parse_seeds():
    assert parse_seeds("1-3,7") == [1, 2, 3, 7]
    assert parse_seeds("5") == [5]
    with pytest.raises(UsageError):
        parse_seeds(",")


def test_validate_ok(capsys):
    assert main(["validate", "paper-fig2"]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_duplicate_id(tmp_path, capsys):
    p = tmp_path / "dup.yaml"
    p.write_text(DUP)
    assert main(["validate", str(p)]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "'a'" in err and "line 3" in err


def test_validate_loss_range(tmp_path, capsys):
    text = open_bundled().replace("{a: r1, b: r2,", "{a: r1, b: r2, loss: 1.5,")
    assert "loss: 1.5" in text
    p = tmp_path / "loss.yaml"
    p.write_text(text)
    assert main(["validate", str(p)]) == EXIT_INVALID
    assert "out of range" in capsys.readouterr().err


def open_bundled():
    from ipndn.simnet import resolve_scenario_path

    return resolve_scenario_path("lossless-line").read_text()


def test_missing_file():
    assert main(["validate", "no/such/file.yaml"]) == EXIT_MISSING
    assert main(["run", "no/such/file.yaml", "--out", "x"]) == EXIT_MISSING


def test_duration_zero(tmp_path):
    assert main(["run", "paper-fig2", "--duration", "0", "--out", str(tmp_path)]) == EXIT_INVALID


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "paper-fig2", "--duration", "50ms", "--out", str(blocker / "sub")]) == EXIT_UNWRITABLE


def test_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["run"])
    assert e.value.code == 2


def test_run_writes_csvs(tmp_path):
    assert main(["run", "paper-fig2", "--mode", "improved", "--seed", "2", "--duration", "200ms",
                 "--out", str(tmp_path)]) == 0
    flows = list(csv.DictReader(open(tmp_path / "flows.csv", newline="")))
    nodes = list(csv.DictReader(open(tmp_path / "nodes.csv", newline="")))
    assert len(flows) >= 1 and flows[0]["mode"] == "improved"
    assert {n["node_id"] for n in nodes} >= {"nodeA", "nodeB", "r1", "r2", "r3"}


def test_run_repeatable(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert main(["run", "paper-fig2", "--seed", "1", "--duration", "200ms", "--out", str(d)]) == 0
        outs.append(((d / "flows.csv").read_bytes(), (d / "nodes.csv").read_bytes()))
    assert outs[0] == outs[1]


def test_compare_single_seed_omits_ci(tmp_path, capsys):
    assert main(["compare", "paper-fig2", "--seeds", "1", "--duration", "200ms", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "summary.csv", newline="")))
    assert {r["mode"] for r in rows} == {"basic", "improved"}
    assert all(r["ci95"] == "" and r["mean"] != "" for r in rows)
    assert "n/a" in capsys.readouterr().out


def test_compare_overhead_ratio_under_bursts(tmp_path):
    text = open_bundled().replace(
        "flows: []",
        "flows:\n  - {id: f, kind: burst, src: hostA, dst: hostB, size: 980, burst: 5, gap_ms: 20, stop_ms: 400}\n",
    )
    p = tmp_path / "burst.yaml"
    p.write_text(text)
    assert main(["compare", str(p), "--seeds", "1-2", "--duration", "400ms", "--out", str(tmp_path / "o")]) == 0
    runs = list(csv.DictReader(open(tmp_path / "o" / "runs.csv", newline="")))
    ratio = {r["mode"]: float(r["overhead_ratio"]) for r in runs}
    assert ratio["basic"] == pytest.approx(3.0)
    assert ratio["improved"] < 3.0


def test_compare_jobs_match_serial(tmp_path):
    args = ["compare", "paper-fig2", "--seeds", "1-2", "--duration", "150ms"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    for name in ("runs.csv", "flows.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
