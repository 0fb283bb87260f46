import csv
import io
import json
import subprocess
import sys

import pytest

from lowmoments.cli import COLUMNS, REPORT_COLUMNS, main, normalize_config, ConfigError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_char_moments_orthogonality_row(capsys):
    code, out, _ = run_cli(capsys, "char-moments", "--r", "101", "--x", "50", "--q", "0,1")
    assert code == 0
    assert out.splitlines()[1].split(",") == list(COLUMNS)
    rows = rows_of(out)
    assert float(rows[0]["estimate"]) == 1.0
    assert abs(float(rows[1]["estimate"]) - 50) < 1e-9
    assert rows[1]["bound_name"] == "thm1" and rows[1]["method"] == "exact-average"
    assert rows[1]["wall_time_ms"] == ""


def test_config_line_records_resolved_parameters(capsys):
    _, out, _ = run_cli(capsys, "char-moments", "--r", "101", "--x", "50", "--q", "1")
    first = out.splitlines()[0]
    assert first.startswith("# config ")
    cfg = json.loads(first[len("# config "):])
    assert cfg == {"experiment": "char-moments", "q": [1.0], "r": 101, "x": 50}


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# sweep point\nr = 101\nx = 10\nq = 1\n")
    _, out, _ = run_cli(capsys, "char-moments", "--config", str(conf))
    assert abs(float(rows_of(out)[0]["estimate"]) - 10) < 1e-9
    _, out, _ = run_cli(capsys, "char-moments", "--config", str(conf), "--x", "20")
    assert abs(float(rows_of(out)[0]["estimate"]) - 20) < 1e-9
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"r": 101, "x": 30, "q": [1]}))
    _, out, _ = run_cli(capsys, "char-moments", "--config", str(js))
    assert abs(float(rows_of(out)[0]["estimate"]) - 30) < 1e-9


def test_output_path(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run_cli(capsys, "char-moments", "--r", "101", "--x", "5", "--out", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("# config")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.csv"]


@pytest.mark.parametrize("argv", [
    ["rmf-moments", "--x", "10", "--samples", "10"],
    ["char-moments", "--r", "100", "--x", "5"],
    ["char-moments", "--r", "101", "--x", "5", "--q", "2"],
    ["char-moments", "--r", "101", "--x", "500"],
    ["char-moments"],
    ["no-such-experiment"],
    ["zeta-moments", "--x", "10", "--t-max", "100", "--seed", "-1"],
])
def test_invalid_config_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    if err.strip().startswith("{"):
        rec = json.loads(err.strip().splitlines()[-1])
        assert rec["exit_code"] == 2 and rec["error"] == "invalid-config"


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        normalize_config({"colour": "red"})
    with pytest.raises(ConfigError):
        normalize_config({"r": "1.5"})


def test_capacity_exit_3(tmp_path, capsys):
    conf = tmp_path / "caps.json"
    conf.write_text(json.dumps({"r": 10007, "x": 10, "caps": {"modulus": 1000}}))
    code, _, err = run_cli(capsys, "char-moments", "--config", str(conf))
    assert code == 3 and json.loads(err)["error"] == "capacity"


def test_tolerance_exit_4(capsys):
    # an absurd t_max cut-off makes the Parseval comparison miss its tolerance
    code, out, err = run_cli(capsys, "verify-parseval", "--seed", "1", "--t-max", "1")
    assert code == 4 and json.loads(err)["error"] == "tolerance"
    assert rows_of(out)


@pytest.mark.parametrize("argv", [
    ["rmf-moments", "--x", "200", "--samples", "300", "--seed", "5", "--q", "0.5,1"],
    ["zeta-moments", "--x", "30", "--t-max", "1000", "--samples", "300", "--seed", "5"],
    ["chaos-moments", "--p-limit", "100", "--samples", "200", "--seed", "5"],
    ["verify-parseval", "--seed", "5"],
])
def test_byte_identical_reruns(capsys, argv):
    _, a, _ = run_cli(capsys, *argv)
    _, b, _ = run_cli(capsys, *argv, "--threads", "3")
    _, c, _ = run_cli(capsys, *argv)
    assert a == c
    # thread count is recorded in the config line but never changes the rows
    assert a.splitlines()[1:] == b.splitlines()[1:]


def test_all_experiments_run(capsys):
    cases = [
        ["theta-moments", "--r", "101"],
        ["tails", "--r", "10007", "--x", "100", "--lambda", "2,4"],
        ["verify-partition", "--delta", "0.5", "--N", "5"],
        ["verify-orthogonality", "--r", "101"],
        ["chaos-moments", "--p-limit", "100", "--samples", "50", "--seed", "1", "--estimator", "discrete"],
        ["zeta-moments", "--x", "20", "--t-max", "100", "--mode", "quadrature", "--q", "1"],
    ]
    for argv in cases:
        code, out, err = run_cli(capsys, *argv)
        assert code == 0, (argv, err)
        assert rows_of(out)


def test_report_passthrough_and_trend(tmp_path, capsys):
    paths = []
    for r in (10007, 100003):
        p = tmp_path / f"r{r}.csv"
        x = int(r**0.5)
        assert main(["char-moments", "--r", str(r), "--x", str(x), "--q", "0.5", "--out", str(p)]) == 0
        paths.append(p)
    capsys.readouterr()
    code, out, _ = run_cli(capsys, "report", *map(str, paths), "--sweep", "r")
    assert code == 0
    rep = list(csv.DictReader(io.StringIO(out)))
    raw = rows_of(paths[0].read_text()) + rows_of(paths[1].read_text())
    assert list(rep[0]) == list(REPORT_COLUMNS)
    for a, b in zip(raw, rep):
        assert all(a[c] == b[c] for c in COLUMNS)
    ms = [float(r["m"]) for r in rep]
    for row, m in zip(raw, ms):
        assert m == float(row["estimate"]) / float(row["x"]) ** 0.5
    assert {r["trend"] for r in rep} == {"pass" if ms[1] <= ms[0] else "fail"}


def test_report_single_input_and_blank_se(tmp_path, capsys):
    p = tmp_path / "one.csv"
    main(["char-moments", "--r", "101", "--x", "50", "--q", "1", "--out", str(p)])
    text = p.read_text().replace(",0,thm1", ",,thm1")
    p.write_text(text)
    capsys.readouterr()
    code, out, _ = run_cli(capsys, "report", str(p))
    rep = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rep) == 1 and rep[0]["std_error"] == "0" and rep[0]["trend"] == ""


def test_report_schema_mismatch(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("experiment,r,x\nchar-moments,101,5\n")
    code, _, err = run_cli(capsys, "report", str(bad))
    assert code == 2 and "schema" in json.loads(err)["message"]


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "lowmoments.cli", "verify-orthogonality", "--r", "101"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "floor-x" in res.stdout


def test_report_trend_ignores_rounding(tmp_path, capsys):
    paths = []
    for r in (101, 1009):
        p = tmp_path / f"r{r}.csv"
        main(["char-moments", "--r", str(r), "--x", "50", "--q", "1", "--out", str(p)])
        paths.append(str(p))
    capsys.readouterr()
    _, out, _ = run_cli(capsys, "report", *paths)
    assert {r["trend"] for r in csv.DictReader(io.StringIO(out))} == {"pass"}
