import json
import subprocess
import sys
from pathlib import Path

import pytest

from multical.cli import main
from multical.io import parse_dataset

DATA = Path(__file__).parent / "data"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def record(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


def test_measure_matches_golden(capsys):
    code, out, _ = run(["measure", DATA / "golden_small.jsonl", "--measure", "ssce", "--m", "2"], capsys)
    assert code == 0
    golden = float((DATA / "golden_small.ssce2").read_text())
    assert float(record(out)["value"]) == pytest.approx(golden, abs=1e-9)


def test_unknown_measure_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["measure", str(DATA / "golden_small.jsonl"), "--measure", "nope"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_empty_and_malformed_datasets(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert run(["measure", empty, "--measure", "ece"], capsys)[0] == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"v": [NaN, 1.0], "y": 0}\n')
    assert run(["measure", bad, "--measure", "ece"], capsys)[0] == 2
    off = tmp_path / "off.jsonl"
    off.write_text('{"v": [0.5, 0.6], "y": 0}\n')
    assert run(["measure", off, "--measure", "ece"], capsys)[0] == 2
    assert run(["measure", tmp_path / "missing.jsonl", "--measure", "ece"], capsys)[0] == 2


def test_tolerance_flag(tmp_path, capsys):
    path = tmp_path / "loose.jsonl"
    path.write_text('{"v": [0.5, 0.5000001], "y": 0}\n')
    assert run(["measure", path, "--measure", "ece"], capsys)[0] == 2
    assert run(["--tolerance", "1e-6", "measure", path, "--measure", "ece"], capsys)[0] == 0


def test_guard_violation_exit_code(tmp_path, capsys):
    path = tmp_path / "big.jsonl"
    assert run(["synth", "calibrated", "--k", "2", "--n", "40", "--out", path], capsys)[0] == 0
    assert run(["measure", path, "--measure", "decision"], capsys)[0] == 3
    code, _, err = run(["--max-n", "10", "audit", path, "--family", "psmooth", "--alpha", "0.3"], capsys)
    assert code == 3 and "guard" in err


def test_synth_measure_round_trip(tmp_path, capsys):
    path = tmp_path / "plant.jsonl"
    code, out, _ = run(["synth", "subset", "--k", "3", "--T", "0,1", "--magnitude", "0.4",
                        "--exact", "--out", path], capsys)
    alpha = float(record(out)["certified_alpha"])
    code, out, _ = run(["measure", path, "--measure", "smooth_subset", "--T", "0,1"], capsys)
    assert float(record(out)["value"]) == pytest.approx(alpha, abs=1e-9)
    path2 = tmp_path / "sig.jsonl"
    code, out, _ = run(["synth", "sigmoid", "--k", "3", "--a", "1,0,-1", "--b", "0.5",
                        "--magnitude", "0.2", "--exact", "--out", path2], capsys)
    assert code == 0 and float(record(out)["certified_alpha"]) > 0


def _all_outputs(tmp_path, capsys, tag):
    d = tmp_path / tag
    d.mkdir()
    outs = []
    outs.append(run(["--seed", "5", "synth", "subset", "--k", "4", "--T", "0,1", "--magnitude", "0.6",
                     "--n", "400", "--out", d / "data.jsonl"], capsys)[1])
    outs.append(run(["--seed", "5", "audit", d / "data.jsonl", "--family", "psmooth", "--alpha", "0.3",
                     "--r", "1", "--witness-out", d / "w.json"], capsys)[1])
    outs.append(run(["--seed", "5", "audit", d / "data.jsonl", "--family", "sigmoid", "--L", "2",
                     "--alpha", "0.3", "--r", "1"], capsys)[1])
    outs.append(run(["--seed", "5", "recalibrate", d / "data.jsonl", "--family", "lowdeg",
                     "--degree", "2", "--alpha", "0.3", "--beta", "0.05", "--out", d / "recal.jsonl",
                     "--trace-out", d / "trace.csv", "--map-out", d / "map.json"], capsys)[1])
    outs.append(run(["--seed", "5", "measure", d / "data.jsonl", "--measure", "psce", "--m", "2"], capsys)[1])
    outs.append(run(["--seed", "5", "lab", "birthday", "--k", "3", "--eps", "0.3", "--n", "3,6",
                     "--threads", "2"], capsys)[1])
    outs.append(run(["--seed", "5", "lab", "packing", "--k", "3", "--eps", "0.2"], capsys)[1])
    outs.append(run(["--seed", "5", "lab", "hardfamily", "--k", "4", "--eps", str(1 / 3)], capsys)[1])
    files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
    return outs, files


def test_byte_identical_reruns(tmp_path, capsys):
    a = _all_outputs(tmp_path, capsys, "a")
    b = _all_outputs(tmp_path, capsys, "b")
    assert a == b
    assert record(a[0][1])["detected"] == "true"


def test_witness_file_and_recalibrated_dataset(tmp_path, capsys):
    outs, files = _all_outputs(tmp_path, capsys, "c")
    doc = json.loads(files["w.json"])
    assert doc["function"]["kind"] == "vector_dual"
    assert doc["achieved_correlation"] == pytest.approx(float(record(outs[1])["achieved_correlation"]))
    recal = parse_dataset(files["recal.jsonl"].decode().splitlines())
    assert recal.n == 400
    rec = record(outs[3])
    assert float(rec["final_loss"]) <= float(rec["initial_loss"])
    trace = files["trace.csv"].decode().splitlines()
    assert trace[0] == "iteration,squared_loss,witness_correlation,step_size"
    hard = files and outs[7].splitlines()
    assert hard[0].startswith("k,eps,V,certified_witness_value")


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "multical.cli", "measure",
                          str(DATA / "golden_small.jsonl"), "--measure", "ece"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("measure=ece\nvalue=")


def test_list_metadata_prints_plain_floats(tmp_path, capsys):
    path = tmp_path / "d.jsonl"
    main(["synth", "subset", "--k", "3", "--T", "0", "--magnitude", "0.3", "--n", "200", "--out", str(path)])
    capsys.readouterr()
    assert main(["measure", str(path), "--measure", "fsce"]) == 0
    out = capsys.readouterr().out
    assert "np." not in out
    per = dict(line.split("=", 1) for line in out.splitlines())["per_coordinate"]
    assert len([float(x) for x in per.split(",")]) == 3
