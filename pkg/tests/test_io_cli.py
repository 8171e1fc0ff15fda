import json

import numpy as np
import pytest

from wiretap import cli, io
from wiretap.channel import load_channel, make_standard


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fmt_and_round_floats():
    assert io.fmt(1 / 3) == "0.333333333333"
    assert io.fmt(float("inf")) == "inf"
    assert io.round_floats({"a": [np.float64(2 / 3)], "b": np.int64(4)}) == {"a": [0.666666666667], "b": 4}


def test_classify_named(capsys):
    code, out, _ = run(capsys, "classify", "--bsc-bec", 0.1, 0.6)
    rep = json.loads(out)
    assert code == 0
    assert rep["dominantly_cyclic"] and not rep["more_capable"]
    code, out, _ = run(capsys, "classify", "--bec-bsc", 0.45, 0.1)
    rep = json.loads(out)
    assert rep["more_capable"] and not rep["less_noisy"]


def test_classify_identity_file(tmp_path, capsys):
    path = tmp_path / "id.json"
    path.write_text(json.dumps({"main": [[1, 0], [0, 1]], "eavesdropper": [[1, 0], [0, 1]]}))
    code, out, _ = run(capsys, "classify", "--file", path)
    rep = json.loads(out)
    assert code == 0 and rep["less_noisy"] and rep["C_s"] == 0.0


def test_capacity_and_secrecy(capsys):
    code, out, _ = run(capsys, "capacity", "--bsc-bsc", 0.1, 0.2)
    assert code == 0 and json.loads(out)["C_B"] == pytest.approx(0.531004406411)
    code, out, _ = run(capsys, "secrecy", "--bsc-bec", 0.1, 0.6)
    res = json.loads(out)
    assert code == 0 and res["C_s"] == pytest.approx(res["upper_bound"], abs=1e-11)


def test_bad_json_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"main": [[1, 0]],\n "eavesdropper": ')
    code, _, err = run(capsys, "classify", "--file", path)
    assert code == 1 and "line 2" in err


@pytest.mark.parametrize("argv", [
    ["classify", "--file", "/nonexistent/ch.json"],
    ["classify", "--bsc-bec", "0.7", "0.3"],
    ["curve", "--vandijk", "0.1", "0.2", "0.3"],
    ["region", "--bsc-bec", "0.1", "0.4", "-o", "x", "--mu", "-1"],
    ["nope"],
])
def test_input_errors_exit_1(argv, capsys):
    assert cli.main(argv) == 1


def test_internal_assertion_exits_3(monkeypatch, capsys):
    def boom(*a, **k):
        raise AssertionError("broken")
    monkeypatch.setattr(cli, "classify", boom)
    code, _, err = run(capsys, "classify", "--bsc-bec", 0.1, 0.4)
    assert code == 3 and "broken" in err


def test_region_files_revalidate(tmp_path, capsys):
    w = make_standard("bsc_bec", 0.1, 0.4)
    code, _, _ = run(capsys, "region", "--bsc-bec", 0.1, 0.4, "-o", tmp_path, "--mu-count", 4)
    assert code == 0
    rows = io.read_csv(tmp_path / "region.csv", io.REGION_HEADER)
    io.validate_region_rows(rows, w.C_B)
    side = json.loads((tmp_path / "region.json").read_text())
    assert side["method"] == "cyclic" and len(side["mu_star_bracket"]) == 2
    assert side["C_s"] == pytest.approx(rows[0, 2], abs=1e-11)
    assert rows[-1, 1] == pytest.approx(w.C_B, abs=1e-11) and rows[-1, 2] == 0.0


def test_region_fallback_exits_2(tmp_path, capsys):
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"main": [[1, 0], [0.3, 0.7]], "eavesdropper": [[0.95, 0.05], [0.05, 0.95]]}))
    code, _, err = run(capsys, "region", "--file", path, "-o", tmp_path / "o", "--mu", "0,1")
    assert code == 2 and "warning" in err


def test_degenerate_region_collapses(tmp_path, capsys):
    path = tmp_path / "id.json"
    path.write_text(json.dumps({"main": [[1, 0], [0, 1]], "eavesdropper": [[1, 0], [0, 1]]}))
    code, _, _ = run(capsys, "region", "--file", path, "-o", tmp_path, "--mu", "0,0.5,2")
    rows = io.read_csv(tmp_path / "region.csv", io.REGION_HEADER)
    assert code == 0 and np.all(rows[:, 2] == 0.0)


def test_validate_region_rows_rejects():
    with pytest.raises(ValueError):
        io.validate_region_rows([[0.0, 0.5, 0.6]], 1.0)
    with pytest.raises(ValueError):
        io.validate_region_rows([[0.0, 1.5, 0.1]], 1.0)
    with pytest.raises(ValueError):
        io.validate_region_rows([[1.0, 0.5, 0.1], [0.5, 0.5, 0.1]], 1.0)


def test_curve_export(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "curve", "--bsc-bec", 0.1, 0.6, "--mu", 0, "-o", out,
                     "--grid-resolution", 1000)
    assert code == 0
    rows = io.validate_curve_rows(io.read_csv(out, io.CURVE_HEADER))
    assert rows[np.argmax(rows[:, 1]), 0] == pytest.approx(0.5)
    assert rows[0, 1] == rows[-1, 1] == 0.0


def test_curve_sec53_shape(tmp_path, capsys):
    out = tmp_path / "c.csv"
    run(capsys, "curve", "--sec53", 0.6, 0.25, 0.4202, "-o", out, "--grid-resolution", 2000)
    rows = io.read_csv(out, io.CURVE_HEADER)
    half = rows[(rows[:, 0] > 0) & (rows[:, 0] < 0.5)]
    # convex near zero, concave before the midpoint
    assert half[0, 4] > 0 and half[-1, 4] < 0
    assert np.count_nonzero(np.diff(np.sign(half[:, 4]))) == 1


def test_validate_curve_rows_rejects():
    with pytest.raises(ValueError):
        io.validate_curve_rows([[0.0, 0.1, 0, 0, 0], [1.0, 0, 0, 0, 0]])
    with pytest.raises(ValueError):
        io.validate_curve_rows([[0.5, 0, 0, 0, 0], [1.0, 0, 0, 0, 0]])


def test_dump_round_trip(tmp_path, capsys):
    dump = tmp_path / "ch.json"
    run(capsys, "capacity", "--vandijk", 0.1, 0.2, 0.3, "--dump", dump)
    back = load_channel(dump)
    w = make_standard("vandijk", 0.1, 0.2, 0.3)
    assert np.array_equal(back.main.matrix, w.main.matrix)
    assert np.array_equal(back.eavesdropper.matrix, w.eavesdropper.matrix)


def test_oracle_subcommand(capsys):
    code, out, _ = run(capsys, "oracle", "--bsc-bec", 0.1, 0.6, "--grid-resolution", 40)
    res = json.loads(out)
    assert code == 0 and res["evaluations"] == 41 ** 3 and res["error_bound"] > 0
    code, out, _ = run(capsys, "oracle", "--bsc-bec", 0.1, 0.6, "--card-u", 1, "--card-v", 2,
                       "--grid-resolution", 6)
    assert code == 0 and "chain" in json.loads(out)


def test_tolerance_flag(capsys):
    # a huge tolerance declares everything more capable
    code, out, _ = run(capsys, "classify", "--bsc-bec", 0.1, 0.4, "--tolerance", 1.0)
    assert code == 0 and json.loads(out)["more_capable"]
