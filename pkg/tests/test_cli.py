import json
import math

import pytest

from capax.cli import (
    SpecError, dumps, loads, main, parse_k_range, parse_p_range, parse_spec, spec_hash, spec_of,
)
from capax.domains import Circle, GraphDomain, LpBall


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_ball_capacities(tmp_path, capsys):
    # p = 2 is the round ball
    spec = write(tmp_path, {"kind": "lpball", "dimension": 2, "params": {"p": 2.0}})
    code, out = run_json(capsys, ["capacity", "--spec", spec, "--k", "1..6"])
    assert code == 0
    assert out["values"] == pytest.approx([math.ceil(k / 2) for k in range(1, 7)])


def test_verify_against_oracle(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "graph", "params": {"profile": "circle"}})
    code, out = run_json(capsys, ["capacity", "--spec", spec, "--k", "1..5", "--verify"])
    assert code == 0
    assert out["max_oracle_diff"] < 1e-6


def test_verify_failure_exit_code(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "graph", "params": {"profile": "circle"}})
    assert main(["capacity", "--spec", spec, "--k", "5", "--verify", "--tol=-1"]) == 3
    assert "disagree" in capsys.readouterr().err


def test_square_polytope(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "polytope", "params": {"vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]}})
    code, out = run_json(capsys, ["capacity", "--spec", spec, "--k", "7"])
    assert code == 0 and out["values"] == pytest.approx([7.0])


def test_csv_output(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "graph", "params": {"profile": "circle"}})
    assert main(["capacity", "--spec", spec, "--k", "5", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("k,c_k")
    assert float(lines[1].split(",")[1]) == pytest.approx(math.sqrt(13), abs=1e-9)


def test_ech_command(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "simplex", "params": {"a": [1, 2]}})
    code, out = run_json(capsys, ["ech", "--spec", spec, "--k", "1..4"])
    assert code == 0
    assert out["values"] == pytest.approx([1, 2, 2, 3])


@pytest.mark.parametrize("doc", [
    {"kind": "simplex", "params": {"a": [1, 2]}, "colour": "red"},
    {"kind": "simplex", "params": {"a": [1, 2], "b": 3}},
    {"kind": "teapot"},
    {"kind": "lpball", "params": {"p": 2}},
    {"kind": "simplex", "dimension": 3, "params": {"a": [1, 2]}},
])
def test_bad_specs_exit_two(tmp_path, capsys, doc):
    assert main(["capacity", "--spec", write(tmp_path, doc)]) == 2
    assert "capax:" in capsys.readouterr().err


def test_nan_rejected(tmp_path, capsys):
    spec = write(tmp_path, '{"kind": "simplex", "params": {"a": [1, NaN]}}')
    assert main(["capacity", "--spec", spec]) == 2
    capsys.readouterr()


def test_missing_file_exit_two(tmp_path, capsys):
    assert main(["capacity", "--spec", str(tmp_path / "none.json")]) == 2
    capsys.readouterr()


def test_wrong_engine_exit_two(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "box", "params": {"a": [1, 2]}})
    assert main(["capacity", "--spec", spec, "--engine", "closed-form"]) == 2
    capsys.readouterr()


def test_output_is_deterministic(tmp_path, capsys):
    spec = write(tmp_path, {"kind": "lpball", "dimension": 3, "params": {"p": 3}})
    main(["capacity", "--spec", spec, "--k", "1..4"])
    first = capsys.readouterr().out
    main(["capacity", "--spec", spec, "--k", "1..4"])
    assert capsys.readouterr().out == first


def test_spec_round_trip():
    for dom in (GraphDomain(Circle()), LpBall(3, 4.0)):
        doc = spec_of(dom)
        again = spec_of(parse_spec(loads(dumps(doc))))
        assert dumps(again) == dumps(doc)
        assert spec_hash(again) == spec_hash(doc)


def test_ranges():
    assert parse_k_range("7") == [7]
    assert parse_k_range("1..4") == [1, 2, 3, 4]
    assert parse_k_range("1,3,5") == [1, 3, 5]
    assert parse_p_range("1:2:0.5") == pytest.approx([1.0, 1.5, 2.0])
    with pytest.raises(SpecError):
        parse_k_range("0..3")


def test_e2p_figure(capsys):
    assert main(["figure", "e2p", "--p", "1:2:0.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "p,c_123"
    assert float(lines[1].split(",")[1]) == pytest.approx(90.0)


def test_ribcage_figure(capsys):
    assert main(["figure", "ribcage", "--k-max", "5"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "k,x_k,f_x_k,color"
    assert rows[-1].startswith("even,") and rows[-1].endswith(",purple")


def test_family_files(tmp_path, capsys):
    code = main(["family", "mutual", "--j", "1", "--k-max", "6", "--out", str(tmp_path)])
    capsys.readouterr()
    assert code == 0
    rep = json.loads((tmp_path / "mutual_report.json").read_text())
    assert rep["ok"]
    after = (tmp_path / "mutual_after.json").read_text()
    assert dumps(spec_of(parse_spec(loads(after)))) == after


def test_verify_all_filter_and_tolerance(capsys):
    assert main(["verify-all", "--filter", "3"]) == 0
    assert "PASS criterion  3" in capsys.readouterr().out
    assert main(["verify-all", "--filter", "3", "--tolerance", "round=-1"]) == 3
    capsys.readouterr()


def test_verify_all_unknown_tolerance(capsys):
    assert main(["verify-all", "--filter", "3", "--tolerance", "bogus=1"]) == 2
    capsys.readouterr()
