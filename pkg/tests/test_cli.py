"""CLI round-trips: parse, analyze, reduce, verify, trace, determinism."""

import json

import pytest

from turrittin.cli import main
from turrittin.documents import (
    dumps,
    parse_system,
    system_to_json,
)
from turrittin.errors import ParseError
from turrittin.field import RATIONALS


EULER = {
    "format": 1,
    "kind": "system",
    "field": {"kind": "rationals"},
    "n": 1,
    "truncation_order": 3,
    "entries": [["x^-1*(1)"]],
}

RESONANT = {
    "format": 1,
    "kind": "system",
    "field": {"kind": "rationals"},
    "n": 2,
    "truncation_order": 7,
    "entries": [["x^-1*(1)", "x^-1*(1 + x)"], ["0", "0"]],
}

IRREGULAR = {
    "format": 1,
    "kind": "system",
    "field": {"kind": "rationals"},
    "n": 2,
    "truncation_order": 4,
    "entries": [["x^-2*(1)", "x^-1*(1)"], ["x^-1*(2)", "x^-2*(2 + x)"]],
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(dumps(doc))
    return str(path)


def test_parse_minimal_euler():
    system = parse_system(dumps(EULER))
    assert system.n == 1
    assert system.entries[0][0].valuation == -1


def test_parse_two_coefficients():
    doc = dict(EULER, entries=[["x^-2*(1 + 1/2*x)"]], truncation_order=2)
    system = parse_system(dumps(doc))
    jet = system.entries[0][0]
    assert jet.valuation == -2
    assert str(jet.coefficient(-1)) == "1/2"


def test_parse_malformed_scalar():
    doc = dict(EULER, entries=[["x^-1*(1//2)"]])
    with pytest.raises(ParseError):
        parse_system(dumps(doc))


def test_system_round_trip():
    system = parse_system(dumps(IRREGULAR))
    doc = system_to_json(system)
    again = parse_system(dumps(doc))
    assert again.same_series(system)
    assert dumps(system_to_json(again)) == dumps(doc)


def test_analyze(tmp_path, capsys):
    path = write(tmp_path, "sys.json", EULER)
    assert main(["analyze", path]) == 0
    out = capsys.readouterr().out
    assert "poincare-rank: 0" in out


def test_reduce_verify_round_trip(tmp_path, capsys):
    path = write(tmp_path, "sys.json", IRREGULAR)
    out_dir = tmp_path / "artifacts"
    assert main(["reduce", path, "--mode", "complex", "--out", str(out_dir)]) == 0
    assert (out_dir / "chain.json").exists()
    assert (out_dir / "normal_form.json").exists()
    assert (out_dir / "claimed.json").exists()
    code = main(
        [
            "verify",
            path,
            "--chain",
            str(out_dir / "chain.json"),
            "--claimed",
            str(out_dir / "claimed.json"),
            "--form",
            "trs",
        ]
    )
    assert code == 0


def test_reduce_deterministic(tmp_path):
    path = write(tmp_path, "sys.json", IRREGULAR)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    main(["reduce", path, "--mode", "complex", "--out", str(d1)])
    main(["reduce", path, "--mode", "complex", "--out", str(d2)])
    for name in ("chain.json", "normal_form.json", "claimed.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_reduce_resonant_visible_in_chain(tmp_path):
    path = write(tmp_path, "sys.json", RESONANT)
    out_dir = tmp_path / "art"
    assert main(["reduce", path, "--mode", "complex", "--out", str(out_dir)]) == 0
    chain = json.loads((out_dir / "chain.json").read_text())
    kinds = [s["kind"] for s in chain["steps"]]
    assert "diagonal-monomial" in kinds  # the deresonation round


def test_verify_tampered_chain(tmp_path):
    path = write(tmp_path, "sys.json", IRREGULAR)
    out_dir = tmp_path / "art"
    main(["reduce", path, "--mode", "complex", "--out", str(out_dir)])
    claimed = json.loads((out_dir / "claimed.json").read_text())
    # perturb one coefficient of the claimed output
    entry = claimed["entries"][0][0]
    claimed["entries"][0][0] = entry.replace("(", "(1 + ", 1) if "(" in entry else "1"
    bad = tmp_path / "bad.json"
    bad.write_text(dumps(claimed))
    code = main(
        [
            "verify",
            path,
            "--chain",
            str(out_dir / "chain.json"),
            "--claimed",
            str(bad),
        ]
    )
    assert code == 1


def test_reduce_real_mode(tmp_path):
    doc = {
        "format": 1,
        "kind": "system",
        "field": {"kind": "rationals"},
        "n": 2,
        "truncation_order": 4,
        "entries": [["0", "x^-2*(-1)"], ["x^-2*(1)", "0"]],
    }
    path = write(tmp_path, "sys.json", doc)
    out_dir = tmp_path / "art"
    assert main(["reduce", path, "--mode", "real", "--out", str(out_dir)]) == 0
    nf = json.loads((out_dir / "normal_form.json").read_text())
    assert nf["mode"] == "rtrs"
    assert nf["n2"] == 1
    code = main(
        [
            "verify",
            path,
            "--chain",
            str(out_dir / "chain.json"),
            "--claimed",
            str(out_dir / "claimed.json"),
            "--form",
            "rtrs",
        ]
    )
    assert code == 0


def test_trace(tmp_path, capsys):
    path = write(tmp_path, "sys.json", IRREGULAR)
    out_dir = tmp_path / "art"
    main(["reduce", path, "--mode", "complex", "--out", str(out_dir)])
    capsys.readouterr()
    assert main(["trace", path, "--chain", str(out_dir / "chain.json")]) == 0
    out = capsys.readouterr().out
    assert "step[0]" in out


def test_exit_code_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", str(bad)]) == 2


def test_exit_code_precision(tmp_path):
    doc = dict(
        IRREGULAR,
        truncation_order=-2,
        entries=[["x^-2*(1)", "0"], ["0", "x^-2*(2)"]],
    )
    path = write(tmp_path, "sys.json", doc)
    assert main(["reduce", path, "--mode", "complex", "--degree", "3"]) == 4
