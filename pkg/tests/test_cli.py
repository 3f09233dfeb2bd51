from __future__ import annotations

import json

import pytest

from hermgeom.cli import main
from hermgeom.gf import hermitian_field
from hermgeom.polyhyp import fermat, linear_form, product
from hermgeom.projgeom import PointSet


def test_build_examples(tmp_path, capsys):
    out = tmp_path / "h22.pgps"
    assert main(["build", "hermitian", "--r", "2", "--q", "2", "--t", "0", "--out", str(out), "--workers", "1"]) == 0
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["card"] == 9 and summary["pass"] and summary["field"]["modulus"] == [1, 1, 1]
    assert PointSet.load(out).card == 9
    out = tmp_path / "cone.pgps"
    assert main(["build", "hermitian", "--r", "4", "--q", "3", "--t", "2", "--out", str(out), "--workers", "1"]) == 0
    assert json.loads(out.with_suffix(".summary.json").read_text())["card"] == 2278
    out = tmp_path / "fermat.pgps"
    assert main(["build", "fermat", "--r", "6", "--q", "3", "--out", str(out), "--workers", "2"]) == 0
    assert json.loads(out.with_suffix(".summary.json").read_text())["card"] == 199108


def test_build_poly(tmp_path):
    F = hermitian_field(3)
    poly = tmp_path / "pencil.json"
    product([linear_form(F, [1, int(F.neg[a]), 0]) for a in range(4)]).save(poly)
    out = tmp_path / "pencil.pgps"
    assert main(["build", "poly", "--poly", str(poly), "--expect", "37", "--out", str(out), "--workers", "1"]) == 0
    assert main(["build", "poly", "--poly", str(poly), "--expect", "36", "--out", str(out), "--workers", "1"]) == 1


@pytest.fixture(scope="module")
def h4_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "h4.pgps"
    assert main(["build", "hermitian", "--r", "4", "--q", "3", "--out", str(path), "--workers", "1"]) == 0
    return path


def test_census_hyperplanes_expect(h4_file, tmp_path):
    prefix = tmp_path / "hyp"
    args = ["census", "--in", str(h4_file), "--family", "hyperplanes", "--workers", "1", "--out", str(prefix)]
    assert main(args + ["--expect", '{"253": 2440, "280": 4941}']) == 0
    rep = json.loads(prefix.with_suffix(".json").read_text())
    assert rep["pass"] and rep["histogram"]["bins"] == {"253": 2440, "280": 4941}
    assert prefix.with_suffix(".csv").read_text() == "size,count\n253,2440\n280,4941\n"
    assert main(args + ["--expect", '{"253": 2441, "280": 4940}']) == 1


def test_census_lines_and_sampling(h4_file, tmp_path):
    base = ["census", "--in", str(h4_file), "--workers", "1"]
    assert main(base + ["--family", "lines", "--mode", "through", "--pivot-point", "0",
                        "--expect-sizes", "[1, 4, 10]"]) == 0
    assert main(base + ["--family", "lines", "--mode", "through", "--pivot-random", "3", "--seed", "1",
                        "--expect-sizes", "[1, 4, 10]"]) == 0
    assert main(base + ["--family", "lines", "--expect-sizes", "[4, 10]"]) == 1
    outs = []
    for w in ("1", "2"):
        prefix = tmp_path / f"s{w}"
        assert main(["census", "--in", str(h4_file), "--family", "solids", "--mode", "sample", "--samples", "300",
                     "--seed", "42", "--workers", w, "--out", str(prefix)]) == 0
        outs.append(prefix.with_suffix(".json").read_bytes())
    assert outs[0] == outs[1]
    assert main(base + ["--family", "solids", "--mode", "sample", "--samples", "10"]) == 2


def test_census_pivot_flat(h4_file, capsys):
    pivot = json.dumps([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0]])
    assert main(["census", "--in", str(h4_file), "--family", "solids", "--mode", "through", "--pivot", pivot,
                 "--workers", "1"]) == 0
    assert capsys.readouterr().out.startswith("size,count\n")


def test_bounds_batch(tmp_path, capsys):
    F = hermitian_field(3)
    src = tmp_path / "curves.jsonl"
    src.write_text(json.dumps({"id": 7, **fermat(3, F).to_json()}) + "\n")
    out = tmp_path / "curves.csv"
    assert main(["bounds-batch", "--in", str(src), "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].startswith("7,28,0,ok,ok,")


def test_verify_theorem_guard(capsys):
    assert main(["verify-theorem", "--q", "2", "--workers", "1"]) == 2
    assert "BadParameters" in capsys.readouterr().err


def test_errors_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.pgps"
    bad.write_bytes(b"nope")
    assert main(["census", "--in", str(bad), "--family", "lines", "--workers", "1"]) == 2
    assert "not a PGPS" in capsys.readouterr().err
    assert main(["census", "--in", str(tmp_path / "missing.pgps"), "--family", "lines", "--workers", "1"]) == 2
