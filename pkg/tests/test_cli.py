import json

import pytest

from maxkernel.cli import main

AFFINE = '{"kind":"ppoly","breakpoints":[1.0],"pieces":[[1.0,-1.0]]}'
TWO_STEP = '{"kind":"step","breakpoints":[1.0,2.0],"values":[2.0,1.0]}'
INV_TAIL = '{"kind":"ppoly","breakpoints":[1.0],"pieces":[[]],"tail":[[1.0,-1]]}'


def test_classify_csv(capsys):
    assert main(["classify", "--symbol", AFFINE, "--p", "0.4,1.0"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# config: ")
    cfg = json.loads(out[0].split("# config: ", 1)[1])
    assert cfg["command"] == "classify" and cfg["p"] == [0.4, 1.0]
    assert out[1] == "p,verdict,criterion"
    assert out[2].startswith("0.4,out,")
    assert out[3].startswith("1.0,in,")


def test_classify_json(capsys):
    assert main(["classify", "--symbol", AFFINE, "--p", "2",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["format"] == "json"
    assert doc["results"]["operator"]["bounded"] == "in"
    assert doc["results"]["schatten"][0]["verdict"] == "in"


def test_spectrum_step_exact(capsys):
    assert main(["spectrum", "--symbol", TWO_STEP,
                 "--method", "step_exact"]) == 0
    rows = capsys.readouterr().out.splitlines()[2:]
    top = float(rows[0].split(",")[1])
    assert top == pytest.approx(2.618033988749895, rel=1e-12)


def test_spectrum_compare(capsys):
    assert main(["spectrum", "--symbol", AFFINE, "--compare", "--K", "4",
                 "--n", "256"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "n,sturm,galerkin,rel_dev"
    assert lines[-1].startswith("max_rel_deviation,")
    assert float(lines[-1].split(",")[-1]) < 1e-3


def test_symbol_from_file(tmp_path, capsys):
    p = tmp_path / "sym.json"
    p.write_text(AFFINE)
    assert main(["classify", "--symbol", str(p), "--p", "1"]) == 0
    assert "in" in capsys.readouterr().out


def test_output_file_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["spectrum", "--symbol", AFFINE, "--n", "128",
                     "--K", "6", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sturm_json(capsys):
    assert main(["sturm", "--symbol", AFFINE, "--K", "2",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["n"] for r in doc["results"]] == [0, 1]
    assert doc["results"][0]["lambda"] == pytest.approx(0.4052847345693511)


def test_hankel_json(capsys):
    assert main(["hankel", "--symbol", AFFINE, "--K", "8",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 0 < doc["results"]["coverage"] <= 1
    assert doc["results"]["svals"][0] > 0


def test_expdemo(capsys):
    assert main(["expdemo", "--N", "1,4", "--p", "1.0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "N,p,norm,reference,ratio"
    assert len(lines) == 4


def test_verify_single_family(capsys):
    assert main(["verify", "--only", "kronecker"]) == 0
    out = capsys.readouterr().out
    assert "PASS kronecker-det" in out
    assert "1/1 checks passed" in out


def test_verify_family_list(capsys):
    assert main(["verify", "--only", "positivity,kronecker"]) == 0
    out = capsys.readouterr().out
    assert "PASS kronecker-det" in out
    assert "PASS positivity" in out
    assert "2/2 checks passed" in out


def test_verify_unknown_family(capsys):
    assert main(["verify", "--only", "nonsense"]) == 2
    assert main(["verify", "--only", "kronecker,nonsense"]) == 2
    assert main(["verify", "--only", ","]) == 2


def test_parse_error_exit(capsys):
    assert main(["classify", "--symbol", "not json", "--p", "1"]) == 2
    assert main(["classify", "--symbol", AFFINE, "--p", "one"]) == 2


def test_unwritable_out_exit(tmp_path, capsys):
    target = tmp_path / "no_such_dir" / "res.csv"
    assert main(["classify", "--symbol", AFFINE, "--p", "1",
                 "--out", str(target)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_numeric_error_exit(capsys):
    # unbounded operator: truncation cannot succeed
    assert main(["spectrum", "--symbol", INV_TAIL]) == 3
    err = capsys.readouterr().err
    assert err.startswith("numeric failure:")


def test_exp_method_requires_N(capsys):
    assert main(["spectrum", "--symbol", AFFINE, "--method", "exp"]) == 2
    assert main(["spectrum", "--symbol", AFFINE, "--method", "exp",
                 "--N", "4", "--K", "6"]) == 0
