import csv
import io
import json

import numpy as np
import pytest

from homothet_cover.cli import EXIT_MALFORMED, EXIT_OK, EXIT_PRECONDITION, EXIT_VERIFY_FAILED, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write_poly(path, n, count, seed, symmetric=False):
    rng = np.random.default_rng(seed)
    key = "symmetric_half" if symmetric else "vertices"
    path.write_text(json.dumps({"dim": n, key: rng.normal(size=(count, n)).tolist()}))
    return str(path)


def test_bounds_headline_case():
    code, out, _ = call("bounds", "--n", "6", "--vertices", "9", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["theorem_bound"] == {"num": 4, "den": 5}
    assert data["center_count"] == 45


def test_bounds_text_and_csv():
    code, out, _ = call("bounds", "--n", "6", "--vertices", "9")
    assert code == 0 and "threshold: 2" in out
    code, out, _ = call("bounds", "--n", "6", "--vertices", "9", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert json.loads(rows[0]["theorem_bound"]) == {"num": 4, "den": 5}


def test_constants():
    code, out, _ = call("constants", "--t", "2", "--format", "json")
    data = json.loads(out)
    assert abs(float(data["a"]) - 0.293815) <= 5e-6
    assert abs(float(data["b"]) - 0.205597) <= 5e-6
    assert float(data["f(1)"]) == 4 and float(data["g(1)"]) == 8


def test_constants_exact_t_and_pn():
    code, out, _ = call("constants", "--t", "3/4", "--n", "8", "--pn", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["k"] == 2 and data["t"] == "2^(3/4)"
    assert float(data["p_bracket_low"]) <= float(data["p"]) <= float(data["p_bracket_high"])


def test_constants_decimal_t_rejects_thresholds():
    code, _, err = call("constants", "--t", "1.5", "--n", "4")
    assert code == EXIT_MALFORMED and "u/v" in err


def test_enumerate_counts_and_formats():
    code, out, _ = call("enumerate", "--set", "M2", "--n", "2", "--k", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x1", "x2"] and len(rows) == 6
    code, out, _ = call("enumerate", "--set", "M1", "--n", "4", "--k", "3", "--format", "json")
    assert len(json.loads(out)) == 35
    code, out, _ = call("enumerate", "--set", "M2", "--n", "2", "--k", "1")
    assert len(out.strip().splitlines()) == 6


def test_table():
    code, out, _ = call("table", "--n-from", "50", "--n-to", "52", "--ratio", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n"]) for r in rows] == [50, 51, 52]
    assert rows[0]["theorem_bound"] == "100/111"
    code, out, _ = call("table", "--n-from", "3", "--n-to", "4", "--format", "json")
    assert len(json.loads(out)) == 2


def test_decompose():
    code, out, _ = call("decompose", "--space", "orthant", "--n", "2", "--k", "3", "--p", "1",
                        "--point", "5/2,23/10", "--format", "json")
    data = json.loads(out)
    assert data["lattice"] == [2, 1] and data["case"] == 2
    assert data["remainder"] == [{"num": 1, "den": 2}, {"num": 13, "den": 10}]
    code, out, _ = call("decompose", "--space", "ball", "--n", "2", "--k", "1", "--point=-1.5,0")
    assert code == 0 and "lattice: [-1, 0]" in out


def test_decompose_precondition_and_malformed():
    code, _, _ = call("decompose", "--space", "ball", "--n", "2", "--k", "1", "--point", "3.5,0")
    assert code == EXIT_PRECONDITION
    code, _, _ = call("decompose", "--space", "ball", "--n", "2", "--k", "1", "--point", "a,0")
    assert code == EXIT_MALFORMED


def test_malformed_arguments():
    assert call("bounds", "--n", "6")[0] == EXIT_MALFORMED
    assert call("bounds", "--n", "6", "--vertices", "9", "--nope")[0] == EXIT_MALFORMED
    assert call("frobnicate")[0] == EXIT_MALFORMED
    assert call("verify", "--poly", "x", "--cert", "y", "--seed", "-1")[0] == EXIT_MALFORMED


def test_certify_verify_round_trip(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 7, 1)
    cert = str(tmp_path / "cert.json")
    code, out, _ = call("certify", "--in", poly, "--out", cert, "--n", "3")
    assert code == EXIT_OK and "centers: 7" in out
    data = json.loads(open(cert).read())
    assert data["lift_kind"] == "simplex" and data["gamma"] == {"num": 6, "den": 7}
    code, out, _ = call("verify", "--poly", poly, "--cert", cert, "--samples", "5000", "--seed", "9")
    assert code == EXIT_OK and "failures: 0" in out


def test_certify_symmetric(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 3, 1, symmetric=True)
    cert = str(tmp_path / "cert.json")
    assert call("certify", "--in", poly, "--out", cert)[0] == 0
    assert json.load(open(cert))["lift_kind"] == "crosspolytope"
    assert call("verify", "--poly", poly, "--cert", cert, "--samples", "3000")[0] == 0


def test_certify_no_shrinking(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 9, 1)
    code, _, err = call("certify", "--in", poly, "--out", str(tmp_path / "c.json"))
    assert code == EXIT_PRECONDITION and "no shrinking certificate" in err


def test_certify_bad_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("certify", "--in", str(bad), "--out", str(tmp_path / "c.json"))[0] == EXIT_MALFORMED
    bad.write_text(json.dumps({"vertices": [[0, 0]]}))
    assert call("certify", "--in", str(bad), "--out", str(tmp_path / "c.json"))[0] == EXIT_MALFORMED


def test_verify_detects_mutation(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 5, 2)
    cert = tmp_path / "cert.json"
    call("certify", "--in", poly, "--out", str(cert))
    data = json.loads(cert.read_text())
    data["centers"] = data["centers"][1:]
    cert.write_text(json.dumps(data))
    code, out, _ = call("verify", "--poly", poly, "--cert", str(cert), "--format", "json")
    assert code == EXIT_VERIFY_FAILED
    report = json.loads(out)
    assert report["failures"] > 0 and report["failure_examples"][0]["witness"] == [0, 0, 0, 0]


def test_verify_inconsistent(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 5, 2)
    other = write_poly(tmp_path / "other.json", 3, 6, 2)
    cert = str(tmp_path / "cert.json")
    call("certify", "--in", poly, "--out", cert)
    assert call("verify", "--poly", other, "--cert", cert)[0] == EXIT_MALFORMED


def test_output_is_deterministic(tmp_path):
    poly = write_poly(tmp_path / "poly.json", 3, 6, 3)
    cert = str(tmp_path / "cert.json")
    call("certify", "--in", poly, "--out", cert)
    first = call("verify", "--poly", poly, "--cert", cert, "--seed", "18446744073709551615")
    second = call("verify", "--poly", poly, "--cert", cert, "--seed", "18446744073709551615")
    assert first == second
    assert call("table", "--n-from", "3", "--n-to", "9") == call("table", "--n-from", "3", "--n-to", "9")


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_every_format_runs(fmt):
    assert call("constants", "--pn", "10", "--format", fmt)[0] == EXIT_OK
