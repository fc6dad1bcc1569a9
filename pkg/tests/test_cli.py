"""Command-line interface: outputs, file handling, and exit codes.

Exit codes are part of the contract scripts rely on: 0 success,
1 mathematical refutation or failed verification, 2 unusable input,
3 missing scalar certificate, 4 internal verification failure.
Everything runs through main(argv) in-process with capsys.
"""

import json

import pytest

from matrixsos.cli import main

EX1 = """\
vars: x1 x2
dim: 2
entry 1 1: 1
entry 1 2: x1*x2
entry 2 2: 1 + x1^4*x2^2 + x1^2*x2^4
"""

DIAG_SQUARES = """\
vars: x1 x2
dim: 2
entry 1 1: x1^2
entry 2 2: x2^2
"""

INDEFINITE = """\
vars: x1
dim: 1
entry 1 1: x1
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestFourSquares:
    def test_integer(self, capsys):
        assert main(["four-squares", "310"]) == 0
        line = capsys.readouterr().out.strip()
        lhs, rhs = line.split(" = ")
        assert lhs == "310"
        parts = [int(s[: -len("^2")]) for s in rhs.split(" + ")]
        assert len(parts) == 4
        assert sum(x * x for x in parts) == 310

    def test_fraction(self, capsys):
        assert main(["four-squares", "7/9"]) == 0
        out = capsys.readouterr().out.strip()
        assert out.startswith("7/9 = ")

    def test_perfect_square_line(self, capsys):
        assert main(["four-squares", "49"]) == 0
        line = capsys.readouterr().out.strip()
        rhs = line.split(" = ")[1]
        total = sum(
            int(s[: -len("^2")]) ** 2 for s in rhs.split(" + ") if not s.startswith("(")
        )
        assert total == 49

    def test_negative_is_refutation(self, capsys):
        assert main(["four-squares", "-5"]) == 1
        assert "negative" in capsys.readouterr().out

    def test_garbage_is_input_error(self, capsys):
        assert main(["four-squares", "three"]) == 2
        assert "not a rational" in capsys.readouterr().err


class TestMinpoly:
    def test_output_lines(self, tmp_path, capsys):
        path = write(tmp_path, "diag.mat", DIAG_SQUARES)
        assert main(["minpoly", "--input", path]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "minimal polynomial degree: 2"
        assert lines[1] == "a_2 = 1"
        assert lines[2] == "a_1 = x1^2 + x2^2"
        assert lines[3] == "a_0 = x1^2*x2^2"

    def test_incomplete_file_is_input_error(self, tmp_path, capsys):
        path = write(tmp_path, "bad.mat", "vars: x1\n")
        assert main(["minpoly", "--input", path]) == 2

    def test_empty_file_is_input_error(self, tmp_path, capsys):
        path = write(tmp_path, "empty.mat", "")
        assert main(["minpoly", "--input", path]) == 2


class TestMinors:
    def test_lists_all_minors(self, tmp_path, capsys):
        path = write(tmp_path, "diag.mat", DIAG_SQUARES)
        assert main(["minors", "--input", path]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "minor [1]: x1^2"
        assert lines[1] == "minor [2]: x2^2"
        assert lines[2] == "minor [1,2]: x1^2*x2^2"


class TestCheckPSD:
    def test_evidence_line(self, tmp_path, capsys):
        path = write(tmp_path, "ex1.mat", EX1)
        assert main(["check-psd", "--input", path]) == 0
        assert "no refutation in 100 samples" in capsys.readouterr().out

    def test_refutation(self, tmp_path, capsys):
        path = write(tmp_path, "indef.mat", INDEFINITE)
        assert main(["check-psd", "--input", path]) == 1
        out = capsys.readouterr().out
        assert "not positive semidefinite" in out
        assert "minor [1]" in out

    def test_sample_flags(self, tmp_path, capsys):
        path = write(tmp_path, "ex1.mat", EX1)
        assert main(["check-psd", "--input", path, "--samples", "7", "--seed", "3"]) == 0
        assert "7 samples" in capsys.readouterr().out


class TestCertifyAndVerify:
    def test_chain(self, tmp_path, capsys):
        matrix = write(tmp_path, "diag.mat", DIAG_SQUARES)
        cert = str(tmp_path / "diag.cert.json")
        assert main(["certify", "--input", matrix, "--output", cert]) == 0
        out = capsys.readouterr().out
        assert "certified: degree 2, 4 squares" in out
        assert "providers:" in out
        assert cert in out

        assert main(["verify", "--input", matrix, "--cert", cert]) == 0
        assert "certificate verifies: 4 squares" in capsys.readouterr().out

    def test_store_backed_chain(self, tmp_path, capsys, fixtures):
        matrix = str(fixtures / "example1.mat")
        store = str(fixtures / "example1_store.txt")
        cert = str(tmp_path / "ex1.cert.json")
        code = main(
            ["certify", "--input", matrix, "--store", store, "--output", cert]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "100 squares" in out
        assert main(["verify", "--input", matrix, "--cert", cert]) == 0
        capsys.readouterr()

    def test_missing_store_exits_three(self, tmp_path, capsys, fixtures):
        matrix = str(fixtures / "example1.mat")
        cert = str(tmp_path / "never.json")
        assert main(["certify", "--input", matrix, "--output", cert]) == 3
        err = capsys.readouterr().err
        assert "a_0" in err
        assert "gram:" in err

    def test_not_psd_exits_one(self, tmp_path, capsys):
        matrix = write(tmp_path, "indef.mat", INDEFINITE)
        cert = str(tmp_path / "never.json")
        assert main(["certify", "--input", matrix, "--output", cert]) == 1
        assert "refuted:" in capsys.readouterr().err

    def test_tampered_cert_fails_verify(self, tmp_path, capsys):
        matrix = write(tmp_path, "diag.mat", DIAG_SQUARES)
        cert = str(tmp_path / "diag.cert.json")
        assert main(["certify", "--input", matrix, "--output", cert]) == 0
        capsys.readouterr()
        payload = json.loads(open(cert).read())
        payload["squares"][0][0][0]["num"] = "x1^2 + 1"
        with open(cert, "w") as fh:
            fh.write(json.dumps(payload))
        assert main(["verify", "--input", matrix, "--cert", cert]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_wrong_matrix_for_cert(self, tmp_path, capsys):
        matrix = write(tmp_path, "diag.mat", DIAG_SQUARES)
        cert = str(tmp_path / "diag.cert.json")
        assert main(["certify", "--input", matrix, "--output", cert]) == 0
        capsys.readouterr()
        other = write(tmp_path, "other.mat", "vars: x1 x2\ndim: 3\n")
        assert main(["verify", "--input", other, "--cert", cert]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_files(self, tmp_path, capsys):
        cert = str(tmp_path / "never.json")
        assert main(["certify", "--input", str(tmp_path / "no.mat"), "--output", cert]) == 2
        assert "cannot read" in capsys.readouterr().err
        assert main(["verify", "--input", str(tmp_path / "no.mat"), "--cert", cert]) == 2
        capsys.readouterr()

    def test_bad_cert_json(self, tmp_path, capsys):
        matrix = write(tmp_path, "diag.mat", DIAG_SQUARES)
        cert = write(tmp_path, "broken.json", "{not json")
        assert main(["verify", "--input", matrix, "--cert", cert]) == 2
        assert "error:" in capsys.readouterr().err
