import json

import numpy as np
import pytest

from lme.cli import (
    EXIT_ERROR,
    EXIT_HYPOTHESIS,
    EXIT_INCONSISTENT,
    EXIT_MISMATCH,
    EXIT_OK,
    dump_matrix,
    load_matrix,
    main,
    write_matrix,
)

HOMOG_A = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
HOMOG_B = np.array([[1, -1, 0], [-1, 1, 0], [0, 0, 2]], dtype=complex)
JORDAN = np.array([[1, 1], [0, 1]], dtype=complex)
STEIN2_A = np.array([[1, 1], [1, -1]], dtype=complex)
STEIN2_C = np.array([[0, 1], [-1, 0]], dtype=complex)


@pytest.fixture
def files(tmp_path):
    def _write(name, matrix):
        path = tmp_path / name
        write_matrix(str(path), np.asarray(matrix, dtype=complex))
        return str(path)

    return _write, tmp_path


def read_report(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def payload_to_matrix(payload):
    return np.array(
        [[complex(re, im) for re, im in row] for row in payload["data"]], dtype=complex
    )


class TestMatrixFiles:
    def test_json_round_trip_bytes(self, tmp_path):
        rng = np.random.default_rng(80)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        path = tmp_path / "m.json"
        write_matrix(str(path), m)
        first = path.read_bytes()
        parsed = load_matrix(str(path))
        np.testing.assert_array_equal(parsed, m)
        write_matrix(str(path), parsed)
        assert path.read_bytes() == first

    def test_text_format(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("# comment\n1+2j -1\n0 3.5\n")
        m = load_matrix(str(path))
        np.testing.assert_array_equal(m, np.array([[1 + 2j, -1], [0, 3.5]]))

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"rows": 2, "cols": 2, "data": [[[1, 0]]]}')
        with pytest.raises(ValueError):
            load_matrix(str(path))

    def test_dump_shape(self):
        text = dump_matrix(np.eye(2))
        payload = json.loads(text)
        assert payload["rows"] == 2 and payload["cols"] == 2
        assert payload["data"][0][0] == [1.0, 0.0]


class TestSolveCommand:
    def test_homogeneous_example(self, files):
        write, tmp = files
        out = tmp / "report.json"
        code = main([
            "solve",
            "--a", write("a1.json", HOMOG_A),
            "--a", write("a2.json", 2 * np.eye(3)),
            "--b", write("b1.json", HOMOG_B),
            "--b", write("b2.json", np.eye(3)),
            "--c", write("c.json", np.zeros((3, 3))),
            "--out", str(out),
        ])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["consistent"] is True
        assert report["dimension"] == 2
        assert len(report["basis"]) == 2
        assert all(v is True for v in report["equivalence_checks"].values())
        assert all(np.isfinite(v) for v in report["residuals"].values())

    def test_malformed_file_exit(self, files, tmp_path):
        write, _ = files
        bad = tmp_path / "bad.json"
        bad.write_text("not json at all {{{")
        code = main([
            "solve", "--a", str(bad), "--b", str(bad), "--c", str(bad),
        ])
        assert code == EXIT_ERROR

    def test_inconsistent_exit(self, files):
        write, tmp = files
        # gamma[1, 1] = 0 but the matching right-hand side eigenvalue is not
        a = np.diag([1.0, 0.0])
        c = np.diag([1.0, 1.0])
        out = tmp / "r.json"
        code = main([
            "solve",
            "--a", write("a.json", a),
            "--b", write("b.json", np.eye(2)),
            "--c", write("c.json", c),
            "--out", str(out),
        ])
        assert code == EXIT_INCONSISTENT
        report = read_report(out)
        assert report["consistent"] is False
        # rows refer to the solver's canonical eigenvalue order (0 sorts first)
        assert report["witness_row"] == 0
        assert [0, 0] in report["zero_cells"]


class TestNamedCommands:
    def test_stein_jordan_refused(self, files, capsys):
        write, _ = files
        code = main([
            "stein",
            "--a", write("a.json", JORDAN),
            "--b", write("b.json", JORDAN),
            "--c", write("c.json", np.eye(2)),
        ])
        assert code == EXIT_HYPOTHESIS
        err = capsys.readouterr().err
        assert "NotDiagonalizable" in err

    def test_stein_noncommuting_refused_then_oracle(self, files):
        write, tmp = files
        # A X A - 2X = C rescaled into Stein form: (A/2) X A - X = C/2
        args = [
            "stein",
            "--a", write("a.json", STEIN2_A / 2),
            "--b", write("b.json", STEIN2_A),
            "--c", write("c.json", STEIN2_C / 2),
        ]
        assert main(args) == EXIT_HYPOTHESIS
        out = tmp / "oracle.json"
        code = main(args + ["--force-oracle", "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["mode"] == "oracle"
        assert report["consistent"] is True
        assert report["dimension"] == 2

    def test_clyap_counterexample_report(self, files, capsys):
        write, tmp = files
        args = [
            "clyap",
            "--a", write("a.json", np.array([[0, 1], [0, 0]])),
            "--c", write("c.json", np.zeros((2, 2))),
        ]
        assert main(args) == EXIT_HYPOTHESIS
        assert "NotNormal" in capsys.readouterr().err
        out = tmp / "r.json"
        code = main(args + ["--force-oracle", "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        # the report must show the true dimension and the eigenvalue-pair
        # count side by side
        assert report["dimension"] == 2
        assert report["formula_count"] == 4
        assert any("WARNING" in d for d in report["diagnostics"])

    def test_dlyap_counterexample_report(self, files):
        write, tmp = files
        out = tmp / "r.json"
        args = [
            "dlyap",
            "--a", write("a.json", JORDAN),
            "--c", write("c.json", np.zeros((2, 2))),
        ]
        assert main(args) == EXIT_HYPOTHESIS
        code = main(args + ["--force-oracle", "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["dimension"] == 2
        assert report["formula_count"] == 4

    def test_dlyap_zero_coefficient(self, files):
        write, tmp = files
        out = tmp / "r.json"
        code = main([
            "dlyap",
            "--a", write("a.json", np.zeros((2, 2))),
            "--c", write("c.json", -np.eye(2)),
            "--out", str(out),
        ])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["dimension"] == 0
        np.testing.assert_allclose(payload_to_matrix(report["x_hat"]), np.eye(2), atol=1e-10)

    def test_sylvester_unique(self, files):
        write, tmp = files
        out = tmp / "r.json"
        code = main([
            "sylvester",
            "--a", write("a.json", np.diag([1.0, 2.0])),
            "--b", write("b.json", np.diag([3.0, 4.0])),
            "--c", write("c.json", np.eye(2)),
            "--out", str(out),
        ])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["formula_count"] == 0
        np.testing.assert_allclose(
            payload_to_matrix(report["x_hat"]), np.diag([0.25, 1 / 6]), atol=1e-9
        )


class TestForceOracleOnSolve:
    def test_noncommuting_general_equation(self, files):
        write, tmp = files
        out = tmp / "r.json"
        args = [
            "solve",
            "--a", write("a1.json", STEIN2_A),
            "--a", write("a2.json", -2 * np.eye(2)),
            "--b", write("b1.json", STEIN2_A),
            "--b", write("b2.json", np.eye(2)),
            "--c", write("c.json", STEIN2_C),
        ]
        assert main(args) == EXIT_HYPOTHESIS
        code = main(args + ["--force-oracle", "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["mode"] == "oracle"
        assert report["dimension"] == 2
        assert len(report["basis"]) == 2


class TestVerifyCommand:
    def test_files_agree(self, files):
        write, tmp = files
        out = tmp / "v.json"
        code = main([
            "verify",
            "--a", write("a1.json", HOMOG_A),
            "--a", write("a2.json", 2 * np.eye(3)),
            "--b", write("b1.json", HOMOG_B),
            "--b", write("b2.json", np.eye(3)),
            "--c", write("c.json", np.zeros((3, 3))),
            "--out", str(out),
        ])
        assert code == EXIT_OK
        assert read_report(out)["agreement"] is True

    def test_random_sweep(self, files):
        _, tmp = files
        out = tmp / "v.json"
        code = main(["verify", "--trials", "25", "--n", "4", "--seed", "1", "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        assert report["agreement"] is True
        assert report["checked"] == 25

    def test_inject_fault(self, files):
        _, tmp = files
        out = tmp / "v.json"
        code = main([
            "verify", "--trials", "5", "--n", "3", "--seed", "2",
            "--inject-fault", "--out", str(out),
        ])
        assert code == EXIT_MISMATCH
        assert read_report(out)["agreement"] is False

    def test_missing_inputs(self):
        assert main(["verify"]) == EXIT_ERROR


class TestDiagonalizeCommand:
    def test_single_diagonal(self, files):
        write, tmp = files
        out = tmp / "d.json"
        code = main(["diagonalize", write("m.json", np.diag([2.0, 1.0, 2.0])), "--out", str(out)])
        assert code == EXIT_OK
        report = read_report(out)
        vec = [complex(re, im) for re, im in report["induced_vectors"][0]]
        np.testing.assert_allclose(vec, [1, 2, 2], atol=1e-10)
        assert report["block_levels"][0] == [[0, 1], [1, 3]]

    def test_pair_mode(self, files):
        write, tmp = files
        out = tmp / "d.json"
        code = main([
            "diagonalize",
            write("a.json", HOMOG_A),
            write("b.json", HOMOG_B),
            "--pair",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        pair = read_report(out)["pair"]
        np.testing.assert_allclose([re for re, _ in pair["a"]], [1, 1, -1], atol=1e-9)
        np.testing.assert_allclose([re for re, _ in pair["b"]], [0, 2, 2], atol=1e-9)
        coll = sorted(re for re, _ in pair["collision_set"])
        np.testing.assert_allclose(coll, [-2, -1], atol=1e-9)

    def test_noncommuting_pair(self, files):
        write, _ = files
        code = main([
            "diagonalize",
            write("a.json", STEIN2_A),
            write("c.json", STEIN2_C),
        ])
        assert code == EXIT_HYPOTHESIS

    def test_pair_needs_two(self, files):
        write, _ = files
        assert main(["diagonalize", write("m.json", np.eye(2)), "--pair"]) == EXIT_ERROR


class TestDeterminismAndEnv:
    def test_reports_deterministic(self, files):
        write, tmp = files
        args = [
            "solve",
            "--a", write("a1.json", HOMOG_A),
            "--a", write("a2.json", 2 * np.eye(3)),
            "--b", write("b1.json", HOMOG_B),
            "--b", write("b2.json", np.eye(3)),
            "--c", write("c.json", np.zeros((3, 3))),
        ]
        out1, out2 = tmp / "r1.json", tmp / "r2.json"
        assert main(args + ["--out", str(out1)]) == EXIT_OK
        assert main(args + ["--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_env_default_and_flag_priority(self, files, monkeypatch):
        write, tmp = files
        out = tmp / "r.json"
        args = [
            "solve",
            "--a", write("a.json", np.diag([1.0, 0.0])),
            "--b", write("b.json", np.eye(2)),
            "--c", write("c.json", np.zeros((2, 2))),
        ]
        monkeypatch.setenv("LME_DEFAULT_TOL", "1e-4")
        assert main(args + ["--out", str(out)]) == EXIT_OK
        assert read_report(out)["tolerances"]["tol_zero"] == 1e-4
        assert main(args + ["--tol-zero", "1e-12", "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report["tolerances"]["tol_zero"] == 1e-12
        assert report["tolerances"]["tol_cluster"] == 1e-4
