"""Command-line front end.

Subcommands::

    lme solve --a A1.json [--a A2.json ...] --b B1.json [...] --c C.json
    lme sylvester|stein --a A.json --b B.json --c C.json
    lme clyap|dlyap --a A.json --c C.json
    lme verify [--trials T --n N --k K --seed S | file flags as solve]
    lme diagonalize M1.json [M2.json ...] [--pair]

Matrices live in JSON files {"rows": r, "cols": c, "data": [[[re, im], ...]]}
(row major, one [re, im] pair per entry); a plain-text alternative with one
row per line and complex tokens such as ``1+2j`` is accepted on input.

Exit codes: 0 success/consistent, 1 I/O or parse error, 2 hypothesis
violated, 3 inconsistent, 4 verification mismatch.  The environment variable
LME_DEFAULT_TOL overrides every tolerance default; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import equations, oracle
from .errors import (
    HypothesisViolatedError,
    LmeError,
    NotHermitianRhsError,
    NotNormalError,
    OracleMismatchError,
)
from .instances import random_equation_instance
from .matcore import as_matrix, fro, is_normal
from .simdiag import induced_pair_without_diagonalizer, simultaneous_diagonalizer, validate_family
from .tolerances import TOL_CLUSTER, TOL_RANK, TOL_RES, TOL_ZERO

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS = 2
EXIT_INCONSISTENT = 3
EXIT_MISMATCH = 4

_NAMED_FORMS = ("sylvester", "stein", "clyap", "dlyap")


# ---------------------------------------------------------------------------
# matrix file format

def matrix_payload(m: np.ndarray) -> dict:
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def payload_matrix(obj: dict) -> np.ndarray:
    rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValueError("declared shape does not match data")
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        for j, entry in enumerate(row):
            re, im = entry
            out[i, j] = complex(re, im)
    return as_matrix(out)


def parse_matrix_text(text: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([complex(tok) for tok in line.split()])
    if not rows:
        raise ValueError("no matrix rows found")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("rows have differing lengths")
    return as_matrix(np.array(rows, dtype=complex))


def load_matrix(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return payload_matrix(json.loads(text))
    return parse_matrix_text(text)


def dump_matrix(m: np.ndarray) -> str:
    """Canonical serialized form; writing then re-parsing then re-writing is
    byte stable."""
    return json.dumps(matrix_payload(m), indent=2) + "\n"


def write_matrix(path: str, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_matrix(m))


# ---------------------------------------------------------------------------
# reports

@dataclass
class SolveReport:
    consistent: bool
    dimension: int
    x_hat: np.ndarray | None
    basis: list[np.ndarray]
    residuals: dict[str, float]
    diagnostics: list[str]
    equivalence_checks: dict[str, bool] | None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "consistent": self.consistent,
            "dimension": self.dimension,
            "x_hat": matrix_payload(self.x_hat) if self.x_hat is not None else None,
            "basis": [matrix_payload(b) for b in self.basis],
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "diagnostics": list(self.diagnostics),
            "equivalence_checks": self.equivalence_checks,
        }
        out.update(self.extras)
        return out


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument plumbing

def _tol_default(explicit: float | None, fallback: float) -> float:
    if explicit is not None:
        return explicit
    env = os.environ.get("LME_DEFAULT_TOL")
    if env is not None:
        return float(env)
    return fallback


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol-zero", type=float, default=None,
                        help=f"zero threshold (default {TOL_ZERO})")
    parser.add_argument("--tol-cluster", type=float, default=None,
                        help=f"eigenvalue clustering gap (default {TOL_CLUSTER})")
    parser.add_argument("--tol-res", type=float, default=None,
                        help=f"residual acceptance (default {TOL_RES})")
    parser.add_argument("--tol-rank", type=float, default=None,
                        help=f"rank threshold (default {TOL_RANK})")
    parser.add_argument("--out", default=None, help="write the JSON report here")


def _resolve_tols(args) -> dict[str, float]:
    return {
        "tol_zero": _tol_default(args.tol_zero, TOL_ZERO),
        "tol_cluster": _tol_default(args.tol_cluster, TOL_CLUSTER),
        "tol_res": _tol_default(args.tol_res, TOL_RES),
        "tol_rank": _tol_default(args.tol_rank, TOL_RANK),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lme",
        description="Solve linear matrix equations with commuting diagonalizable coefficients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="general equation sum_j A_j X B_j = C")
    p_solve.add_argument("--a", action="append", required=True, metavar="FILE")
    p_solve.add_argument("--b", action="append", required=True, metavar="FILE")
    p_solve.add_argument("--c", required=True, metavar="FILE")
    p_solve.add_argument("--force-oracle", action="store_true",
                         help="fall back to the brute-force oracle when the "
                              "structural hypotheses fail")
    _add_common(p_solve)

    for name, blurb in (
        ("sylvester", "A X + X B = C"),
        ("stein", "A X B - X = C"),
        ("clyap", "A* X + X A = C (A normal, C Hermitian)"),
        ("dlyap", "A* X A - X = C (A normal, C Hermitian)"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--a", required=True, metavar="FILE")
        if name in ("sylvester", "stein"):
            p.add_argument("--b", required=True, metavar="FILE")
        p.add_argument("--c", required=True, metavar="FILE")
        p.add_argument("--force-oracle", action="store_true")
        _add_common(p)

    p_verify = sub.add_parser("verify", help="referee the solver against the oracle")
    p_verify.add_argument("--a", action="append", metavar="FILE")
    p_verify.add_argument("--b", action="append", metavar="FILE")
    p_verify.add_argument("--c", metavar="FILE")
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--n", type=int, default=4)
    p_verify.add_argument("--k", type=int, default=2)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--inject-fault", action="store_true",
                          help="corrupt a basis matrix first (negative control)")
    _add_common(p_verify)

    p_diag = sub.add_parser("diagonalize", help="joint diagonalizer and induced vectors")
    p_diag.add_argument("matrices", nargs="+", metavar="FILE")
    p_diag.add_argument("--pair", action="store_true",
                        help="with exactly two inputs, also recover the induced "
                             "pair from eigenvalues alone")
    _add_common(p_diag)
    return parser


# ---------------------------------------------------------------------------
# shared solve/report path

def _build_spec(args) -> equations.EquationSpec:
    command = args.command
    a_mat = load_matrix(args.a) if isinstance(args.a, str) else [load_matrix(p) for p in args.a]
    c_mat = load_matrix(args.c)
    if command == "sylvester":
        n = a_mat.shape[0]
        b_mat = load_matrix(args.b)
        return equations.equation_spec([a_mat, np.eye(n)], [np.eye(n), b_mat], c_mat)
    if command == "stein":
        n = a_mat.shape[0]
        b_mat = load_matrix(args.b)
        return equations.equation_spec([a_mat, -np.eye(n)], [b_mat, np.eye(n)], c_mat)
    if command == "clyap":
        n = a_mat.shape[0]
        return equations.equation_spec(
            [a_mat.conj().T, np.eye(n)], [np.eye(n), a_mat], c_mat
        )
    if command == "dlyap":
        n = a_mat.shape[0]
        return equations.equation_spec(
            [a_mat.conj().T, -np.eye(n)], [a_mat, np.eye(n)], c_mat
        )
    return equations.equation_spec(a_mat, args_b_matrices(args), c_mat)


def args_b_matrices(args) -> list[np.ndarray]:
    return [load_matrix(p) for p in args.b]


def _named_gate(command: str, a_mat: np.ndarray, c_mat: np.ndarray) -> None:
    """Raise the Lyapunov-specific precondition errors before generic solving."""
    if command in ("clyap", "dlyap"):
        if not is_normal(a_mat):
            raise NotNormalError("A must be a normal matrix")
        if fro(c_mat - c_mat.conj().T) > 1e-10 * max(1.0, fro(c_mat)):
            raise NotHermitianRhsError("C must be Hermitian")


def _formula_extras(command: str, a_mat, b_mat, tol_zero: float) -> dict:
    if command not in _NAMED_FORMS:
        return {}
    count = equations.named_form_pair_count(
        command, a_mat, b_mat if command in ("sylvester", "stein") else None, tol_zero
    )
    return {"formula_count": count}


def _report_from_result(spec, result, evidence, tols) -> SolveReport:
    res_basis = max(
        (equations.equation_residual(
            equations.EquationSpec(spec.a_list, spec.b_list, np.zeros_like(spec.rhs)), b
        ) for b in result.basis),
        default=0.0,
    )
    residuals = {
        "x_hat_equation": evidence.equation_residual,
        "x_hat_standard": evidence.standard_residual,
        "basis_homogeneous_max": res_basis,
    }
    diagnostics = list(evidence.diagnostics)
    extras = {
        "witness_row": result.witness_r,
        "normal_certificate": result.normal_certificate,
        "zero_cells": [[int(r), int(c)] for r, c in result.relevant.cells],
        "mode": "structured",
        "tolerances": tols,
    }
    return SolveReport(
        consistent=result.consistent,
        dimension=result.dimension,
        x_hat=result.x_hat,
        basis=list(result.basis),
        residuals=residuals,
        diagnostics=diagnostics,
        equivalence_checks=evidence.flags(),
        extras=extras,
    )


def _oracle_report(spec, tols, reason: str, extras: dict) -> tuple[SolveReport, int]:
    system = oracle.vectorize(spec)
    sol = oracle.oracle_solve(system, tols["tol_rank"])
    warning = (
        "WARNING: structural hypotheses violated "
        f"({reason}); falling back to the brute-force vectorized oracle. "
        "Structure-based guarantees do not apply to this answer."
    )
    residuals = {"oracle_system": sol.residual}
    report = SolveReport(
        consistent=sol.consistent,
        dimension=sol.dimension,
        x_hat=sol.min_norm_solution,
        basis=list(sol.nullspace),
        residuals=residuals,
        diagnostics=[warning],
        equivalence_checks=None,
        extras={"mode": "oracle", "tolerances": tols, **extras},
    )
    code = EXIT_OK if sol.consistent else EXIT_INCONSISTENT
    return report, code


def _cmd_equation(args) -> int:
    tols = _resolve_tols(args)
    command = args.command
    try:
        a_first = load_matrix(args.a if isinstance(args.a, str) else args.a[0])
        b_first = (
            load_matrix(args.b) if command in ("sylvester", "stein") else None
        )
        spec = _build_spec(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError, LmeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    extras = _formula_extras(command, a_first, b_first, tols["tol_zero"])
    try:
        _named_gate(command, a_first, load_matrix(args.c))
        verdict, evidence = equations.check_consistent(
            spec,
            tol_cluster=tols["tol_cluster"],
            tol_zero=tols["tol_zero"],
            tol_res=tols["tol_res"],
            tol_rank=tols["tol_rank"],
        )
        result = equations.solve(
            spec, tol_cluster=tols["tol_cluster"], tol_zero=tols["tol_zero"]
        )
    except (HypothesisViolatedError, NotNormalError, NotHermitianRhsError) as exc:
        reason = f"{type(exc).__name__}: {exc}"
        if getattr(args, "force_oracle", False):
            report, code = _oracle_report(spec, tols, reason, extras)
            print(report.diagnostics[0], file=sys.stderr)
            _emit(report.to_dict(), args.out)
            return code
        print(f"hypothesis violated: {reason}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    report = _report_from_result(spec, result, evidence, tols)
    report.extras.update(extras)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if result.consistent else EXIT_INCONSISTENT


# ---------------------------------------------------------------------------
# verify

def _cmd_verify(args) -> int:
    tols = _resolve_tols(args)
    if args.trials is None and not (args.a and args.b and args.c):
        print("error: verify needs either --trials or --a/--b/--c files", file=sys.stderr)
        return EXIT_ERROR
    trials: list[tuple[str, equations.EquationSpec]] = []
    if args.trials is not None:
        if args.trials < 1:
            print("error: --trials must be positive", file=sys.stderr)
            return EXIT_ERROR
        rng = np.random.default_rng(args.seed)
        for t in range(args.trials):
            zero_rows = t % 3
            inconsistent = zero_rows > 0 and t % 5 == 0
            spec, _ = random_equation_instance(
                rng, args.n, args.k, zero_diag_rows=zero_rows, inconsistent=inconsistent
            )
            trials.append((f"trial {t}", spec))
    else:
        try:
            spec = equations.equation_spec(
                [load_matrix(p) for p in args.a],
                [load_matrix(p) for p in args.b],
                load_matrix(args.c),
            )
        except (OSError, ValueError, KeyError, json.JSONDecodeError, LmeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
        trials.append(("input files", spec))

    checked = 0
    for label, spec in trials:
        try:
            result = equations.solve(
                spec, tol_cluster=tols["tol_cluster"], tol_zero=tols["tol_zero"]
            )
        except HypothesisViolatedError as exc:
            print(f"hypothesis violated on {label}: {exc}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        if args.inject_fault and result.basis:
            corrupted = list(result.basis)
            corrupted[0] = corrupted[0] + 1e-3
            result = equations.AffineSolutionSet(
                consistent=result.consistent,
                witness_r=result.witness_r,
                x_hat=result.x_hat,
                basis=tuple(corrupted),
                dimension=result.dimension,
                diagonalizer=result.diagonalizer,
                normal_certificate=result.normal_certificate,
                relevant=result.relevant,
                star=result.star,
            )
        system = oracle.vectorize(spec)
        try:
            oracle.compare(result, system)
        except OracleMismatchError as exc:
            _emit(
                {
                    "agreement": False,
                    "trial": label,
                    "failures": exc.failures,
                    "checked": checked,
                },
                args.out,
            )
            return EXIT_MISMATCH
        checked += 1
    _emit({"agreement": True, "checked": checked, "tolerances": tols}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# diagonalize

def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _cmd_diagonalize(args) -> int:
    tols = _resolve_tols(args)
    try:
        mats = [load_matrix(p) for p in args.matrices]
    except (OSError, ValueError, KeyError, json.JSONDecodeError, LmeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.pair and len(mats) != 2:
        print("error: --pair needs exactly two matrices", file=sys.stderr)
        return EXIT_ERROR
    try:
        family = validate_family(mats)
        star = simultaneous_diagonalizer(family, tols["tol_cluster"])
        report = {
            "diagonalizer": matrix_payload(star.diagonalizer),
            "induced_vectors": [[_complex_pair(z) for z in v] for v in star.vectors],
            "block_levels": [[[lo, hi] for lo, hi in level] for level in star.levels],
            "tolerances": tols,
        }
        if args.pair:
            avec, bvec, collisions, beta = induced_pair_without_diagonalizer(
                mats[0], mats[1], tol_cluster=tols["tol_cluster"], tol_zero=tols["tol_zero"]
            )
            report["pair"] = {
                "a": [_complex_pair(z) for z in avec],
                "b": [_complex_pair(z) for z in bvec],
                "collision_set": [_complex_pair(z) for z in collisions],
                "beta": _complex_pair(complex(beta)),
            }
    except LmeError as exc:
        print(f"hypothesis violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("solve", *_NAMED_FORMS):
        return _cmd_equation(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "diagonalize":
        return _cmd_diagonalize(args)
    parser.error(f"unknown command {args.command}")
    return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
