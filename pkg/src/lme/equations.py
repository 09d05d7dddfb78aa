"""Solvers for linear matrix equations sum_j A_j X B_j = C whose parameter
matrices form a commuting family of diagonalizable matrices.

In a joint eigenbasis S the equation decouples entrywise: with induced
eigenvalue vectors a^j, b^j, c, the cell (r, s) of the transformed unknown is
constrained by gamma[r, s] = sum_j a^j_r b^j_s.  Consistency holds iff every
diagonal cell has gamma[r, r] != 0 or c_r = 0, the candidate solution is
(sum_j A_j B_j)^Drazin C, and the homogeneous solution space is spanned by
S E_rs S^{-1} over the zero cells of gamma.  Sylvester, Stein and both
Lyapunov equations are thin wrappers over the same machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geninv
from .errors import (
    DimensionMismatchError,
    HypothesisViolatedError,
    InconsistentInputError,
    LmeError,
    NotHermitianRhsError,
    NotNormalError,
)
from .matcore import as_matrix, commutes, fro, is_normal, require_square
from .simdiag import StarSequence, simultaneous_diagonalizer, validate_family
from .tolerances import TOL_CLUSTER, TOL_COMMUTE, TOL_RANK, TOL_RECON, TOL_RES, TOL_ZERO

__all__ = [
    "EquationSpec",
    "RelevantMatrix",
    "AffineSolutionSet",
    "ConsistencyEvidence",
    "UniquenessReport",
    "equation_spec",
    "equation_residual",
    "coefficient_sum",
    "standard_spec",
    "relevant_matrix",
    "x_hat",
    "solve",
    "check_consistent",
    "solve_standard",
    "solve_sylvester",
    "solve_continuous_lyapunov",
    "solve_stein",
    "solve_discrete_lyapunov",
    "uniqueness_report",
    "named_form_pair_count",
]


@dataclass(frozen=True)
class EquationSpec:
    """The data (A_1..A_k, B_1..B_k, C) of one linear matrix equation."""

    a_list: tuple[np.ndarray, ...]
    b_list: tuple[np.ndarray, ...]
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.rhs.shape[0]

    @property
    def k(self) -> int:
        return len(self.a_list)

    def members(self) -> list[np.ndarray]:
        return [*self.a_list, *self.b_list, self.rhs]


def equation_spec(a_list, b_list, rhs) -> EquationSpec:
    """Validate and freeze the equation data."""
    a = tuple(require_square(as_matrix(m, f"A[{i}]"), f"A[{i}]") for i, m in enumerate(a_list))
    b = tuple(require_square(as_matrix(m, f"B[{i}]"), f"B[{i}]") for i, m in enumerate(b_list))
    c = require_square(as_matrix(rhs, "C"), "C")
    if len(a) != len(b):
        raise DimensionMismatchError(f"{len(a)} left factors but {len(b)} right factors")
    if not a:
        raise DimensionMismatchError("the equation needs at least one term")
    n = c.shape[0]
    for i, m in enumerate((*a, *b)):
        if m.shape[0] != n:
            raise DimensionMismatchError(f"term matrix {i} has size {m.shape[0]}, expected {n}")
    return EquationSpec(a, b, c)


def equation_residual(spec: EquationSpec, x) -> float:
    """Frobenius norm of sum_j A_j X B_j - C."""
    xm = as_matrix(x, "X")
    acc = -spec.rhs.astype(complex)
    for a, b in zip(spec.a_list, spec.b_list):
        acc = acc + a @ xm @ b
    return fro(acc)


def coefficient_sum(spec: EquationSpec) -> np.ndarray:
    """The matrix sum_j A_j B_j of the attached standard equation."""
    return sum(a @ b for a, b in zip(spec.a_list, spec.b_list))


def standard_spec(spec: EquationSpec) -> EquationSpec:
    """The attached standard equation (sum_j A_j B_j) X = C as a one-term
    instance."""
    n = spec.n
    return equation_spec([coefficient_sum(spec)], [np.eye(n)], spec.rhs)


@dataclass(frozen=True)
class RelevantMatrix:
    """gamma[r, s] = sum_j a^j_r b^j_s with its thresholded zero pattern."""

    gamma: np.ndarray
    a_vectors: tuple[np.ndarray, ...]
    b_vectors: tuple[np.ndarray, ...]
    c_vector: np.ndarray
    zero_mask: np.ndarray
    zero_count: int
    scale: float

    @property
    def cells(self) -> tuple[tuple[int, int], ...]:
        """Zero cells as (row, col) pairs, row-major order."""
        rows, cols = np.nonzero(self.zero_mask)
        return tuple(zip(rows.tolist(), cols.tolist()))


def relevant_matrix(a_vectors, b_vectors, c_vector, tol_zero: float = TOL_ZERO) -> RelevantMatrix:
    """Assemble gamma = sum_j outer(a^j, b^j) and threshold its entries at
    tol_zero * max_j(||a^j||_inf ||b^j||_inf)."""
    avecs = tuple(np.asarray(v, dtype=complex) for v in a_vectors)
    bvecs = tuple(np.asarray(v, dtype=complex) for v in b_vectors)
    cvec = np.asarray(c_vector, dtype=complex)
    if len(avecs) != len(bvecs) or not avecs:
        raise DimensionMismatchError("need matching, non-empty vector lists")
    n = cvec.shape[0]
    for v in (*avecs, *bvecs):
        if v.shape != (n,):
            raise DimensionMismatchError("all vectors must have the right-hand side's length")
    gamma = np.zeros((n, n), dtype=complex)
    scale = 0.0
    for a, b in zip(avecs, bvecs):
        gamma += np.outer(a, b)
        scale = max(scale, float(np.max(np.abs(a)) * np.max(np.abs(b))) if n else 0.0)
    mask = np.abs(gamma) <= tol_zero * scale
    return RelevantMatrix(gamma, avecs, bvecs, cvec, mask, int(mask.sum()), scale)


@dataclass(frozen=True)
class AffineSolutionSet:
    """Full description of the solution set of one equation.

    When consistent, the solutions are exactly x_hat + span(basis); the basis
    matrices are S E_rs S^{-1} over the zero cells of the relevant matrix and
    dimension equals their count.  ``normal_certificate`` is only set when
    every input matrix is normal, and then records whether all off-diagonal
    relevant-matrix entries are nonzero (the condition for every solution to
    be normal).
    """

    consistent: bool
    witness_r: int | None
    x_hat: np.ndarray
    basis: tuple[np.ndarray, ...]
    dimension: int
    diagonalizer: np.ndarray
    normal_certificate: bool | None
    relevant: RelevantMatrix
    star: StarSequence


def x_hat(spec: EquationSpec, tol_zero: float = TOL_ZERO) -> np.ndarray:
    """Candidate solution (sum_j A_j B_j)^Drazin C; defined for any square
    inputs, a solution exactly when the equation is consistent under the
    commuting-diagonalizable hypothesis.

    The Drazin zero threshold is referenced to the size of the uncancelled
    products, so a coefficient sum that vanishes up to rounding is treated
    as the zero matrix instead of being inverted.
    """
    scale = float(sum(fro(a) * fro(b) for a, b in zip(spec.a_list, spec.b_list)))
    return geninv.drazin(coefficient_sum(spec), tol_zero, scale=scale) @ spec.rhs


def _c_zero_mask(cvec: np.ndarray, tol_zero: float) -> np.ndarray:
    scale = float(np.max(np.abs(cvec))) if cvec.size else 0.0
    return np.abs(cvec) <= tol_zero * scale


def solve(
    spec: EquationSpec,
    tol_commute: float = TOL_COMMUTE,
    tol_cluster: float = TOL_CLUSTER,
    tol_zero: float = TOL_ZERO,
    tol_recon: float = TOL_RECON,
) -> AffineSolutionSet:
    """Decide consistency and parametrize the affine solution set.

    Raises HypothesisViolatedError when the parameter matrices do not form a
    commuting family of diagonalizable matrices; that case is outside this
    solver's scope and belongs to the brute-force oracle.
    """
    try:
        family = validate_family(spec.members(), tol_commute, tol_recon)
    except LmeError as exc:
        raise HypothesisViolatedError(exc) from exc
    star = simultaneous_diagonalizer(family, tol_cluster, tol_recon)
    k = spec.k
    avecs = star.vectors[:k]
    bvecs = star.vectors[k:2 * k]
    cvec = star.vectors[2 * k]
    rel = relevant_matrix(avecs, bvecs, cvec, tol_zero)
    c_zero = _c_zero_mask(cvec, tol_zero)
    diag_zero = np.diag(rel.zero_mask)
    witness = None
    for r in range(spec.n):
        if diag_zero[r] and not c_zero[r]:
            witness = r
            break
    consistent = witness is None
    s = star.diagonalizer
    s_inv = np.linalg.inv(s)
    basis = tuple(np.outer(s[:, r], s_inv[c, :]) for r, c in rel.cells)
    certificate = None
    if all(is_normal(m, tol_commute) for m in family.members):
        off = rel.zero_mask.copy()
        np.fill_diagonal(off, False)
        certificate = not bool(off.any())
    return AffineSolutionSet(
        consistent=consistent,
        witness_r=witness,
        x_hat=x_hat(spec, tol_zero),
        basis=basis,
        dimension=len(basis),
        diagonalizer=s,
        normal_certificate=certificate,
        relevant=rel,
        star=star,
    )


@dataclass(frozen=True)
class ConsistencyEvidence:
    """Independently evaluated equivalent views of consistency.

    The five flags must agree for well-conditioned input; any disagreement is
    surfaced in ``diagnostics`` rather than resolved silently.
    """

    consistent: bool
    diagonal_rule: bool
    x_hat_solves_equation: bool
    standard_consistent: bool
    x_hat_solves_standard: bool
    equation_residual: float
    standard_residual: float
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def agree(self) -> bool:
        return (
            self.diagonal_rule
            == self.x_hat_solves_equation
            == self.standard_consistent
            == self.x_hat_solves_standard
        )

    def flags(self) -> dict[str, bool]:
        return {
            "equation_consistent": self.consistent,
            "diagonal_rule": self.diagonal_rule,
            "x_hat_solves_equation": self.x_hat_solves_equation,
            "standard_consistent": self.standard_consistent,
            "x_hat_solves_standard": self.x_hat_solves_standard,
        }


def _column_space_consistent(w: np.ndarray, c: np.ndarray, tol_rank: float) -> bool:
    """Rank test: is every column of C in the column space of W?"""
    aug = np.hstack([w, c])
    s_aug = np.linalg.svd(aug, compute_uv=False)
    scale = s_aug[0] if s_aug.size else 0.0
    if scale == 0.0:
        return True
    r_w = geninv.matrix_rank(w, tol_rank, scale=scale)
    r_aug = int(np.count_nonzero(s_aug > tol_rank * scale))
    return r_w == r_aug


def check_consistent(
    spec: EquationSpec,
    tol_commute: float = TOL_COMMUTE,
    tol_cluster: float = TOL_CLUSTER,
    tol_zero: float = TOL_ZERO,
    tol_res: float = TOL_RES,
    tol_rank: float = TOL_RANK,
) -> tuple[bool, ConsistencyEvidence]:
    """Consistency verdict plus all equivalent views evaluated independently:
    the diagonal rule on the relevant matrix, the residual of the candidate
    solution in the equation itself, a rank test on the attached standard
    equation, and the candidate's residual in the standard equation."""
    result = solve(spec, tol_commute, tol_cluster, tol_zero)
    xh = result.x_hat
    res_eq = equation_residual(spec, xh)
    bound = tol_res * max(1.0, fro(spec.rhs))
    w = coefficient_sum(spec)
    res_std = fro(w @ xh - spec.rhs)
    ev_diag = result.consistent
    ev_eq = res_eq <= bound
    ev_std_rank = _column_space_consistent(w, spec.rhs, tol_rank)
    ev_std_res = res_std <= bound
    diagnostics: list[str] = []
    if not (ev_diag == ev_eq == ev_std_rank == ev_std_res):
        diagnostics.append(
            "equivalent consistency views disagree "
            f"(diagonal={ev_diag}, equation_residual={ev_eq}, "
            f"standard_rank={ev_std_rank}, standard_residual={ev_std_res}); "
            "this indicates numerical conditioning trouble, not a verdict"
        )
    evidence = ConsistencyEvidence(
        consistent=ev_diag,
        diagonal_rule=ev_diag,
        x_hat_solves_equation=ev_eq,
        standard_consistent=ev_std_rank,
        x_hat_solves_standard=ev_std_res,
        equation_residual=res_eq,
        standard_residual=res_std,
        diagnostics=tuple(diagnostics),
    )
    return ev_diag, evidence


def solve_standard(spec: EquationSpec, **tol_kwargs) -> AffineSolutionSet:
    """Solve the attached standard equation (sum_j A_j B_j) X = C."""
    return solve(standard_spec(spec), **tol_kwargs)


def solve_sylvester(a, b, c, **tol_kwargs) -> AffineSolutionSet:
    """A X + X B = C for a commuting diagonalizable triple; the solution-set
    dimension equals the number of index pairs with a_r + b_s = 0."""
    a = require_square(as_matrix(a, "A"), "A")
    b = require_square(as_matrix(b, "B"), "B")
    c = require_square(as_matrix(c, "C"), "C")
    n = a.shape[0]
    spec = equation_spec([a, np.eye(n)], [np.eye(n), b], c)
    return solve(spec, **tol_kwargs)


def solve_stein(a, b, c, **tol_kwargs) -> AffineSolutionSet:
    """A X B - X = C for a commuting diagonalizable triple; the solution-set
    dimension equals the number of index pairs with a_r b_s = 1."""
    a = require_square(as_matrix(a, "A"), "A")
    b = require_square(as_matrix(b, "B"), "B")
    c = require_square(as_matrix(c, "C"), "C")
    n = a.shape[0]
    spec = equation_spec([a, -np.eye(n)], [b, np.eye(n)], c)
    return solve(spec, **tol_kwargs)


def _lyapunov_gate(a, c, tol_commute):
    a = require_square(as_matrix(a, "A"), "A")
    c = require_square(as_matrix(c, "C"), "C")
    if a.shape != c.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {c.shape}")
    if not is_normal(a, tol_commute):
        raise NotNormalError("A must be a normal matrix")
    if fro(c - c.conj().T) > tol_commute * max(1.0, fro(c)):
        raise NotHermitianRhsError("C must be Hermitian")
    return a, c


def solve_continuous_lyapunov(a, c, tol_commute: float = TOL_COMMUTE, **tol_kwargs) -> AffineSolutionSet:
    """A* X + X A = C with A normal, C Hermitian and AC = CA.

    The adjoint is formed internally; the dimension of the solution set is
    the number of pairs with conj(a_r) + a_s = 0.  Whether every solution is
    normal is recorded in the result's ``normal_certificate``.
    """
    a, c = _lyapunov_gate(a, c, tol_commute)
    return solve_sylvester(a.conj().T, a, c, tol_commute=tol_commute, **tol_kwargs)


def solve_discrete_lyapunov(a, c, tol_commute: float = TOL_COMMUTE, **tol_kwargs) -> AffineSolutionSet:
    """A* X A - X = C with A normal, C Hermitian and AC = CA.

    The dimension of the solution set is the number of pairs with
    conj(a_r) a_s = 1; the normality of all solutions is recorded in
    ``normal_certificate``.
    """
    a, c = _lyapunov_gate(a, c, tol_commute)
    return solve_stein(a.conj().T, a, c, tol_commute=tol_commute, **tol_kwargs)


@dataclass(frozen=True)
class UniquenessReport:
    """Uniqueness analysis of a consistent solve result."""

    unique: bool
    infinite: bool
    dimension: int
    coefficient_sum_invertible: bool
    candidate_is_solution: bool | None = None
    candidate_equals_x_hat: bool | None = None
    candidate_commutation: tuple[bool, ...] | None = None


def uniqueness_report(
    result: AffineSolutionSet,
    spec: EquationSpec,
    candidate=None,
    tol_commute: float = TOL_COMMUTE,
    tol_res: float = TOL_RES,
    tol_rank: float = TOL_RANK,
) -> UniquenessReport:
    """Classify the solution set of a consistent result as unique or infinite
    and, when the coefficient sum is invertible and a candidate solution is
    supplied, check whether the candidate commutes with each parameter matrix
    (any solution other than the canonical one cannot commute with all)."""
    if not result.consistent:
        raise InconsistentInputError("uniqueness analysis needs a consistent result")
    w = coefficient_sum(spec)
    invertible = geninv.matrix_rank(w, tol_rank) == spec.n
    unique = result.dimension == 0
    report_kwargs: dict = {}
    if candidate is not None:
        xc = require_square(as_matrix(candidate, "candidate"), "candidate")
        res = equation_residual(spec, xc)
        report_kwargs["candidate_is_solution"] = res <= tol_res * max(1.0, fro(spec.rhs))
        report_kwargs["candidate_equals_x_hat"] = (
            fro(xc - result.x_hat) <= tol_res * max(1.0, fro(result.x_hat))
        )
        report_kwargs["candidate_commutation"] = tuple(
            commutes(xc, m, tol_commute) for m in (*spec.a_list, *spec.b_list)
        )
    return UniquenessReport(
        unique=unique,
        infinite=not unique,
        dimension=result.dimension,
        coefficient_sum_invertible=invertible,
        **report_kwargs,
    )


def named_form_pair_count(kind: str, a, b=None, tol_zero: float = TOL_ZERO) -> int:
    """Eigenvalue-pair cardinality behind the named-form dimension formulas,
    evaluated directly from eigenvalues (no commutation hypotheses needed):
    sylvester counts a_r + b_s = 0, stein counts a_r b_s = 1, clyap counts
    conj(a_r) + a_s = 0 and dlyap counts conj(a_r) a_s = 1."""
    amat = require_square(as_matrix(a, "A"), "A")
    wa = np.linalg.eigvals(amat)
    if kind == "sylvester":
        wb = np.linalg.eigvals(require_square(as_matrix(b, "B"), "B"))
        grid = wa[:, None] + wb[None, :]
        scale = max(1.0, float(np.max(np.abs(wa)) + np.max(np.abs(wb))))
    elif kind == "stein":
        wb = np.linalg.eigvals(require_square(as_matrix(b, "B"), "B"))
        grid = wa[:, None] * wb[None, :] - 1.0
        scale = max(1.0, float(np.max(np.abs(wa)) * np.max(np.abs(wb))))
    elif kind == "clyap":
        grid = np.conj(wa)[:, None] + wa[None, :]
        scale = max(1.0, 2.0 * float(np.max(np.abs(wa))))
    elif kind == "dlyap":
        grid = np.conj(wa)[:, None] * wa[None, :] - 1.0
        scale = max(1.0, float(np.max(np.abs(wa)) ** 2))
    else:
        raise ValueError(f"unknown named form {kind!r}")
    return int(np.count_nonzero(np.abs(grid) <= tol_zero * scale))
