"""Dense complex-matrix kernel: eigendecomposition, permutation matrices,
direct sums, and the commuting/normality predicates the solvers rely on.

Matrices are plain ``numpy.ndarray`` objects with complex dtype; every
function validates its inputs and returns fresh arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyListError,
    NonFiniteError,
    NonSquareError,
)
from .tolerances import TOL_CLUSTER, TOL_COMMUTE, TOL_RECON

__all__ = [
    "Permutation",
    "EigenDecomposition",
    "as_matrix",
    "require_square",
    "fro",
    "eig_decompose",
    "commutes",
    "is_normal",
    "permutation_matrix",
    "permute_vector",
    "direct_sum",
    "direct_sum_permutation",
    "canonical_sort_indices",
    "cluster_values",
]

# Reciprocal-condition floor below which an eigenvector matrix is treated as
# singular regardless of the reconstruction residual.
_RCOND_FLOOR = 1e-13


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(value, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return a


def require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {a.shape}")
    return a


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1, ..., n} stored as the one-based image tuple."""

    image: tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        if sorted(self.image) != list(range(1, n + 1)):
            raise ValueError(f"image {self.image} is not a bijection of 1..{n}")

    @property
    def size(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self ∘ other, i.e. i -> self(other(i))."""
        if other.size != self.size:
            raise DimensionMismatchError("permutation sizes differ")
        return Permutation(tuple(self.image[k - 1] for k in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, k in enumerate(self.image, start=1):
            inv[k - 1] = i
        return Permutation(tuple(inv))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenbasis of a square matrix together with quality diagnostics.

    When ``diagonalizable`` is true the columns of ``diagonalizer`` carry the
    eigenvectors and ``eigenvalues`` the matching eigenvalues, so that
    S diag(m) S^{-1} reconstructs the input within the requested tolerance.
    """

    diagonalizer: np.ndarray
    eigenvalues: np.ndarray
    condition_estimate: float
    diagonalizable: bool


def canonical_sort_indices(values: np.ndarray, gap: float) -> list[int]:
    """Deterministic ordering of complex values: ascending modulus, then
    descending real part, then descending imaginary part; differences below
    ``gap`` count as ties so that round-off cannot flip the order."""

    def cmp(i: int, j: int) -> int:
        u, v = values[i], values[j]
        d = abs(u) - abs(v)
        if abs(d) > gap:
            return -1 if d < 0 else 1
        d = u.real - v.real
        if abs(d) > gap:
            return 1 if d < 0 else -1
        d = u.imag - v.imag
        if abs(d) > gap:
            return 1 if d < 0 else -1
        return 0

    return sorted(range(len(values)), key=cmp_to_key(cmp))


def cluster_values(values: np.ndarray, gap: float) -> list[list[int]]:
    """Group values whose pairwise distance is at most ``gap`` (transitive
    closure), returning index clusters in canonical representative order."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= gap:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    reps = np.array([values[c].mean() for c in clusters])
    order = canonical_sort_indices(reps, gap)
    return [clusters[i] for i in order]


def _reconstruction_ok(a, vecs, vals, tol):
    """Check invertibility of the eigenvector matrix and the residual of
    S diag(m) S^{-1} against ``a``; returns (ok, condition_estimate)."""
    sing = np.linalg.svd(vecs, compute_uv=False)
    if sing[0] == 0 or sing[-1] <= _RCOND_FLOOR * sing[0]:
        return False, np.inf
    cond = float(sing[0] / sing[-1])
    inv = np.linalg.inv(vecs)
    resid = fro(vecs @ (vals[:, None] * inv) - a)
    return resid <= tol * max(1.0, fro(a)), cond


def _star_eigensystem(a, tol_cluster, tol):
    """Build an eigenbasis ordered as a star vector: eigenvalues clustered at
    the ``tol_cluster`` gap, clusters sorted canonically, each eigenspace
    spanned by an orthonormal basis from the SVD of (A - rep I).

    Returns (values, basis, block_sizes) or None when some cluster's geometric
    multiplicity falls short of its algebraic multiplicity (defective case).
    """
    n = a.shape[0]
    scale = max(1.0, fro(a))
    w = np.linalg.eigvals(a)
    clusters = cluster_values(w, tol_cluster * scale)
    cols = []
    vals = []
    sizes = []
    for idx in clusters:
        rep = w[idx].mean()
        k = len(idx)
        spread = float(np.max(np.abs(w[idx] - rep))) if k > 1 else 0.0
        cutoff = max(4.0 * spread, tol * scale)
        _, sing_vals, vh = np.linalg.svd(a - rep * np.eye(n))
        # the k smallest singular values must vanish, otherwise the geometric
        # multiplicity falls short of the algebraic one
        if sing_vals[n - k] > cutoff:
            return None
        cols.append(vh[n - k:].conj().T)
        vals.extend([rep] * k)
        sizes.append(k)
    basis = np.hstack(cols)
    values = np.array(vals)
    ok, _cond = _reconstruction_ok(a, basis, values, tol)
    if not ok:
        return None
    return values, basis, sizes


def eig_decompose(m, tol: float = TOL_RECON, tol_cluster: float = TOL_CLUSTER) -> EigenDecomposition:
    """Eigendecomposition with an explicit diagonalizability verdict.

    The verdict is decided by reconstruction residual: the raw LAPACK
    eigenvectors are tried first, then a clustered eigenspace completion;
    if neither reconstructs the matrix within ``tol`` (relative), the input
    is reported as not diagonalizable and the raw output is returned for
    inspection.
    """
    a = require_square(as_matrix(m))
    w, v = np.linalg.eig(a)
    ok, cond = _reconstruction_ok(a, v, w, tol)
    if ok:
        return EigenDecomposition(v, w, cond, True)
    star = _star_eigensystem(a, tol_cluster, tol)
    if star is not None:
        values, basis, _sizes = star
        star_ok, star_cond = _reconstruction_ok(a, basis, values, tol)
        if star_ok:
            return EigenDecomposition(basis, values, star_cond, True)
    return EigenDecomposition(v, w, cond, False)


def commutes(a, b, tol: float = TOL_COMMUTE) -> bool:
    """True iff ||AB - BA||_F <= tol * max(1, ||A||_F ||B||_F)."""
    a = require_square(as_matrix(a, "A"), "A")
    b = require_square(as_matrix(b, "B"), "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    return fro(a @ b - b @ a) <= tol * max(1.0, fro(a) * fro(b))


def is_normal(m, tol: float = TOL_COMMUTE) -> bool:
    """True iff ||M M* - M* M||_F <= tol * max(1, ||M||_F^2)."""
    a = require_square(as_matrix(m))
    h = a.conj().T
    return fro(a @ h - h @ a) <= tol * max(1.0, fro(a) ** 2)


def permutation_matrix(sigma: Permutation) -> np.ndarray:
    """The matrix P with P[i, j] = 1 iff i = sigma(j) (one-based)."""
    n = sigma.size
    p = np.zeros((n, n), dtype=complex)
    for j, k in enumerate(sigma.image):
        p[k - 1, j] = 1.0
    return p


def permute_vector(m, sigma: Permutation) -> np.ndarray:
    """Component permutation: result[i] = m[sigma(i+1) - 1]."""
    vec = np.asarray(m, dtype=complex)
    if vec.ndim != 1 or vec.shape[0] != sigma.size:
        raise DimensionMismatchError(
            f"vector of length {vec.shape} does not match permutation of size {sigma.size}"
        )
    idx = np.array(sigma.image) - 1
    return vec[idx]


def direct_sum(blocks) -> np.ndarray:
    """Block-diagonal assembly of square blocks."""
    blocks = [require_square(as_matrix(b, f"block {i}"), f"block {i}") for i, b in enumerate(blocks)]
    if not blocks:
        raise EmptyListError("direct_sum needs at least one block")
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    off = 0
    for b in blocks:
        k = b.shape[0]
        out[off:off + k, off:off + k] = b
        off += k
    return out


def direct_sum_permutation(parts) -> Permutation:
    """Concatenate permutations with offsets so that the permutation matrix
    of the result is the direct sum of the part matrices."""
    parts = list(parts)
    if not parts:
        raise EmptyListError("direct_sum_permutation needs at least one part")
    image: list[int] = []
    off = 0
    for p in parts:
        image.extend(k + off for k in p.image)
        off += p.size
    return Permutation(tuple(image))
