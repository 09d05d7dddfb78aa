"""Simultaneous diagonalization of commuting diagonalizable families.

A family is diagonalized by recursive eigenspace refinement: the first
member's eigenspaces fix a block partition, each later member is restricted
to the current blocks (where it is block diagonal) and diagonalized there,
splitting the blocks further.  The induced eigenvalue vectors then form a
star sequence: the first is a star vector and each later one is constant on
the blocks of the refined partition, with distinct values across sibling
blocks.

The module also recovers, without computing any diagonalizer, a compatible
ordering of the eigenvalues of two commuting matrices, by intersecting
eigenvalue multisets of shifted products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyListError,
    IntersectionAmbiguousError,
    NoMatchingPermutationError,
    NotADiagonalizerError,
    NotCommutingError,
    NotDiagonalizableError,
    RefinementFailureError,
)
from .matcore import (
    Permutation,
    _star_eigensystem,
    as_matrix,
    canonical_sort_indices,
    cluster_values,
    commutes,
    eig_decompose,
    fro,
    require_square,
)
from .tolerances import TOL_CLUSTER, TOL_COMMUTE, TOL_RECON, TOL_ZERO

__all__ = [
    "CommutingFamily",
    "StarSequence",
    "CommutantDescription",
    "validate_family",
    "star_vector_of",
    "simultaneous_diagonalizer",
    "induced_vectors",
    "match_induced_sequences",
    "commutant",
    "induced_pair_without_diagonalizer",
]


@dataclass(frozen=True)
class CommutingFamily:
    """An ordered, validated family of pairwise-commuting diagonalizable
    matrices of a common size."""

    members: tuple[np.ndarray, ...]
    tol: float

    @property
    def size(self) -> int:
        return self.members[0].shape[0]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class StarSequence:
    """A joint diagonalizer together with its induced eigenvalue vectors and
    the nested block partition they generate.

    ``levels[j]`` lists the half-open index ranges of the partition after
    member j has been processed; ``levels[-1]`` holds the leaf blocks.
    """

    diagonalizer: np.ndarray
    vectors: tuple[np.ndarray, ...]
    levels: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def leaf_blocks(self) -> tuple[tuple[int, int], ...]:
        return self.levels[-1]


@dataclass(frozen=True)
class CommutantDescription:
    """Shape of the space of matrices commuting with a diagonalizable matrix:
    S (Y_1 ⊕ ... ⊕ Y_d) S^{-1} over square blocks matching the eigenvalue
    multiplicities, of total dimension sum(k_i^2)."""

    diagonalizer: np.ndarray
    block_sizes: tuple[int, ...]
    dimension: int


def validate_family(members, tol: float = TOL_COMMUTE, tol_recon: float = TOL_RECON) -> CommutingFamily:
    """Check that the members commute pairwise and are all diagonalizable."""
    mats = [require_square(as_matrix(m, f"member {i}"), f"member {i}") for i, m in enumerate(members)]
    if not mats:
        raise EmptyListError("family must contain at least one matrix")
    n = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != n:
            raise DimensionMismatchError(f"member {i} has size {m.shape[0]}, expected {n}")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not commutes(mats[i], mats[j], tol):
                resid = fro(mats[i] @ mats[j] - mats[j] @ mats[i])
                denom = max(1.0, fro(mats[i]) * fro(mats[j]))
                raise NotCommutingError(i, j, resid / denom)
    for i, m in enumerate(mats):
        if not eig_decompose(m, tol_recon).diagonalizable:
            raise NotDiagonalizableError(i)
    return CommutingFamily(tuple(mats), tol)


def star_vector_of(m, tol_cluster: float = TOL_CLUSTER, tol_recon: float = TOL_RECON) -> np.ndarray:
    """Eigenvalues of a diagonalizable matrix arranged as a star vector:
    equal values contiguous, blocks in canonical order."""
    a = require_square(as_matrix(m))
    star = _star_eigensystem(a, tol_cluster, tol_recon)
    if star is None:
        raise NotDiagonalizableError(0)
    values, _basis, _sizes = star
    return values


def simultaneous_diagonalizer(
    family: CommutingFamily,
    tol_cluster: float = TOL_CLUSTER,
    tol_recon: float = TOL_RECON,
) -> StarSequence:
    """Joint diagonalizer whose induced vectors form a star sequence."""
    n = family.size
    s = np.eye(n, dtype=complex)
    blocks: list[tuple[int, int]] = [(0, n)]
    vectors: list[np.ndarray] = []
    levels: list[tuple[tuple[int, int], ...]] = []
    for idx, m in enumerate(family.members):
        d = np.linalg.solve(s, m @ s)
        vec = np.empty(n, dtype=complex)
        refined: list[tuple[int, int]] = []
        for lo, hi in blocks:
            sub = _star_eigensystem(d[lo:hi, lo:hi], tol_cluster, tol_recon)
            if sub is None:
                raise RefinementFailureError(
                    f"member {idx} failed to diagonalize on block [{lo}, {hi})"
                )
            values, basis, sizes = sub
            s[:, lo:hi] = s[:, lo:hi] @ basis
            vec[lo:hi] = values
            off = lo
            for k in sizes:
                refined.append((off, off + k))
                off += k
        blocks = refined
        levels.append(tuple(blocks))
        vectors.append(vec)
    star = StarSequence(s, tuple(vectors), tuple(levels))
    for i, m in enumerate(family.members):
        d = np.linalg.solve(s, m @ s)
        off_mass = fro(d - np.diag(np.diag(d)))
        if off_mass > tol_recon * max(1.0, fro(m)):
            raise RefinementFailureError(
                f"joint diagonalizer leaves member {i} with off-diagonal mass {off_mass:.3e}"
            )
    return star


def induced_vectors(family: CommutingFamily, s) -> list[np.ndarray]:
    """Diagonals of S^{-1} M S for each member, after checking that S really
    diagonalizes every member at the family tolerance."""
    smat = require_square(as_matrix(s, "S"), "S")
    if smat.shape[0] != family.size:
        raise DimensionMismatchError("diagonalizer size does not match family")
    out = []
    for i, m in enumerate(family.members):
        d = np.linalg.solve(smat, m @ smat)
        off_mass = fro(d - np.diag(np.diag(d)))
        if off_mass > family.tol * max(1.0, fro(m)):
            raise NotADiagonalizerError(i, off_mass)
        out.append(np.diag(d).copy())
    return out


def match_induced_sequences(seq1, seq2, tol: float = TOL_CLUSTER) -> Permutation:
    """Find a permutation carrying the first induced sequence onto the second,
    i.e. seq2[j][i] = seq1[j][sigma(i+1)-1] for all j simultaneously.

    Positions are matched as multisets of eigenvalue tuples under the given
    tolerance; greedy nearest assignment suffices because genuine induced
    sequences only ever contain tuples that are either equal or well apart.
    """
    a = [np.asarray(v, dtype=complex) for v in seq1]
    b = [np.asarray(v, dtype=complex) for v in seq2]
    if len(a) != len(b):
        raise DimensionMismatchError("sequences have different lengths")
    if not a:
        raise EmptyListError("sequences must be non-empty")
    n = a[0].shape[0]
    for v in a + b:
        if v.shape != (n,):
            raise DimensionMismatchError("all vectors must share one length")
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in a + b))
    gap = tol * scale
    used = [False] * n
    image = [0] * n
    for i in range(n):
        best = -1
        best_dist = np.inf
        for p in range(n):
            if used[p]:
                continue
            dist = max(abs(a[j][p] - b[j][i]) for j in range(len(a)))
            if dist < best_dist:
                best, best_dist = p, dist
        if best < 0 or best_dist > gap:
            raise NoMatchingPermutationError(
                f"no source position matches target {i} (best distance {best_dist:.3e})"
            )
        used[best] = True
        image[i] = best + 1
    return Permutation(tuple(image))


def commutant(m, tol_cluster: float = TOL_CLUSTER, tol_recon: float = TOL_RECON) -> CommutantDescription:
    """Block description and dimension of the space of matrices commuting
    with a diagonalizable matrix."""
    a = require_square(as_matrix(m))
    star = _star_eigensystem(a, tol_cluster, tol_recon)
    if star is None:
        raise NotDiagonalizableError(0)
    _values, basis, sizes = star
    return CommutantDescription(basis, tuple(sizes), int(sum(k * k for k in sizes)))


def _multiset_pick(candidates, pool, pool_used, gap):
    """Greedily match each candidate to an unused pool value within ``gap``;
    returns the list of matched pool indices (candidates that match nothing
    are skipped)."""
    matched = []
    for c in candidates:
        best = -1
        best_dist = np.inf
        for p, value in enumerate(pool):
            if pool_used[p]:
                continue
            dist = abs(value - c)
            if dist < best_dist:
                best, best_dist = p, dist
        if best >= 0 and best_dist <= gap:
            pool_used[best] = True
            matched.append(best)
    return matched


def induced_pair_without_diagonalizer(
    a,
    b,
    tol: float = TOL_COMMUTE,
    tol_cluster: float = TOL_CLUSTER,
    tol_zero: float = TOL_ZERO,
):
    """Compatible eigenvalue ordering for two commuting diagonalizable
    matrices, computed from eigenvalues alone.

    The first vector is the star vector of ``a``.  For each of its nonzero
    eigenvalue blocks, the matching block of ``b``-eigenvalues is recovered as
    the multiset intersection of eig(B) with eig((AB + beta*A)/lambda - beta*I)
    for a shift ``beta`` chosen outside the set of collision values; a zero
    eigenvalue block receives whatever remains.  Returns ``(avec, bvec,
    collision_set, beta)``; the assembled pair is cross-checked against a
    joint diagonalizer run before being returned.
    """
    amat = require_square(as_matrix(a, "A"), "A")
    bmat = require_square(as_matrix(b, "B"), "B")
    family = validate_family([amat, bmat], tol)
    n = family.size
    avec = star_vector_of(amat, tol_cluster)
    scale_a = max(1.0, fro(amat))
    scale_b = max(1.0, fro(bmat))

    # distinct eigenvalues of A with multiplicities, in star-vector order
    reps: list[complex] = []
    sizes: list[int] = []
    for value in avec:
        if reps and abs(value - reps[-1]) <= tol_cluster * scale_a:
            sizes[-1] += 1
        else:
            reps.append(complex(value))
            sizes.append(1)

    b_eigs = np.linalg.eigvals(bmat)

    collisions: list[complex] = []
    for r, lam_r in enumerate(reps):
        for s_, lam_s in enumerate(reps):
            if r == s_:
                continue
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    collisions.append(
                        (lam_s * b_eigs[i] - lam_r * b_eigs[j]) / (lam_r - lam_s)
                    )
    collision_set: list[complex] = []
    if collisions:
        arr = np.array(collisions)
        for group in cluster_values(arr, tol_cluster * scale_b):
            collision_set.append(complex(arr[group].mean()))
    beta = 1.0 + max((abs(z) for z in collision_set), default=0.0)

    gap = tol_cluster * scale_b
    pool = list(b_eigs)
    pool_used = [False] * n
    blocks: dict[int, list[complex]] = {}
    zero_block = None
    for q, lam_q in enumerate(reps):
        if abs(lam_q) <= tol_zero * scale_a:
            if zero_block is not None:
                raise IntersectionAmbiguousError("multiple zero eigenvalue blocks")
            zero_block = q
            continue
        shifted = (amat @ bmat + beta * amat) / lam_q - beta * np.eye(n)
        t_eigs = np.linalg.eigvals(shifted)
        matched = _multiset_pick(t_eigs, pool, pool_used, gap)
        if len(matched) != sizes[q]:
            raise IntersectionAmbiguousError(
                f"block {q} matched {len(matched)} eigenvalues, expected {sizes[q]}"
            )
        blocks[q] = [complex(pool[p]) for p in matched]
    remaining = [complex(pool[p]) for p in range(n) if not pool_used[p]]
    if zero_block is not None:
        if len(remaining) != sizes[zero_block]:
            raise IntersectionAmbiguousError(
                f"zero block needs {sizes[zero_block]} eigenvalues, {len(remaining)} remain"
            )
        blocks[zero_block] = remaining
    elif remaining:
        raise IntersectionAmbiguousError(f"{len(remaining)} eigenvalues left unassigned")

    bvec = np.empty(n, dtype=complex)
    off = 0
    for q in range(len(reps)):
        vals = np.array(blocks[q])
        order = canonical_sort_indices(vals, gap)
        bvec[off:off + sizes[q]] = vals[order]
        off += sizes[q]

    star = simultaneous_diagonalizer(family, tol_cluster)
    try:
        match_induced_sequences([star.vectors[0], star.vectors[1]], [avec, bvec], tol_cluster)
    except NoMatchingPermutationError as exc:
        raise IntersectionAmbiguousError(
            f"assembled pair failed cross-validation: {exc}"
        ) from exc
    return avec, bvec, collision_set, beta
