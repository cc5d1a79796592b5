"""Symmetric-function algebra for principal curvature vectors.

Everything here operates on a vector of m >= 2 principal curvatures,
treated as unordered data: elementary symmetric functions sigma_k,
normalized mean curvatures H_k = sigma_k / C(m, k), restricted curvatures
H_{k;j} (entry j removed), Newton transformation spectra, and the
Newton-Maclaurin inequality gaps used throughout the verification suite.

sigma_k is evaluated with the stable one-entry-at-a-time recurrence; a
brute-force subset-sum oracle (`sigma_subset_sum`) is provided for tests
and stays independent of the recurrence it checks.

All functions are pure; batched variants (suffix ``_table``) operate on
arrays of shape (N, m) and are what the quadrature and sweep code uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .errors import DomainError, SamplingError

__all__ = [
    "NewtonSpectrum",
    "as_curvature_vector",
    "sigma",
    "sigma_subset_sum",
    "sigma_table",
    "normalized_h",
    "h_table",
    "restricted_h",
    "restricted_h_table",
    "newton_spectrum",
    "newton_eigen_table",
    "newton_matrix_oracle",
    "maclaurin_ratio_gap",
    "restricted_maclaurin_gap",
    "in_garding_cone",
    "garding_sample",
]


def as_curvature_vector(values) -> np.ndarray:
    """Validate and return a 1-D float array of m >= 2 finite curvatures."""
    lam = np.asarray(values, dtype=float)
    if lam.ndim != 1:
        raise DomainError(f"curvature vector must be 1-D, got shape {lam.shape}")
    if lam.size < 2:
        raise DomainError(f"curvature vector needs m >= 2 entries, got {lam.size}")
    if not np.all(np.isfinite(lam)):
        raise DomainError("curvature vector has non-finite entries")
    return lam


def _as_batch(values) -> np.ndarray:
    # Internal tables also run on restricted vectors, so m = 1 is allowed here;
    # the strict m >= 2 check lives in as_curvature_vector.
    lam = np.asarray(values, dtype=float)
    if lam.ndim == 1:
        lam = lam[None, :]
    if lam.ndim != 2 or lam.shape[1] < 1:
        raise DomainError(f"expected (N, m) array of curvatures, got shape {lam.shape}")
    return lam


def sigma_table(values) -> np.ndarray:
    """All elementary symmetric functions of each row.

    Parameters
    ----------
    values : (N, m) or (m,) array_like

    Returns
    -------
    (N, m+1) ndarray with column k holding sigma_k; column 0 is 1.

    Notes
    -----
    Uses the incremental recurrence: entries are absorbed one at a time,
    updating sigma_0..sigma_k simultaneously. This avoids subset
    enumeration and is numerically stable for mixed-sign inputs.
    """
    lam = _as_batch(values)
    n, m = lam.shape
    out = np.zeros((n, m + 1))
    out[:, 0] = 1.0
    for i in range(m):
        li = lam[:, i : i + 1]
        # RHS is materialized before the in-place add, so this is the
        # simultaneous (descending-k) update.
        out[:, 1 : i + 2] += li * out[:, 0 : i + 1]
    return out


def sigma(k: int, values) -> float:
    """k-th elementary symmetric function sigma_k of the curvature vector.

    sigma_0 = 1 by convention. Raises DomainError unless 0 <= k <= m.
    """
    lam = as_curvature_vector(values)
    m = lam.size
    if not 0 <= k <= m:
        raise DomainError(f"order k={k} outside [0, {m}]")
    return float(sigma_table(lam)[0, k])


def sigma_subset_sum(k: int, values) -> float:
    """Brute-force sigma_k as an explicit sum over all k-subsets.

    Exponential cost; test oracle only. Guarded to m <= 16.
    """
    lam = as_curvature_vector(values)
    m = lam.size
    if not 0 <= k <= m:
        raise DomainError(f"order k={k} outside [0, {m}]")
    if m > 16:
        raise DomainError("subset-sum oracle restricted to m <= 16")
    return float(sum(math.prod(c) for c in combinations(lam.tolist(), k)))


def h_table(values) -> np.ndarray:
    """Normalized mean curvatures H_0..H_m of each row: H_k = sigma_k / C(m, k)."""
    lam = _as_batch(values)
    m = lam.shape[1]
    binom = np.array([math.comb(m, k) for k in range(m + 1)], dtype=float)
    return sigma_table(lam) / binom


def normalized_h(k: int, values) -> float:
    """Normalized k-th mean curvature H_k = sigma_k / C(m, k); H_0 = 1."""
    lam = as_curvature_vector(values)
    m = lam.size
    if not 0 <= k <= m:
        raise DomainError(f"order k={k} outside [0, {m}]")
    return float(h_table(lam)[0, k])


def _drop_column(lam: np.ndarray, j: int) -> np.ndarray:
    return np.concatenate([lam[:, :j], lam[:, j + 1 :]], axis=1)


def restricted_h(k: int, j: int, values) -> float:
    """H_k of the vector with entry j removed (normalization C(m-1, k)).

    Indices are 0-based: j selects which curvature to omit.
    """
    lam = as_curvature_vector(values)
    m = lam.size
    if not 0 <= j < m:
        raise DomainError(f"omitted index j={j} outside [0, {m - 1}]")
    if not 0 <= k <= m - 1:
        raise DomainError(f"order k={k} outside [0, {m - 1}]")
    return float(h_table(_drop_column(lam[None, :], j))[0, k])


def restricted_h_table(values) -> np.ndarray:
    """All restricted curvatures of each row.

    Returns
    -------
    (N, m, m) ndarray R with R[s, j, k] = H_k of row s with entry j removed,
    for orders k = 0..m-1.
    """
    lam = _as_batch(values)
    n, m = lam.shape
    out = np.empty((n, m, m))
    for j in range(m):
        out[:, j, :] = h_table(_drop_column(lam, j))
    return out


@dataclass(frozen=True)
class NewtonSpectrum:
    """Eigenvalues of the k-th Newton transformation in the principal frame.

    eigenvalues[j] = sigma_k of the curvature vector with entry j removed;
    for k = 0 this is the identity map (all ones). The trace satisfies
    sum_j eigenvalues[j] = (m - k) * sigma_k.
    """

    k: int
    eigenvalues: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))


def newton_eigen_table(k: int, values) -> np.ndarray:
    """Newton-transformation eigenvalues of each row: (N, m) array.

    Column j holds sigma_k of the row with entry j removed.
    """
    lam = _as_batch(values)
    n, m = lam.shape
    if not 0 <= k <= m - 1:
        raise DomainError(f"order k={k} outside [0, {m - 1}]")
    out = np.empty((n, m))
    for j in range(m):
        out[:, j] = sigma_table(_drop_column(lam, j))[:, k]
    return out


def newton_spectrum(k: int, values) -> NewtonSpectrum:
    """Spectrum of the k-th Newton transformation at one point."""
    lam = as_curvature_vector(values)
    return NewtonSpectrum(k=k, eigenvalues=newton_eigen_table(k, lam)[0])


def _generalized_delta_sign(upper: tuple, lower: tuple) -> int:
    # Both tuples are distinct and equal as sets; sign of the permutation
    # carrying upper onto lower.
    pos = {v: a for a, v in enumerate(upper)}
    perm = [pos[v] for v in lower]
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        a = start
        while not seen[a]:
            seen[a] = True
            a = perm[a]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def newton_matrix_oracle(k: int, matrix) -> np.ndarray:
    """Newton transformation of a shape-operator matrix, by literal summation.

    Evaluates (T_k)_j^i = (1/k!) * sum over index tuples of the generalized
    Kronecker delta times products of matrix entries. Exponential cost;
    test oracle only (m <= 6). For a diagonal matrix with entries lam it
    must equal diag(newton_eigen_table(k, lam)).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    m = a.shape[0]
    if m > 6:
        raise DomainError("delta-formula oracle restricted to m <= 6")
    if not 1 <= k <= m - 1:
        raise DomainError(f"order k={k} outside [1, {m - 1}]")
    others = [[x for x in range(m) if x != i] for i in range(m)]
    t = np.zeros((m, m))
    for i in range(m):
        for ivec in permutations(others[i], k):
            upper = (i,) + ivec
            support = set(upper)
            for j in support:
                rest = [x for x in upper if x != j]
                for jvec in permutations(rest, k):
                    lower = (j,) + jvec
                    sign = _generalized_delta_sign(upper, lower)
                    prod = 1.0
                    for a_idx, j_idx in zip(ivec, jvec):
                        prod *= a[a_idx, j_idx]
                    t[i, j] += sign * prod
    return t / math.factorial(k)


def maclaurin_ratio_gap(i: int, j: int, values) -> float:
    """Newton-Maclaurin ratio gap H_{j-1}/H_j - H_{i-1}/H_i.

    Nonnegative whenever 1 <= i < j <= p and the vector is p-convex;
    zero iff all entries are equal.
    """
    lam = as_curvature_vector(values)
    m = lam.size
    if not 1 <= i < j <= m:
        raise DomainError(f"need 1 <= i < j <= m, got i={i}, j={j}, m={m}")
    h = h_table(lam)[0]
    if h[i] == 0.0 or h[j] == 0.0:
        raise DomainError(
            f"H_{i} or H_{j} vanishes; the ratio gap requires convexity up to order {j}"
        )
    return float(h[j - 1] / h[j] - h[i - 1] / h[i])


def restricted_maclaurin_gap(i: int, j: int, l: int, values) -> float:
    """Restricted-curvature gap j * H_i * H_{j-1;l} - i * H_j * H_{i-1;l}.

    Strictly positive for 1 <= i < j <= p on p-convex vectors, for every
    omitted index l (0-based).
    """
    lam = as_curvature_vector(values)
    m = lam.size
    if not 1 <= i < j <= m:
        raise DomainError(f"need 1 <= i < j <= m, got i={i}, j={j}, m={m}")
    if not 0 <= l < m:
        raise DomainError(f"omitted index l={l} outside [0, {m - 1}]")
    h = h_table(lam)[0]
    r = restricted_h_table(lam)[0, l]
    return float(j * h[i] * r[j - 1] - i * h[j] * r[i - 1])


def in_garding_cone(values, p: int) -> bool:
    """True if H_1, ..., H_p are all strictly positive."""
    lam = as_curvature_vector(values)
    if not 1 <= p <= lam.size:
        raise DomainError(f"convexity order p={p} outside [1, {lam.size}]")
    h = h_table(lam)[0]
    return bool(np.all(h[1 : p + 1] > 0.0))


def garding_sample(m: int, p: int, rng, size: int | None = None,
                   negative_prob: float = 0.3, max_batches: int = 200):
    """Draw curvature vectors with H_1, ..., H_p > 0, by rejection.

    Base draws are positive (uniform on [0.1, 2] per entry); with
    probability `negative_prob` one entry is replaced by a negative value,
    and the draw is rejected unless every H_q for q <= p stays positive.
    Deterministic for a seeded generator.

    Parameters
    ----------
    m : number of principal curvatures (>= 2)
    p : convexity order, 1 <= p <= m
    rng : int seed or numpy Generator
    size : None for a single (m,) vector, else number of rows

    Raises
    ------
    SamplingError if the rejection budget is exhausted.
    """
    if m < 2:
        raise DomainError(f"need m >= 2, got {m}")
    if not 1 <= p <= m:
        raise DomainError(f"convexity order p={p} outside [1, {m}]")
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    want = 1 if size is None else int(size)
    accepted = []
    total = 0
    for _ in range(max_batches):
        batch = max(64, 2 * (want - total))
        lam = gen.uniform(0.1, 2.0, size=(batch, m))
        flip = gen.random(batch) < negative_prob
        cols = gen.integers(0, m, size=batch)
        neg = -gen.uniform(0.0, 0.6, size=batch)
        lam[flip, cols[flip]] = neg[flip]
        h = h_table(lam)
        ok = np.all(h[:, 1 : p + 1] > 0.0, axis=1)
        if np.any(ok):
            accepted.append(lam[ok])
            total += int(np.count_nonzero(ok))
        if total >= want:
            out = np.concatenate(accepted, axis=0)[:want]
            return out[0] if size is None else out
    raise SamplingError(
        f"garding_sample(m={m}, p={p}) exhausted {max_batches} batches"
    )
