"""Certified lowest eigenvalues of symmetric tridiagonal pencils.

The pencil (K, M) with diagonal mass M is reduced to an ordinary
symmetric tridiagonal matrix T = M^{-1/2} K M^{-1/2}.  Eigenvalue counts
below any shift come from the Sturm pivot recurrence, the k lowest
eigenvalues are then bracketed by bisection on those counts, and
eigenvectors are recovered by inverse iteration from a fixed-seed start
vector.  Everything is deterministic: identical inputs produce bitwise
identical outputs, which is what lets downstream scans and reports be
byte-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import sturm_counts, tridiag_lu, tridiag_lu_solve

__all__ = [
    "SymTridiag",
    "EigenPair",
    "EigensolveError",
    "ConvergenceError",
    "ClusterError",
    "reduce_to_standard",
    "sturm_count",
    "lowest_eigenvalues",
    "eigenvector",
    "weighted_normalize",
]

DEFAULT_TOL = 1e-12
INVERSE_ITERATION_SEED = 0x5EED
MAX_INVERSE_ITERATIONS = 50
_MAX_BISECT = 210  # enough to shrink any double-precision bracket


class EigensolveError(RuntimeError):
    """Base class for solver failures."""


class ConvergenceError(EigensolveError):
    """Inverse iteration failed to settle within the iteration cap."""


class ClusterError(EigensolveError):
    """The requested shift sits inside an eigenvalue cluster."""


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix (main diagonal + one off diagonal)."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must be one entry shorter than diag")

    @property
    def dim(self) -> int:
        return len(self.diag)


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue with its mesh-sampled eigenfunction.

    ``vector`` lives on the retained nodes of the originating pencil and
    has unit norm in the mass-weighted inner product; ``norm_weighted``
    records that norm (1 up to roundoff).
    """

    value: float
    vector: np.ndarray
    norm_weighted: float


def _pivmin(offdiag: np.ndarray) -> float:
    tiny = np.finfo(np.float64).tiny
    if len(offdiag) == 0:
        return tiny
    return max(tiny, tiny * float(np.max(offdiag * offdiag)))


def reduce_to_standard(pencil) -> SymTridiag:
    """Fold the diagonal mass into the stiffness.

    Returns T with T_ii = K_ii / m_i and T_{i,i+1} = K_{i,i+1} / sqrt(m_i m_{i+1});
    T is similar to M^{-1} K, so its spectrum equals the pencil's.
    """
    masses = np.asarray(pencil.masses, dtype=float)
    if np.any(masses <= 0.0) or not np.all(np.isfinite(masses)):
        raise ValueError("masses must be strictly positive and finite")
    diag = np.asarray(pencil.diag, dtype=float) / masses
    offdiag = np.asarray(pencil.offdiag, dtype=float) / np.sqrt(masses[:-1] * masses[1:])
    return SymTridiag(np.ascontiguousarray(diag), np.ascontiguousarray(offdiag))


def sturm_count(t: SymTridiag, lam: float) -> int:
    """Number of eigenvalues of t strictly below lam."""
    if math.isnan(lam):
        raise ValueError("NaN shift rejected")
    off2 = t.offdiag * t.offdiag
    counts = sturm_counts(t.diag, off2, np.array([float(lam)]), _pivmin(t.offdiag))
    return int(counts[0])


def _gershgorin(t: SymTridiag) -> tuple[float, float]:
    radius = np.zeros(t.dim)
    absoff = np.abs(t.offdiag)
    radius[: t.dim - 1] += absoff
    radius[1:] += absoff
    return float(np.min(t.diag - radius)), float(np.max(t.diag + radius))


def lowest_eigenvalues(t: SymTridiag, k: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The k smallest eigenvalues, ascending, certified by Sturm counts.

    Each returned value is the midpoint of a bisection bracket of width
    at most tol * max(1, |value|) whose Sturm counts pin the eigenvalue's
    index from both sides.
    """
    if not 1 <= k <= t.dim:
        raise ValueError(f"k={k} out of range for dimension {t.dim}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    off2 = t.offdiag * t.offdiag
    pivmin = _pivmin(t.offdiag)
    lo_all, hi_all = _gershgorin(t)
    lo = np.full(k, lo_all)
    hi = np.full(k, hi_all)
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        active = (hi - lo) > tol * np.maximum(1.0, np.abs(mid))
        if not np.any(active):
            break
        shifts = np.unique(mid[active])
        counts = sturm_counts(t.diag, off2, shifts, pivmin)
        for s, c in zip(shifts, counts):
            # c eigenvalues lie strictly below s: s is an upper bound for
            # targets 0..c-1 and a lower bound for the rest.
            cut = min(int(c), k)
            hi[:cut] = np.minimum(hi[:cut], s)
            lo[cut:] = np.maximum(lo[cut:], s)
    else:
        raise AssertionError("bisection failed to bracket; non-finite matrix?")
    return 0.5 * (lo + hi)


def _start_vector(n: int) -> np.ndarray:
    # Counter-based generator keyed by a fixed seed: entry i depends only
    # on (seed, i), so runs are bit-reproducible.
    gen = np.random.Generator(np.random.Philox(INVERSE_ITERATION_SEED))
    return gen.standard_normal(n)


def eigenvector(t: SymTridiag, lam: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unit eigenvector for an isolated eigenvalue near lam.

    Inverse iteration with the shift lam from the fixed-seed start
    vector; converged when successive normalized iterates agree to 1e-12.
    The sign is fixed so the entry of largest magnitude is positive.
    """
    if math.isnan(lam):
        raise ValueError("NaN shift rejected")
    n = t.dim
    off2 = t.offdiag * t.offdiag
    pivmin = _pivmin(t.offdiag)
    guard = 10.0 * tol * max(1.0, abs(lam))
    nearby = sturm_counts(
        t.diag, off2, np.array([lam - guard, lam + guard]), pivmin
    )
    if int(nearby[1] - nearby[0]) > 1:
        raise ClusterError(
            f"gap below 10*tol around shift {lam!r}: inverse iteration target ambiguous"
        )

    # Flooring LU pivots at eps * scale(T) bounds the solve by ~1/eps, so a
    # shift sitting on an eigenvalue cannot overflow the first iterate.
    scale = max(float(np.abs(t.diag).max(initial=0.0)), abs(lam), 1.0)
    if n > 1:
        scale = max(scale, float(np.abs(t.offdiag).max(initial=0.0)))
    lu_floor = np.finfo(np.float64).eps * scale
    dl, d, du, du2, piv = tridiag_lu(t.diag, t.offdiag, float(lam), lu_floor)
    x = _start_vector(n)
    x /= np.linalg.norm(x)
    for _ in range(MAX_INVERSE_ITERATIONS):
        y = tridiag_lu_solve(dl, d, du, du2, piv, x)
        y /= np.abs(y).max()          # guard against overflow at near-singular shifts
        y /= np.linalg.norm(y)
        if min(np.linalg.norm(y - x), np.linalg.norm(y + x)) < 1e-12:
            x = y
            break
        x = y
    else:
        raise ConvergenceError(
            f"inverse iteration did not converge in {MAX_INVERSE_ITERATIONS} iterations"
        )
    if x[int(np.argmax(np.abs(x)))] < 0.0:
        x = -x
    return x


def weighted_normalize(v: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Scale v to unit norm in the weighted inner product sum(w v^2)."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(weights, dtype=float)
    norm2 = float(np.sum(w * v * v))
    if norm2 <= 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / math.sqrt(norm2)
