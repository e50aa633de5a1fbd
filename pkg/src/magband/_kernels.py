"""Jitted kernels for the tridiagonal eigensolver hot paths.

The Sturm pivot recurrence and the pivoted tridiagonal LU are inherently
sequential, so they are compiled with numba instead of being expressed as
numpy array operations.  ``sturm_counts`` processes a batch of shifts in
one sweep; the independent pivot chains interleave well in the CPU
pipeline, which makes batched bisection on several eigenvalue targets
nearly as cheap as a single-shift pass.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def sturm_counts(diag, off2, shifts, pivmin):
    """Eigenvalue counts strictly below each shift.

    Runs the shifted LDL^T pivot recurrence d_i = (a_i - s) - b_{i-1}^2/d_{i-1}
    and counts negative pivots.  Pivots smaller than ``pivmin`` in magnitude
    are replaced by a signed floor (exact zeros count as negative), which
    keeps the recurrence finite at exact eigenvalues.
    """
    n = diag.shape[0]
    m = shifts.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    d = np.empty(m, dtype=np.float64)
    for j in range(m):
        x = diag[0] - shifts[j]
        if -pivmin < x < pivmin:
            x = pivmin if x > 0.0 else -pivmin
        if x < 0.0:
            counts[j] += 1
        d[j] = x
    for i in range(1, n):
        a = diag[i]
        b2 = off2[i - 1]
        for j in range(m):
            x = a - shifts[j] - b2 / d[j]
            if -pivmin < x < pivmin:
                x = pivmin if x > 0.0 else -pivmin
            if x < 0.0:
                counts[j] += 1
            d[j] = x
    return counts


@njit(cache=True)
def tridiag_lu(diag, off, shift, pivmin):
    """LU factorization with partial pivoting of (T - shift I).

    T is symmetric tridiagonal with main diagonal ``diag`` and off
    diagonal ``off``.  Returns (dl, d, du, du2, piv) in the usual
    banded-LU layout: unit lower multipliers, main diagonal, first and
    second superdiagonals, and the row-swap flags.  Zero pivots are
    floored at ``pivmin`` so the factorization is always usable inside
    inverse iteration.
    """
    n = diag.shape[0]
    d = diag - shift
    dl = off.copy()
    du = off.copy()
    du2 = np.zeros(max(n - 2, 0), dtype=np.float64)
    piv = np.zeros(n, dtype=np.bool_)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if -pivmin < d[i] < pivmin:
                d[i] = pivmin if d[i] >= 0.0 else -pivmin
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] = d[i + 1] - fact * du[i]
        else:
            piv[i] = True
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            tmp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = tmp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if -pivmin < d[n - 1] < pivmin:
        d[n - 1] = pivmin if d[n - 1] >= 0.0 else -pivmin
    return dl, d, du, du2, piv


@njit(cache=True)
def tridiag_lu_solve(dl, d, du, du2, piv, b):
    """Solve (T - shift I) x = b from a :func:`tridiag_lu` factorization."""
    n = d.shape[0]
    x = b.copy()
    for i in range(n - 1):
        if piv[i]:
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp - dl[i] * x[i]
        else:
            x[i + 1] = x[i + 1] - dl[i] * x[i]
    x[n - 1] = x[n - 1] / d[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x
