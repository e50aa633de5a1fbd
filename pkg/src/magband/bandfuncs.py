"""Band-function values, tau-derivatives, and tau-scans.

A band function maps the Fourier parameter tau to the n-th eigenvalue of
one operator family.  Every value is computed on two nested meshes (h and
h/2) and Richardson-extrapolated, which both cancels the leading O(h^2)
discretization error and yields a certified error estimate from the
observed two-mesh difference.

Three independent derivative routes are provided for cross-validation:

* ``fh_derivative``: the Feynman-Hellmann expectation
  -2 * integral (r - tau) |z|^2 r dr against the normalized eigenfunction,
* ``trace_derivative``: the half-line Neumann-oscillator energy excess
  of the same eigenfunction, evaluated in the unweighted inner product
  (a formula specific to the axisymmetric m = 0 family),
* ``fd_derivative``: a plain central difference of the band value on a
  tau-independent mesh, used as the numerical oracle.

Eigenvector-dependent quantities are evaluated on the fine mesh only;
their tolerance budget in the analysis layer is set accordingly.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import operators
from .eigensolve import (
    DEFAULT_TOL,
    EigenPair,
    eigenvector,
    lowest_eigenvalues,
    reduce_to_standard,
    weighted_normalize,
)
from .operators import Family, Mesh, MeshOptions, OperatorSpec, Pencil

__all__ = [
    "MAX_LEVEL",
    "SolveOptions",
    "BandPoint",
    "ScanResult",
    "ScanError",
    "band_value",
    "eigenpair",
    "fh_derivative",
    "trace_derivative",
    "dh_derivative_neumann",
    "fd_derivative",
    "central_difference",
    "scan",
]

MAX_LEVEL = 6


class ScanError(RuntimeError):
    """A scan aborted; carries the offending grid point."""

    def __init__(self, tau: float, cause: Exception):
        super().__init__(f"scan failed at tau={tau!r}: {cause}")
        self.tau = tau
        self.cause = cause


@dataclass(frozen=True)
class SolveOptions:
    """Resolution and tolerance knobs shared by the band-level operations.

    ``n_cells`` is the coarse-mesh cell count; the Richardson partner mesh
    always uses twice as many cells on the same domain.
    """

    n_cells: int = operators.DEFAULT_N_CELLS
    pad: float = operators.DEFAULT_PAD
    tol: float = DEFAULT_TOL
    left: float | None = None
    right: float | None = None

    def mesh_options(self, refine: int = 1) -> MeshOptions:
        return MeshOptions(
            n_cells=self.n_cells * refine,
            pad=self.pad,
            left=self.left,
            right=self.right,
        )


DEFAULT_OPTIONS = SolveOptions()


@dataclass(frozen=True)
class BandPoint:
    """One Richardson-extrapolated band sample.

    ``value`` is (4 lam_{h/2} - lam_h)/3 and ``error_estimate`` the
    two-mesh difference |lam_{h/2} - lam_h|/3, an estimate of the O(h^2)
    error that extrapolation removed.  ``mesh_h`` is the fine spacing.
    """

    tau: float
    level: int
    value: float
    error_estimate: float
    mesh_h: float


@dataclass(frozen=True)
class ScanResult:
    """Band values on a tau grid, one row per requested level."""

    family: Family
    m: int
    levels: tuple[int, ...]
    tau_grid: np.ndarray
    values: np.ndarray        # shape (len(levels), len(tau_grid))
    errors: np.ndarray        # same shape, Richardson error estimates
    derivatives: np.ndarray | None = None

    def __post_init__(self) -> None:
        if np.any(np.diff(self.tau_grid) <= 0.0):
            raise ValueError("tau grid must be strictly increasing")
        want = (len(self.levels), len(self.tau_grid))
        if self.values.shape != want or self.errors.shape != want:
            raise ValueError("values/errors shape inconsistent with levels x grid")

    def level_values(self, n: int) -> np.ndarray:
        return self.values[self.levels.index(n)]


def _check_level(n: int) -> None:
    if not 1 <= n <= MAX_LEVEL:
        raise ValueError(f"level n={n} outside the supported range 1..{MAX_LEVEL}")


def _lowest_on_mesh(spec: OperatorSpec, mesh: Mesh, k: int, tol: float) -> np.ndarray:
    pencil = operators.assemble(spec, mesh)
    return lowest_eigenvalues(reduce_to_standard(pencil), k, tol)


def _two_mesh_values(
    spec: OperatorSpec, k: int, opts: SolveOptions, mesh: Mesh | None = None
) -> tuple[np.ndarray, np.ndarray, float]:
    """(coarse, fine) lowest-k eigenvalues plus the fine spacing."""
    coarse = mesh if mesh is not None else operators.build_mesh(spec, opts.mesh_options())
    fine = coarse.refined(2)
    lam_c = _lowest_on_mesh(spec, coarse, k, opts.tol)
    lam_f = _lowest_on_mesh(spec, fine, k, opts.tol)
    return lam_c, lam_f, fine.h


def band_value(spec: OperatorSpec, n: int, opts: SolveOptions | None = None) -> BandPoint:
    """Richardson-extrapolated n-th band value at spec.tau."""
    _check_level(n)
    opts = opts or DEFAULT_OPTIONS
    lam_c, lam_f, fine_h = _two_mesh_values(spec, n, opts)
    value = (4.0 * lam_f[n - 1] - lam_c[n - 1]) / 3.0
    err = abs(lam_f[n - 1] - lam_c[n - 1]) / 3.0
    return BandPoint(tau=spec.tau, level=n, value=float(value), error_estimate=float(err), mesh_h=fine_h)


def _fine_eigensystem(
    spec: OperatorSpec, n: int, opts: SolveOptions, mesh: Mesh | None = None
) -> tuple[Pencil, float, np.ndarray]:
    """Fine-mesh pencil, eigenvalue, and weighted-normalized eigenvector."""
    _check_level(n)
    base = mesh if mesh is not None else operators.build_mesh(spec, opts.mesh_options())
    fine = base.refined(2)
    pencil = operators.assemble(spec, fine)
    tri = reduce_to_standard(pencil)
    lam = float(lowest_eigenvalues(tri, n, opts.tol)[n - 1])
    y = eigenvector(tri, lam, opts.tol)
    z = weighted_normalize(y / np.sqrt(pencil.masses), pencil.masses)
    if z[int(np.argmax(np.abs(z)))] < 0.0:
        z = -z
    return pencil, lam, z


def eigenpair(spec: OperatorSpec, n: int, opts: SolveOptions | None = None) -> EigenPair:
    """Fine-mesh eigenpair, unit norm in the family's weighted product."""
    opts = opts or DEFAULT_OPTIONS
    pencil, lam, z = _fine_eigensystem(spec, n, opts)
    norm = float(np.sqrt(np.sum(pencil.masses * z * z)))
    return EigenPair(value=lam, vector=z, norm_weighted=norm)


def fh_derivative(spec: OperatorSpec, n: int, opts: SolveOptions | None = None) -> float:
    """Band derivative from the eigenfunction moment.

    Evaluates -2 * integral (r - tau) |z|^2 r dr with the mass vector as
    quadrature, z the fine-mesh normalized eigenfunction.  Specific to
    the axisymmetric family, any m.
    """
    if spec.family is not Family.AXISYM:
        raise ValueError("fh_derivative applies to the axisym family")
    opts = opts or DEFAULT_OPTIONS
    pencil, _, z = _fine_eigensystem(spec, n, opts)
    moment = float(np.sum(pencil.masses * (pencil.nodes - spec.tau) * z * z))
    return -2.0 * moment


def trace_derivative(spec: OperatorSpec, n: int, opts: SolveOptions | None = None) -> float:
    """Band derivative as a Neumann-oscillator energy excess.

    For the axisymmetric m = 0 family the derivative equals the quadratic
    form of the half-line operator -d^2/dx^2 + (x - tau)^2 minus the band
    value, taken on the weighted-normalized eigenfunction but in the
    UNWEIGHTED half-line inner product:

        integral ( |z'|^2 + ((r - tau)^2 - lam) |z|^2 ) dr.

    Discretely the form representation is used: first differences for z'
    on cells and trapezoid weights for the potential term.
    """
    if spec.family is not Family.AXISYM or spec.m != 0:
        raise ValueError("trace_derivative applies to the axisym family with m = 0")
    opts = opts or DEFAULT_OPTIONS
    pencil, lam, z = _fine_eigensystem(spec, n, opts)
    h = pencil.mesh.h
    zext = np.append(z, 0.0)                   # Dirichlet value at the truncation wall
    kinetic = float(np.sum(np.diff(zext) ** 2)) / h
    w = np.full(len(z), h)
    w[0] = 0.5 * h
    potential_excess = float(np.sum(w * ((pencil.nodes - spec.tau) ** 2 - lam) * z * z))
    return kinetic + potential_excess


def dh_derivative_neumann(tau: float, n: int = 1, opts: SolveOptions | None = None) -> float:
    """Derivative of the n-th Neumann half-line band via its trace formula.

    (mu_n)'(tau) = (tau^2 - mu_n(tau)) * u(0)^2 with u the unit-norm
    (unweighted) eigenfunction; u(0) is the retained boundary-node value.
    """
    opts = opts or DEFAULT_OPTIONS
    spec = operators.degennes_neumann(tau)
    pencil, lam, u = _fine_eigensystem(spec, n, opts)
    return (tau * tau - lam) * float(u[0]) ** 2


def central_difference(f, x: float, delta: float) -> float:
    """(f(x+delta) - f(x-delta)) / (2 delta); exact for quadratics."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    return (f(x + delta) - f(x - delta)) / (2.0 * delta)


def fd_derivative(
    spec: OperatorSpec, n: int, delta: float = 1e-4, opts: SolveOptions | None = None
) -> float:
    """Central-difference band derivative on matched meshes.

    Both lateral values are computed on the mesh built for the central
    tau, so the difference sees a smooth function of tau only.
    """
    _check_level(n)
    opts = opts or DEFAULT_OPTIONS
    mesh = operators.build_mesh(spec, opts.mesh_options())

    def value_at(tau: float) -> float:
        shifted = dataclasses.replace(spec, tau=tau)
        lam_c, lam_f, _ = _two_mesh_values(shifted, n, opts, mesh=mesh)
        return float((4.0 * lam_f[n - 1] - lam_c[n - 1]) / 3.0)

    return central_difference(value_at, spec.tau, delta)


def _spec_for(family: Family, m: int, tau: float) -> OperatorSpec:
    if family is not Family.AXISYM and m != 0:
        raise ValueError(f"m={m} is only valid for the axisym family")
    return OperatorSpec(family, float(tau), m)


def _derivative_for(family: Family, m: int, tau: float, n: int, opts: SolveOptions) -> float:
    if family is Family.AXISYM:
        return fh_derivative(_spec_for(family, m, tau), n, opts)
    if family is Family.DEGENNES_NEUMANN:
        return dh_derivative_neumann(tau, n, opts)
    raise ValueError(f"derivatives not supported for family {family.value}")


def _scan_point(payload) -> tuple[list[float], list[float], list[float] | None]:
    family, m, tau, levels, with_derivatives, opts = payload
    try:
        spec = _spec_for(family, m, tau)
        k = max(levels)
        lam_c, lam_f, _ = _two_mesh_values(spec, k, opts)
        values = [float((4.0 * lam_f[n - 1] - lam_c[n - 1]) / 3.0) for n in levels]
        errors = [float(abs(lam_f[n - 1] - lam_c[n - 1]) / 3.0) for n in levels]
        derivs = None
        if with_derivatives:
            derivs = [_derivative_for(family, m, tau, n, opts) for n in levels]
    except ScanError:
        raise
    except Exception as exc:
        raise ScanError(tau, exc) from exc
    return values, errors, derivs


def scan(
    family: Family,
    m: int,
    levels,
    tau_grid,
    with_derivatives: bool = False,
    opts: SolveOptions | None = None,
    jobs: int = 1,
) -> ScanResult:
    """Evaluate band values (optionally derivatives) over a tau grid.

    Grid points are independent, so with jobs > 1 they are distributed to
    a process pool; results are assembled in grid order either way and
    are bit-identical to a serial run.
    """
    opts = opts or DEFAULT_OPTIONS
    levels = tuple(int(n) for n in levels)
    if not levels:
        raise ValueError("at least one level required")
    for n in levels:
        _check_level(n)
    if with_derivatives and family not in (Family.AXISYM, Family.DEGENNES_NEUMANN):
        raise ValueError(f"derivatives not supported for family {family.value}")
    if family is not Family.AXISYM and m != 0:
        raise ValueError(f"m={m} is only valid for the axisym family")
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or len(tau_grid) == 0:
        raise ValueError("tau grid must be a non-empty 1D array")
    if np.any(np.diff(tau_grid) <= 0.0):
        raise ValueError("tau grid must be strictly increasing")

    payloads = [(family, m, float(tau), levels, with_derivatives, opts) for tau in tau_grid]
    if jobs == 1:
        results = [_scan_point(p) for p in payloads]
    else:
        max_workers = None if jobs is None or jobs <= 0 else jobs
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_scan_point, payloads, chunksize=8))

    values = np.array([r[0] for r in results]).T
    errors = np.array([r[1] for r in results]).T
    derivatives = None
    if with_derivatives:
        derivatives = np.array([r[2] for r in results]).T
    return ScanResult(
        family=family,
        m=m,
        levels=levels,
        tau_grid=tau_grid,
        values=values,
        errors=errors,
        derivatives=derivatives,
    )
