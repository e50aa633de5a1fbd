"""Operator families and their tridiagonal finite-volume discretizations.

Four 1D eigenvalue families are supported, all parametrized by a real
Fourier parameter tau:

* the axisymmetric family ``-u'' - u'/r + ((r-tau)^2 + m^2/r^2) u`` on the
  weighted half-line L^2(R_+, r dr), with magnetic quantum number m (m = 0
  is the default branch),
* the de Gennes operator ``-u'' + (|x|-tau)^2 u`` on the whole line,
* its Neumann and Dirichlet restrictions ``-u'' + (x-tau)^2 u`` on the
  half-line.

Each family is discretized on a uniform grid by a finite-volume scheme:
cell masses encode the measure (r dr or dr), fluxes between neighboring
nodes carry the measure density at the cell interface, and the potential
is sampled at the nodes.  The result is a symmetric tridiagonal stiffness
matrix paired with a positive diagonal mass, second-order accurate in the
grid spacing.  The generalized eigenvalues are Rayleigh quotients of the
discretized quadratic form, so the min-max structure of the continuum
problem is preserved.

Boundary treatment: the half-line origin gets the natural (do-nothing)
condition for the axisymmetric m = 0 family and the Neumann family, which
encodes (r u')(0) = 0 resp. u'(0) = 0; the node at 0 is retained with its
exact cell mass.  Dirichlet conditions (at the origin for the Dirichlet
family and for m != 0, and at every artificial truncation boundary)
eliminate the node.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Family",
    "OperatorSpec",
    "MeshOptions",
    "Mesh",
    "Pencil",
    "axisym",
    "degennes_line",
    "degennes_neumann",
    "degennes_dirichlet",
    "potential",
    "build_mesh",
    "assemble",
]

DEFAULT_N_CELLS = 4800
DEFAULT_PAD = 12.0
MIN_N_CELLS = 16


class Family(enum.Enum):
    """Operator family selector; values double as CLI identifiers."""

    AXISYM = "axisym"
    DEGENNES_LINE = "degennes-line"
    DEGENNES_NEUMANN = "degennes-neumann"
    DEGENNES_DIRICHLET = "degennes-dirichlet"

    @property
    def half_line(self) -> bool:
        return self is not Family.DEGENNES_LINE


@dataclass(frozen=True)
class OperatorSpec:
    """One operator of a family at Fourier parameter tau.

    ``m`` is the magnetic quantum number and is meaningful only for the
    axisymmetric family (it must be 0 otherwise).
    """

    family: Family
    tau: float
    m: int = 0

    def __post_init__(self) -> None:
        if self.family is not Family.AXISYM and self.m != 0:
            raise ValueError(f"m={self.m} is only valid for the axisym family")
        if not np.isfinite(self.tau):
            raise ValueError("tau must be finite")

    @property
    def weighted(self) -> bool:
        """True when the natural measure is r dr rather than dr."""
        return self.family is Family.AXISYM


def axisym(tau: float, m: int = 0) -> OperatorSpec:
    return OperatorSpec(Family.AXISYM, float(tau), int(m))


def degennes_line(tau: float) -> OperatorSpec:
    return OperatorSpec(Family.DEGENNES_LINE, float(tau))


def degennes_neumann(tau: float) -> OperatorSpec:
    return OperatorSpec(Family.DEGENNES_NEUMANN, float(tau))


def degennes_dirichlet(tau: float) -> OperatorSpec:
    return OperatorSpec(Family.DEGENNES_DIRICHLET, float(tau))


def potential(spec: OperatorSpec, x):
    """Evaluate the family's potential at x (scalar or array).

    Axisym(m): (x-tau)^2 + m^2/x^2, de Gennes half-line: (x-tau)^2,
    whole line: (|x|-tau)^2.  For axisym with m != 0 the centrifugal term
    is singular at the axis, so x must be positive there.
    """
    x = np.asarray(x, dtype=float)
    tau = spec.tau
    if spec.family is Family.AXISYM:
        if spec.m != 0:
            if np.any(x <= 0.0):
                raise ValueError("axisym potential with m != 0 requires x > 0")
            v = (x - tau) ** 2 + (spec.m * spec.m) / (x * x)
        else:
            v = (x - tau) ** 2
    elif spec.family is Family.DEGENNES_LINE:
        v = (np.abs(x) - tau) ** 2
    else:
        v = (x - tau) ** 2
    return v if v.ndim else float(v)


@dataclass(frozen=True)
class MeshOptions:
    """Resolution request for :func:`build_mesh`.

    ``n_cells`` fixes the cell count; alternatively ``spacing`` requests a
    target grid step (rounded to a whole number of cells).  ``left`` and
    ``right`` override the automatic domain; ``pad`` controls how far the
    automatic domain extends beyond the potential well at max(tau, 0).
    """

    n_cells: int = DEFAULT_N_CELLS
    pad: float = DEFAULT_PAD
    left: float | None = None
    right: float | None = None
    spacing: float | None = None


@dataclass(frozen=True)
class Mesh:
    """Uniform grid on [left, right] with n_cells cells."""

    left: float
    right: float
    n_cells: int

    def __post_init__(self) -> None:
        if self.n_cells < MIN_N_CELLS:
            raise ValueError(f"n_cells={self.n_cells} below minimum {MIN_N_CELLS}")
        if not self.right > self.left:
            raise ValueError("mesh requires right > left")

    @property
    def h(self) -> float:
        return (self.right - self.left) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.n_cells + 1)

    def refined(self, factor: int = 2) -> "Mesh":
        """Same domain with the spacing divided by ``factor``."""
        return Mesh(self.left, self.right, self.n_cells * factor)


def build_mesh(spec: OperatorSpec, options: MeshOptions | None = None) -> Mesh:
    """Build the truncated computational grid for a spec.

    Half-line families live on [0, max(tau,0) + pad]; the whole-line
    family on [-(max(tau,0) + pad), max(tau,0) + pad].  Eigenfunctions of
    interest decay like exp(-(x-tau)^2/2) away from the well, so the
    default pad makes the truncation error negligible next to the O(h^2)
    discretization error.
    """
    opts = options or MeshOptions()
    extent = max(spec.tau, 0.0) + opts.pad
    if spec.family.half_line:
        left = 0.0 if opts.left is None else float(opts.left)
        if left != 0.0:
            raise ValueError("half-line families require left = 0")
    else:
        left = -extent if opts.left is None else float(opts.left)
    right = extent if opts.right is None else float(opts.right)
    if spec.tau > 0.0 and right < spec.tau + 8.0:
        raise ValueError("right boundary too close to the potential well (need right >= tau + 8)")
    if opts.spacing is not None:
        if opts.spacing <= 0.0:
            raise ValueError("spacing must be positive")
        n_cells = int(np.ceil((right - left) / opts.spacing))
    else:
        n_cells = int(opts.n_cells)
    return Mesh(left, right, n_cells)


@dataclass(frozen=True)
class Pencil:
    """Symmetric tridiagonal stiffness with a positive diagonal mass.

    ``diag``/``offdiag`` hold the stiffness K, ``masses`` the mass
    diagonal M, ``nodes`` the coordinates of the retained grid nodes.
    The Rayleigh quotient (u.K.u)/(u.M.u) discretizes the family's
    quadratic form over its natural measure.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    masses: np.ndarray
    nodes: np.ndarray
    spec: OperatorSpec = field(repr=False)
    mesh: Mesh = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.diag)

    def rayleigh_quotient(self, u: np.ndarray) -> float:
        """(u.K.u)/(u.M.u) for a vector sampled on the retained nodes."""
        u = np.asarray(u, dtype=float)
        num = float(np.sum(self.diag * u * u) + 2.0 * np.sum(self.offdiag * u[:-1] * u[1:]))
        den = float(np.sum(self.masses * u * u))
        if den == 0.0:
            raise ValueError("zero vector")
        return num / den


def _retained(spec: OperatorSpec, mesh: Mesh) -> tuple[np.ndarray, bool, bool]:
    """Retained node coordinates plus whether each end node is kept."""
    nodes = mesh.nodes
    if spec.family is Family.AXISYM:
        keep_left = spec.m == 0      # m != 0 forces u(0) = 0 at the axis
    elif spec.family is Family.DEGENNES_NEUMANN:
        keep_left = True
    else:
        keep_left = False            # Dirichlet at the left/lower boundary
    keep_right = False               # truncation is always Dirichlet
    lo = 0 if keep_left else 1
    return nodes[lo : len(nodes) - 1], keep_left, keep_right


def assemble(spec: OperatorSpec, mesh: Mesh) -> Pencil:
    """Assemble the finite-volume pencil of a spec on a mesh.

    Fluxes between nodes i and i+1 carry w(x_{i+1/2})/h with w the measure
    density (w = r for the axisymmetric family, w = 1 otherwise); node
    masses are the exact cell integrals of the measure; the potential is
    sampled at nodes.  Natural treatment at a retained origin node keeps
    the scheme second-order for Neumann-type conditions.
    """
    if spec.family.half_line and mesh.left != 0.0:
        raise ValueError("mesh incompatible with a half-line spec (left != 0)")
    if not spec.family.half_line and not (mesh.left < 0.0 < mesh.right):
        raise ValueError("mesh incompatible with the whole-line spec")

    h = mesh.h
    nodes = mesh.nodes
    n_nodes = len(nodes)
    x, keep_left, _ = _retained(spec, mesh)

    # Measure density at cell midpoints -> flux coefficients w_{i+1/2}/h.
    midpoints = nodes[:-1] + 0.5 * h
    if spec.weighted:
        flux = midpoints / h
        masses = x * h
        if keep_left:
            masses[0] = h * h / 8.0  # exact integral of r dr over [0, h/2]
    else:
        flux = np.full(n_nodes - 1, 1.0 / h)
        masses = np.full(len(x), h)
        if keep_left:
            masses[0] = 0.5 * h

    v = potential(spec, x)
    diag = v * masses
    lo = 0 if keep_left else 1
    # flux[i] couples original nodes i and i+1; map onto retained indices.
    left_flux = flux[lo : lo + len(x)]       # coupling to the right neighbor
    diag = diag + left_flux
    diag[1:] = diag[1:] + left_flux[:-1]
    if not keep_left:
        diag[0] = diag[0] + flux[0]          # Dirichlet wall at the left end
    offdiag = -left_flux[:-1]

    return Pencil(
        diag=np.ascontiguousarray(diag, dtype=float),
        offdiag=np.ascontiguousarray(offdiag, dtype=float),
        masses=np.ascontiguousarray(masses, dtype=float),
        nodes=np.ascontiguousarray(x, dtype=float),
        spec=spec,
        mesh=mesh,
    )
