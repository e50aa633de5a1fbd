"""Band functions of 1D magnetic fiber operators.

Computes the dispersion curves of the axisymmetric magnetic half-line
family (weighted measure r dr, magnetic quantum number m) and of the
de Gennes operators (whole line, Neumann and Dirichlet half-line), along
with their derivatives, minima, critical-point criteria, and large-tau
asymptotics.  See the README for the CLI surface.
"""

from .analysis import (
    AsymptoticFit,
    BracketError,
    ComparisonReport,
    CriterionReport,
    MinimumReport,
    TailCheckReport,
    VirialReport,
    asymptotic_fit,
    compare_lowest,
    criterion_scan,
    degennes_tail_check,
    find_minimum,
    gap_criterion,
    gaussian_bound,
    gaussian_bound_minimizer,
    min_gaussian_bound,
    virial_report,
)
from .bandfuncs import (
    BandPoint,
    ScanResult,
    SolveOptions,
    band_value,
    central_difference,
    dh_derivative_neumann,
    eigenpair,
    fd_derivative,
    fh_derivative,
    scan,
    trace_derivative,
)
from .eigensolve import (
    ClusterError,
    ConvergenceError,
    EigenPair,
    EigensolveError,
    SymTridiag,
    eigenvector,
    lowest_eigenvalues,
    reduce_to_standard,
    sturm_count,
    weighted_normalize,
)
from .operators import (
    Family,
    Mesh,
    MeshOptions,
    OperatorSpec,
    Pencil,
    assemble,
    axisym,
    build_mesh,
    degennes_dirichlet,
    degennes_line,
    degennes_neumann,
    potential,
)

__version__ = "0.1.0"
