"""Verification suites: every documented identity, bound, and constant.

Each check function measures one family of claims at a given resolution
and returns :class:`CheckResult` rows carrying the measured numbers, the
bound they were held to, and the verdict.  The CLI ``verify`` subcommand
groups them into named suites; the acceptance test module runs the same
functions at default resolution.

A :class:`Workspace` memoizes the expensive shared inputs (the two band
minima and the fine tau scan) so that suites sharing them do not repeat
the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis, bandfuncs, hermite, operators
from .analysis import find_minimum, gap_series, gaussian_bound, min_gaussian_bound
from .bandfuncs import SolveOptions, band_value
from .operators import Family

__all__ = ["CheckResult", "Workspace", "SUITES", "run_suite"]

REFERENCE_GROUND_3D = 0.8630      # desk-scale minimum of the lowest axisymmetric band
REFERENCE_TAU_STAR = 1.53
REFERENCE_THETA0 = 0.5901         # de Gennes constant and its minimizer
REFERENCE_XI0 = 0.7682
TRIANGLE_TAUS = (0.25, 0.5, 1.0, 1.53, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: dict[str, float]
    criterion: str

    def describe(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={v:.6g}" for k, v in self.measured.items())
        return f"{verdict} {self.name}: {parts} [{self.criterion}]"


@dataclass
class Workspace:
    """Shared lazily-computed inputs for the verification suites."""

    opts: SolveOptions = field(default_factory=SolveOptions)
    jobs: int = 1

    def __post_init__(self) -> None:
        self._cache: dict[str, object] = {}

    def minimum_3d(self) -> analysis.MinimumReport:
        if "min3d" not in self._cache:
            self._cache["min3d"] = find_minimum(Family.AXISYM, n=1, opts=self.opts)
        return self._cache["min3d"]

    def minimum_2d(self) -> analysis.MinimumReport:
        if "min2d" not in self._cache:
            self._cache["min2d"] = find_minimum(Family.DEGENNES_NEUMANN, n=1, opts=self.opts)
        return self._cache["min2d"]

    def fine_scan(self) -> bandfuncs.ScanResult:
        """Levels 1 and 2 on tau = k/100, k = 0..500."""
        if "scan" not in self._cache:
            grid = np.arange(501) / 100.0
            self._cache["scan"] = bandfuncs.scan(
                Family.AXISYM, 0, (1, 2), grid, opts=self.opts, jobs=self.jobs
            )
        return self._cache["scan"]


def _result(name: str, passed: bool, measured: dict[str, float], criterion: str) -> CheckResult:
    clean = {k: float(v) for k, v in measured.items()}
    return CheckResult(name, bool(passed), clean, criterion)


# --- acceptance criteria -----------------------------------------------------


def check_laguerre(ws: Workspace) -> list[CheckResult]:
    """At tau = 0 the weighted half-line family has eigenvalues 4n - 2."""
    out = []
    for n, exact in ((1, 2.0), (2, 6.0)):
        point = band_value(operators.axisym(0.0), n, ws.opts)
        err = abs(point.value - exact)
        out.append(
            _result(
                f"laguerre-level-{n}",
                err <= 1e-6,
                {"value": point.value, "abs_error": err, "estimate": point.error_estimate},
                f"|value - {exact}| <= 1e-6",
            )
        )
    return out


def check_ground_3d(ws: Workspace) -> list[CheckResult]:
    """Minimum of the lowest axisymmetric band: value and minimizer."""
    rep = ws.minimum_3d()
    return [
        _result(
            "ground-energy-3d",
            abs(rep.value - REFERENCE_GROUND_3D) <= 5e-3,
            {"value": rep.value},
            f"|value - {REFERENCE_GROUND_3D}| <= 5e-3",
        ),
        _result(
            "minimizer-3d",
            abs(rep.tau_star - REFERENCE_TAU_STAR) <= 0.02,
            {"tau_star": rep.tau_star, "derivative": rep.derivative_at_min},
            f"|tau_star - {REFERENCE_TAU_STAR}| <= 0.02",
        ),
    ]


def check_degennes_constants(ws: Workspace) -> list[CheckResult]:
    """Neumann de Gennes minimum, its minimizer, and their square relation."""
    rep = ws.minimum_2d()
    return [
        _result(
            "degennes-theta0",
            abs(rep.value - REFERENCE_THETA0) <= 1e-3,
            {"theta0": rep.value},
            f"|theta0 - {REFERENCE_THETA0}| <= 1e-3",
        ),
        _result(
            "degennes-xi0",
            abs(rep.tau_star - REFERENCE_XI0) <= 2e-3,
            {"xi0": rep.tau_star},
            f"|xi0 - {REFERENCE_XI0}| <= 2e-3",
        ),
        _result(
            "degennes-square-relation",
            abs(rep.tau_star**2 - rep.value) <= 1e-3,
            {"xi0_sq_minus_theta0": rep.tau_star**2 - rep.value},
            "|xi0^2 - theta0| <= 1e-3",
        ),
    ]


def check_ordering(ws: Workspace) -> list[CheckResult]:
    """Strict chain theta0 < ground_3d < sqrt(4 - pi), plus pointwise bound."""
    rep3 = ws.minimum_3d()
    rep2 = ws.minimum_2d()
    comparison = analysis.compare_lowest(rep3.tau_star, ws.opts)
    err_budget = 10.0 * comparison.combined_error
    out = [
        _result(
            "ordering-chain",
            comparison.chain_ok
            and comparison.ground_3d - rep2.value > err_budget
            and comparison.margin_upper > err_budget,
            {
                "theta0": rep2.value,
                "ground_3d": comparison.ground_3d,
                "upper_bound": comparison.upper_bound,
                "margin_lower": comparison.ground_3d - rep2.value,
                "margin_upper": comparison.margin_upper,
                "error_budget": err_budget,
            },
            "theta0 < ground_3d < sqrt(4-pi), margins > 10x combined error estimates",
        )
    ]
    for tau in (0.5, 1.0, 1.5, 2.0, 3.0):
        point = band_value(operators.axisym(tau), 1, ws.opts)
        bound = gaussian_bound(tau)
        out.append(
            _result(
                f"gaussian-bound-tau-{tau}",
                point.value <= bound,
                {"band": point.value, "bound": bound},
                "band value <= pi/(4 tau^2) + (4-pi) tau^2/pi",
            )
        )
    return out


def check_asymptotics(ws: Workspace) -> list[CheckResult]:
    """Fitted 1/tau^2 coefficients over [6, 12] against m^2 - 1/4."""
    cases = (
        (0, 1, -0.25, 0.02),
        (0, 2, -0.25, 0.02),
        (1, 1, 0.75, 0.05),
        (2, 1, 3.75, 0.20),
    )
    out = []
    for m, n, target, tol in cases:
        fit = analysis.asymptotic_fit(Family.AXISYM, m, n, (6.0, 12.0), opts=ws.opts)
        out.append(
            _result(
                f"tail-coefficient-m{m}-n{n}",
                abs(fit.fitted_c2 - target) <= tol,
                {"c0": fit.fitted_c0, "c2": fit.fitted_c2, "residual": fit.residual},
                f"|c2 - {target}| <= {tol}",
            )
        )
    return out


def check_derivative_triangle(ws: Workspace, levels=(1, 2)) -> list[CheckResult]:
    """Three derivative routes agree pointwise; Neumann derivative at xi0."""
    out = []
    for n in levels:
        for tau in TRIANGLE_TAUS:
            spec = operators.axisym(tau)
            fh = bandfuncs.fh_derivative(spec, n, ws.opts)
            tr = bandfuncs.trace_derivative(spec, n, ws.opts)
            fd = bandfuncs.fd_derivative(spec, n, opts=ws.opts)
            ok = abs(fh - tr) <= 1e-3 and abs(fh - fd) <= 1e-3 and abs(tr - fd) <= 2e-3
            out.append(
                _result(
                    f"derivative-triangle-n{n}-tau-{tau}",
                    ok,
                    {"fh": fh, "trace": tr, "fd": fd},
                    "|fh-trace|<=1e-3, |fh-fd|<=1e-3, |trace-fd|<=2e-3",
                )
            )
    xi0 = ws.minimum_2d().tau_star
    dh = bandfuncs.dh_derivative_neumann(xi0, 1, ws.opts)
    out.append(
        _result(
            "neumann-derivative-at-xi0",
            abs(dh) <= 1e-3,
            {"dh": dh, "xi0": xi0},
            "|derivative| <= 1e-3 at the Neumann minimizer",
        )
    )
    return out


def check_virial(ws: Workspace) -> list[CheckResult]:
    """Kinetic/moment/half-energy split at the located 3D minimizer."""
    rep = ws.minimum_3d()
    vir = analysis.virial_report(rep.tau_star, ws.opts)
    half = rep.value / 2.0
    worst = max(
        abs(vir.kinetic - half), abs(vir.potential_moment - half), abs(vir.half_energy - half)
    )
    fh_moment = -bandfuncs.fh_derivative(operators.axisym(rep.tau_star), 1, ws.opts) / 2.0
    return [
        _result(
            "virial-identity",
            vir.max_mismatch <= 5e-3 and worst <= 5e-3,
            {
                "kinetic": vir.kinetic,
                "potential_moment": vir.potential_moment,
                "half_energy": vir.half_energy,
                "max_mismatch": vir.max_mismatch,
            },
            "pairwise mismatch <= 5e-3 and each within 5e-3 of half the minimum",
        ),
        _result(
            "first-moment-at-minimizer",
            abs(fh_moment) <= 1e-3,
            {"moment": fh_moment},
            "integral (r - tau) |z|^2 r dr vanishes at the minimizer",
        ),
    ]


def check_gap_scan(ws: Workspace) -> list[CheckResult]:
    """Criterion series positive on (0, 5], zero at 0; curvature bound."""
    result = ws.fine_scan()
    series = gap_series(result)
    rep = ws.minimum_3d()
    criterion = analysis.gap_criterion(rep.tau_star, ws.opts)
    return [
        _result(
            "gap-series-origin",
            abs(series[0]) <= 1e-5,
            {"value_at_0": series[0]},
            "zeta2(0) - 3 zeta1(0) = 0 +- 1e-5",
        ),
        _result(
            "gap-series-positive",
            bool(np.all(series[1:] > 0.0)),
            {"min_over_grid": float(series[1:].min()), "argmin": float(result.tau_grid[1:][series[1:].argmin()])},
            "zeta2 - 3 zeta1 > 0 for tau = k/100, k = 1..500",
        ),
        _result(
            "curvature-vs-gap-bound",
            criterion.satisfied,
            {
                "second_derivative": criterion.second_derivative_estimate,
                "gap_bound": criterion.gap_bound,
            },
            "lambda'' >= 2 (zeta2 - 3 zeta1)/(zeta2 - zeta1) - 1e-2 at the minimizer",
        ),
    ]


def check_uniqueness(ws: Workspace) -> list[CheckResult]:
    """The discrete difference sign pattern of the lowest band flips once."""
    result = ws.fine_scan()
    values = result.level_values(1)
    diffs = np.diff(values)
    signs = np.sign(diffs)
    signs = signs[signs != 0.0]
    flips = int(np.sum(signs[:-1] != signs[1:]))
    ok = flips == 1 and signs[0] < 0.0 and signs[-1] > 0.0
    arg = int(values.argmin())
    return [
        _result(
            "unique-minimum-sign-pattern",
            ok,
            {"sign_changes": flips, "first_sign": float(signs[0]), "last_sign": float(signs[-1])},
            "differences change sign - to + exactly once over [0, 5]",
        ),
        _result(
            "scan-curve-minimum",
            abs(values[arg] - REFERENCE_GROUND_3D) <= 5e-3
            and abs(result.tau_grid[arg] - REFERENCE_TAU_STAR) <= 0.02,
            {"grid_min": float(values[arg]), "grid_argmin": float(result.tau_grid[arg])},
            "scanned curve dips to the 3D ground energy near its minimizer",
        ),
    ]


def check_interlacing(ws: Workspace, levels=(1, 2)) -> list[CheckResult]:
    """Whole-line eigenvalues split into the Neumann/Dirichlet half-line ones."""
    out = []
    for tau in (0.0, 1.0, 2.0):
        for n in levels:
            line_odd = band_value(operators.degennes_line(tau), 2 * n - 1, ws.opts)
            line_even = band_value(operators.degennes_line(tau), 2 * n, ws.opts)
            neum = band_value(operators.degennes_neumann(tau), n, ws.opts)
            diri = band_value(operators.degennes_dirichlet(tau), n, ws.opts)
            tol_n = 1e-6 + line_odd.error_estimate + neum.error_estimate
            tol_d = 1e-6 + line_even.error_estimate + diri.error_estimate
            ok = (
                abs(line_odd.value - neum.value) <= tol_n
                and abs(line_even.value - diri.value) <= tol_d
            )
            out.append(
                _result(
                    f"interlacing-tau-{tau}-n{n}",
                    ok,
                    {
                        "neumann_gap": abs(line_odd.value - neum.value),
                        "dirichlet_gap": abs(line_even.value - diri.value),
                        "tol_neumann": tol_n,
                        "tol_dirichlet": tol_d,
                    },
                    "mu_{2n-1} = muN_n and mu_{2n} = muD_n within 1e-6 + error estimates",
                )
            )
    return out


def _gauss_hermite_ip(poly_a, poly_b, nodes, weights) -> float:
    return float(np.sum(weights * poly_a(nodes) * poly_b(nodes)))


def _normalized_hermite_poly(n: int):
    """Polynomial part of Psi_n: Psi_n(x) = P_n(x) exp(-x^2/2)."""
    from numpy.polynomial import hermite as H

    coeffs = np.zeros(n)
    coeffs[n - 1] = 1.0
    norm = math.sqrt(float(2 ** (n - 1)) * math.factorial(n - 1) * math.sqrt(math.pi))

    def poly(x):
        return H.hermval(x, coeffs) / norm

    return poly


def _minus_h1_poly(n: int):
    """Polynomial part of -H1 Psi_n = 2 Psi_n' + 2x Psi_n'' + x^3 Psi_n.

    Derivatives are taken on the raw Hermite polynomial through numpy's
    polynomial module, an evaluation path independent of the ladder
    algebra being verified.
    """
    from numpy.polynomial import hermite as H

    coeffs = np.zeros(n)
    coeffs[n - 1] = 1.0
    norm = math.sqrt(float(2 ** (n - 1)) * math.factorial(n - 1) * math.sqrt(math.pi))
    d1 = H.hermder(coeffs, 1)
    d2 = H.hermder(coeffs, 2)

    def poly(x):
        p = H.hermval(x, coeffs) / norm
        p1 = H.hermval(x, d1) / norm - x * p
        p2 = H.hermval(x, d2) / norm - 2.0 * x * (H.hermval(x, d1) / norm) + (x * x - 1.0) * p
        return 2.0 * p1 + 2.0 * x * p2 + x**3 * p

    return poly


def check_hermite(ws: Workspace) -> list[CheckResult]:
    """Perturbation oracle: E1 = 0, E2 = -1/4, ladder coefficients."""
    from numpy.polynomial import hermite as H

    nodes, weights = H.hermgauss(80)
    out = []
    worst_e1 = 0.0
    worst_e2 = 0.0
    for n in range(1, 7):
        mh1 = _minus_h1_poly(n)
        pn = _normalized_hermite_poly(n)
        worst_e1 = max(worst_e1, abs(_gauss_hermite_ip(mh1, pn, nodes, weights)))
        worst_e2 = max(worst_e2, abs(hermite.e2(n).value + 0.25))
    out.append(
        _result(
            "first-order-energy-vanishes",
            worst_e1 <= 1e-12,
            {"worst": worst_e1},
            "|<H1 Psi_n, Psi_n>| <= 1e-12 for n = 1..6",
        )
    )
    out.append(
        _result(
            "second-order-energy",
            worst_e2 <= 1e-12,
            {"worst_deviation": worst_e2},
            "E2(n) = -1/4 to 1e-12 for n = 1..6",
        )
    )
    worst_coeff = 0.0
    for n in range(1, 6):
        expansion, closed = hermite.h1_expansion(n)
        targets = {n - 3: closed.a_n, n - 1: closed.b_n, n + 1: closed.c_n, n + 3: closed.d_n}
        mh1 = _minus_h1_poly(n)
        for level, coeff in targets.items():
            if level < 1:
                continue
            pk = _normalized_hermite_poly(level)
            quad = _gauss_hermite_ip(mh1, pk, nodes, weights)
            worst_coeff = max(worst_coeff, abs(quad - coeff))
    out.append(
        _result(
            "corrector-coefficients-vs-quadrature",
            worst_coeff <= 1e-10,
            {"worst": worst_coeff},
            "ladder closed forms match Gauss-Hermite quadrature to 1e-10",
        )
    )
    return out


def check_tails(ws: Workspace) -> list[CheckResult]:
    """Exponential de Gennes tails: ratio window, sides, and trend."""
    tail_opts = SolveOptions(
        n_cells=max(ws.opts.n_cells, analysis.TAIL_MIN_CELLS),
        pad=ws.opts.pad,
        tol=ws.opts.tol,
    )
    rep = analysis.degennes_tail_check(1, (2.5, 3.5), n_samples=5, opts=tail_opts)
    return [
        _result(
            "degennes-tail-window",
            rep.in_window and rep.trending,
            {
                "neumann_ratio_lo": float(rep.neumann_ratios[0]),
                "neumann_ratio_hi": float(rep.neumann_ratios[-1]),
                "dirichlet_ratio_lo": float(rep.dirichlet_ratios[0]),
                "dirichlet_ratio_hi": float(rep.dirichlet_ratios[-1]),
            },
            "gap / leading exponential term in [0.8, 1.2] over [2.5, 3.5], trending to 1",
        ),
        _result(
            "degennes-tail-sides",
            rep.neumann_below and rep.dirichlet_above,
            {
                "neumann_below": float(rep.neumann_below),
                "dirichlet_above": float(rep.dirichlet_above),
            },
            "Neumann approaches the limit level from below, Dirichlet from above",
        ),
    ]


# --- additional documented invariants ---------------------------------------


def check_monotone_left(ws: Workspace) -> list[CheckResult]:
    """The lowest band decreases for tau < 0."""
    values = {tau: bandfuncs.fh_derivative(operators.axisym(tau), 1, ws.opts) for tau in (-3.0, -2.0, -1.0, -0.5)}
    return [
        _result(
            "decreasing-left-branch",
            all(v < 0.0 for v in values.values()),
            {f"fh({tau})": v for tau, v in values.items()},
            "fh derivative < 0 for sampled tau < 0",
        )
    ]


def check_lower_bound(ws: Workspace) -> list[CheckResult]:
    """zeta1(tau) >= tau^2 for tau <= 0 (min-max lower bound)."""
    out = []
    for tau in (-3.0, -2.0, -1.0, 0.0):
        point = band_value(operators.axisym(tau), 1, ws.opts)
        ok = point.value >= tau * tau - point.error_estimate
        out.append(
            _result(
                f"lower-bound-tau-{tau}",
                ok,
                {"band": point.value, "tau_sq": tau * tau},
                "band >= tau^2 - error estimate",
            )
        )
    return out


def check_landau_approach(ws: Workspace) -> list[CheckResult]:
    """Bands approach 2n - 1 from below with a shrinking gap on [6, 12]."""
    out = []
    for n in (1, 2):
        gaps = []
        for tau in (6.0, 8.0, 10.0, 12.0):
            point = band_value(operators.axisym(tau), n, ws.opts)
            gaps.append(2.0 * n - 1.0 - point.value)
        ok = all(g > 0.0 for g in gaps) and all(a > b for a, b in zip(gaps, gaps[1:]))
        out.append(
            _result(
                f"landau-approach-n{n}",
                ok,
                {f"gap_at_{t}": g for t, g in zip((6.0, 8.0, 10.0, 12.0), gaps)},
                "2n - 1 - band positive and decreasing in tau",
            )
        )
    return out


def check_neumann_exponential(ws: Workspace) -> list[CheckResult]:
    """The Neumann band is exponentially close to its limit at tau = 3.5."""
    point = band_value(operators.degennes_neumann(3.5), 1, ws.opts)
    gap = 1.0 - point.value
    return [
        _result(
            "neumann-exponential-limit",
            0.0 < gap < 1e-3,
            {"gap": gap},
            "1 - muN1(3.5) in (0, 1e-3)",
        )
    ]


def check_eigvec_tau_derivative(ws: Workspace) -> list[CheckResult]:
    """The tau-derivative of the eigenfunction is weighted-orthogonal to it."""
    tau, delta = 1.0, 1e-4
    right = max(tau, 0.0) + ws.opts.pad
    opts = SolveOptions(n_cells=ws.opts.n_cells, pad=ws.opts.pad, tol=ws.opts.tol, right=right)
    pencil, _, z0 = bandfuncs._fine_eigensystem(operators.axisym(tau), 1, opts)
    _, _, zp = bandfuncs._fine_eigensystem(operators.axisym(tau + delta), 1, opts)
    _, _, zm = bandfuncs._fine_eigensystem(operators.axisym(tau - delta), 1, opts)
    if float(np.sum(pencil.masses * zp * z0)) < 0.0:
        zp = -zp
    if float(np.sum(pencil.masses * zm * z0)) < 0.0:
        zm = -zm
    zdot = (zp - zm) / (2.0 * delta)
    overlap = float(np.sum(pencil.masses * zdot * z0))
    return [
        _result(
            "eigvec-derivative-orthogonality",
            abs(overlap) <= 1e-4,
            {"overlap": overlap},
            "|<d/dtau z, z>_w| <= 1e-4",
        )
    ]


def check_quasimode_constant(ws: Workspace) -> list[CheckResult]:
    """Remainder after the two-term energy is O(1/tau^3) with a small constant."""
    taus = np.linspace(6.0, 12.0, 7)
    worst = 0.0
    for tau in taus:
        band = band_value(operators.axisym(tau), 1, ws.opts).value
        worst = max(worst, abs(band - hermite.quasimode_energy(1, tau)) * tau**3)
    return [
        _result(
            "quasimode-remainder-constant",
            worst < 5.0,
            {"fitted_constant": worst},
            "max |band - (2n-1-1/(4 tau^2))| tau^3 < 5 over [6, 12]",
        )
    ]


def check_potential_expansion(ws: Workspace) -> list[CheckResult]:
    """Taylor control of the rescaled well potential near its bottom."""
    worst = 0.0
    xs = np.linspace(-1.0, 1.0, 81)
    xs = xs[np.abs(xs) > 1e-3]
    for tau in (4.0, 6.0, 8.0, 16.0):
        v = hermite.rescaled_well_potential(tau, xs)
        model = xs**2 - xs**3 / tau + 5.0 * xs**4 / (4.0 * tau**2)
        ratio = np.abs(v - model) * tau**3 / np.abs(xs) ** 5
        worst = max(worst, float(ratio.max()))
    return [
        _result(
            "well-potential-expansion",
            worst < 10.0,
            {"fitted_constant": worst},
            "|V - (x^2 - x^3/tau + 5x^4/(4 tau^2))| <= C x^5/tau^3 with C < 10",
        )
    ]


SUITES: dict[str, tuple] = {
    "derivatives": (check_derivative_triangle, check_monotone_left, check_eigvec_tau_derivative),
    "virial": (check_virial,),
    "gap": (check_gap_scan, check_uniqueness),
    "asymptotics": (check_asymptotics, check_tails, check_landau_approach, check_quasimode_constant),
    "interlacing": (check_interlacing, check_neumann_exponential),
    "hermite": (check_hermite, check_potential_expansion),
    "bounds": (
        check_laguerre,
        check_ground_3d,
        check_degennes_constants,
        check_ordering,
        check_lower_bound,
    ),
}
SUITES["all"] = tuple(fn for suite in (
    "bounds", "derivatives", "virial", "gap", "asymptotics", "interlacing", "hermite"
) for fn in SUITES[suite])


def run_suite(name: str, ws: Workspace | None = None) -> list[CheckResult]:
    """Run one named suite and return its check rows."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    ws = ws or Workspace()
    results: list[CheckResult] = []
    for fn in SUITES[name]:
        results.extend(fn(ws))
    return results
