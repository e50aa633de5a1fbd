import math

import numpy as np
import pytest

from magband.analysis import (
    BracketError,
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
from magband.bandfuncs import SolveOptions, band_value
from magband.operators import Family, axisym


@pytest.fixture(scope="module")
def min3d(coarse_module):
    return find_minimum(Family.AXISYM, opts=coarse_module)


@pytest.fixture(scope="module")
def coarse_module():
    return SolveOptions(n_cells=600)


class TestFindMinimum:
    def test_axisym_minimum(self, min3d):
        assert min3d.tau_star == pytest.approx(1.53, abs=0.02)
        assert min3d.value == pytest.approx(0.8630, abs=5e-3)
        assert abs(min3d.derivative_at_min) < 1e-3
        assert min3d.second_derivative_estimate > 0.0
        assert min3d.iterations > 0
        lo, hi = min3d.bracket
        assert 0.5 <= lo < hi <= 3.0

    def test_degennes_minimum(self, coarse_module):
        rep = find_minimum(Family.DEGENNES_NEUMANN, opts=coarse_module)
        assert rep.tau_star == pytest.approx(0.7682, abs=2e-3)
        assert rep.value == pytest.approx(0.5901, abs=1e-3)
        assert abs(rep.tau_star**2 - rep.value) <= 1e-3

    def test_bracket_without_sign_change(self, coarse_module):
        with pytest.raises(BracketError):
            find_minimum(Family.AXISYM, bracket=(4.0, 5.0), opts=coarse_module)

    def test_invalid_bracket_order(self, coarse_module):
        with pytest.raises(ValueError):
            find_minimum(Family.AXISYM, bracket=(2.0, 1.0), opts=coarse_module)

    def test_no_default_bracket_for_line(self, coarse_module):
        with pytest.raises(ValueError):
            find_minimum(Family.DEGENNES_LINE, opts=coarse_module)


class TestGaussianBound:
    def test_closed_form_at_one(self):
        expected = math.pi / 4.0 + (4.0 - math.pi) / math.pi
        assert gaussian_bound(1.0) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(1.0586, abs=1e-4)

    def test_minimizer_attains_sqrt_bound(self):
        tau_hat = gaussian_bound_minimizer()
        assert gaussian_bound(tau_hat) == pytest.approx(min_gaussian_bound(), abs=1e-14)
        assert min_gaussian_bound() == pytest.approx(math.sqrt(4.0 - math.pi), abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            gaussian_bound(0.0)

    def test_upper_bounds_band(self, coarse_module):
        for tau in (0.5, 1.0, 2.0):
            assert band_value(axisym(tau), 1, coarse_module).value <= gaussian_bound(tau)


class TestVirial:
    def test_balanced_at_minimizer(self, min3d, coarse_module):
        rep = virial_report(min3d.tau_star, coarse_module)
        assert rep.max_mismatch <= 5e-3
        half = min3d.value / 2.0
        for quantity in (rep.kinetic, rep.potential_moment, rep.half_energy):
            assert quantity == pytest.approx(half, abs=5e-3)

    def test_rejects_non_critical_point(self, min3d, coarse_module):
        with pytest.raises(ValueError):
            virial_report(min3d.tau_star + 0.1, coarse_module)


class TestGapCriterion:
    def test_satisfied_at_minimizer(self, min3d, coarse_module):
        rep = gap_criterion(min3d.tau_star, coarse_module)
        assert rep.satisfied
        assert rep.zeta2 - 3.0 * rep.zeta1 > 0.0
        assert rep.second_derivative_estimate >= rep.gap_bound - 1e-2

    def test_bound_stable_under_refinement(self, min3d, coarse_module):
        rep1 = gap_criterion(min3d.tau_star, coarse_module)
        rep2 = gap_criterion(min3d.tau_star, SolveOptions(n_cells=1200))
        assert abs(rep1.gap_bound - rep2.gap_bound) < 1e-3


class TestCriterionScan:
    def test_origin_and_positivity(self, coarse_module):
        grid = np.linspace(0.0, 1.0, 11)
        series = criterion_scan(grid, coarse_module)
        assert abs(series[0]) <= 1e-5
        assert np.all(series[1:] > 0.0)

    def test_vanishing_tail(self, coarse_module):
        value = band_value(axisym(10.0), 2, coarse_module).value - 3.0 * band_value(
            axisym(10.0), 1, coarse_module
        ).value
        assert abs(value) < 0.05


class TestAsymptoticFit:
    def test_axisym_ground(self, coarse_module):
        fit = asymptotic_fit(Family.AXISYM, 0, 1, (6.0, 12.0), opts=coarse_module)
        assert fit.fitted_c0 == pytest.approx(1.0, abs=1e-3)
        assert fit.fitted_c2 == pytest.approx(-0.25, abs=0.02)
        assert fit.residual < 1e-4

    def test_axisym_second_level(self, coarse_module):
        fit = asymptotic_fit(Family.AXISYM, 0, 2, (6.0, 12.0), opts=coarse_module)
        assert fit.fitted_c0 == pytest.approx(3.0, abs=1e-3)
        assert fit.fitted_c2 == pytest.approx(-0.25, abs=0.03)

    def test_magnetic_channel(self, coarse_module):
        fit = asymptotic_fit(Family.AXISYM, 1, 1, (6.0, 12.0), opts=coarse_module)
        assert fit.fitted_c2 == pytest.approx(0.75, abs=0.05)

    def test_range_validation(self, coarse_module):
        with pytest.raises(ValueError):
            asymptotic_fit(Family.AXISYM, 0, 1, (3.0, 12.0), opts=coarse_module)
        with pytest.raises(ValueError):
            asymptotic_fit(Family.AXISYM, 0, 1, (6.0, 12.0), n_samples=4, opts=coarse_module)

    def test_narrow_window_ill_conditioned(self, coarse_module):
        with pytest.raises(ValueError):
            asymptotic_fit(Family.AXISYM, 0, 1, (8.0, 8.001), n_samples=6, opts=coarse_module)


class TestTailCheck:
    def test_window_and_sides(self):
        rep = degennes_tail_check(1, (2.8, 3.2), n_samples=3)
        assert rep.in_window
        assert rep.neumann_below
        assert rep.dirichlet_above
        assert np.all((0.9 <= rep.neumann_ratios) & (rep.neumann_ratios <= 1.1))

    def test_range_validation(self):
        with pytest.raises(ValueError):
            degennes_tail_check(1, (2.0, 3.0))
        with pytest.raises(ValueError):
            degennes_tail_check(1, (3.0, 4.0))

    def test_coarse_resolution_rejected(self):
        with pytest.raises(ValueError):
            degennes_tail_check(1, (2.8, 3.2), opts=SolveOptions(n_cells=4800))


class TestCompareLowest:
    def test_strict_chain(self, min3d, coarse_module):
        rep = compare_lowest(min3d.tau_star, coarse_module)
        assert rep.chain_ok
        assert rep.theta0 == pytest.approx(0.5901, abs=1e-3)
        assert rep.margin_2d_3d > 0.05
        assert rep.margin_theta >= -rep.combined_error
        assert rep.margin_upper > 0.05
        assert rep.upper_bound == pytest.approx(math.sqrt(4.0 - math.pi), abs=1e-15)
