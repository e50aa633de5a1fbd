import numpy as np
import pytest

from magband import operators
from magband.bandfuncs import (
    ScanError,
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
from magband.operators import Family, axisym, degennes_dirichlet, degennes_neumann


class TestBandValue:
    def test_laguerre_levels(self, medium):
        assert band_value(axisym(0.0), 1, medium).value == pytest.approx(2.0, abs=1e-6)
        assert band_value(axisym(0.0), 2, medium).value == pytest.approx(6.0, abs=1e-6)

    def test_negative_tau_lower_bound(self, coarse):
        point = band_value(axisym(-1.0), 1, coarse)
        assert point.value >= 1.0

    def test_degennes_constant(self, medium):
        point = band_value(degennes_neumann(0.7682), 1, medium)
        assert point.value == pytest.approx(0.5901, abs=1e-4)

    def test_point_metadata(self, coarse):
        point = band_value(axisym(0.5), 2, coarse)
        assert point.tau == 0.5
        assert point.level == 2
        assert point.error_estimate >= 0.0
        assert point.mesh_h == pytest.approx(12.5 / (2 * coarse.n_cells))

    def test_level_range(self, coarse):
        with pytest.raises(ValueError):
            band_value(axisym(0.0), 0, coarse)
        with pytest.raises(ValueError):
            band_value(axisym(0.0), 7, coarse)


class TestEigenpair:
    def test_laguerre_ground_profile(self):
        pair = eigenpair(axisym(0.0), 1)   # default resolution
        mesh = operators.build_mesh(axisym(0.0), SolveOptions().mesh_options(2))
        r = operators.assemble(axisym(0.0), mesh).nodes
        exact = np.sqrt(2.0) * np.exp(-r * r / 2.0)
        assert np.max(np.abs(pair.vector - exact)) < 1e-6
        assert pair.norm_weighted == pytest.approx(1.0, abs=1e-12)

    def test_orthogonality(self, medium):
        mesh = operators.build_mesh(axisym(1.0), medium.mesh_options(2))
        masses = operators.assemble(axisym(1.0), mesh).masses
        z1 = eigenpair(axisym(1.0), 1, medium).vector
        z2 = eigenpair(axisym(1.0), 2, medium).vector
        assert abs(float(np.sum(masses * z1 * z2))) < 1e-8

    def test_dirichlet_odd_profile(self, medium):
        pair = eigenpair(degennes_dirichlet(0.0), 1, medium)
        mesh = operators.build_mesh(degennes_dirichlet(0.0), medium.mesh_options(2))
        x = operators.assemble(degennes_dirichlet(0.0), mesh).nodes
        exact = 2.0 * np.pi**-0.25 * x * np.exp(-x * x / 2.0)
        assert np.max(np.abs(pair.vector - exact)) < 1e-4


class TestDerivatives:
    def test_fh_negative_left(self, medium):
        assert fh_derivative(axisym(-1.0), 1, medium) < 0.0

    def test_fh_matches_fd(self, medium):
        for tau in (0.7, 2.2):
            fh = fh_derivative(axisym(tau), 1, medium)
            fd = fd_derivative(axisym(tau), 1, opts=medium)
            assert abs(fh - fd) <= 1e-3

    def test_fh_requires_axisym(self, coarse):
        with pytest.raises(ValueError):
            fh_derivative(degennes_neumann(1.0), 1, coarse)

    def test_trace_matches_fh(self, medium):
        for tau in (0.5, 1.53):
            fh = fh_derivative(axisym(tau), 1, medium)
            tr = trace_derivative(axisym(tau), 1, medium)
            assert abs(fh - tr) <= 1e-3

    def test_trace_sign_pattern(self, medium):
        assert trace_derivative(axisym(0.5), 1, medium) < 0.0
        assert trace_derivative(axisym(3.0), 1, medium) > 0.0

    def test_trace_requires_m0(self, coarse):
        with pytest.raises(ValueError):
            trace_derivative(axisym(1.0, m=1), 1, coarse)
        with pytest.raises(ValueError):
            trace_derivative(degennes_neumann(1.0), 1, coarse)

    def test_dh_neumann(self, medium):
        assert abs(dh_derivative_neumann(0.7682, 1, medium)) <= 1e-3
        assert dh_derivative_neumann(0.0, 1, medium) < 0.0
        fd = fd_derivative(degennes_neumann(1.5), 1, opts=medium)
        assert abs(dh_derivative_neumann(1.5, 1, medium) - fd) <= 1e-4


class TestFiniteDifference:
    def test_quadratic_exactness(self):
        f = lambda x: 3.0 * x * x - 2.0 * x + 1.0
        assert central_difference(f, 1.7, 0.1) == pytest.approx(6.0 * 1.7 - 2.0, abs=1e-12)

    def test_bad_delta(self):
        with pytest.raises(ValueError):
            central_difference(lambda x: x, 0.0, 0.0)

    def test_delta_halving_ratio(self, medium):
        ref = fd_derivative(axisym(1.0), 1, delta=1e-4, opts=medium)
        e_big = abs(fd_derivative(axisym(1.0), 1, delta=0.08, opts=medium) - ref)
        e_small = abs(fd_derivative(axisym(1.0), 1, delta=0.04, opts=medium) - ref)
        assert 3.4 <= e_big / e_small <= 4.6


class TestScan:
    def test_matches_pointwise_values(self, coarse):
        grid = np.array([0.0, 0.5, 1.0])
        result = scan(Family.AXISYM, 0, (1, 2), grid, opts=coarse)
        assert result.values.shape == (2, 3)
        for j, tau in enumerate(grid):
            for i, n in enumerate((1, 2)):
                point = band_value(axisym(tau), n, coarse)
                assert result.values[i, j] == pytest.approx(point.value, abs=1e-9)
                assert result.errors[i, j] == pytest.approx(point.error_estimate, abs=1e-9)

    def test_with_derivatives(self, coarse):
        grid = np.array([0.5, 1.0])
        result = scan(Family.AXISYM, 0, (1,), grid, with_derivatives=True, opts=coarse)
        assert result.derivatives is not None
        for j, tau in enumerate(grid):
            assert result.derivatives[0, j] == pytest.approx(
                fh_derivative(axisym(tau), 1, coarse), abs=1e-9
            )

    def test_derivatives_unsupported_family(self, coarse):
        with pytest.raises(ValueError):
            scan(Family.DEGENNES_DIRICHLET, 0, (1,), [0.0, 1.0], with_derivatives=True, opts=coarse)

    def test_grid_validation(self, coarse):
        with pytest.raises(ValueError):
            scan(Family.AXISYM, 0, (1,), [1.0, 0.5], opts=coarse)
        with pytest.raises(ValueError):
            scan(Family.AXISYM, 0, (), [0.0, 1.0], opts=coarse)

    def test_parallel_matches_serial(self, coarse):
        grid = np.linspace(0.0, 1.0, 5)
        serial = scan(Family.AXISYM, 0, (1,), grid, opts=coarse, jobs=1)
        parallel = scan(Family.AXISYM, 0, (1,), grid, opts=coarse, jobs=2)
        assert np.array_equal(serial.values, parallel.values)
        assert np.array_equal(serial.errors, parallel.errors)

    def test_scan_error_carries_tau(self, coarse, monkeypatch):
        import magband.bandfuncs as bf

        orig = bf._two_mesh_values

        def failing(spec, k, opts, mesh=None):
            if spec.tau == 1.0:
                raise RuntimeError("synthetic failure")
            return orig(spec, k, opts, mesh)

        monkeypatch.setattr(bf, "_two_mesh_values", failing)
        with pytest.raises(ScanError) as info:
            bf.scan(Family.AXISYM, 0, (1,), np.array([0.0, 1.0]), opts=coarse)
        assert info.value.tau == 1.0

    def test_mismatched_m_rejected_upfront(self, coarse):
        with pytest.raises(ValueError):
            scan(Family.DEGENNES_NEUMANN, 3, (1,), [0.0, 1.0], opts=coarse)

    def test_neumann_scan_with_dh(self, coarse):
        grid = np.array([0.5, 1.0])
        result = scan(Family.DEGENNES_NEUMANN, 0, (1,), grid, with_derivatives=True, opts=coarse)
        assert result.derivatives is not None
        assert result.derivatives[0, 0] < 0.0  # decreasing branch below xi0
