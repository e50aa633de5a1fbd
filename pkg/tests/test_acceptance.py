"""Acceptance suite: every headline number and identity at default resolution.

Each test prints one PASS/FAIL line per criterion (run with ``pytest -s``
to see them) and asserts the documented tolerance.  The shared workspace
memoizes the two minima and the fine scan, so the whole suite runs in a
few minutes on one desktop core.
"""

import pytest

from magband import checks


@pytest.fixture(scope="session")
def ws():
    return checks.Workspace()


def report(number: int, title: str, results) -> None:
    passed = all(r.passed for r in results)
    print(f"\nACCEPTANCE {number:02d} {title}: {'PASS' if passed else 'FAIL'}")
    for r in results:
        print(f"  - {r.describe()}")
    assert passed, f"criterion {number} ({title}) failed"


def test_acceptance_01_laguerre_exactness(ws):
    report(1, "eigenvalues 4n-2 at tau = 0", checks.check_laguerre(ws))


def test_acceptance_02_ground_energy_3d(ws):
    report(2, "3D ground energy and minimizer", checks.check_ground_3d(ws))


def test_acceptance_03_degennes_constants(ws):
    report(3, "de Gennes constants and square relation", checks.check_degennes_constants(ws))


def test_acceptance_04_strict_ordering(ws):
    report(4, "energy ordering and Gaussian bound", checks.check_ordering(ws))


def test_acceptance_05_two_term_asymptotics(ws):
    report(5, "fitted 1/tau^2 coefficients", checks.check_asymptotics(ws))


def test_acceptance_06_derivative_triangle(ws):
    report(6, "derivative formulas agree", checks.check_derivative_triangle(ws))


def test_acceptance_07_virial_identity(ws):
    report(7, "virial split at the minimizer", checks.check_virial(ws))


def test_acceptance_08_gap_criterion_scan(ws):
    report(8, "gap criterion series and curvature bound", checks.check_gap_scan(ws))


def test_acceptance_09_unique_minimum(ws):
    report(9, "unique minimum sign pattern", checks.check_uniqueness(ws))


def test_acceptance_10_interlacing(ws):
    report(10, "whole-line / half-line interlacing", checks.check_interlacing(ws))


def test_acceptance_11_hermite_oracle(ws):
    report(11, "perturbation oracle identities", checks.check_hermite(ws))


def test_acceptance_12_exponential_tails(ws):
    report(12, "de Gennes exponential tails", checks.check_tails(ws))
