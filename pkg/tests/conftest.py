import pytest

from magband.bandfuncs import SolveOptions


@pytest.fixture(scope="session")
def coarse():
    """Cheap resolution for unit tests; Richardson keeps it accurate."""
    return SolveOptions(n_cells=600)


@pytest.fixture(scope="session")
def medium():
    return SolveOptions(n_cells=1200)
