"""Figure rendering for scan and fit reports.

All entry points write image files (format inferred from the extension)
and never open an interactive window; the Agg backend is forced before
pyplot is first imported so the CLI works headless.
"""

from __future__ import annotations

import numpy as np

from .analysis import AsymptoticFit
from .bandfuncs import ScanResult

__all__ = ["save_band_figure", "save_gap_figure", "save_fit_figure"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_band_figure(
    result: ScanResult, path: str, constants: dict[str, float] | None = None
) -> None:
    """Plot the scanned band curves, optionally with constant overlays."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, level in enumerate(result.levels):
        ax.plot(result.tau_grid, result.values[i], label=f"level {level}")
    for name, value in (constants or {}).items():
        ax.axhline(value, linestyle="--", linewidth=1.0, label=f"{name} = {value:.4f}")
    ax.set_xlabel("tau")
    ax.set_ylabel("band value")
    ax.set_title(f"{result.family.value} bands" + (f", m={result.m}" if result.m else ""))
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_gap_figure(tau_grid: np.ndarray, series: np.ndarray, path: str) -> None:
    """Plot the criterion series zeta2 - 3 zeta1 over the scanned grid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(tau_grid, series)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("tau")
    ax.set_ylabel("zeta2 - 3 zeta1")
    ax.set_title("spectral-gap criterion series")
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fit_figure(
    fit: AsymptoticFit, taus: np.ndarray, values: np.ndarray, path: str
) -> None:
    """Plot sampled band values against the fitted large-tau model."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(taus, values, "o", label="band samples")
    dense = np.linspace(taus[0], taus[-1], 200)
    model = fit.fitted_c0 + fit.fitted_c2 / dense**2 + fit.fitted_c4 / dense**4
    ax.plot(dense, model, "-", label=f"c0 + c2/tau^2 + c4/tau^4, c2={fit.fitted_c2:.4f}")
    ax.set_xlabel("tau")
    ax.set_ylabel("band value")
    ax.set_title(f"tail fit, level {fit.level}, m={fit.m}")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
