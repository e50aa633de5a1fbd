"""Hermite-function ladder algebra for the large-tau perturbation oracle.

After centering the axisymmetric well at its minimum and rescaling by
h = 1/tau, the operator splits as H0 + h H1 + h^2 H2 with

    H0 = -d^2/dx^2 + x^2,   H1 = -2 d/dx x d/dx - x^3,   H2 = (5/4) x^4,

acting on the whole line.  This module carries the exact Rayleigh-
Schrodinger bookkeeping for that splitting in the basis of normalized
Hermite functions Psi_n (1-indexed: Psi_1 is the Gaussian ground state).
The first-order energy vanishes by parity and the second-order energy is
-1/4 for every level, which is what fixes the two-term band asymptotics
2n - 1 - 1/(4 tau^2).

Coefficients are assembled from the two ladder identities

    x Psi_n  = sqrt((n-1)/2) Psi_{n-1} + sqrt(n/2) Psi_{n+1},
    Psi_n'   = sqrt((n-1)/2) Psi_{n-1} - sqrt(n/2) Psi_{n+1},

with products of square roots of integers kept exact (rational radicands)
so the -1/4 identity holds to machine precision rather than to quadrature
accuracy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

__all__ = [
    "Ladder",
    "HermiteExpansion",
    "CorrectorCoefficients",
    "E2Result",
    "psi",
    "ladder_apply",
    "h1_expansion",
    "corrector_coefficients",
    "e2",
    "quasimode_energy",
    "rescaled_well_potential",
]


class Ladder(enum.Enum):
    MULTIPLY_X = "multiply_x"
    DIFFERENTIATE = "differentiate"


@dataclass(frozen=True)
class HermiteExpansion:
    """Finite combination sum_k coeff[k] * Psi_k with levels k >= 1."""

    coefficients: dict[int, float]

    def __post_init__(self) -> None:
        if any(k < 1 for k in self.coefficients):
            raise ValueError("Hermite levels are 1-indexed")

    def coefficient(self, k: int) -> float:
        return self.coefficients.get(k, 0.0)

    def apply(self, kind: Ladder) -> "HermiteExpansion":
        """Apply x* or d/dx termwise through the ladder identities."""
        out: dict[int, float] = {}
        for k, c in self.coefficients.items():
            down = math.sqrt((k - 1) / 2.0)
            up = math.sqrt(k / 2.0)
            if kind is Ladder.DIFFERENTIATE:
                up = -up
            if k - 1 >= 1:
                out[k - 1] = out.get(k - 1, 0.0) + c * down
            out[k + 1] = out.get(k + 1, 0.0) + c * up
        return HermiteExpansion({k: c for k, c in out.items() if c != 0.0})

    def scaled(self, factor: float) -> "HermiteExpansion":
        return HermiteExpansion({k: factor * c for k, c in self.coefficients.items()})

    def plus(self, other: "HermiteExpansion") -> "HermiteExpansion":
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out.get(k, 0.0) + c
        return HermiteExpansion({k: c for k, c in out.items() if c != 0.0})

    def evaluate(self, x) -> np.ndarray:
        total = np.zeros_like(np.asarray(x, dtype=float))
        for k, c in self.coefficients.items():
            total = total + c * psi(k, x)
        return total


@dataclass(frozen=True)
class CorrectorCoefficients:
    """Closed-form expansion coefficients of -H1 Psi_n on levels n+-1, n+-3:

    a_n = 3 * 2^{-3/2} sqrt((n-1)(n-2)(n-3))   (level n-3)
    b_n = 2^{-3/2} (n-1) sqrt(n-1)             (level n-1)
    c_n = 2^{-3/2} n sqrt(n)                   (level n+1)
    d_n = 3 * 2^{-3/2} sqrt(n(n+1)(n+2))       (level n+3)
    """

    a_n: float
    b_n: float
    c_n: float
    d_n: float


class E2Result(NamedTuple):
    value: float
    h2_term: float   # <H2 Psi_n, Psi_n> = (15/16)(2n^2 - 2n + 1)
    h1_term: float   # <H1 u1, Psi_n> = a^2/6 + b^2/2 - c^2/2 - d^2/6


def psi(n: int, x) -> np.ndarray | float:
    """n-th normalized Hermite function, Psi_1(x) = pi^{-1/4} exp(-x^2/2).

    Evaluated by the stable three-term recurrence on the normalized
    functions; accepts scalars or arrays.
    """
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    xa = np.asarray(x, dtype=float)
    prev = np.zeros_like(xa)
    cur = math.pi ** -0.25 * np.exp(-xa * xa / 2.0)
    for k in range(1, n):
        nxt = math.sqrt(2.0 / k) * xa * cur - math.sqrt((k - 1) / k) * prev
        prev, cur = cur, nxt
    return cur if cur.ndim else float(cur)


def ladder_apply(kind: Ladder, n: int) -> HermiteExpansion:
    """Expansion of x Psi_n (multiply_x) or Psi_n' (differentiate)."""
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    return HermiteExpansion({n: 1.0}).apply(Ladder(kind))


def corrector_coefficients(n: int) -> CorrectorCoefficients:
    """Closed forms for the -H1 Psi_n expansion coefficients."""
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    s = 2.0 ** -1.5
    a = 3.0 * s * math.sqrt(max((n - 1) * (n - 2) * (n - 3), 0))
    b = s * (n - 1) * math.sqrt(n - 1)
    c = s * n * math.sqrt(n)
    d = 3.0 * s * math.sqrt(n * (n + 1) * (n + 2))
    return CorrectorCoefficients(a, b, c, d)


def h1_expansion(n: int) -> tuple[HermiteExpansion, CorrectorCoefficients]:
    """Expansion of -H1 Psi_n over levels n-3, n-1, n+1, n+3.

    Built symbolically as (2 d/dx x d/dx + x^3) Psi_n through repeated
    ladder applications and verified against the closed forms; a mismatch
    would indicate a broken ladder algebra and raises.
    """
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    base = HermiteExpansion({n: 1.0})
    dxd = base.apply(Ladder.DIFFERENTIATE).apply(Ladder.MULTIPLY_X).apply(Ladder.DIFFERENTIATE)
    x3 = base.apply(Ladder.MULTIPLY_X).apply(Ladder.MULTIPLY_X).apply(Ladder.MULTIPLY_X)
    expansion = dxd.scaled(2.0).plus(x3)

    closed = corrector_coefficients(n)
    expected = {n - 3: closed.a_n, n - 1: closed.b_n, n + 1: closed.c_n, n + 3: closed.d_n}
    for level, coeff in expected.items():
        got = expansion.coefficient(level) if level >= 1 else 0.0
        if abs(got - coeff) > 1e-12 * max(1.0, abs(coeff)):
            raise RuntimeError(
                f"ladder expansion of -H1 Psi_{n} disagrees with the closed form "
                f"at level {level}: {got!r} vs {coeff!r}"
            )
    stray = set(expansion.coefficients) - {k for k in expected if k >= 1}
    if any(abs(expansion.coefficient(k)) > 1e-12 for k in stray):
        raise RuntimeError(f"-H1 Psi_{n} has unexpected levels {sorted(stray)}")
    return expansion, closed


def e2(n: int) -> E2Result:
    """Second-order energy correction; equals -1/4 for every level.

    The two addends are <H2 Psi_n, Psi_n> = (15/16)(2n^2 - 2n + 1) and
    <H1 u1, Psi_n> = a^2/6 + b^2/2 - c^2/2 - d^2/6 where u1 is the
    first-order corrector.  All squared coefficients are rational, so the
    sum is evaluated in exact arithmetic.
    """
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    h2 = Fraction(15, 16) * (2 * n * n - 2 * n + 1)
    a2 = Fraction(9, 8) * (n - 1) * (n - 2) * (n - 3)
    b2 = Fraction((n - 1) ** 3, 8)
    c2 = Fraction(n**3, 8)
    d2 = Fraction(9, 8) * n * (n + 1) * (n + 2)
    h1 = a2 / 6 + b2 / 2 - c2 / 2 - d2 / 6
    return E2Result(float(h2 + h1), float(h2), float(h1))


def quasimode_energy(n: int, tau: float) -> float:
    """Two-term band energy 2n - 1 - 1/(4 tau^2) of the quasi-mode."""
    if n < 1:
        raise ValueError("Hermite levels are 1-indexed")
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    return 2.0 * n - 1.0 - 1.0 / (4.0 * tau * tau)


def rescaled_well_potential(tau: float, x) -> np.ndarray | float:
    """Centered, rescaled well potential tau (sqrt(2x + tau) - sqrt(tau))^2.

    Taylor expansion at 0: x^2 - x^3/tau + 5 x^4 / (4 tau^2) + O(x^5/tau^3),
    the source of the H1/H2 splitting.  Uses the difference-free form
    2x / (sqrt(2x + tau) + sqrt(tau)) to avoid cancellation.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(2.0 * xa + tau < 0.0):
        raise ValueError("potential is defined for 2x + tau >= 0")
    root = 2.0 * xa / (np.sqrt(2.0 * xa + tau) + math.sqrt(tau))
    v = tau * root * root
    return v if v.ndim else float(v)
