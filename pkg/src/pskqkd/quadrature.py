"""Polar quadrature over phase space, reduced to one angular sector.

Every integrand used here is invariant under rotation by ``2 pi / N``, so
the plane integral is ``N`` times the integral over the sector
``0 <= theta < 2 pi / N``.  The radial direction uses Gauss-Legendre nodes
on ``[0, r_max]``, the angular one the midpoint rule (spectrally accurate
for periodic integrands).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import NumericalError
from .states import TWO_PI, ProtocolParams

TAIL_SIGMAS = 6.0


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureGrid:
    radial_nodes: int = 96
    angular_nodes: int = 64
    r_max: float | None = None
    convergence_target: float = 1e-5
    rule: str = "gauss-legendre"

    def __post_init__(self):
        if self.radial_nodes < 32:
            raise ValueError("radial_nodes must be >= 32")
        if self.angular_nodes < 16:
            raise ValueError("angular_nodes must be >= 16")
        if self.rule != "gauss-legendre":
            raise ValueError(f"unknown radial rule {self.rule!r}")

    def radius(self, params: ProtocolParams) -> float:
        floor = params.bob_amplitude + TAIL_SIGMAS
        if self.r_max is None:
            return floor
        if self.r_max < floor:
            raise ValueError(f"r_max={self.r_max} is below sqrt(eta)*a + 6 = {floor:.6g}")
        return float(self.r_max)

    def refined(self) -> "QuadratureGrid":
        """Same grid with both node counts doubled (half the step size)."""
        return replace(self, radial_nodes=2 * self.radial_nodes,
                       angular_nodes=2 * self.angular_nodes)

    def radial(self, params: ProtocolParams, r_lo: float = 0.0, r_hi: float | None = None):
        """Radial nodes and weights (Jacobian ``r`` included) on ``[r_lo, r_hi]``."""
        r_hi = self.radius(params) if r_hi is None else r_hi
        x, w = _gauss_legendre(self.radial_nodes)
        half = 0.5 * (r_hi - r_lo)
        r = r_lo + half * (x + 1.0)
        return r, w * half * r

    def angles(self, params: ProtocolParams, half: bool = False):
        """Midpoint angular nodes over one sector and the weight of each.

        With ``half=True`` only the first half of the nodes is returned, each
        with doubled weight; valid for integrands that are also symmetric
        under ``beta -> conj(beta)``.
        """
        n = self.angular_nodes
        width = TWO_PI / params.letters
        theta = (np.arange(n) + 0.5) * (width / n)
        wt = np.full(n, width / n)
        if half and n % 2 == 0:
            theta, wt = theta[: n // 2], 2.0 * wt[: n // 2]
        return theta, wt

    def nodes(self, params: ProtocolParams, half: bool = False):
        """Flattened complex nodes and plane-integral weights (factor ``N`` included)."""
        r, wr = self.radial(params)
        theta, wt = self.angles(params, half=half)
        beta = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
        weights = (params.letters * wr[:, None] * wt[None, :]).ravel()
        return beta, weights


def integrate_phase_space(f, params: ProtocolParams, grid: QuadratureGrid | None = None,
                          check_symmetry: bool = True) -> float:
    """Integrate a rotation-invariant ``f(beta)`` over the plane.

    ``f`` must accept a complex array and return an array of the same shape.
    """
    grid = grid or QuadratureGrid()
    if check_symmetry:
        probe = np.array([0.37 + 0.21j, -0.8 + 1.3j, 1.9 - 0.4j]) * max(1.0, params.bob_amplitude)
        rot = np.exp(1j * TWO_PI / params.letters)
        a, b = np.asarray(f(probe), float), np.asarray(f(probe * rot), float)
        if not np.allclose(a, b, rtol=1e-8, atol=1e-12):
            raise ValueError("integrand is not invariant under rotation by 2*pi/N")
    beta, weights = grid.nodes(params)
    vals = np.asarray(f(beta), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise NumericalError(f"non-finite integrand at beta={beta[bad][0]!r}")
    return float(np.sum(weights * vals))


def tail_mass(params: ProtocolParams, r_max: float) -> float:
    """Upper bound on the outcome probability outside radius ``r_max``."""
    d = max(r_max - params.bob_amplitude, 0.0)
    return math.exp(-d * d)
