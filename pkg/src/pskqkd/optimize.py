"""Amplitude optimization, transmittance sweeps and curve crossings."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .keyrate import DIRECT, keyrate
from .quadrature import QuadratureGrid
from .states import ProtocolParams

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

A_RANGE = (0.05, 5.0)
A_STEP = 0.05
A_TOL = 1e-3
NEAR_BEST = 1e-3
SECONDARY_WINDOW = 1e-4


class BracketError(ValueError):
    """The rate difference has no sign change over the requested bracket."""


@dataclass(frozen=True)
class SweepPoint:
    eta: float
    letters: int
    mode: str
    postselected: bool
    optimal_amplitude: float | None
    rate: float
    accepted_fraction: float = float("nan")
    secondary_maximum: tuple[float, float] | None = None
    error: str | None = None


@dataclass(frozen=True)
class CrossingRecord:
    n_low: int
    n_high: int
    eta_star: float
    bracket: tuple[float, float]
    delta_low: float
    delta_high: float
    residual: float | None = None

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def golden_section_max(f, lo: float, hi: float, tol: float = A_TOL):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns the best evaluated ``(x, f(x))``."""
    a, b = min(lo, hi), max(lo, hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


def _local_maxima(values: np.ndarray) -> list[int]:
    """Indices not below either neighbour and strictly above at least one."""
    n = len(values)
    out = []
    for i in range(n):
        left = values[i - 1] if i > 0 else -np.inf
        right = values[i + 1] if i < n - 1 else -np.inf
        if values[i] >= left and values[i] >= right and values[i] > min(left, right):
            out.append(i)
    return out


def optimize_amplitude(eta: float, letters: int, mode: str = DIRECT,
                       grid: QuadratureGrid | None = None, postselect: bool | None = None,
                       a_range: tuple[float, float] = A_RANGE, step: float = A_STEP,
                       tol: float = A_TOL, workers: int = 1) -> SweepPoint:
    """Maximize the key rate over the signal amplitude at fixed ``eta`` and ``N``.

    Coarse scan on a uniform amplitude grid, then golden-section refinement
    around every coarse local maximum within 1e-3 bits of the best.  If two
    distinct maxima end up within 1e-4 bits, the runner-up is reported as
    ``secondary_maximum``.
    """
    grid = grid or QuadratureGrid()
    if postselect is None:
        postselect = mode == DIRECT
    results = {}

    def rate_at(a: float) -> float:
        a = float(a)
        if a not in results:
            results[a] = keyrate(ProtocolParams(letters, a, eta), mode, postselect, grid,
                                 workers=workers)
        return results[a].rate

    amps = np.round(np.arange(a_range[0], a_range[1] + 0.5 * step, step), 12)
    coarse = np.array([rate_at(a) for a in amps])
    best_i = int(np.argmax(coarse))
    if coarse[best_i] <= 0.0 and postselect:
        return SweepPoint(eta, letters, mode, postselect, None, 0.0, 0.0)

    peaks = [i for i in _local_maxima(coarse)
             if coarse[i] >= coarse[best_i] - NEAR_BEST and (coarse[i] > 0 or not postselect)]
    if best_i not in peaks:
        peaks.insert(0, best_i)
    refined = []
    for i in peaks:
        lo, hi = amps[max(i - 1, 0)], amps[min(i + 1, len(amps) - 1)]
        x, fx = golden_section_max(rate_at, lo, hi, tol)
        if coarse[i] > fx:
            x, fx = float(amps[i]), float(coarse[i])
        refined.append((fx, x))
    refined.sort(reverse=True)
    best_rate, best_a = refined[0]
    secondary = None
    for fx, x in refined[1:]:
        if abs(x - best_a) > 2 * step and best_rate - fx < SECONDARY_WINDOW and fx > 0:
            secondary = (float(x), float(fx))
            break
    best_a = float(best_a)
    res = results[best_a]
    return SweepPoint(eta, letters, mode, postselect, best_a, float(best_rate),
                      res.accepted_fraction, secondary)


def sweep_eta(letters: int, mode: str, eta_grid, grid: QuadratureGrid | None = None,
              postselect: bool | None = None, workers: int = 1, **opt) -> list[SweepPoint]:
    """Amplitude-optimized rate at every transmittance in ``eta_grid``.

    A failing point is returned with ``error`` set and the sweep carries on.
    """
    if postselect is None:
        postselect = mode == DIRECT

    def one(eta: float) -> SweepPoint:
        try:
            return optimize_amplitude(float(eta), letters, mode, grid, postselect, **opt)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            return SweepPoint(float(eta), letters, mode, postselect, None, float("nan"),
                              error=f"{type(exc).__name__}: {exc}")

    etas = [float(e) for e in eta_grid]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, etas))
    return [one(e) for e in etas]


def _optimized_rate(eta: float, letters: int, mode: str, grid, postselect,
                    cache: dict | None, opt: dict) -> float:
    if cache is None:
        return optimize_amplitude(eta, letters, mode, grid, postselect, **opt).rate
    key = (mode, postselect, float(eta), int(letters))
    if key not in cache:
        cache[key] = optimize_amplitude(eta, letters, mode, grid, postselect, **opt).rate
    return cache[key]


def find_crossing(n_low: int, n_high: int, mode: str = DIRECT,
                  bracket: tuple[float, float] = (0.3, 0.95),
                  grid: QuadratureGrid | None = None, postselect: bool | None = None,
                  width: float = 1e-3, verify: bool = True, cache: dict | None = None,
                  **opt) -> CrossingRecord:
    """Transmittance where the optimized rate curves of ``n_low`` and ``n_high`` letters meet.

    Bisection on ``G(n_low) - G(n_high)``, with the amplitude re-optimized at
    every probe.  The final estimate interpolates linearly inside the last
    bracket.  ``cache`` may be shared between calls that use the same grid
    and search options to reuse optimized rates.
    """
    cache = {} if cache is None else cache

    def diff(eta: float) -> float:
        return (_optimized_rate(eta, n_low, mode, grid, postselect, cache, opt)
                - _optimized_rate(eta, n_high, mode, grid, postselect, cache, opt))

    lo, hi = float(bracket[0]), float(bracket[1])
    d_lo, d_hi = diff(lo), diff(hi)
    if not (np.sign(d_lo) * np.sign(d_hi) < 0):
        raise BracketError(
            f"no sign change for N={n_low} vs N={n_high} on [{lo}, {hi}]: "
            f"dG({lo})={d_lo:.6g}, dG({hi})={d_hi:.6g}")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        d_mid = diff(mid)
        if d_mid == 0.0:
            lo = hi = mid
            d_lo = d_hi = 0.0
            break
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi, d_hi = mid, d_mid
    eta_star = lo if hi == lo else lo - d_lo * (hi - lo) / (d_hi - d_lo)
    residual = diff(eta_star) if verify else None
    return CrossingRecord(n_low, n_high, eta_star, (lo, hi), d_lo, d_hi, residual)


def locate_bracket(n_low: int, n_high: int, mode: str, eta_grid,
                   grid: QuadratureGrid | None = None, postselect: bool | None = None,
                   cache: dict | None = None, **opt) -> tuple[float, float]:
    """First interval of ``eta_grid`` over which ``G(n_low) - G(n_high)`` changes sign."""
    etas = sorted(float(e) for e in eta_grid)
    prev = None
    for eta in etas:
        d = (_optimized_rate(eta, n_low, mode, grid, postselect, cache, opt)
             - _optimized_rate(eta, n_high, mode, grid, postselect, cache, opt))
        if prev is not None and np.sign(prev[1]) * np.sign(d) < 0:
            return prev[0], eta
        if d != 0.0:
            prev = (eta, d)
    raise BracketError(f"no sign change for N={n_low} vs N={n_high} over eta in "
                       f"[{etas[0]}, {etas[-1]}]")
