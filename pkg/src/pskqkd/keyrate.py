"""Secret key rates for direct and reverse reconciliation.

The rate is the outcome-averaged difference between Bob's and Eve's
information.  With postselection Bob keeps only outcomes where that
difference is positive, so the postselected rate is the integral of the
positive part of the pointwise difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eve import SpectralWeights, conditioned_entropies, spectral_weights
from .information import _iab_from_probs, _posterior_and_log_marginal
from .quadrature import QuadratureGrid
from .states import TWO_PI, ProtocolParams

DIRECT = "direct"
REVERSE = "reverse"
MODES = (DIRECT, REVERSE)

PSA_SCAN_STEP = 0.05
PSA_RADIUS_TOL = 1e-4
_RR_ACCEPT_TOL = 1e-12


@dataclass(frozen=True)
class KeyRateResult:
    """Key rate in bits per transmission, plus diagnostics.

    ``raw_rate`` is the unpostselected integral and may be negative;
    ``rate`` equals ``raw_rate`` without postselection and the integral over
    the accepted region with it.
    """

    rate: float
    mode: str
    postselected: bool
    accepted_fraction: float
    raw_rate: float
    iab: float
    eve_information: float
    normalization: float
    r_max: float
    params: ProtocolParams
    grid: QuadratureGrid = field(repr=False)
    positive_part_rate: float | None = None
    star_shaped: bool | None = None
    convergence_delta: float | None = None

    @property
    def operational_rate(self) -> float:
        return max(self.rate, 0.0)

    @property
    def converged(self) -> bool | None:
        if self.convergence_delta is None:
            return None
        return self.convergence_delta < self.grid.convergence_target

    def as_dict(self) -> dict:
        p = self.params
        return {
            "letters": p.letters,
            "amplitude": p.amplitude,
            "transmittance": p.transmittance,
            "mode": self.mode,
            "postselected": self.postselected,
            "rate": self.rate,
            "operational_rate": self.operational_rate,
            "raw_rate": self.raw_rate,
            "iab": self.iab,
            "eve_information": self.eve_information,
            "accepted_fraction": self.accepted_fraction,
            "normalization": self.normalization,
            "r_max": self.r_max,
            "radial_nodes": self.grid.radial_nodes,
            "angular_nodes": self.grid.angular_nodes,
            "convergence_target": self.grid.convergence_target,
            "positive_part_rate": self.positive_part_rate,
            "convergence_delta": self.convergence_delta,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class PostselectionBoundary:
    """Threshold radius ``radii[i]`` along angle ``angles[i]`` of one sector.

    Outcomes with ``|beta| >= r*`` are kept.  ``inf`` marks angles with no
    crossing below ``r_max``.
    """

    angles: np.ndarray
    radii: np.ndarray
    params: ProtocolParams
    eve_information: float
    r_max: float
    star_shaped: bool = True

    @property
    def empty(self) -> bool:
        return bool(np.all(np.isinf(self.radii)))

    def full_star(self) -> tuple[np.ndarray, np.ndarray]:
        """Angles and radii replicated over all ``N`` sectors."""
        n = self.params.letters
        shifts = TWO_PI * np.arange(n) / n
        theta = (self.angles[None, :] + shifts[:, None]).ravel()
        return theta, np.tile(self.radii, n)


def _rate_pieces(params: ProtocolParams, grid: QuadratureGrid, mode: str,
                 weights: SpectralWeights, workers: int = 1):
    """Weighted density, I_AB and Eve's information at the quadrature nodes."""
    beta, w = grid.nodes(params, half=True)
    probs, log_marg = _posterior_and_log_marginal(beta, params)
    dens = w * np.exp(log_marg)
    iab = _iab_from_probs(probs, params.letters)
    if mode == DIRECT:
        eve = np.full_like(iab, weights.entropy)
    else:
        eve = weights.entropy - conditioned_entropies(beta, params, weights, probs=probs,
                                                      workers=workers)
    return dens, iab, eve


def keyrate(params: ProtocolParams, mode: str = DIRECT, postselect: bool | None = None,
            grid: QuadratureGrid | None = None, check_convergence: bool = False,
            workers: int = 1) -> KeyRateResult:
    """Key rate for either reconciliation direction.

    ``postselect`` defaults to on for direct and off for reverse
    reconciliation.  The postselected direct rate is integrated radially
    outward from the acceptance boundary at each angular node, which keeps
    the kink of the positive part out of the quadrature; the plain
    positive-part grid sum is kept as ``positive_part_rate`` for
    cross-checking and used as a fallback when some ray leaves the accepted
    region again.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if postselect is None:
        postselect = mode == DIRECT
    grid = grid or QuadratureGrid()
    weights = spectral_weights(params)
    dens, iab, eve = _rate_pieces(params, grid, mode, weights, workers)
    gain = iab - eve
    raw = float(np.sum(dens * gain))
    positive = float(np.sum(dens * np.maximum(gain, 0.0)))
    norm = float(np.sum(dens))
    star_shaped = None
    if not postselect:
        rate, accepted = raw, norm
    elif mode == DIRECT:
        theta, _ = grid.angles(params, half=True)
        boundary = psa_boundary(params, grid, angles=theta)
        star_shaped = boundary.star_shaped
        if star_shaped:
            rate, accepted = psa_masked_rate(params, grid, boundary)
        else:
            rate, accepted = positive, float(np.sum(dens[gain >= 0.0]))
    else:
        rate, accepted = positive, float(np.sum(dens[gain >= -_RR_ACCEPT_TOL]))
    delta = None
    if check_convergence:
        fine = keyrate(params, mode, postselect, grid.refined(), workers=workers)
        delta = abs(fine.rate - rate)
    return KeyRateResult(
        rate=rate,
        mode=mode,
        postselected=bool(postselect),
        accepted_fraction=min(max(accepted, 0.0), 1.0),
        raw_rate=raw,
        iab=float(np.sum(dens * iab)),
        eve_information=float(np.sum(dens * eve) / norm) if mode == REVERSE else weights.entropy,
        normalization=norm,
        r_max=grid.radius(params),
        params=params,
        grid=grid,
        positive_part_rate=positive,
        star_shaped=star_shaped,
        convergence_delta=delta,
    )


def keyrate_direct(params: ProtocolParams, grid: QuadratureGrid | None = None,
                   postselect: bool = True, **kw) -> KeyRateResult:
    return keyrate(params, DIRECT, postselect, grid, **kw)


def keyrate_reverse(params: ProtocolParams, grid: QuadratureGrid | None = None,
                    postselect: bool = False, **kw) -> KeyRateResult:
    return keyrate(params, REVERSE, postselect, grid, **kw)


def _iab_on_rays(params: ProtocolParams, radii: np.ndarray, angles: np.ndarray) -> np.ndarray:
    beta = radii * np.exp(1j * angles)
    probs, _ = _posterior_and_log_marginal(beta, params)
    return _iab_from_probs(probs, params.letters)


def psa_boundary(params: ProtocolParams, grid: QuadratureGrid | None = None,
                 angles=None) -> PostselectionBoundary:
    """Smallest radius along each angle where ``I_AB >= I_AE``.

    A coarse radial scan (step 0.05) brackets the first crossing, then
    bisection narrows it to 1e-4.
    """
    grid = grid or QuadratureGrid()
    iae = spectral_weights(params).entropy
    if angles is None:
        angles, _ = grid.angles(params)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    r_max = grid.radius(params)
    scan = np.arange(0.0, r_max + 0.5 * PSA_SCAN_STEP, PSA_SCAN_STEP)
    vals = _iab_on_rays(params, scan[None, :], angles[:, None])
    hit = vals >= iae
    found = hit.any(axis=1)
    first = np.argmax(hit, axis=1)
    after = np.arange(scan.size)[None, :] >= first[:, None]
    star_shaped = bool(np.all(hit[found] | ~after[found]))
    radii = np.full(angles.shape, np.inf)
    at_zero = found & (first == 0)
    radii[at_zero] = 0.0
    todo = found & (first > 0)
    if todo.any():
        lo = scan[first[todo] - 1]
        hi = scan[first[todo]]
        th = angles[todo]
        n_iter = int(math.ceil(math.log2(PSA_SCAN_STEP / PSA_RADIUS_TOL))) + 1
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            ok = _iab_on_rays(params, mid, th) >= iae
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        radii[todo] = hi
    return PostselectionBoundary(angles=angles, radii=radii, params=params,
                                 eve_information=iae, r_max=r_max, star_shaped=star_shaped)


def psa_masked_rate(params: ProtocolParams, grid: QuadratureGrid | None = None,
                    boundary: PostselectionBoundary | None = None) -> tuple[float, float]:
    """Postselected direct-reconciliation rate and accepted fraction via the boundary.

    Integrates ``p(beta) (I_AB - I_AE)`` radially from ``r*(theta)`` to
    ``r_max`` at each angular node, so the integrand is smooth and the kink
    of the positive part never enters the quadrature.  Assumes each ray is
    accepted from its threshold outward.
    """
    grid = grid or QuadratureGrid()
    theta, wt = grid.angles(params, half=True)
    if boundary is None:
        boundary = psa_boundary(params, grid, angles=theta)
    if not np.array_equal(boundary.angles, theta):
        raise ValueError("boundary must be sampled at the grid's half-sector angular nodes")
    r_max = grid.radius(params)
    rate = 0.0
    accepted = 0.0
    for th, w_th, r_star in zip(theta, wt, boundary.radii):
        if not np.isfinite(r_star) or r_star >= r_max:
            continue
        r, wr = grid.radial(params, r_lo=r_star, r_hi=r_max)
        beta = r * np.exp(1j * th)
        probs, log_marg = _posterior_and_log_marginal(beta, params)
        dens = params.letters * w_th * wr * np.exp(log_marg)
        rate += float(np.sum(dens * (_iab_from_probs(probs, params.letters) - boundary.eve_information)))
        accepted += float(np.sum(dens))
    return rate, accepted
