"""Heterodyne statistics and Alice-Bob mutual information.

Bob's outcome density for letter ``k`` is ``exp(-|beta - sqrt(eta) alpha_k|^2) / pi``,
i.e. each quadrature is Gaussian with variance 1/2 around the attenuated
signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import ProtocolParams, _check_index

_NEG_TOL = 1e-12


@dataclass(frozen=True)
class PosteriorDistribution:
    """``probs[..., l-1]`` is the probability that letter ``l`` was sent given ``at``."""

    probs: np.ndarray
    at: complex | np.ndarray


def _log_likelihoods(beta, params: ProtocolParams) -> np.ndarray:
    """``-|beta - beta_k|^2`` for every letter, shape ``beta.shape + (N,)``."""
    beta = np.asarray(beta, dtype=complex)
    centers = math.sqrt(params.transmittance) * params.alphabet
    diff = beta[..., None] - centers
    return -(diff.real**2 + diff.imag**2)


def _posterior_and_log_marginal(beta, params: ProtocolParams):
    expo = _log_likelihoods(beta, params)
    top = expo.max(axis=-1, keepdims=True)
    w = np.exp(expo - top)
    total = w.sum(axis=-1, keepdims=True)
    probs = w / total
    log_marg = (top + np.log(total))[..., 0] - math.log(math.pi * params.letters)
    return probs, log_marg


def likelihood(beta, k: int, params: ProtocolParams):
    """Density of heterodyne outcome ``beta`` given letter ``k``."""
    _check_index(k, params)
    center = math.sqrt(params.transmittance) * params.alphabet[k - 1]
    d = np.asarray(beta, dtype=complex) - center
    out = np.exp(-(d.real**2 + d.imag**2)) / math.pi
    return out[()] if out.ndim == 0 else out


def marginal(beta, params: ProtocolParams):
    """Unconditional outcome density, averaged over equiprobable letters."""
    _, log_marg = _posterior_and_log_marginal(beta, params)
    out = np.exp(log_marg)
    return out[()] if out.ndim == 0 else out


def posterior(beta, params: ProtocolParams) -> PosteriorDistribution:
    probs, _ = _posterior_and_log_marginal(beta, params)
    return PosteriorDistribution(probs=probs, at=beta)


def shannon_entropy(probs, axis: int = -1):
    """Entropy in bits along ``axis``, with ``0 log 0 = 0``."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < -_NEG_TOL):
        raise ValueError(f"probabilities must be nonnegative, min was {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    safe = np.where(p > 0, p, 1.0)
    out = -np.sum(p * np.log2(safe), axis=axis)
    out = np.maximum(out, 0.0)
    return out[()] if np.ndim(out) == 0 else out


def _iab_from_probs(probs: np.ndarray, letters: int) -> np.ndarray:
    cap = math.log2(letters)
    return np.clip(cap - shannon_entropy(probs), 0.0, cap)


def iab_pointwise(beta, params: ProtocolParams):
    """Bits Bob holds about Alice's letter once he has measured ``beta``."""
    probs, _ = _posterior_and_log_marginal(beta, params)
    out = _iab_from_probs(probs, params.letters)
    return out[()] if np.ndim(out) == 0 else out


def iab_total(params: ProtocolParams, grid=None) -> float:
    """Average of :func:`iab_pointwise` over the outcome distribution."""
    from .quadrature import QuadratureGrid

    grid = grid or QuadratureGrid()
    nodes, weights = grid.nodes(params)
    probs, log_marg = _posterior_and_log_marginal(nodes, params)
    return float(np.sum(weights * np.exp(log_marg) * _iab_from_probs(probs, params.letters)))
