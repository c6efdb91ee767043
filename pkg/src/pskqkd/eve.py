"""Eve's Holevo information under the beam-splitting attack.

Eve's states ``|eps_k> = |sqrt(1-eta) alpha_k>`` share the ``2 pi / N``
phase symmetry of the alphabet, so in the Fourier basis ``{|m>}`` they read
``|eps_k> = sum_m c_m exp(2 pi i k m / N) |m>`` and their uniform mixture is
diagonal with eigenvalues ``|c_m|^2``.  The ``|c_m|^2`` are the inverse DFT
of the overlap sequence ``<eps_N|eps_k>``.

Index convention: ``weights[m-1]`` holds ``|c_m|^2`` for ``m = 1..N``;
``m = N`` is the zero-frequency (vacuum-like) component.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .information import _posterior_and_log_marginal, shannon_entropy
from .states import TWO_PI, ProtocolParams, _check_index

CLAMP_TOL = 1e-8
_IMAG_TOL = 1e-10
_TRUNCATE_BELOW = 1e-15
_CHUNK = 512


@dataclass(frozen=True)
class SpectralWeights:
    weights: np.ndarray
    coeffs: np.ndarray

    @property
    def entropy(self) -> float:
        return float(shannon_entropy(self.weights))


@dataclass(frozen=True)
class EveConditionedMatrix:
    entries: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return _clamped_eigenvalues(self.entries)

    @property
    def entropy(self) -> float:
        return float(shannon_entropy(self.eigenvalues()))


def eve_overlap(k: int, params: ProtocolParams) -> complex:
    """``<eps_N|eps_k>`` for Eve's share of letters ``N`` and ``k``."""
    _check_index(k, params)
    if k == params.letters:
        return 1.0 + 0.0j
    phase = np.exp(1j * TWO_PI * k / params.letters)
    return complex(np.exp(-params.eve_photons * (1.0 - phase)))


def _overlap_sequence(params: ProtocolParams) -> np.ndarray:
    n = np.arange(params.letters)
    seq = np.exp(-params.eve_photons * (1.0 - np.exp(1j * TWO_PI * n / params.letters)))
    seq[0] = 1.0
    return seq


def spectral_weights(params: ProtocolParams) -> SpectralWeights:
    """Eigenvalues ``|c_m|^2`` of Eve's unconditional state.

    Raises :class:`NumericalError` if a weight is more negative than rounding
    noise allows.
    """
    n = params.letters
    # |c_m|^2 = (1/N) sum_n exp(-2 pi i m n / N) <eps_N|eps_n>, m = 1..N
    spec = np.roll(np.fft.fft(_overlap_sequence(params)), -1) / n
    if np.max(np.abs(spec.imag)) > _IMAG_TOL:
        raise NumericalError(f"spectral weights have imaginary part {np.max(np.abs(spec.imag)):.3e}")
    w = spec.real
    if w.min() < -CLAMP_TOL:
        raise NumericalError(f"negative spectral weight {w.min():.3e} for {params}")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    w.setflags(write=False)
    c = np.sqrt(w)
    c.setflags(write=False)
    return SpectralWeights(weights=w, coeffs=c)


def iae_direct(params: ProtocolParams, weights: SpectralWeights | None = None) -> float:
    """Eve's Holevo information on Alice's letter (direct reconciliation)."""
    weights = weights or spectral_weights(params)
    return weights.entropy


def _fourier_posterior(probs: np.ndarray) -> np.ndarray:
    """``P[d] = sum_k p_k exp(2 pi i k d / N)`` for ``d = 0..N-1``."""
    n = probs.shape[-1]
    return n * np.fft.ifft(np.roll(probs, 1, axis=-1), axis=-1)


def _build_matrices(probs: np.ndarray, coeffs: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Conditioned matrices restricted to Fourier modes ``modes`` (values in 1..N).

    ``M_mn = c_m c_n P[(m - n) mod N]``.
    """
    n = probs.shape[-1]
    ft = _fourier_posterior(probs)
    lag = np.mod(modes[:, None] - modes[None, :], n)
    c = coeffs[modes - 1]
    return ft[..., lag] * (c[:, None] * c[None, :])


def eve_conditioned_matrix(beta, params: ProtocolParams,
                           weights: SpectralWeights | None = None) -> EveConditionedMatrix:
    """Eve's state conditioned on Bob's outcome ``beta``, in the ``{|m>}`` basis.

    Equal to ``sum_k p_k(beta) |eps_k><eps_k|``.
    """
    weights = weights or spectral_weights(params)
    probs, _ = _posterior_and_log_marginal(beta, params)
    modes = np.arange(1, params.letters + 1)
    m = _build_matrices(probs, weights.coeffs, modes)
    return EveConditionedMatrix(entries=m)


def _clamped_eigenvalues(mat: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvalsh(mat)
    lo = ev.min() if ev.size else 0.0
    if lo < -CLAMP_TOL:
        raise NumericalError(f"density matrix eigenvalue {lo:.3e} below -{CLAMP_TOL}")
    return np.clip(ev, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits of a Hermitian density matrix (or a stack of them)."""
    out = shannon_entropy(_clamped_eigenvalues(np.asarray(rho)))
    return out


def conditioned_entropies(beta, params: ProtocolParams, weights: SpectralWeights | None = None,
                          probs: np.ndarray | None = None, workers: int = 1) -> np.ndarray:
    """Von Neumann entropy of Eve's conditioned state at every point of ``beta``.

    Fourier modes with ``|c_m|^2`` below 1e-15 are dropped: their rows and
    columns are bounded by ``c_m`` and shift the entropy by < 1e-12 bits.
    """
    weights = weights or spectral_weights(params)
    beta = np.asarray(beta, dtype=complex)
    if probs is None:
        probs, _ = _posterior_and_log_marginal(beta, params)
    flat = probs.reshape(-1, params.letters)
    flat_beta = beta.ravel()
    modes = np.flatnonzero(weights.weights > _TRUNCATE_BELOW) + 1
    if modes.size == 1:
        return np.zeros(beta.shape)

    def run(start: int) -> np.ndarray:
        stop = min(start + _CHUNK, flat.shape[0])
        mats = _build_matrices(flat[start:stop], weights.coeffs, modes)
        try:
            ev = np.linalg.eigvalsh(mats)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"eigensolver failed near beta={flat_beta[start]!r} ({params}): {exc}") from exc
        bad = ev.min(axis=-1) < -CLAMP_TOL
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise NumericalError(
                f"negative eigenvalue {ev[i].min():.3e} at beta={flat_beta[start + i]!r} ({params})")
        return shannon_entropy(np.clip(ev, 0.0, None))

    starts = range(0, flat.shape[0], _CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    out = np.concatenate(parts) if parts else np.zeros(0)
    return out.reshape(beta.shape)


def ibe_pointwise(beta, params: ProtocolParams, weights: SpectralWeights | None = None):
    """Eve's Holevo information on Bob's outcome (reverse reconciliation).

    Eve knows ``beta`` up to a ``2 pi / N`` rotation; all rotated conditioned
    states share one spectrum, so the state at ``beta`` itself is used.
    """
    weights = weights or spectral_weights(params)
    out = weights.entropy - conditioned_entropies(beta, params, weights)
    return out[()] if np.ndim(out) == 0 else out
