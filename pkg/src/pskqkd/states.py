"""Coherent-state alphabet, beam splitter and nearest-letter decoding.

Phase-space points are plain Python/numpy complex numbers ``x + 1j*p`` in
shot-noise units.  Letters are indexed ``1..N`` and letter ``N`` sits at
phase 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ProtocolParams:
    """Alphabet size ``letters``, amplitude ``amplitude`` and channel ``transmittance``.

    The mean photon number per pulse is ``amplitude**2``.
    """

    letters: int
    amplitude: float
    transmittance: float

    def __post_init__(self):
        if int(self.letters) != self.letters or self.letters < 2:
            raise ValueError(f"letters must be an integer >= 2, got {self.letters!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValueError(f"amplitude must be finite and >= 0, got {self.amplitude!r}")
        if not (0.0 <= self.transmittance <= 1.0):
            raise ValueError(f"transmittance must lie in [0, 1], got {self.transmittance!r}")
        object.__setattr__(self, "letters", int(self.letters))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "transmittance", float(self.transmittance))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, self.letters + 1)

    @property
    def alphabet(self) -> np.ndarray:
        """All ``alpha_k`` for ``k = 1..N`` as a complex array."""
        return self.amplitude * np.exp(1j * TWO_PI * self.indices / self.letters)

    @property
    def bob_amplitude(self) -> float:
        return math.sqrt(self.transmittance) * self.amplitude

    @property
    def eve_photons(self) -> float:
        """Mean photon number leaked to Eve, ``a**2 (1 - eta)``."""
        return self.amplitude**2 * (1.0 - self.transmittance)

    def replace(self, **changes) -> "ProtocolParams":
        fields = dict(letters=self.letters, amplitude=self.amplitude,
                      transmittance=self.transmittance)
        fields.update(changes)
        return ProtocolParams(**fields)


class SplitStates(NamedTuple):
    bob: complex
    eve: complex


def _check_index(k: int, params: ProtocolParams) -> None:
    if int(k) != k or not 1 <= k <= params.letters:
        raise ValueError(f"letter index must be in 1..{params.letters}, got {k!r}")


def alphabet_state(k: int, params: ProtocolParams) -> complex:
    """Amplitude ``a exp(2 pi i k / N)`` of letter ``k``."""
    _check_index(k, params)
    if k == params.letters:
        return complex(params.amplitude, 0.0)
    phase = TWO_PI * k / params.letters
    return complex(params.amplitude * math.cos(phase), params.amplitude * math.sin(phase))


def coherent_overlap(alpha, beta):
    """Inner product ``<alpha|beta>`` of two coherent states."""
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    out = np.exp(-0.5 * np.abs(alpha) ** 2 - 0.5 * np.abs(beta) ** 2 + np.conj(alpha) * beta)
    return out[()] if out.ndim == 0 else out


def beam_split(k: int, params: ProtocolParams) -> SplitStates:
    alpha = alphabet_state(k, params)
    eta = params.transmittance
    return SplitStates(bob=math.sqrt(eta) * alpha, eve=math.sqrt(1.0 - eta) * alpha)


def decode(beta, params: ProtocolParams):
    """Letter whose phase is angularly closest to ``arg(beta)``.

    Maximizing ``|<alpha_l|beta>|^2`` over letters of equal modulus is the
    same as picking the nearest phase sector.  On a sector boundary the
    smaller index wins; the origin decodes to 1.
    """
    n = params.letters
    beta = np.asarray(beta, dtype=complex)
    u = np.mod(np.angle(beta), TWO_PI) * (n / TWO_PI)
    lower = np.floor(u)
    frac = u - lower
    to_letter = lambda j: (np.mod(j - 1, n) + 1).astype(int)  # noqa: E731
    lo_idx, hi_idx = to_letter(lower), to_letter(lower + 1)
    out = np.where(frac < 0.5, lo_idx, hi_idx)
    tie = np.abs(frac - 0.5) < _TIE_TOL * max(1.0, n)
    out = np.where(tie, np.minimum(lo_idx, hi_idx), out)
    out = np.where(beta == 0, 1, out)
    return int(out) if out.ndim == 0 else out
