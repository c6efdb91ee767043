"""Monte Carlo run of the protocol chain: encode, attenuate, heterodyne, decode.

Randomness comes from Philox4x64 keyed by ``(seed, batch index)``; batch
``b`` covers samples ``[b * batch_size, (b + 1) * batch_size)``.  Normals
use the Box-Muller transform, so a given seed and sample index always map
to the same outcome regardless of batching into threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eve import iae_direct
from .information import _iab_from_probs, _posterior_and_log_marginal, shannon_entropy
from .states import ProtocolParams, decode

POSTSELECTION_MODES = ("off", "direct-psa")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimulationConfig:
    params: ProtocolParams
    samples: int
    seed: int = 0
    postselection: str = "off"
    batch_size: int = 1 << 18

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.postselection not in POSTSELECTION_MODES:
            raise ValueError(f"postselection must be one of {POSTSELECTION_MODES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class SimulationReport:
    """Aggregated outcome of :func:`simulate`.

    ``confusion[k-1, l-1]`` counts trials where letter ``k`` was sent and
    ``l`` decoded; ``accepted_confusion`` restricts to postselected trials.
    ``sampled_iab`` is the sample mean of the pointwise information, an
    unbiased estimate of the quadrature ``I_AB``.
    """

    config: SimulationConfig
    confusion: np.ndarray
    accepted_confusion: np.ndarray
    sampled_iab: float
    sampled_iab_stderr: float
    symbol_error_rate: float = field(init=False)
    accepted_fraction: float = field(init=False)
    empirical_iab: float = field(init=False)

    def __post_init__(self):
        total = self.confusion.sum()
        self.symbol_error_rate = float(1.0 - np.trace(self.confusion) / total)
        self.accepted_fraction = float(self.accepted_confusion.sum() / total)
        self.empirical_iab = empirical_confusion_entropy(self)

    @property
    def samples(self) -> int:
        return int(self.confusion.sum())

    @property
    def accepted_fraction_stderr(self) -> float:
        f = self.accepted_fraction
        return math.sqrt(f * (1.0 - f) / self.samples)

    @property
    def empirical_iab_stderr(self) -> float:
        """Delta-method standard error of the plug-in estimate."""
        c = self.confusion.astype(float)
        n = c.sum()
        col = c.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where(c > 0, np.log2(c.shape[0] * c / col[None, :]), 0.0)
        mean = np.sum(c * dens) / n
        var = np.sum(c * (dens - mean) ** 2) / n
        return math.sqrt(var / n)

    def as_dict(self) -> dict:
        p = self.config.params
        return {
            "letters": p.letters,
            "amplitude": p.amplitude,
            "transmittance": p.transmittance,
            "samples": self.samples,
            "seed": self.config.seed,
            "postselection": self.config.postselection,
            "symbol_error_rate": self.symbol_error_rate,
            "empirical_iab": self.empirical_iab,
            "empirical_iab_stderr": self.empirical_iab_stderr,
            "sampled_iab": self.sampled_iab,
            "sampled_iab_stderr": self.sampled_iab_stderr,
            "accepted_fraction": self.accepted_fraction,
            "accepted_fraction_stderr": self.accepted_fraction_stderr,
            "confusion": self.confusion.tolist(),
            "accepted_confusion": self.accepted_confusion.tolist(),
        }


def batch_generator(seed: int, batch: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, batch & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_batch(config: SimulationConfig, batch: int, iae: float):
    params = config.params
    n_letters = params.letters
    start = batch * config.batch_size
    size = min(config.batch_size, config.samples - start)
    rng = batch_generator(config.seed, batch)
    sent = rng.integers(1, n_letters + 1, size=size)
    u1 = 1.0 - rng.random(size)
    u2 = rng.random(size)
    rad = np.sqrt(-2.0 * np.log(u1))
    noise = rad * (np.cos(2.0 * math.pi * u2) + 1j * np.sin(2.0 * math.pi * u2)) / math.sqrt(2.0)
    beta = math.sqrt(params.transmittance) * params.alphabet[sent - 1] + noise
    got = decode(beta, params)
    probs, _ = _posterior_and_log_marginal(beta, params)
    info = _iab_from_probs(probs, n_letters)
    if config.postselection == "direct-psa":
        keep = info >= iae
    else:
        keep = np.ones(size, dtype=bool)
    flat = (sent - 1) * n_letters + (got - 1)
    conf = np.bincount(flat, minlength=n_letters**2).reshape(n_letters, n_letters)
    acc = np.bincount(flat[keep], minlength=n_letters**2).reshape(n_letters, n_letters)
    return conf, acc, float(info.sum()), float((info**2).sum())


def simulate(config: SimulationConfig, workers: int = 1) -> SimulationReport:
    """Run ``config.samples`` transmissions and aggregate the statistics."""
    params = config.params
    iae = iae_direct(params)
    n_batches = -(-config.samples // config.batch_size)

    def run(b: int):
        return _run_batch(config, b, iae)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_batches)))
    else:
        parts = [run(b) for b in range(n_batches)]
    n = params.letters
    conf = np.zeros((n, n), dtype=np.int64)
    acc = np.zeros((n, n), dtype=np.int64)
    s1 = s2 = 0.0
    for c, a, t1, t2 in parts:
        conf += c
        acc += a
        s1 += t1
        s2 += t2
    mean = s1 / config.samples
    var = max(s2 / config.samples - mean * mean, 0.0)
    return SimulationReport(config, conf, acc, mean, math.sqrt(var / config.samples))


def empirical_confusion_entropy(report) -> float:
    """Plug-in ``log2 N - H(k|l)`` from a confusion matrix (or a report holding one)."""
    c = np.asarray(getattr(report, "confusion", report), dtype=float)
    total = c.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    col = c.sum(axis=0)
    used = col > 0
    cond = shannon_entropy((c[:, used] / col[used]).T)
    h_k_given_l = float(np.sum(col[used] / total * cond))
    return max(math.log2(c.shape[0]) - h_k_given_l, 0.0)
