import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from pskqkd import (
    ProtocolParams,
    QuadratureGrid,
    iab_pointwise,
    iab_total,
    integrate_phase_space,
    likelihood,
    marginal,
    posterior,
    shannon_entropy,
)
from pskqkd.quadrature import TWO_PI


def test_likelihood_examples():
    p = ProtocolParams(5, 1.3, 0.6)
    center = math.sqrt(0.6) * p.alphabet[2]
    assert likelihood(center, 3, p) == pytest.approx(1 / math.pi)
    assert likelihood(center + 1j, 3, p) == pytest.approx(math.exp(-1) / math.pi)


@pytest.mark.parametrize("k", [1, 3])
def test_likelihood_normalized(k):
    p = ProtocolParams(3, 1.0, 0.8)
    center = math.sqrt(0.8) * p.alphabet[k - 1]
    val, _ = integrate.dblquad(lambda y, x: likelihood(complex(x, y), k, p),
                               center.real - 8, center.real + 8,
                               center.imag - 8, center.imag + 8)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_marginal_examples():
    beta = 0.3 - 0.9j
    for n in (2, 5, 11):
        assert marginal(beta, ProtocolParams(n, 0.0, 0.4)) == pytest.approx(math.exp(-abs(beta) ** 2) / math.pi)
    assert marginal(0, ProtocolParams(2, 1.0, 1.0)) == pytest.approx(math.exp(-1) / math.pi)


def test_marginal_rotation(rng):
    p = ProtocolParams(7, 1.7, 0.55)
    beta = rng.normal(size=200) * 2 + 1j * rng.normal(size=200) * 2
    rot = np.exp(1j * TWO_PI / 7)
    assert np.allclose(marginal(beta, p), marginal(beta * rot, p), rtol=1e-12, atol=0)


def test_posterior_examples():
    assert np.allclose(posterior(1 + 1j, ProtocolParams(6, 0.0, 0.5)).probs, 1 / 6)
    assert np.allclose(posterior(0, ProtocolParams(2, 1.0, 0.3)).probs, 0.5)
    p = ProtocolParams(4, 1.0, 0.9)
    far = posterior(500 * p.alphabet[0], p).probs
    assert far[0] == pytest.approx(1.0) and np.all(np.isfinite(far))


def test_posterior_normalized(rng):
    for n in (2, 3, 8, 64):
        p = ProtocolParams(n, 2.5, 0.7)
        beta = rng.normal(size=500) * 20 + 1j * rng.normal(size=500) * 20
        probs = posterior(beta, p).probs
        assert np.all(probs >= 0)
        assert np.allclose(probs.sum(axis=-1), 1.0, atol=1e-10)


def test_shannon_entropy():
    assert shannon_entropy(np.full(4, 0.25)) == pytest.approx(2.0)
    assert shannon_entropy([1, 0, 0, 0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        shannon_entropy([1.1, -0.1])


def test_iab_pointwise_examples():
    assert iab_pointwise(1.3 - 0.2j, ProtocolParams(5, 0.0, 0.7)) == 0.0
    assert iab_pointwise(0, ProtocolParams(2, 1.0, 0.5)) == pytest.approx(0.0, abs=1e-15)
    p = ProtocolParams(4, 1.0, 0.8)
    assert iab_pointwise(1e3 * p.alphabet[1], p) == pytest.approx(2.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 16), st.floats(0, 4), st.floats(0, 1), st.floats(-6, 6), st.floats(-6, 6))
def test_iab_pointwise_bounds_and_symmetry(n, a, eta, x, y):
    p = ProtocolParams(n, a, eta)
    beta = complex(x, y)
    val = iab_pointwise(beta, p)
    assert 0.0 <= val <= math.log2(n)
    assert iab_pointwise(beta * np.exp(1j * TWO_PI / n), p) == pytest.approx(val, abs=1e-12)


def binary_iab_oracle(a, eta):
    """1D reduction for N=2: the posterior only depends on Re(beta)."""
    b = math.sqrt(eta) * a
    if b == 0:
        return 0.0

    def integrand(x):
        dens = (math.exp(-(x - b) ** 2) + math.exp(-(x + b) ** 2)) / (2 * math.sqrt(math.pi))
        q = 1.0 / (1.0 + math.exp(-4 * b * x)) if x > -50 else 0.0
        h = 0.0 if q in (0.0, 1.0) else -q * math.log2(q) - (1 - q) * math.log2(1 - q)
        return dens * (1.0 - h)

    val, _ = integrate.quad(integrand, -b - 12, b + 12, limit=200, epsabs=1e-13)
    return val


# frozen from binary_iab_oracle
BINARY_IAB = [
    (0.5, 1.0, 0.2904801134),
    (1.0, 0.5, 0.4859441541),
    (1.4, 0.8, 0.8570403343),
    (2.0, 0.3, 0.7803502576),
]


@pytest.mark.parametrize("a,eta,expected", BINARY_IAB)
def test_iab_total_binary_oracle(a, eta, expected):
    assert binary_iab_oracle(a, eta) == pytest.approx(expected, abs=1e-9)
    assert iab_total(ProtocolParams(2, a, eta)) == pytest.approx(expected, abs=1e-8)


def test_iab_total_limits():
    assert iab_total(ProtocolParams(3, 0.0, 0.5)) == 0.0
    assert iab_total(ProtocolParams(4, 10.0, 1.0)) == pytest.approx(2.0, abs=1e-6)


def test_iab_total_monotone_in_signal():
    vals = [iab_total(ProtocolParams(5, a, 0.6)) for a in np.linspace(0, 3, 13)]
    assert np.all(np.diff(vals) >= -1e-12)
    assert all(0 <= v <= math.log2(5) for v in vals)


def test_iab_total_sector_reduction():
    p = ProtocolParams(3, 1.2, 0.7)
    grid = QuadratureGrid()
    sector = iab_total(p, grid)

    # full-plane polar integral with the same radial rule and 3x the angular nodes
    r, wr = grid.radial(p)
    nt = grid.angular_nodes * 3
    theta = (np.arange(nt) + 0.5) * TWO_PI / nt
    beta = r[:, None] * np.exp(1j * theta)[None, :]
    full = np.sum(wr[:, None] * (TWO_PI / nt) * marginal(beta, p) * iab_pointwise(beta, p))
    assert sector == pytest.approx(full, abs=1e-8)


@pytest.mark.parametrize("n,a,eta", [(2, 0.5, 0.4), (5, 1.4, 0.95), (64, 4.0, 1.0)])
def test_grid_normalization(n, a, eta):
    p = ProtocolParams(n, a, eta)
    total = integrate_phase_space(lambda b: marginal(b, p), p)
    assert 1 - 1e-6 <= total <= 1 + 1e-12
