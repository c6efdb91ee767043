import math

import numpy as np
import pytest

from pskqkd import (
    BracketError,
    ProtocolParams,
    find_crossing,
    golden_section_max,
    keyrate_direct,
    optimize_amplitude,
    sweep_eta,
)


def test_golden_section_parabola():
    x, fx = golden_section_max(lambda x: -(x - 1.234) ** 2, 0.0, 3.0, tol=1e-6)
    assert x == pytest.approx(1.234, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-11)


def test_golden_section_accepts_reversed_interval():
    x, _ = golden_section_max(lambda x: math.sin(x), 3.0, 0.0, tol=1e-5)
    assert x == pytest.approx(math.pi / 2, abs=1e-5)


def test_zero_transmittance_gives_zero_rate():
    pt = optimize_amplitude(0.0, 4)
    assert pt.rate == 0.0
    assert pt.optimal_amplitude is None


def test_optimum_beats_coarse_neighbours():
    pt = optimize_amplitude(0.7, 5)
    assert pt.optimal_amplitude is not None
    assert abs(pt.optimal_amplitude - 1.4) < 0.5
    assert 1.0 <= pt.optimal_amplitude ** 2 <= 4.0
    for da in (-0.05, 0.05):
        r = keyrate_direct(ProtocolParams(5, pt.optimal_amplitude + da, 0.7)).rate
        assert r <= pt.rate + 1e-12
    assert 0.0 < pt.accepted_fraction < 1.0


def test_reverse_optimum_positive_at_low_eta():
    pt = optimize_amplitude(0.2, 2, mode="reverse", a_range=(0.05, 2.0))
    assert pt.rate > 0.0
    assert not pt.postselected


def test_secondary_maximum_reported():
    pt = optimize_amplitude(0.6, 5)
    assert pt.secondary_maximum is not None
    a2, r2 = pt.secondary_maximum
    assert abs(a2 - pt.optimal_amplitude) > 0.1
    assert 0.0 < pt.rate - r2 < 1e-4


def test_sweep_deterministic_and_idempotent():
    etas = [0.5, 0.8]
    first = sweep_eta(3, "direct", etas)
    assert first == sweep_eta(3, "direct", etas)
    assert first == sweep_eta(3, "direct", etas, workers=2)
    assert [p.eta for p in first] == etas
    assert first[0].rate < first[1].rate


def test_sweep_records_failures():
    pts = sweep_eta(3, "direct", [0.5, 1.5])
    assert pts[0].error is None
    assert pts[1].error is not None and math.isnan(pts[1].rate)


def test_unbracketed_crossing_raises():
    with pytest.raises(BracketError):
        find_crossing(2, 3, bracket=(0.6, 0.9))


@pytest.mark.slow
def test_crossing_binary_ternary():
    rec = find_crossing(2, 3, bracket=(0.45, 0.55))
    assert rec.width <= 1e-3
    assert rec.bracket[0] <= rec.eta_star <= rec.bracket[1]
    assert abs(rec.residual) < 1e-4
    assert np.sign(rec.delta_low) != np.sign(rec.delta_high)
    assert rec.eta_star == pytest.approx(0.493, abs=0.01)


def test_never_below_best_coarse_rate():
    amps = np.round(np.arange(0.05, 3.0 + 0.025, 0.05), 12)
    coarse = max(keyrate_direct(ProtocolParams(3, a, 0.7)).rate for a in amps)
    pt = optimize_amplitude(0.7, 3, a_range=(0.05, 3.0))
    assert pt.rate >= coarse


def test_shared_cache_reuses_rates():
    cache = {}
    with pytest.raises(BracketError):
        find_crossing(2, 3, bracket=(0.6, 0.9), cache=cache)
    assert set(cache) == {("direct", None, 0.6, 2), ("direct", None, 0.6, 3),
                          ("direct", None, 0.9, 2), ("direct", None, 0.9, 3)}
    cache[("direct", None, 0.6, 2)] = -1.0
    with pytest.raises(BracketError, match="dG\\(0.6\\)=-1"):
        find_crossing(2, 3, bracket=(0.6, 0.9), cache=cache)
