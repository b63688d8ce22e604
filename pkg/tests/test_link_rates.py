import math

import numpy as np
import pytest

from beamshare.channel_model import SystemConfig, TrialSeed, realize
from beamshare.link_rates import (
    RateReport,
    rate_agg_decode_primary,
    rate_agg_secondary,
    rate_primary,
    rate_scheme1_secondary,
    rate_sel_decode_primary,
    rate_sel_secondary,
)
from beamshare.power_allocation import PowerCoefficients, mode_i_alpha_p


def _coeffs(alpha_p, alpha_s, active):
    return PowerCoefficients(np.array(alpha_p), np.array(alpha_s), tuple(active))


def test_rate_sel_decode_primary_hand_value():
    # numerator 2*0.55 = 1.1; denominator 2*0.45 + 1*0.1 + 0.1 = 1.1
    coeffs = _coeffs([0.55, 0.1], [0.45, 0.0], (0,))
    assert rate_sel_decode_primary(0, [2.0, 1.0], coeffs, 10.0) == pytest.approx(1.0)


def test_rate_sel_decode_primary_zero_and_limit():
    coeffs = _coeffs([0.0, 0.1], [0.45, 0.0], (0,))
    assert rate_sel_decode_primary(0, [2.0, 1.0], coeffs, 10.0) == 0.0
    # interference-limited: growing the budget cannot push the rate past
    # the zero-noise value
    coeffs = _coeffs([0.5, 0.1], [0.5, 0.0], (0,))
    limit = math.log2(1.0 + 2 * 0.5 / (2 * 0.5 + 1 * 0.1))
    last = 0.0
    for rho in (1e1, 1e3, 1e5):
        r = rate_sel_decode_primary(0, [2.0, 1.0], coeffs, rho)
        assert last < r <= limit
        last = r


def test_rate_sel_secondary_values():
    coeffs = _coeffs([0.55, 0.1], [0.45, 0.0], (0,))
    # 2*0.45 / (1*0.1 + 0.1) = 4.5
    assert rate_sel_secondary(0, [2.0, 1.0], coeffs, 10.0) == pytest.approx(
        math.log2(5.5)
    )
    zero = _coeffs([0.55, 0.1], [0.0, 0.0], (0,))
    assert rate_sel_secondary(0, [2.0, 1.0], zero, 10.0) == 0.0
    single = _coeffs([0.5], [0.5], (0,))
    assert rate_sel_secondary(0, [2.0], single, 10.0) == pytest.approx(
        math.log2(1.0 + 10.0 * 2.0 * 0.5)
    )


def test_rate_scheme1_secondary_hand_value():
    # single active beam: 0.9 / (1.1 + 0.1 + 0.1)
    coeffs = _coeffs([0.55, 0.1], [0.45, 0.0], (0,))
    expected = math.log2(1.0 + 0.9 / 1.3)
    assert rate_scheme1_secondary((0,), [2.0, 1.0], coeffs, 10.0) == pytest.approx(
        expected
    )


def test_rate_scheme1_secondary_zero_and_coherence():
    coeffs = _coeffs([0.55, 0.55], [0.0, 0.0], (0, 1))
    assert rate_scheme1_secondary((0, 1), [2.0, 1.0], coeffs, 10.0) == 0.0
    # two equal beams combine coherently: 4x the single-beam signal power
    one = _coeffs([0.0, 0.0], [0.4, 0.0], (0,))
    two = _coeffs([0.0, 0.0], [0.4, 0.4], (0, 1))
    rho = 10.0
    s1 = 2 ** rate_scheme1_secondary((0,), [1.0, 1.0], one, rho) - 1.0
    s2 = 2 ** rate_scheme1_secondary((0, 1), [1.0, 1.0], two, rho) - 1.0
    assert s2 == pytest.approx(4.0 * s1, rel=1e-12)


def test_rate_primary_values():
    coeffs = _coeffs([0.55, 0.1], [0.45, 0.0], (0,))
    assert rate_primary(0, 1.0, coeffs, 10.0, in_active_set=True) == pytest.approx(1.0)
    assert rate_primary(1, 1.0, coeffs, 10.0, in_active_set=False) == pytest.approx(1.0)
    # with no secondary power the active formula reduces to the legacy one
    quiet = _coeffs([0.3, 0.1], [0.0, 0.0], (0,))
    active = rate_primary(0, 1.7, quiet, 10.0, in_active_set=True)
    legacy = rate_primary(0, 1.7, quiet, 10.0, in_active_set=False)
    assert active == pytest.approx(legacy, abs=1e-12)


def test_rate_agg_decode_primary_worked_optimum():
    # two-beam optimum with h=(2,1), eps=1, tau=0.1: both decode rates hit
    # the target exactly (alpha_p = u + 0.1 with u = 0.9(3+2sqrt2)/(4+2sqrt2))
    u = 0.9 * (3 + 2 * math.sqrt(2)) / (4 + 2 * math.sqrt(2))
    ap = u + 0.1
    coeffs = _coeffs([ap, ap], [1 - ap, 1 - ap], (0, 1))
    r1 = rate_agg_decode_primary(0, (0, 1), [2.0, 1.0], coeffs, 10.0)
    r2 = rate_agg_decode_primary(1, (0, 1), [2.0, 1.0], coeffs, 10.0)
    assert r1 == pytest.approx(1.0, abs=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-9)


def test_rate_agg_decode_primary_single_beam_no_secondary():
    coeffs = _coeffs([0.7], [0.0], (0,))
    got = rate_agg_decode_primary(0, (0,), [1.3], coeffs, 10.0)
    assert got == pytest.approx(math.log2(1.0 + 10.0 * 1.3 * 0.7))


def test_rate_agg_secondary_worked_value():
    u = 0.9 * (3 + 2 * math.sqrt(2)) / (4 + 2 * math.sqrt(2))
    ap = u + 0.1
    coeffs = _coeffs([ap, ap], [1 - ap, 1 - ap], (0, 1))
    got = rate_agg_secondary((0, 1), [2.0, 1.0], coeffs, 10.0)
    # coherent signal power equals u at the optimum, all beams aggregated
    assert got == pytest.approx(math.log2(1.0 + u / 0.1), abs=1e-9)
    silent = _coeffs([ap, ap], [0.0, 0.0], (0, 1))
    assert rate_agg_secondary((0, 1), [2.0, 1.0], silent, 10.0) == 0.0


def test_aggregation_reduces_to_selection_on_singletons():
    rng = np.random.default_rng(23)
    cfg = SystemConfig(4, 4, 10.0, 1.0, 1.0)
    for t in range(100):
        chan = realize(cfg, TrialSeed(61, t))
        h = chan.h_gain.tolist()
        base = mode_i_alpha_p(chan.g_gain.tolist(), cfg.rho, cfg.eps_p)
        m = int(rng.integers(0, 4))
        a_s = float(rng.uniform(0.0, 0.4))
        ap = list(base)
        ap[m] = 1.0 - a_s
        as_ = [0.0] * 4
        as_[m] = a_s
        coeffs = _coeffs(ap, as_, (m,))
        assert rate_agg_secondary((m,), h, coeffs, cfg.rho) == pytest.approx(
            rate_sel_secondary(m, h, coeffs, cfg.rho), abs=1e-12
        )
        assert rate_agg_decode_primary(m, (m,), h, coeffs, cfg.rho) == pytest.approx(
            rate_sel_decode_primary(m, h, coeffs, cfg.rho), abs=1e-12
        )


def test_rate_monotonicity_random():
    # each rate grows with its own signal share and shrinks with interference
    rng = np.random.default_rng(29)
    for _ in range(100):
        h = [float(v) for v in rng.exponential(1.0, size=3) + 0.05]
        ap = [float(v) for v in rng.uniform(0.1, 0.5, size=3)]
        as_ = [float(v) for v in rng.uniform(0.05, 0.4, size=3)]
        rho = float(10.0 ** rng.uniform(0.0, 2.0))
        coeffs = _coeffs(ap, as_, (0, 1, 2))
        up = list(as_)
        up[0] = min(1.0 - ap[0], as_[0] + 0.05)
        more_signal = _coeffs(ap, up, (0, 1, 2))
        assert rate_agg_secondary((0, 1, 2), h, more_signal, rho) >= rate_agg_secondary(
            (0, 1, 2), h, coeffs, rho
        )
        assert rate_agg_decode_primary(
            0, (0, 1, 2), h, more_signal, rho
        ) <= rate_agg_decode_primary(0, (0, 1, 2), h, coeffs, rho)
        bump = list(ap)
        bump[1] = min(1.0 - as_[1], ap[1] + 0.05)
        more_interf = _coeffs(bump, as_, (0, 1, 2))
        assert rate_sel_secondary(0, h, more_interf, rho) <= rate_sel_secondary(
            0, h, coeffs, rho
        )
        assert rate_sel_decode_primary(0, h, more_interf, rho) <= rate_sel_decode_primary(
            0, h, coeffs, rho
        )


def test_rate_report_invariants():
    report = RateReport.build([1.0, 0.5], 2.0, [1.0, 1.0], r_p=1.0)
    assert report.sic_ok.tolist() == [True, False]
    boundary = RateReport.build([1.0 - 1e-13], 0.0, [0.0], r_p=1.0)
    assert bool(boundary.sic_ok[0])  # tolerance absorbs rounding noise
    with pytest.raises(ValueError):
        RateReport.build([math.inf], 0.0, [0.0], r_p=1.0)
    with pytest.raises(ValueError):
        RateReport.build([-0.1], 0.0, [0.0], r_p=1.0)
