"""Achievable-rate formulas, in bits per channel use.

Every rate is assembled in the SINR domain and converted once through
log2(1 + sinr); nothing is computed by subtracting logarithms.  Interference
sums accumulate in ascending beam order with the 1/rho noise term added
last, so algebraically identical expressions evaluated by different callers
produce bit-identical floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .power_allocation import PowerCoefficients

__all__ = [
    "RateReport",
    "SIC_SLACK",
    "rate_sel_decode_primary",
    "rate_sel_secondary",
    "rate_scheme1_secondary",
    "rate_primary",
    "rate_agg_decode_primary",
    "rate_agg_secondary",
]

# Numerical slack on the SIC precondition r_tilde >= r_p: the constructed
# coefficients meet it with equality, so exact comparison would fail on
# rounding noise alone.
SIC_SLACK = 1e-12


@dataclass(frozen=True)
class RateReport:
    """Bundle of the rates produced when evaluating a scheme on one draw."""

    r_tilde: np.ndarray      # secondary user's decode rate of each primary signal
    r_secondary: float       # secondary user's own achievable rate
    r_primary: np.ndarray    # legacy users' rates
    sic_ok: np.ndarray       # r_tilde[m] >= r_p - SIC_SLACK

    @classmethod
    def build(
        cls,
        r_tilde: Sequence[float],
        r_secondary: float,
        r_primary: Sequence[float],
        r_p: float,
    ) -> "RateReport":
        rt = np.asarray(r_tilde, dtype=float)
        rp = np.asarray(r_primary, dtype=float)
        if not (
            np.all(np.isfinite(rt))
            and np.all(np.isfinite(rp))
            and math.isfinite(r_secondary)
        ):
            raise ValueError("rates must be finite")
        if np.any(rt < 0.0) or np.any(rp < 0.0) or r_secondary < 0.0:
            raise ValueError("rates must be non-negative")
        return cls(rt, float(r_secondary), rp, rt >= r_p - SIC_SLACK)


def _interference_others(
    m: int, h_gain: Sequence[float], coeffs: PowerCoefficients, rho: float
) -> float:
    """sum_{i != m} h_i (alpha_p_i + alpha_s_i) + 1/rho."""
    ap, as_ = coeffs.alpha_p, coeffs.alpha_s
    acc = 0.0
    for i in range(len(h_gain)):
        if i != m:
            acc += float(h_gain[i]) * (float(ap[i]) + float(as_[i]))
    return acc + 1.0 / rho


def rate_sel_decode_primary(
    m: int, h_gain: Sequence[float], coeffs: PowerCoefficients, rho: float
) -> float:
    """Secondary user's rate decoding the primary signal on beam m, with the
    secondary signals independently encoded per beam (no aggregation)."""
    num = float(h_gain[m]) * float(coeffs.alpha_p[m])
    den = float(h_gain[m]) * float(coeffs.alpha_s[m]) + _interference_others(
        m, h_gain, coeffs, rho
    )
    return math.log2(1.0 + num / den)


def rate_sel_secondary(
    m: int, h_gain: Sequence[float], coeffs: PowerCoefficients, rho: float
) -> float:
    """Secondary user's own rate on beam m after cancelling that beam's
    primary signal."""
    num = float(h_gain[m]) * float(coeffs.alpha_s[m])
    den = _interference_others(m, h_gain, coeffs, rho)
    return math.log2(1.0 + num / den)


def _coherent_power(
    active_set: Sequence[int], h_gain: Sequence[float], coeffs: PowerCoefficients
) -> float:
    """(sum over the active set of sqrt(h_i alpha_s_i))^2."""
    t = 0.0
    for i in active_set:
        t += math.sqrt(float(h_gain[i]) * float(coeffs.alpha_s[i]))
    return t * t


def rate_scheme1_secondary(
    active_set: Sequence[int],
    h_gain: Sequence[float],
    coeffs: PowerCoefficients,
    rho: float,
) -> float:
    """Aggregated rate when the secondary user decodes directly, treating
    every primary signal (including those on its own beams) as noise."""
    num = _coherent_power(active_set, h_gain, coeffs)
    acc = 0.0
    for j in range(len(h_gain)):
        acc += float(h_gain[j]) * float(coeffs.alpha_p[j])
    return math.log2(1.0 + num / (acc + 1.0 / rho))


def rate_primary(
    m: int,
    g_m: float,
    coeffs: PowerCoefficients,
    rho: float,
    in_active_set: bool,
) -> float:
    """Legacy user's rate on its own beam.

    Zero-forcing removes all inter-beam interference at the primary
    receivers, so only the superimposed secondary signal (|beta_m|^2 = 1)
    and noise remain when the beam is active.
    """
    ap = float(coeffs.alpha_p[m])
    if in_active_set:
        return math.log2(1.0 + g_m * ap / (g_m * float(coeffs.alpha_s[m]) + 1.0 / rho))
    return math.log2(1.0 + g_m * ap * rho)


def rate_agg_decode_primary(
    m: int,
    active_set: Sequence[int],
    h_gain: Sequence[float],
    coeffs: PowerCoefficients,
    rho: float,
) -> float:
    """Secondary user's rate decoding beam m's primary signal inside the
    aggregation SIC chain.

    active_set lists the aggregated beams in decode order (descending
    h_gain).  Not yet cancelled at step m: primary signals later in the
    chain, every primary signal outside the set, and the aggregated
    secondary signal itself.
    """
    chain = list(active_set)
    pos = chain.index(m)
    active = set(chain)
    acc = 0.0
    for j in chain[pos + 1 :]:
        acc += float(h_gain[j]) * float(coeffs.alpha_p[j])
    for j in range(len(h_gain)):
        if j not in active:
            acc += float(h_gain[j]) * float(coeffs.alpha_p[j])
    acc += _coherent_power(active_set, h_gain, coeffs)
    num = float(h_gain[m]) * float(coeffs.alpha_p[m])
    return math.log2(1.0 + num / (acc + 1.0 / rho))


def rate_agg_secondary(
    active_set: Sequence[int],
    h_gain: Sequence[float],
    coeffs: PowerCoefficients,
    rho: float,
) -> float:
    """Secondary user's own aggregated rate after the SIC chain cleared the
    active set; only out-of-set primary signals and noise interfere."""
    num = _coherent_power(active_set, h_gain, coeffs)
    active = set(active_set)
    acc = 0.0
    for j in range(len(h_gain)):
        if j not in active:
            acc += float(h_gain[j]) * float(coeffs.alpha_p[j])
    return math.log2(1.0 + num / (acc + 1.0 / rho))
