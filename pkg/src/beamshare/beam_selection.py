"""Single-beam secondary access: evaluate one channel draw end to end.

Per beam the largest admissible secondary share is computed, the beam with
the best secondary SINR wins (ties to the lowest index), and the outcome
records outage and the achieved rate.  The rate is credited only when the
SIC precondition holds -- the secondary user cannot decode anything if it
fails to strip the primary signal first; the unconditioned value
log2(1 + sinr) is kept alongside for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel_model import ChannelRealization, SystemConfig
from .link_rates import (
    SIC_SLACK,
    rate_primary,
    rate_sel_decode_primary,
    rate_sel_secondary,
)
from .power_allocation import (
    PowerCoefficients,
    alpha_s_selection,
    mode_i_alpha_p,
    tau,
)

__all__ = ["SchemeOutcome", "evaluate_selection"]


@dataclass(frozen=True)
class SchemeOutcome:
    """Result of evaluating one scheme on one channel realization."""

    scheme_tag: str                    # selection | scheme1 | scheme2
    chosen_set: tuple[int, ...]        # beams carrying secondary power
    secondary_rate: float              # BPCU, 0 when SIC failed
    outage: bool
    sic_ok: np.ndarray                 # per-beam decode-precondition flags
    primary_rates: np.ndarray          # legacy users' rates, per beam
    coefficients: PowerCoefficients
    secondary_rate_raw: float = 0.0    # rate ignoring the SIC precondition
    resamples: int = 0                 # singular-channel redraws (audit)


def evaluate_selection(
    chan: ChannelRealization, cfg: SystemConfig
) -> SchemeOutcome:
    """Evaluate beam selection on one realization.

    Every beam is tried with itself in NOMA mode and all others inactive;
    the candidate with the largest secondary SINR gamma_m wins (argmax of
    gamma equals argmax of the rate since log2 is monotone).
    """
    m_beams = cfg.m_beams
    rho, eps_p = cfg.rho, cfg.eps_p
    h_gain = chan.h_gain.tolist()
    g_gain = chan.g_gain.tolist()
    base_ap = mode_i_alpha_p(g_gain, rho, eps_p)

    gammas = [0.0] * m_beams
    alpha_s = [0.0] * m_beams
    r_tilde = [0.0] * m_beams
    for m in range(m_beams):
        a = alpha_s_selection(m, h_gain, g_gain[m], base_ap, rho, eps_p)
        alpha_s[m] = a
        gammas[m] = h_gain[m] * a / tau((m,), h_gain, base_ap, rho)
        cand = _coeffs_for(m, a, base_ap)
        r_tilde[m] = rate_sel_decode_primary(m, h_gain, cand, rho)

    best = max(range(m_beams), key=lambda m: (gammas[m], -m))
    coeffs = _coeffs_for(best, alpha_s[best], base_ap)
    sic_ok = np.array([rt >= cfg.r_p - SIC_SLACK for rt in r_tilde])
    rate = rate_sel_secondary(best, h_gain, coeffs, rho)
    rate_earned = rate if sic_ok[best] else 0.0
    outage = not (sic_ok[best] and rate >= cfg.r_s)
    primary = np.array(
        [
            rate_primary(m, g_gain[m], coeffs, rho, in_active_set=(m == best))
            for m in range(m_beams)
        ]
    )
    return SchemeOutcome(
        scheme_tag="selection",
        chosen_set=(best,),
        secondary_rate=rate_earned,
        outage=outage,
        sic_ok=sic_ok,
        primary_rates=primary,
        coefficients=coeffs,
        secondary_rate_raw=rate,
    )


def _coeffs_for(
    m: int, alpha_s_m: float, base_ap: list[float]
) -> PowerCoefficients:
    """Coefficient vector with beam m in NOMA mode and the rest inactive."""
    ap = np.array(base_ap)
    as_ = np.zeros(len(base_ap))
    ap[m] = 1.0 - alpha_s_m
    as_[m] = alpha_s_m
    return PowerCoefficients(ap, as_, (m,))
