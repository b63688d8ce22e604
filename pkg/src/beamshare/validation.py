"""Self-check suites: construction identities, distribution law, solver
cross-checks, dominance, and the no-outage-floor trend.

Each suite returns a list of CheckResult rows so the CLI can render a
pass/fail table; sizes are parameters so callers can trade runtime for
statistical power.  All randomness flows from the seed argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import gain_cdf, ks_statistic
from .beam_aggregation import (
    AggregationCandidate,
    certify_solution,
    enumerate_candidates,
    evaluate_scheme2,
    oracle_grid_solver,
    solve_problem4,
)
from .beam_selection import evaluate_selection
from .channel_model import SystemConfig, TrialSeed, realize
from .montecarlo import SweepSpec, estimate
from .power_allocation import alpha_s_selection, mode_i_alpha_p

__all__ = [
    "CheckResult",
    "zf_checks",
    "distribution_checks",
    "solver_checks",
    "dominance_checks",
    "lemma1_checks",
    "SUITES",
]

# 1% Kolmogorov-Smirnov critical factor, sqrt(-ln(0.005)/2)
KS_FACTOR_1PCT = 1.63

# one-sided 95% normal quantile, used by the statistical trend checks
Z_95 = 1.645


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def zf_checks(
    seed: int, realizations: int = 1000, sizes: tuple[int, ...] = (2, 3, 4)
) -> list[CheckResult]:
    """Zero-forcing identities on random draws: orthogonality, unit total
    beam power, and the Gram-inverse form of the effective gains."""
    results = []
    for size in sizes:
        cfg = SystemConfig(size, size, 10.0, 1.0, 1.0)
        worst_cross = 0.0
        worst_norm = 0.0
        worst_gain = 0.0
        for t in range(realizations):
            chan = realize(cfg, TrialSeed(seed, t))
            cross = chan.G.conj().T @ chan.F
            off = np.abs(cross - np.diag(np.diag(cross)))
            worst_cross = max(worst_cross, float(off.max()))
            total = float(np.sum(np.abs(chan.F) ** 2))
            worst_norm = max(worst_norm, abs(total - 1.0))
            gram_inv_diag = np.real(
                np.diag(np.linalg.inv(chan.G.conj().T @ chan.G))
            )
            ref = 1.0 / (size * gram_inv_diag)
            worst_gain = max(
                worst_gain, float(np.max(np.abs(chan.g_gain - ref) / ref))
            )
        results.append(
            CheckResult(
                f"zf.orthogonality[N=M={size}]",
                worst_cross < 1e-9,
                f"max |g_m^H f_i| = {worst_cross:.2e} (limit 1e-9)",
            )
        )
        results.append(
            CheckResult(
                f"zf.total_power[N=M={size}]",
                worst_norm < 1e-9,
                f"max |sum ||f||^2 - 1| = {worst_norm:.2e} (limit 1e-9)",
            )
        )
        results.append(
            CheckResult(
                f"zf.gain_identity[N=M={size}]",
                worst_gain < 1e-9,
                f"max relative gain error = {worst_gain:.2e} (limit 1e-9)",
            )
        )
    return results


def distribution_checks(
    seed: int,
    samples: int = 10_000,
    configs: tuple[tuple[int, int], ...] = ((2, 2), (4, 4), (4, 2)),
) -> list[CheckResult]:
    """KS test of the scaled gains M g_1 against Gamma(N - M + 1, 1)."""
    results = []
    threshold = KS_FACTOR_1PCT / math.sqrt(samples)
    for n, m in configs:
        cfg = SystemConfig(n, m, 10.0, 1.0, 1.0)
        draws = np.empty(samples)
        for t in range(samples):
            chan = realize(cfg, TrialSeed(seed, t))
            draws[t] = m * chan.g_gain[0]
        stat = ks_statistic(draws, lambda x: gain_cdf(x, n, m))
        results.append(
            CheckResult(
                f"distribution.gain_law[N={n},M={m}]",
                stat < threshold,
                f"KS statistic {stat:.4f} (1% threshold {threshold:.4f})",
            )
        )
    return results


def _worked_candidate() -> tuple[AggregationCandidate, list[float], float, float]:
    """Two-beam instance with h=(2,1), g=(1,1), rho=10, eps_p=1, whose
    optimum has the closed form t*^2 = 0.9 (3 + 2 sqrt2) / (4 + 2 sqrt2)."""
    cand = AggregationCandidate(
        beams=(0, 1), tau_d=0.1, etas=(0.55, 0.55), feasible=True
    )
    u_ref = 0.9 * (3.0 + 2.0 * math.sqrt(2.0)) / (4.0 + 2.0 * math.sqrt(2.0))
    rate_ref = math.log2(1.0 + u_ref / 0.1)
    return cand, [2.0, 1.0], u_ref, rate_ref


def random_feasible_instance(
    rng: np.random.Generator, set_size: int
) -> tuple[AggregationCandidate, list[float], float]:
    """Draw a channel until the size-`set_size` prefix candidate solves."""
    while True:
        n = int(rng.integers(set_size, 7))
        rho = float(10.0 ** rng.uniform(0.0, 3.0) )
        r_p = float(rng.uniform(0.3, 2.0))
        cfg = SystemConfig(n, n, rho, r_p, 1.0)
        chan = realize(cfg, TrialSeed(int(rng.integers(2 ** 32)), 0))
        cands = enumerate_candidates(chan, cfg, "prefixes")
        cand = cands[set_size - 1]
        if not cand.feasible:
            continue
        h_gain = chan.h_gain.tolist()
        sol = solve_problem4(cand, h_gain, cfg.eps_p)
        if sol.status == "optimal" and sol.t_star > 1e-6:
            return cand, h_gain, cfg.eps_p


def solver_checks(
    seed: int,
    reduction_draws: int = 2000,
    oracle_plan: tuple[tuple[int, float, int], ...] = ((2, 1e-3, 30), (3, 2e-3, 6)),
) -> list[CheckResult]:
    """Solver cross-checks: the closed-form two-beam instance, singleton
    reduction to the single-beam cap, grid-oracle agreement, and the
    independent constraint certifier."""
    results = []

    cand, h, u_ref, rate_ref = _worked_candidate()
    sol = solve_problem4(cand, h, 1.0)
    err_u = abs(sol.t_star ** 2 - u_ref)
    err_rate = abs(sol.objective_rate - rate_ref)
    results.append(
        CheckResult(
            "solver.worked_instance",
            sol.status == "optimal" and err_u < 1e-9 and err_rate < 1e-9,
            f"|t*^2 - ref| = {err_u:.2e}, |rate - ref| = {err_rate:.2e}",
        )
    )
    results.append(
        CheckResult(
            "solver.worked_instance_certified",
            not certify_solution(cand, h, 1.0, sol),
            "constraints re-checked at 1e-8",
        )
    )

    cfg = SystemConfig(4, 4, 10.0, 1.0, 1.0)
    worst = 0.0
    certifier_fail = 0
    for t in range(reduction_draws):
        chan = realize(cfg, TrialSeed(seed + 1, t))
        h_gain = chan.h_gain.tolist()
        base_ap = mode_i_alpha_p(chan.g_gain.tolist(), cfg.rho, cfg.eps_p)
        m = t % cfg.m_beams
        expected = alpha_s_selection(
            m, h_gain, float(chan.g_gain[m]), base_ap, cfg.rho, cfg.eps_p
        )
        for cand_m in enumerate_candidates(chan, cfg, "prefixes_plus_singletons"):
            if cand_m.beams != (m,):
                continue
            sol_m = solve_problem4(cand_m, h_gain, cfg.eps_p)
            if sol_m.status == "optimal":
                got = sol_m.x[0] ** 2
                if certify_solution(cand_m, h_gain, cfg.eps_p, sol_m):
                    certifier_fail += 1
            else:
                got = 0.0
            worst = max(worst, abs(got - expected))
    results.append(
        CheckResult(
            "solver.singleton_reduction",
            worst <= 1e-9,
            f"max |alpha_s difference| = {worst:.2e} over {reduction_draws} draws",
        )
    )

    rng = np.random.default_rng(seed + 2)
    worst_ratio = 0.0
    count = 0
    for set_size, resolution, instances in oracle_plan:
        for _ in range(instances):
            cand_i, h_i, eps_i = random_feasible_instance(rng, set_size)
            sol_i = solve_problem4(cand_i, h_i, eps_i)
            if certify_solution(cand_i, h_i, eps_i, sol_i):
                certifier_fail += 1
            oracle = oracle_grid_solver(cand_i, h_i, eps_i, resolution)
            sum_sqrt_h = sum(math.sqrt(h_i[b]) for b in cand_i.beams)
            gap = abs(sol_i.t_star - oracle.t_star)
            worst_ratio = max(worst_ratio, gap / (2.0 * resolution * sum_sqrt_h))
            count += 1
    results.append(
        CheckResult(
            "solver.oracle_agreement",
            worst_ratio <= 1.0,
            f"worst |t_bisect - t_grid| = {worst_ratio:.3f} of the "
            f"2 * resolution * sum sqrt(h) budget over {count} instances",
        )
    )
    results.append(
        CheckResult(
            "solver.certifier",
            certifier_fail == 0,
            f"{certifier_fail} solutions rejected by the constraint certifier",
        )
    )
    return results


def dominance_checks(seed: int, draws: int = 2000) -> list[CheckResult]:
    """Aggregation with singleton candidates can never fall below selection."""
    cfg = SystemConfig(4, 4, 100.0, 0.1, 1.0)
    violations = 0
    gap_sum = 0.0
    for t in range(draws):
        chan = realize(cfg, TrialSeed(seed, t))
        sel = evaluate_selection(chan, cfg)
        agg = evaluate_scheme2(chan, cfg, "prefixes_plus_singletons")
        if agg.secondary_rate < sel.secondary_rate:
            violations += 1
        gap_sum += agg.secondary_rate - sel.secondary_rate
    return [
        CheckResult(
            "dominance.pointwise",
            violations == 0,
            f"{violations} of {draws} draws below selection",
        ),
        CheckResult(
            "dominance.mean_gap",
            gap_sum > 0.0,
            f"mean rate gain {gap_sum / draws:.4f} BPCU",
        ),
    ]


def lemma1_checks(seed: int, trials: int = 60_000) -> list[CheckResult]:
    """Selection outage keeps falling with SNR (no error floor)."""
    spec = SweepSpec(
        n_antennas=2,
        m_beams=2,
        r_p=0.1,
        r_s=1.0,
        snr_grid_db=(10.0, 20.0, 30.0, 40.0),
        schemes=("selection",),
        metric="outage",
        trials=trials,
        seed=seed,
    )
    rows = estimate(spec).rows
    decreasing = True
    detail = []
    for a, b in zip(rows, rows[1:]):
        diff = a.estimate.value - b.estimate.value
        z_den = math.hypot(a.estimate.std_err, b.estimate.std_err)
        z = diff / z_den if z_den > 0 else math.copysign(math.inf, diff or -1.0)
        decreasing &= z > Z_95
        detail.append(f"{a.snr_db:.0f}->{b.snr_db:.0f}dB z={z:.1f}")
    p20 = rows[1].estimate.value
    p40 = rows[3].estimate.value
    return [
        CheckResult("lemma1.strict_decrease", decreasing, ", ".join(detail)),
        CheckResult(
            "lemma1.no_floor",
            p40 < 0.5 * p20,
            f"outage(40dB) = {p40:.2e} vs 0.5 * outage(20dB) = {0.5 * p20:.2e}",
        ),
    ]


SUITES = {
    "zf": zf_checks,
    "distribution": distribution_checks,
    "solver": solver_checks,
    "dominance": dominance_checks,
    "lemma1": lemma1_checks,
}
