'''
Long-running property checks behind the selftest command. Each check returns (passed, detail)
and a failing or crashing check never stops the others
'''

import logging
from typing import Callable, List, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from src.artifacts import FLOAT_FORMAT
from src.capacity import SweepSpec, maximize_capacity, sweep, capacity_cap
from src.channel import (SystemParams, derive_constants, state_probabilities, sample_fading, scenario_probabilities,
                         db_to_linear)
from src.config_processor import RunConfig
from src.exceptions import SecrecyException
from src.experiment import iteration_counts
from src.policy_source import CalibratedPolicy
from src.power_solver import (SolverConfig, calibrate_gamma, solve_policy, oracle_policy, bisection_policy,
                              fixed_point_rhs, active_mask)
from src.quadrature import quadrature_capacity
from src.queue_sim import SimConfig, simulate_queue, arrival_from_capacity
from src.system_constants import Branch, SweepAxis

logger = logging.getLogger(__name__)

THETA_GRID = (0.001, 0.01, 0.1, 1.0, 10.0)
ORACLE_DRAWS = 1000
STRUCTURE_DRAWS = 1000




'''
------
Checks
------
'''

def check_oracle(params: SystemParams, solver: SolverConfig, seed: int) -> Tuple[bool, str]:
    params = params.updated(theta=1.0, snr=db_to_linear(10.0))
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    draws = sample_fading(seed, ORACLE_DRAWS, params)

    log_gamma0 = calibrate_gamma(draws, params, consts, probs, solver).log_gamma0
    policies = solve_policy(draws, None, params, consts, probs, solver, log_gamma0=log_gamma0)

    worst = 0.0
    for branch, mu in ((Branch.BUSY, policies.mu_b), (Branch.IDLE, policies.mu_i)):
        oracle = oracle_policy(branch, draws, None, params, consts, probs, log_gamma0=log_gamma0)
        worst = max(worst, float(np.max(np.abs(oracle - mu))))
    return worst <= 1e-6, f'max |oracle - fixed point| = {worst:.3g}'


def check_constraint(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    params = params.updated(theta=1.0, snr=db_to_linear(10.0))
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    result = calibrate_gamma(sample_fading(seed, n, params), params, consts, probs, solver)
    gap = abs(result.achieved_power - 1.0)
    return gap <= 1e-3, f'|average power - 1| = {gap:.3g} at log gamma0 = {result.log_gamma0:.6g}'


def check_fixed_point_structure(params: SystemParams, solver: SolverConfig, seed: int) -> Tuple[bool, str]:
    params = params.updated(theta=1.0, snr=db_to_linear(10.0))
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    draws = sample_fading(seed, STRUCTURE_DRAWS, params)
    log_gamma0 = calibrate_gamma(draws, params, consts, probs, solver).log_gamma0
    policies = solve_policy(draws, None, params, consts, probs, solver, log_gamma0=log_gamma0)

    failures = []
    worst_gap = 0.0
    for branch, mu in ((Branch.BUSY, policies.mu_b), (Branch.IDLE, policies.mu_i)):
        active = np.flatnonzero(active_mask(branch, draws, None, params, consts, probs, log_gamma0=log_gamma0)
                                & (draws.z_e > 0))
        subset = draws[active]
        if len(subset) == 0:
            continue

        h0 = fixed_point_rhs(branch, 0.0, subset, None, params, consts, probs, log_gamma0=log_gamma0)
        if np.any(h0 <= 0):
            failures.append(f'{branch.name}: H(0) <= 0')

        # finite differences on a grid spanning [0, H(0)] for every draw
        grid = np.linspace(0.0, 1.0, 41)[:, None] * h0[None, :]
        values = fixed_point_rhs(branch, grid, subset, None, params, consts, probs, log_gamma0=log_gamma0)
        scale = np.maximum(np.abs(values).max(axis=0), 1.0)
        if np.any(np.diff(values, axis=0) > 1e-12 * scale):
            failures.append(f'{branch.name}: H not decreasing')
        if np.any(np.diff(values, 2, axis=0) < -1e-9 * scale):
            failures.append(f'{branch.name}: H not convex')

        for i in range(min(len(subset), 200)):
            root = bisection_policy(branch, subset[i], None, params, consts, probs, log_gamma0=log_gamma0)
            worst_gap = max(worst_gap, abs(root - float(mu[active[i]])))

    if worst_gap > 1.01 * solver.fp_tolerance:
        failures.append(f'bisection differs by {worst_gap:.3g}')
    return not failures, '; '.join(failures) or f'max |bisection - fixed point| = {worst_gap:.3g}'


def check_quadrature(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    params = params.updated(theta=0.01, snr=db_to_linear(10.0), p_f=0.1, p_d=0.9)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)

    result = maximize_capacity(params, solver, seed, n)
    by_quadrature = quadrature_capacity(None, params, consts, probs, solver, log_gamma0=result.log_gamma0)
    relative = abs(result.r_e - by_quadrature) / by_quadrature
    return relative <= 5e-3, f'Monte Carlo {result.r_e:.6g} vs quadrature {by_quadrature:.6g} ({relative:.3%})'


def check_iterations(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    base = params.updated(snr=db_to_linear(10.0))

    strict = iteration_counts(base.updated(theta=1.0), solver, seed, n)
    loose = iteration_counts(base.updated(theta=0.01), solver, seed, n)
    share_strict = float(np.mean(strict < 14))
    share_loose = float(np.mean(loose < 5))

    other = iteration_counts(base.updated(theta=1.0, p_f=0.2, p_d=0.8), solver, seed + 1, n)
    reference = iteration_counts(base.updated(theta=1.0, p_f=0.1, p_d=0.9), solver, seed + 2, n)
    p_value = float(stats.ks_2samp(reference, other).pvalue)

    passed = share_strict >= 0.8 and share_loose >= 0.8 and p_value > 0.01
    return passed, (f'theta=1: {share_strict:.1%} under 14; theta=0.01: {share_loose:.1%} under 5; '
                    f'KS p = {p_value:.3g}')


def check_theta_trend(params: SystemParams, solver: SolverConfig, seed: int, n: int, n_jobs: int) -> Tuple[bool, str]:
    good = sweep(SweepSpec(SweepAxis.THETA, THETA_GRID, params.updated(p_f=0.1, p_d=0.9)), solver, seed, n, n_jobs)
    poor = sweep(SweepSpec(SweepAxis.THETA, THETA_GRID, params.updated(p_f=0.4, p_d=0.6)), solver, seed, n, n_jobs)

    r_good = good['r_e_bits_s_hz'].to_numpy()
    r_poor = poor['r_e_bits_s_hz'].to_numpy()
    if np.any(np.isnan(r_good)) or np.any(np.isnan(r_poor)):
        return False, 'sweep point failed'

    monotone = bool(np.all(np.diff(r_good) <= 1e-12) and np.all(np.diff(r_poor) <= 1e-12))
    ordered = bool(np.all(r_good >= r_poor))
    return monotone and ordered, f'non-increasing: {monotone}, better sensing dominates: {ordered}'


def check_snr_saturation(params: SystemParams, solver: SolverConfig, seed: int, n: int, n_jobs: int) -> Tuple[bool, str]:
    fixed = params.updated(theta=0.1)
    frame = sweep(SweepSpec(SweepAxis.SNR, (20.0, 30.0), fixed), solver, seed, n, n_jobs)
    r_20, r_30 = frame['r_e_bits_s_hz']
    cap = capacity_cap(fixed)

    saturated = r_30 - r_20 <= 0.05 * r_20
    capped = max(r_20, r_30) <= cap
    return saturated and capped, f'R_e(20 dB) = {r_20:.6g}, R_e(30 dB) = {r_30:.6g}, cap = {cap:.6g}'


def check_beta_crossing(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    base = params.updated(theta=0.01)
    details = []
    passed = True
    for beta in (8.0, 10.0):
        hidden = maximize_capacity(base.updated(p_f=0.5, p_d=0.9, snr=db_to_linear(0.0)).with_beta(beta),
                                   solver, seed, n).r_e
        clean = maximize_capacity(base.updated(p_f=0.1, p_d=0.9, snr=db_to_linear(-10.0)).with_beta(beta),
                                  solver, seed, n).r_e
        passed = passed and hidden < clean
        details.append(f'beta={beta:g}: {hidden:.6g} vs {clean:.6g}')
    return passed, '; '.join(details)


def check_queue_tail(params: SystemParams, solver: SolverConfig, seed: int, n: int, n_frames: int) -> Tuple[bool, str]:
    params = params.updated(theta=0.01)
    capacity = maximize_capacity(params, solver, seed, n)
    source = CalibratedPolicy(params, solver, log_gamma0=capacity.log_gamma0)
    arrival = arrival_from_capacity(capacity.r_e, params)

    result = simulate_queue(SimConfig(n_frames=n_frames, arrival_rate=arrival, seed=seed, params=params,
                                      policy_source=source))

    decay_ok = result.decay_estimate is not None and result.decay_estimate >= 0.9 * params.theta
    leaks = sum(counts['security_outages'] for counts in result.outage_counts.values())

    expected = scenario_probabilities(params.rho, params.p_d, params.p_f)
    total = result.scenario_counts.sum()
    standard_error = np.sqrt(expected * (1.0 - expected) / total)
    frequencies_ok = bool(np.all(np.abs(result.scenario_counts / total - expected) <= 3.0 * standard_error))

    passed = decay_ok and leaks == 0 and frequencies_ok
    return passed, (f'decay {result.decay_estimate} (theta {params.theta}), security outages {leaks}, '
                    f'scenario frequencies within 3 SE: {frequencies_ok}')


def check_jensen(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    result = maximize_capacity(params, solver, seed, n)
    return result.r_e <= result.ergodic_rate, f'R_e {result.r_e:.6g} <= ergodic {result.ergodic_rate:.6g}'


def check_determinism(params: SystemParams, solver: SolverConfig, seed: int, n: int) -> Tuple[bool, str]:
    first = pd.DataFrame([maximize_capacity(params, solver, seed, n).to_dict()])
    second = pd.DataFrame([maximize_capacity(params, solver, seed, n).to_dict()])
    same = (first.to_csv(index=False, float_format=FLOAT_FORMAT)
            == second.to_csv(index=False, float_format=FLOAT_FORMAT))
    return same, 'identical CSV text' if same else 'CSV text differs between runs'




'''
------
Runner
------
'''

def _attempt(check: Callable[[], Tuple[bool, str]]) -> Tuple[bool, str]:
    try:
        return check()
    except SecrecyException as e:
        logger.warning('check raised %s', e)
        return False, f'raised {type(e).__name__}: {e}'


def run_selftest(config: RunConfig) -> pd.DataFrame:
    params, solver, seed, n = config.params, config.solver, config.seed, config.n_draws
    n_frames = int(config.values.get('n_frames', 10**6))

    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ('oracle_equivalence', lambda: check_oracle(params, solver, seed)),
        ('constraint_satisfaction', lambda: check_constraint(params, solver, seed, n)),
        ('fixed_point_structure', lambda: check_fixed_point_structure(params, solver, seed)),
        ('quadrature_crosscheck', lambda: check_quadrature(params, solver, seed, n)),
        ('iteration_distribution', lambda: check_iterations(params, solver, seed, n)),
        ('theta_trend', lambda: check_theta_trend(params, solver, seed, n, config.n_jobs)),
        ('snr_saturation', lambda: check_snr_saturation(params, solver, seed, n, config.n_jobs)),
        ('beta_crossing', lambda: check_beta_crossing(params, solver, seed, n)),
        ('queue_tail_law', lambda: check_queue_tail(params, solver, seed, n, n_frames)),
        ('jensen_bound', lambda: check_jensen(params, solver, seed, n)),
        ('determinism', lambda: check_determinism(params, solver, seed, n)),
    ]

    rows = []
    for name, check in checks:
        logger.info('selftest: %s', name)
        passed, detail = _attempt(check)
        rows.append({'property': name, 'passed': bool(passed), 'detail': detail})
    return pd.DataFrame(rows, columns=['property', 'passed', 'detail'])
