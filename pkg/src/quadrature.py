'''
Deterministic cross-check of the Monte-Carlo averages: expectations over the two exponential
fading gains by Gauss-Laguerre quadrature.

The policy of each branch is zero below a threshold line in the (z_e, z_m) plane and smooth above
it, so every branch is integrated over its own active region, where the integrand has no kink.
The inactive region contributes in closed form
'''

import math
from typing import Optional, Tuple

import numpy as np
from scipy import special

from src.channel import SystemParams, DerivedConstants, StateProbabilities, FadingDraws, secure_rate
from src.exceptions import ParameterException
from src.power_solver import SolverConfig, solve_policy, threshold_line
from src.system_constants import Branch, SolverDefaults, RatePolicy


def active_region_nodes(branch: Branch, params: SystemParams, consts: DerivedConstants, probs: StateProbabilities,
                        gamma0: Optional[float] = None, deg: int = SolverDefaults.QUADRATURE_DEG,
                        log_gamma0: Optional[float] = None) -> Tuple[FadingDraws, np.ndarray]:
    '''
    Nodes and weights such that sum(w * g(z_m, z_e)) ~ E[g 1{branch active}] for z ~ Exp(mean sigma2).
    With the active region z_m > offset + slope z_e, each z_e node carries the z_m axis
    shifted to start on the line; an unlinked eavesdropper collapses z_e to the single node 0
    '''
    if deg < 1:
        raise ParameterException(f'quadrature degree must be positive, got {deg}')

    offset, slope = threshold_line(branch, params, consts, probs, gamma0, log_gamma0)
    if not math.isfinite(offset):
        return FadingDraws(np.zeros(0), np.zeros(0)), np.zeros(0)

    x, w = np.polynomial.laguerre.laggauss(deg)
    if params.sigma2_e == 0:
        z_e_axis, w_e = np.zeros(1), np.ones(1)
    else:
        z_e_axis, w_e = params.sigma2_e * x, w

    z_e, y = np.meshgrid(z_e_axis, x, indexing='ij')
    lower = offset + slope * z_e
    z_m = lower + params.sigma2_m * y
    weights = np.outer(w_e, w) * np.exp(-lower / params.sigma2_m)

    keep = (weights > 0).ravel()
    return FadingDraws(z_m.ravel()[keep], z_e.ravel()[keep]), weights.ravel()[keep]


def inactive_probability(branch: Branch, params: SystemParams, consts: DerivedConstants, probs: StateProbabilities,
                         gamma0: Optional[float] = None, log_gamma0: Optional[float] = None) -> float:
    '''P(z_m <= offset + slope z_e) = 1 - e^(-offset / sigma2_m) / (1 + slope sigma2_e / sigma2_m)'''
    offset, slope = threshold_line(branch, params, consts, probs, gamma0, log_gamma0)
    if not math.isfinite(offset):
        return 1.0
    spread = slope * params.sigma2_e / params.sigma2_m
    return (spread - math.expm1(-offset / params.sigma2_m)) / (1.0 + spread)


def _branch_shares(params: SystemParams, probs: StateProbabilities):
    return ((Branch.BUSY, params.p_d, probs.p_b), (Branch.IDLE, 1.0 - params.p_d, probs.p_i))


def _branch_powers(branch: Branch, nodes: FadingDraws, gamma0: Optional[float], params: SystemParams,
                   consts: DerivedConstants, probs: StateProbabilities, cfg: Optional[SolverConfig],
                   log_gamma0: Optional[float]) -> np.ndarray:
    policies = solve_policy(nodes, gamma0, params, consts, probs, cfg, log_gamma0=log_gamma0)
    return policies.mu_b if branch is Branch.BUSY else policies.mu_i


def quadrature_average_power(gamma0: Optional[float], params: SystemParams, consts: DerivedConstants,
                             probs: StateProbabilities, cfg: Optional[SolverConfig] = None,
                             deg: int = SolverDefaults.QUADRATURE_DEG, log_gamma0: Optional[float] = None) -> float:
    power = 0.0
    for branch, share, _ in _branch_shares(params, probs):
        nodes, weights = active_region_nodes(branch, params, consts, probs, gamma0, deg, log_gamma0)
        if weights.size == 0 or share == 0:
            continue
        mu = _branch_powers(branch, nodes, gamma0, params, consts, probs, cfg, log_gamma0)
        power += share * float(np.sum(weights * mu))
    return power


def quadrature_capacity(gamma0: Optional[float], params: SystemParams, consts: DerivedConstants,
                        probs: StateProbabilities, cfg: Optional[SolverConfig] = None,
                        deg: int = SolverDefaults.QUADRATURE_DEG,
                        rate_policy: RatePolicy = RatePolicy.CONFUSION, log_gamma0: Optional[float] = None) -> float:
    '''Effective secure capacity at a given gamma0 with the fading expectation taken by quadrature'''
    if not params.theta > 0:
        raise ParameterException('effective capacity needs theta > 0')
    theta_t = params.theta * params.frame_T

    shortfall = 0.0
    exponents, scales = [np.zeros(1)], [np.array([probs.p_0])]
    for branch, _, prob in _branch_shares(params, probs):
        if prob == 0:
            continue
        idle_mass = inactive_probability(branch, params, consts, probs, gamma0, log_gamma0)
        exponents.append(np.zeros(1))
        scales.append(np.array([prob * idle_mass]))

        nodes, weights = active_region_nodes(branch, params, consts, probs, gamma0, deg, log_gamma0)
        if weights.size == 0:
            continue
        mu = _branch_powers(branch, nodes, gamma0, params, consts, probs, cfg, log_gamma0)
        rate = secure_rate(branch.detected_busy, nodes, mu, params, consts, rate_policy)

        shortfall += prob * float(np.sum(weights * -np.expm1(-theta_t * rate)))
        exponents.append(-theta_t * rate)
        scales.append(prob * weights)

    if shortfall <= 0.5:
        log_mean = math.log1p(-shortfall)
    else:
        log_mean = float(special.logsumexp(np.concatenate(exponents), b=np.concatenate(scales)))

    return -log_mean / (params.theta * params.bandwidth_B * params.frame_T)
