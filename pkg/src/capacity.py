'''
Effective secure capacity: the largest constant arrival rate whose queue still decays at the
QoS exponent theta, evaluated on a calibrated optimal policy, plus parameter sweeps over it
'''

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import special

from src.channel import (SystemParams, StateProbabilities, FadingDraws, derive_constants, state_probabilities,
                         sample_fading, secure_rate, db_to_linear)
from src.exceptions import ParameterException, SecrecyException
from src.power_solver import SolverConfig, PolicyPair, calibrate_gamma
from src.system_constants import SweepAxis, RatePolicy

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['axis_value', 'r_e_bits_s_hz', 'r_e_bits_frame', 'gamma0', 'log_gamma0', 'mean_iters_b',
                 'mean_iters_i', 'n_draws', 'seed', 'status']




'''
------------
Domain Types
------------
'''

@dataclass(frozen=True)
class CapacityResult:

    r_e: float  # bits/s/Hz
    gamma0: float
    log_gamma0: float
    ergodic_rate: float  # bits/s/Hz, the theta -> 0 limit
    n_draws: int
    seed: int
    achieved_power: float
    mean_iters_b: float
    mean_iters_i: float
    r_e_bits_frame: float

    def to_dict(self) -> dict:
        return {
            'r_e_bits_s_hz': self.r_e,
            'r_e_bits_frame': self.r_e_bits_frame,
            'ergodic_rate_bits_s_hz': self.ergodic_rate,
            'gamma0': self.gamma0,
            'log_gamma0': self.log_gamma0,
            'achieved_power': self.achieved_power,
            'mean_iters_b': self.mean_iters_b,
            'mean_iters_i': self.mean_iters_i,
            'n_draws': self.n_draws,
            'seed': self.seed,
        }


@dataclass(frozen=True)
class SweepSpec:
    '''
    One axis varied over a grid with everything else held at `fixed`.
    On the sensing axis the grid holds indices into sensing_pairs, each pair being (P_f, P_d)
    '''

    axis: SweepAxis
    grid: Tuple[float, ...]
    fixed: SystemParams = field(default_factory=SystemParams)
    sensing_pairs: Tuple[Tuple[float, float], ...] = ()

    @classmethod
    def over_sensing(cls, pairs: Sequence[Tuple[float, float]], fixed: SystemParams) -> 'SweepSpec':
        pairs = tuple((float(p_f), float(p_d)) for p_f, p_d in pairs)
        return cls(SweepAxis.SENSING, tuple(float(i) for i in range(len(pairs))), fixed, pairs)

    def validate(self):
        if len(self.grid) == 0:
            raise ParameterException('sweep grid is empty')
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ParameterException(f'sweep grid must be strictly increasing, got {list(self.grid)}')

        if self.axis is SweepAxis.SENSING:
            for value in self.grid:
                if value != int(value) or not 0 <= value < len(self.sensing_pairs):
                    raise ParameterException(f'sensing grid value {value} is not an index into sensing_pairs')
        elif self.axis is SweepAxis.THETA and self.grid[0] <= 0:
            raise ParameterException('theta sweep values must be positive')
        elif self.axis is SweepAxis.BETA and self.grid[0] < 1:
            raise ParameterException('beta sweep values must be >= 1')

    def point_params(self, value: float) -> SystemParams:
        if self.axis is SweepAxis.THETA:
            return self.fixed.updated(theta=value)
        if self.axis is SweepAxis.SNR:
            return self.fixed.updated(snr=db_to_linear(value))
        if self.axis is SweepAxis.BETA:
            return self.fixed.with_beta(value)
        p_f, p_d = self.sensing_pairs[int(value)]
        return self.fixed.updated(p_f=p_f, p_d=p_d)




'''
-----------------------
Capacity Evaluation
-----------------------
'''

def _branch_rates(draws: FadingDraws, policies: PolicyPair, params: SystemParams,
                  rate_policy: RatePolicy) -> Tuple[np.ndarray, np.ndarray]:
    consts = derive_constants(params)
    r_b = secure_rate(True, draws, policies.mu_b, params, consts, rate_policy)
    r_i = secure_rate(False, draws, policies.mu_i, params, consts, rate_policy)
    return r_b, r_i


def _log_mean_service_factor(r_b: np.ndarray, r_i: np.ndarray, theta_t: float, probs: StateProbabilities,
                             weights: Optional[np.ndarray]) -> float:
    '''ln E[p_b e^(-theta T r_b) + p_i e^(-theta T r_i) + p_0] without forming the vanishing exponentials'''
    with np.errstate(divide='ignore'):
        log_p = np.log([probs.p_b, probs.p_i, probs.p_0])
    per_draw = special.logsumexp(
        np.stack([log_p[0] - theta_t * r_b, log_p[1] - theta_t * r_i, np.full_like(r_b, log_p[2])]), axis=0)

    n = per_draw.shape[0]
    b = np.full(n, 1.0 / n) if weights is None else np.asarray(weights) / np.sum(weights)
    return float(special.logsumexp(per_draw, b=b))


def effective_secure_capacity(draws: FadingDraws, policies: PolicyPair, params: SystemParams,
                              probs: StateProbabilities, weights: Optional[np.ndarray] = None,
                              rate_policy: RatePolicy = RatePolicy.CONFUSION) -> float:
    '''
    R_e = -ln E[p_b e^(-theta T r_b) + p_i e^(-theta T r_i) + p_0] / (theta B T), bits/s/Hz.
    The expectation is a sample mean, or a weighted sum over quadrature nodes
    '''
    if not params.theta > 0:
        raise ParameterException('effective capacity needs theta > 0; use ergodic_rate for the limit')
    if len(draws) == 0 or len(draws) != len(policies):
        raise ParameterException('draws and policies must be non-empty and aligned')

    r_b, r_i = _branch_rates(draws, policies, params, rate_policy)
    theta_t = params.theta * params.frame_T

    # 1 - E[...], kept apart from the constant so small theta does not cancel
    shortfall = probs.p_b * -np.expm1(-theta_t * r_b) + probs.p_i * -np.expm1(-theta_t * r_i)
    mean_shortfall = float(np.average(shortfall, weights=weights))

    if mean_shortfall <= 0.5:
        log_mean = math.log1p(-mean_shortfall)
    else:
        log_mean = _log_mean_service_factor(r_b, r_i, theta_t, probs, weights)

    return -log_mean / (params.theta * params.bandwidth_B * params.frame_T)


def ergodic_rate(draws: FadingDraws, policies: PolicyPair, params: SystemParams, probs: StateProbabilities,
                 weights: Optional[np.ndarray] = None, rate_policy: RatePolicy = RatePolicy.CONFUSION) -> float:
    '''E[p_b r_b + p_i r_i] / B; the effective capacity never exceeds it'''
    r_b, r_i = _branch_rates(draws, policies, params, rate_policy)
    return float(np.average(probs.p_b * r_b + probs.p_i * r_i, weights=weights)) / params.bandwidth_B


def capacity_cap(params: SystemParams) -> float:
    '''Upper bound -ln(p_0) / (theta B T) set by miss-detected frames, whatever the SNR'''
    if not params.theta > 0:
        raise ParameterException('capacity cap needs theta > 0')
    p_0 = state_probabilities(params.rho, params.p_d, params.p_f).p_0
    if p_0 == 0:
        return math.inf
    return -math.log(p_0) / (params.theta * params.bandwidth_B * params.frame_T)


def maximize_capacity(params: SystemParams, cfg: Optional[SolverConfig] = None, seed: int = 1,
                      n: int = 10**5, rate_policy: RatePolicy = RatePolicy.CONFUSION,
                      draws: Optional[FadingDraws] = None) -> CapacityResult:
    '''Calibrates gamma0 on one draw set and evaluates R_e of the resulting optimal policy'''
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    if draws is None:
        draws = sample_fading(seed, n, params)

    calibration = calibrate_gamma(draws, params, consts, probs, cfg)
    policies = calibration.policies

    r_e = effective_secure_capacity(draws, policies, params, probs, rate_policy=rate_policy)
    ergodic = ergodic_rate(draws, policies, params, probs, rate_policy=rate_policy)

    return CapacityResult(
        r_e=r_e,
        gamma0=calibration.gamma0,
        log_gamma0=calibration.log_gamma0,
        ergodic_rate=ergodic,
        n_draws=len(draws),
        seed=seed,
        achieved_power=calibration.achieved_power,
        mean_iters_b=float(np.mean(policies.iters_b)),
        mean_iters_i=float(np.mean(policies.iters_i)),
        r_e_bits_frame=r_e * params.bandwidth_B * params.frame_T,
    )




'''
------
Sweeps
------
'''

def _sweep_point(spec: SweepSpec, value: float, cfg: Optional[SolverConfig], seed: int, n: int,
                 rate_policy: RatePolicy, draws: Optional[FadingDraws]) -> dict:
    row = {'axis_value': value, 'n_draws': n, 'seed': seed}
    try:
        result = maximize_capacity(spec.point_params(value), cfg, seed, n, rate_policy, draws)
    except SecrecyException as e:
        logger.warning('sweep point %s=%s failed: %s', spec.axis.key, value, e)
        row.update({column: math.nan for column in SWEEP_COLUMNS if column not in row})
        row['status'] = f'error: {e}'
        return row

    row.update({column: entry for column, entry in result.to_dict().items() if column in SWEEP_COLUMNS})
    row['status'] = 'ok'
    return row


def sweep(spec: SweepSpec, cfg: Optional[SolverConfig] = None, seed: int = 1, n: int = 10**5,
          n_jobs: int = 1, rate_policy: RatePolicy = RatePolicy.CONFUSION) -> pd.DataFrame:
    '''
    R_e at every grid value, in grid order. Every point sees the same fading draws.
    A failed point is reported in the status column instead of aborting the sweep
    '''
    spec.validate()
    if n < 1:
        raise ParameterException(f'need at least one fading draw, got n={n}')

    # the sampled axes never touch sigma2_m or sigma2_e, so one draw set serves every point
    draws = sample_fading(seed, n, spec.fixed)

    rows = Parallel(n_jobs=n_jobs)(
        delayed(_sweep_point)(spec, value, cfg, seed, n, rate_policy, draws) for value in spec.grid
    )
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sensing_gain(params: SystemParams, pair_hi: Tuple[float, float], pair_lo: Tuple[float, float],
                 thetas: Sequence[float], cfg: Optional[SolverConfig] = None, seed: int = 1, n: int = 10**5,
                 n_jobs: int = 1) -> pd.DataFrame:
    '''R_e under a better and a worse (P_f, P_d) pair over theta, and the gap between them'''
    frames = []
    for pair in (pair_hi, pair_lo):
        spec = SweepSpec(SweepAxis.THETA, tuple(thetas), params.updated(p_f=pair[0], p_d=pair[1]))
        frames.append(sweep(spec, cfg, seed, n, n_jobs))

    hi, lo = frames
    return pd.DataFrame({
        'theta': hi['axis_value'],
        'r_e_hi': hi['r_e_bits_s_hz'],
        'r_e_lo': lo['r_e_bits_s_hz'],
        'gap': hi['r_e_bits_s_hz'] - lo['r_e_bits_s_hz'],
    })
