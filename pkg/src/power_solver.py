'''
Optimal power control: the fixed-point maps H_b / H_i, the bracketed power control iteration,
an independent Lagrangian oracle, and calibration of the power threshold gamma0 against the
average interference constraint.

gamma0 spans hundreds of decades as theta grows (it scales like the service factor
(1 + SNR X)^-kappa), so the solver carries it as log(gamma0) internally and every public
entry point accepts either gamma0 or log_gamma0
'''

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize

from src.channel import (SystemParams, DerivedConstants, StateProbabilities, FadingDraw, FadingDraws,
                         ArrayLike)
from src.exceptions import ParameterException, SolverException
from src.system_constants import Branch, SolverDefaults

logger = logging.getLogger(__name__)




'''
------------
Domain Types
------------
'''

@dataclass(frozen=True)
class SolverConfig:

    fp_tolerance: float = SolverDefaults.FP_TOLERANCE
    max_fp_iters: int = SolverDefaults.MAX_FP_ITERS
    gamma_tolerance: float = SolverDefaults.GAMMA_TOLERANCE
    max_gamma_iters: int = SolverDefaults.MAX_GAMMA_ITERS
    gamma_bracket: Tuple[float, float] = SolverDefaults.GAMMA_BRACKET

    def validate(self):
        if not (self.fp_tolerance > 0 and self.gamma_tolerance > 0):
            raise ParameterException('solver tolerances must be positive')
        if self.max_fp_iters < 1 or self.max_gamma_iters < 1:
            raise ParameterException('solver iteration limits must be at least 1')
        low, high = self.gamma_bracket
        if not 0 < low < high:
            raise ParameterException(f'gamma bracket must satisfy 0 < low < high, got {self.gamma_bracket}')

    def to_dict(self) -> dict:
        return {
            'fp_tolerance': self.fp_tolerance,
            'max_fp_iters': self.max_fp_iters,
            'gamma_tolerance': self.gamma_tolerance,
            'max_gamma_iters': self.max_gamma_iters,
            'gamma_low': self.gamma_bracket[0],
            'gamma_high': self.gamma_bracket[1],
        }


@dataclass(frozen=True)
class PolicyPair:
    '''
    Normalized powers for the sensed-busy and sensed-idle branches, with the number of
    H evaluations each needed. Holds arrays aligned with a FadingDraws, or scalars for one draw
    '''

    mu_b: ArrayLike
    mu_i: ArrayLike
    iters_b: ArrayLike = 0
    iters_i: ArrayLike = 0

    @classmethod
    def constant(cls, mu_b: float, mu_i: float, n: int) -> 'PolicyPair':
        return cls(np.full(n, float(mu_b)), np.full(n, float(mu_i)), np.zeros(n, dtype=int), np.zeros(n, dtype=int))

    def __len__(self) -> int:
        return np.size(self.mu_b)

    def __getitem__(self, key):
        pair = PolicyPair(self.mu_b[key], self.mu_i[key], self.iters_b[key], self.iters_i[key])
        if np.ndim(pair.mu_b) == 0:
            return PolicyPair(float(pair.mu_b), float(pair.mu_i), int(pair.iters_b), int(pair.iters_i))
        return pair


@dataclass(frozen=True)
class CalibrationResult:

    log_gamma0: float
    achieved_power: float
    gamma_iters: int
    policies: PolicyPair

    @property
    def gamma0(self) -> float:
        '''May underflow to 0 at large theta; log_gamma0 is exact'''
        return math.exp(self.log_gamma0)


@dataclass(frozen=True)
class _BranchTerms:
    '''
    Per-branch coefficients. beta_p divides the main-channel SNR, e_scale multiplies z_e
    in the threshold, prob is the state probability and weight the interference weight
    '''

    beta_p: float
    e_scale: float
    prob: float
    weight: float

    def log_price(self, log_gamma0: float) -> float:
        '''log(gamma0 w / p)'''
        return log_gamma0 + math.log(self.weight) - math.log(self.prob)


def _branch_terms(branch: Branch, consts: DerivedConstants, probs: StateProbabilities,
                  params: SystemParams) -> _BranchTerms:
    if branch is Branch.BUSY:
        return _BranchTerms(consts.beta, consts.beta * consts.alpha_i, probs.p_b, params.p_d)
    return _BranchTerms(1.0, consts.alpha_i, probs.p_i, 1.0 - params.p_d)


def _resolve_log_gamma(gamma0: Optional[float], log_gamma0: Optional[float]) -> float:
    if log_gamma0 is not None:
        if not math.isfinite(log_gamma0):
            raise ParameterException(f'log_gamma0 must be finite, got {log_gamma0}')
        return float(log_gamma0)
    if gamma0 is None or not gamma0 > 0 or not math.isfinite(gamma0):
        raise ParameterException(f'gamma0 must be positive and finite, got {gamma0}')
    return math.log(gamma0)




'''
------------------
Fixed-Point Mapping
------------------
'''

def _threshold_holds(terms: _BranchTerms, z_m: ArrayLike, z_e: ArrayLike, log_price: float) -> ArrayLike:
    '''z_m - z_e e > price beta', compared in log space'''
    d = z_m - z_e * terms.e_scale
    with np.errstate(divide='ignore'):
        log_d = np.log(np.maximum(d, 0.0))
    return (d > 0) & (log_d > log_price + math.log(terms.beta_p))


def _log_service_factor(terms: _BranchTerms, x: ArrayLike, z_m: ArrayLike, z_e: ArrayLike,
                        params: SystemParams, consts: DerivedConstants) -> ArrayLike:
    '''log f(X) for the busy branch, log g(X) for the idle branch'''
    snr_x = params.snr * np.asarray(x, dtype=float) / terms.beta_p
    return -consts.kappa * (np.log1p(z_m * snr_x) - np.log1p(z_e * terms.e_scale * snr_x))


def _rhs(terms: _BranchTerms, x: ArrayLike, z_m: ArrayLike, z_e: ArrayLike, log_price: float,
         params: SystemParams, consts: DerivedConstants) -> ArrayLike:
    '''
    H rationalized so z_e = 0 stays finite, with r = f / price:
        H = 2(d r - beta') / (SNR (d sqrt(1 + c r) + s)),   c = 4 z_m z_e alpha_i / d
    evaluated after dividing through by sqrt(r) wherever r > 1
    '''
    d = z_m - z_e * terms.e_scale
    s = z_m + z_e * terms.e_scale
    c = 4.0 * z_m * z_e * consts.alpha_i / d
    log_r = _log_service_factor(terms, x, z_m, z_e, params, consts) - log_price

    r = np.exp(np.minimum(log_r, 0.0))
    small = 2.0 * (r * d - terms.beta_p) / (params.snr * (d * np.sqrt(1.0 + c * r) + s))

    sr = np.exp(np.maximum(log_r, 0.0) / 2.0)
    large = 2.0 * (sr * d - terms.beta_p / sr) / (params.snr * (d * np.sqrt(1.0 / sr ** 2 + c) + s / sr))

    return np.where(log_r <= 0.0, small, large)


def fixed_point_rhs(branch: Branch, x: ArrayLike, draw, gamma0: Optional[float], params: SystemParams,
                    consts: DerivedConstants, probs: StateProbabilities,
                    log_gamma0: Optional[float] = None) -> ArrayLike:
    '''
    H_b(x) or H_i(x) for one draw or a FadingDraws.
    Only defined where the branch threshold holds strictly and z_e > 0
    '''
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)
    if np.any(np.asarray(x) < 0):
        raise ParameterException('candidate power must be non-negative')

    terms = _branch_terms(branch, consts, probs, params)
    if terms.prob <= 0 or terms.weight <= 0:
        raise ParameterException(f'{branch.name} branch has no fixed point (p={terms.prob}, w={terms.weight})')

    z_m, z_e = np.asarray(draw.z_m, dtype=float), np.asarray(draw.z_e, dtype=float)
    if np.any(z_e <= 0):
        raise ParameterException('z_e = 0 has a closed-form policy; H is not used there')
    log_price = terms.log_price(log_gamma0)
    if not np.all(_threshold_holds(terms, z_m, z_e, log_price)):
        raise ParameterException(f'{branch.name} threshold violated; the policy is 0 there')

    return _rhs(terms, x, z_m, z_e, log_price, params, consts)




'''
-------------
Power Control
-------------
'''

def _unlinked_power(terms: _BranchTerms, z_m: np.ndarray, log_price: float, params: SystemParams,
                    consts: DerivedConstants) -> np.ndarray:
    '''Stationary point of p (1 + a mu)^-kappa + lambda mu when the eavesdropper has no link'''
    log_k0 = np.log(z_m) - log_price - math.log(terms.beta_p)
    a = z_m * params.snr / terms.beta_p
    return np.expm1(log_k0 / (consts.kappa + 1.0)) / a


def _rhs_slope(terms: _BranchTerms, x: ArrayLike, z_m: ArrayLike, z_e: ArrayLike, log_price: float,
               params: SystemParams, consts: DerivedConstants) -> ArrayLike:
    '''
    dH/dx = (dH/dlog r)(dlog f/dx). With q = 1/r, S = sqrt(q + c), E = d S + s sqrt(q), M = d - beta' q:
        dH/dlog r = 2 sqrt(r) (d E - M d c / (2 S)) / (SNR E^2)
    '''
    x = np.asarray(x, dtype=float)
    d = z_m - z_e * terms.e_scale
    s = z_m + z_e * terms.e_scale
    c = 4.0 * z_m * z_e * consts.alpha_i / d
    log_r = np.clip(_log_service_factor(terms, x, z_m, z_e, params, consts) - log_price, -600.0, 600.0)

    q = np.exp(-log_r)
    sr = np.exp(log_r / 2.0)
    root = np.sqrt(q + c)
    e = d * root + s * np.sqrt(q)
    m = d - terms.beta_p * q
    dh_dlog_r = 2.0 * sr * (d * e - m * d * c / (2.0 * root)) / (params.snr * e ** 2)

    a_m = z_m * params.snr / terms.beta_p
    a_e = z_e * terms.e_scale * params.snr / terms.beta_p
    dlog_f = -consts.kappa * (params.snr * d / terms.beta_p) / ((1.0 + a_m * x) * (1.0 + a_e * x))
    return dh_dlog_r * dlog_f


def _iterate_power_control(terms: _BranchTerms, z_m: np.ndarray, z_e: np.ndarray, log_price: float,
                           params: SystemParams, consts: DerivedConstants,
                           cfg: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Bracketed fixed-point search on [0, H(0)], run for every draw at once.

    Every evaluation of H at the trial point x narrows the bracket the way the power control
    iteration does: H(x) > x gives [x, min(high, H(x))], otherwise [max(low, H(x)), x].
    The next trial point is a Newton step on log H(x) - log x when it lands inside the bracket,
    and a bisection step otherwise or when the bracket has not halved over the last two
    evaluations. Bisection is geometric, with the linearized start H(0) / (1 - H'(0)) standing in
    for a zero lower end. A draw stops once |H(x) - x| <= fp_tolerance or the bracket has collapsed to
    a few ulps of max(1, x); iters counts the evaluations after H(0)
    '''
    m = z_m.shape[0]
    mu = np.zeros(m)
    iters = np.zeros(m, dtype=int)

    low = np.zeros(m)
    high = _rhs(terms, low, z_m, z_e, log_price, params, consts)
    x_lin = high / (1.0 - _rhs_slope(terms, low, z_m, z_e, log_price, params, consts))
    x = np.sqrt(x_lin * high)
    floor = np.minimum(x_lin, x)

    width_1 = np.full(m, np.inf)
    width_2 = np.full(m, np.inf)

    live = np.arange(m)
    for it in range(1, cfg.max_fp_iters + 1):
        if live.size == 0:
            break

        xl, zm, ze = x[live], z_m[live], z_e[live]
        h = _rhs(terms, xl, zm, ze, log_price, params, consts)
        iters[live] = it

        below = h > xl
        lo = np.where(below, xl, np.maximum(low[live], h))
        hi = np.where(below, np.minimum(high[live], h), xl)
        low[live], high[live] = lo, hi
        width = hi - lo

        settled = np.abs(h - xl) <= cfg.fp_tolerance
        collapsed = width <= SolverDefaults.FP_COLLAPSE * np.maximum(1.0, xl)
        converged = settled | collapsed
        mu[live[converged]] = np.where(settled, xl, (lo + hi) / 2.0)[converged]

        positive = h > 0
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            elasticity = xl * _rhs_slope(terms, xl, zm, ze, log_price, params, consts) / h
            newton = xl * np.exp(np.log(h / xl) / (1.0 - elasticity))
        stalled = width > 0.5 * width_2[live]
        take_newton = positive & np.isfinite(newton) & (newton > lo) & (newton < hi) & ~stalled
        geometric = np.sqrt(np.maximum(lo, floor[live]) * hi)
        bisect = np.where((geometric > lo) & (geometric < hi), geometric, (lo + hi) / 2.0)
        x[live] = np.where(take_newton, newton, bisect)

        width_2[live] = width_1[live]
        width_1[live] = width
        live = live[~converged]

    if live.size:
        raise SolverException(
            f'power control did not converge for {live.size} draws within {cfg.max_fp_iters} iterations',
            {'log_price': log_price, 'unconverged': int(live.size), 'first_z_m': float(z_m[live[0]]),
             'first_z_e': float(z_e[live[0]])},
        )

    return mu, iters


def _solve_branch(branch: Branch, z_m: np.ndarray, z_e: np.ndarray, log_gamma0: float, params: SystemParams,
                  consts: DerivedConstants, probs: StateProbabilities,
                  cfg: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    mu = np.zeros(z_m.shape[0])
    iters = np.zeros(z_m.shape[0], dtype=int)

    terms = _branch_terms(branch, consts, probs, params)
    if terms.prob <= 0:
        return mu, iters
    if terms.weight <= 0:
        raise SolverException(
            f'{branch.name} branch power is unpriced (interference weight 0) and grows without bound',
            {'p_d': params.p_d, 'prob': terms.prob},
        )

    log_price = terms.log_price(log_gamma0)
    active = _threshold_holds(terms, z_m, z_e, log_price)

    unlinked = active & (z_e == 0)
    if np.any(unlinked):
        mu[unlinked] = _unlinked_power(terms, z_m[unlinked], log_price, params, consts)

    linked = np.flatnonzero(active & (z_e > 0))
    if linked.size:
        mu[linked], iters[linked] = _iterate_power_control(terms, z_m[linked], z_e[linked], log_price,
                                                           params, consts, cfg)
    return mu, iters


def solve_policy(draw: Union[FadingDraw, FadingDraws], gamma0: Optional[float], params: SystemParams,
                 consts: DerivedConstants, probs: StateProbabilities, cfg: Optional[SolverConfig] = None,
                 log_gamma0: Optional[float] = None) -> PolicyPair:
    '''Optimal (mu_b, mu_i) for a single draw or every draw of a FadingDraws'''
    cfg = cfg or SolverConfig()
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)

    single = isinstance(draw, FadingDraw)
    draws = FadingDraws(draw.z_m, draw.z_e) if single else draw

    mu_b, iters_b = _solve_branch(Branch.BUSY, draws.z_m, draws.z_e, log_gamma0, params, consts, probs, cfg)
    mu_i, iters_i = _solve_branch(Branch.IDLE, draws.z_m, draws.z_e, log_gamma0, params, consts, probs, cfg)

    policies = PolicyPair(mu_b, mu_i, iters_b, iters_i)
    return policies[0] if single else policies




'''
---------------------
Independent Checks
---------------------
'''

def _log_stationarity(terms: _BranchTerms, mu: ArrayLike, z_m: ArrayLike, z_e: ArrayLike, log_price: float,
                      params: SystemParams, consts: DerivedConstants) -> ArrayLike:
    '''log(-f'(mu) / (kappa SNR)) - log price: positive while J still decreases in mu'''
    a_m = z_m * params.snr / terms.beta_p
    a_e = z_e * terms.e_scale * params.snr / terms.beta_p
    d = z_m - z_e * terms.e_scale
    with np.errstate(divide='ignore'):
        log_d = np.log(np.maximum(d, 0.0))
    return (_log_service_factor(terms, mu, z_m, z_e, params, consts) + log_d - math.log(terms.beta_p)
            - np.log1p(a_m * mu) - np.log1p(a_e * mu) - log_price)


def oracle_policy(branch: Branch, draw, gamma0: Optional[float], params: SystemParams, consts: DerivedConstants,
                  probs: StateProbabilities, tolerance: float = SolverDefaults.ORACLE_TOLERANCE,
                  log_gamma0: Optional[float] = None) -> ArrayLike:
    '''
    Direct minimization of the per-draw Lagrangian
        J(mu) = p f(mu) + gamma0 kappa SNR w mu
    by bisection on the sign of dJ/dmu over [0, 10 H(0)]; H(0) <= 0 collapses the bracket to {0}.
    Stops once the bracket is within tolerance * max(1, mu)
    '''
    if not consts.kappa > 0:
        raise ParameterException('the Lagrangian oracle needs theta > 0')
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)

    terms = _branch_terms(branch, consts, probs, params)
    z_m = np.atleast_1d(np.asarray(draw.z_m, dtype=float))
    z_e = np.atleast_1d(np.asarray(draw.z_e, dtype=float))
    if terms.prob <= 0:
        result = np.zeros_like(z_m)
        return result if np.ndim(draw.z_m) else float(result[0])
    if terms.weight <= 0:
        raise SolverException(f'{branch.name} branch power is unpriced', {'p_d': params.p_d})

    log_price = terms.log_price(log_gamma0)

    upper = np.zeros_like(z_m)
    open_bracket = z_m - z_e * terms.e_scale > 0
    upper[open_bracket] = SolverDefaults.ORACLE_BRACKET_FACTOR * np.maximum(
        _rhs(terms, 0.0, z_m[open_bracket], z_e[open_bracket], log_price, params, consts), 0.0)
    if not np.all(np.isfinite(upper)):
        raise SolverException('oracle bracket exhausted', {'log_gamma0': log_gamma0})

    a = np.zeros_like(z_m)
    b = upper
    for _ in range(SolverDefaults.ORACLE_MAX_STEPS):
        if np.all(b - a <= tolerance * np.maximum(1.0, b)):
            break
        mid = (a + b) / 2.0
        decreasing = _log_stationarity(terms, mid, z_m, z_e, log_price, params, consts) > 0
        a = np.where(decreasing, mid, a)
        b = np.where(decreasing, b, mid)

    result = (a + b) / 2.0
    return result if np.ndim(draw.z_m) else float(result[0])


def bisection_policy(branch: Branch, draw: FadingDraw, gamma0: Optional[float], params: SystemParams,
                     consts: DerivedConstants, probs: StateProbabilities, xtol: float = 1e-12,
                     log_gamma0: Optional[float] = None) -> float:
    '''Root of X - H(X) on [0, H(0)] by plain bisection, for a single draw'''
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)
    terms = _branch_terms(branch, consts, probs, params)
    if terms.prob <= 0:
        return 0.0

    log_price = terms.log_price(log_gamma0)
    if not _threshold_holds(terms, draw.z_m, draw.z_e, log_price):
        return 0.0

    def gap(x):
        return x - float(_rhs(terms, x, draw.z_m, draw.z_e, log_price, params, consts))

    upper = float(_rhs(terms, 0.0, draw.z_m, draw.z_e, log_price, params, consts))
    return optimize.bisect(gap, 0.0, upper, xtol=xtol)




'''
--------------------------------
Interference Constraint Handling
--------------------------------
'''

def average_power(policies: PolicyPair, p_d: float, weights: Optional[np.ndarray] = None) -> float:
    '''P_d E[mu_b] + (1 - P_d) E[mu_i]: sample mean, or a weighted sum for quadrature nodes'''
    if len(policies) == 0:
        raise ParameterException('average power of an empty policy set')

    mean_b = np.average(policies.mu_b, weights=weights)
    mean_i = np.average(policies.mu_i, weights=weights)
    return float(p_d * mean_b + (1.0 - p_d) * mean_i)


def calibrate_gamma(draws: FadingDraws, params: SystemParams, consts: DerivedConstants,
                    probs: StateProbabilities, cfg: Optional[SolverConfig] = None) -> CalibrationResult:
    '''
    Finds gamma0 with average power 1 on a fixed draw set.
    Average power is non-increasing in gamma0, so the bracket is widened (in log steps that double
    each time) until it straddles 1 and then bisected in log space
    '''
    cfg = cfg or SolverConfig()
    cfg.validate()

    trials = 0

    def evaluate(log_gamma0: float) -> Tuple[float, PolicyPair]:
        nonlocal trials
        trials += 1
        policies = solve_policy(draws, None, params, consts, probs, cfg, log_gamma0=log_gamma0)
        power = average_power(policies, params.p_d)
        logger.debug('log gamma0=%.9g average power=%.9g', log_gamma0, power)
        return power, policies

    def done(log_gamma0: float, power: float, policies: PolicyPair) -> CalibrationResult:
        logger.info('calibrated log gamma0=%.9g (power %.9g) after %d trials', log_gamma0, power, trials)
        return CalibrationResult(log_gamma0, power, trials, policies)

    def widen(log_gamma0: float, direction: float, power: float, policies: PolicyPair, too_far) -> tuple:
        step = math.log(SolverDefaults.GAMMA_EXPANSION)
        for _ in range(SolverDefaults.MAX_BRACKET_EXPANSIONS):
            if not too_far(power):
                return log_gamma0, power, policies
            log_gamma0 += direction * step
            step *= 2.0
            if abs(log_gamma0) > SolverDefaults.LOG_GAMMA_LIMIT:
                break
            power, policies = evaluate(log_gamma0)
        if not too_far(power):
            return log_gamma0, power, policies
        raise SolverException('gamma0 bracket cannot reach the interference constraint',
                              {'log_gamma0': log_gamma0, 'power': power, 'trials': trials})

    log_low, log_high = (math.log(g) for g in cfg.gamma_bracket)

    power_low, policies_low = evaluate(log_low)
    log_low, power_low, policies_low = widen(log_low, -1.0, power_low, policies_low,
                                             lambda p: p < 1.0 - cfg.gamma_tolerance)
    if abs(power_low - 1.0) <= cfg.gamma_tolerance:
        return done(log_low, power_low, policies_low)

    power_high, policies_high = evaluate(log_high)
    log_high, power_high, policies_high = widen(log_high, 1.0, power_high, policies_high,
                                                lambda p: p > 1.0 + cfg.gamma_tolerance)
    if abs(power_high - 1.0) <= cfg.gamma_tolerance:
        return done(log_high, power_high, policies_high)

    for _ in range(cfg.max_gamma_iters):
        log_mid = (log_low + log_high) / 2.0
        power, policies = evaluate(log_mid)
        if abs(power - 1.0) <= cfg.gamma_tolerance:
            return done(log_mid, power, policies)
        if power > 1.0:
            log_low = log_mid
        else:
            log_high = log_mid

    raise SolverException(
        f'gamma0 bisection did not meet tolerance {cfg.gamma_tolerance} in {cfg.max_gamma_iters} iterations',
        {'log_gamma_low': log_low, 'log_gamma_high': log_high, 'trials': trials},
    )


def active_mask(branch: Branch, draws: FadingDraws, gamma0: Optional[float], params: SystemParams,
                consts: DerivedConstants, probs: StateProbabilities,
                log_gamma0: Optional[float] = None) -> np.ndarray:
    '''Draws whose branch threshold holds strictly, i.e. that get positive power'''
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)
    terms = _branch_terms(branch, consts, probs, params)
    if terms.prob <= 0:
        return np.zeros(len(draws), dtype=bool)
    return _threshold_holds(terms, draws.z_m, draws.z_e, terms.log_price(log_gamma0))


def threshold_line(branch: Branch, params: SystemParams, consts: DerivedConstants, probs: StateProbabilities,
                   gamma0: Optional[float] = None, log_gamma0: Optional[float] = None) -> Tuple[float, float]:
    '''
    (offset, slope) such that the branch gets power exactly where z_m > offset + slope z_e.
    An empty branch has offset inf
    '''
    log_gamma0 = _resolve_log_gamma(gamma0, log_gamma0)
    terms = _branch_terms(branch, consts, probs, params)
    if terms.prob <= 0:
        return math.inf, terms.e_scale
    if terms.weight <= 0:
        return 0.0, terms.e_scale

    log_offset = terms.log_price(log_gamma0) + math.log(terms.beta_p)
    offset = math.exp(log_offset) if log_offset < 709.0 else math.inf
    return offset, terms.e_scale
