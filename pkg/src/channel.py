'''
Channel model of the cognitive radio wiretap link: exogenous parameters, derived constants,
fading draws, scenario probabilities and the instantaneous secrecy rates of each frame
'''

import math
from dataclasses import dataclass, asdict, replace
from typing import Iterator, Tuple, Union, TYPE_CHECKING

import numpy as np

from src.exceptions import ParameterException
from src.system_constants import BaselineParams, Scenario, RatePolicy

if TYPE_CHECKING:
    from src.power_solver import PolicyPair

ArrayLike = Union[float, np.ndarray]

LN2 = math.log(2.0)

# relative slack for rate comparisons that hold with equality analytically
RATE_SLACK = 1e-9


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x_lin: float) -> float:
    return 10.0 * math.log10(x_lin)




'''
------------
Domain Types
------------
'''

@dataclass(frozen=True)
class SystemParams:
    '''All exogenous scalars of the link. snr is linear: P_int / (B * sigma2_nm)'''

    rho: float = BaselineParams.RHO
    p_d: float = BaselineParams.P_D
    p_f: float = BaselineParams.P_F
    sigma2_nm: float = BaselineParams.SIGMA2_NM
    sigma2_ne: float = BaselineParams.SIGMA2_NE
    sigma2_sm: float = BaselineParams.SIGMA2_SM
    sigma2_se: float = BaselineParams.SIGMA2_SE
    sigma2_m: float = BaselineParams.SIGMA2_M
    sigma2_e: float = BaselineParams.SIGMA2_E
    bandwidth_B: float = BaselineParams.BANDWIDTH_B
    frame_T: float = BaselineParams.FRAME_T
    snr: float = db_to_linear(BaselineParams.SNR_DB)
    theta: float = BaselineParams.THETA

    @classmethod
    def from_snr_db(cls, snr_db: float, **fields) -> 'SystemParams':
        return cls(snr=db_to_linear(snr_db), **fields)

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)

    def updated(self, **changes) -> 'SystemParams':
        return replace(self, **changes)

    def with_beta(self, beta: float) -> 'SystemParams':
        '''Moves sigma2_sm so that 1 + sigma2_sm / sigma2_nm == beta; sigma2_nm and sigma2_se stay put'''
        if not beta >= 1.0:
            raise ParameterException(f'beta must be >= 1, got {beta}')
        return replace(self, sigma2_sm=(beta - 1.0) * self.sigma2_nm)

    def validate(self):
        for name in ('rho', 'p_d', 'p_f'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterException(f'{name} must be a probability, got {value}')

        for name in ('sigma2_nm', 'sigma2_ne', 'sigma2_m', 'bandwidth_B', 'frame_T', 'snr'):
            value = getattr(self, name)
            if not value > 0.0:
                raise ParameterException(f'{name} must be positive, got {value}')

        # sigma2_e == 0 is the unlinked-eavesdropper case
        for name in ('sigma2_sm', 'sigma2_se', 'sigma2_e', 'theta'):
            value = getattr(self, name)
            if not value >= 0.0:
                raise ParameterException(f'{name} must be non-negative, got {value}')

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedConstants:

    alpha_b: float
    alpha_i: float
    beta: float
    kappa: float


@dataclass(frozen=True)
class StateProbabilities:
    '''p_b: sensed busy, p_i: idle and sensed idle, p_0: busy but missed'''

    p_b: float
    p_i: float
    p_0: float


@dataclass(frozen=True)
class FadingDraw:
    '''One realization of the squared fading magnitudes'''

    z_m: float
    z_e: float


@dataclass(frozen=True)
class FadingDraws:
    '''
    A set of fading realizations stored column-wise.
    Indexing with an int gives a FadingDraw, with a slice or mask another FadingDraws
    '''

    z_m: np.ndarray
    z_e: np.ndarray

    def __post_init__(self):
        z_m = np.atleast_1d(np.asarray(self.z_m, dtype=float))
        z_e = np.atleast_1d(np.asarray(self.z_e, dtype=float))
        if z_m.shape != z_e.shape or z_m.ndim != 1:
            raise ParameterException('z_m and z_e must be 1-d arrays of equal length')
        if np.any(z_m < 0) or np.any(z_e < 0):
            raise ParameterException('squared fading magnitudes must be non-negative')
        object.__setattr__(self, 'z_m', z_m)
        object.__setattr__(self, 'z_e', z_e)

    def __len__(self) -> int:
        return self.z_m.shape[0]

    def __getitem__(self, key):
        if isinstance(key, (int, np.integer)):
            return FadingDraw(float(self.z_m[key]), float(self.z_e[key]))
        return FadingDraws(self.z_m[key], self.z_e[key])

    def __iter__(self) -> Iterator[FadingDraw]:
        for i in range(len(self)):
            yield self[i]


@dataclass(frozen=True)
class OutcomeRecord:
    '''What a frame delivered; fields are arrays when the draw is a FadingDraws'''

    reliable: ArrayLike
    secret: ArrayLike
    service_bits: ArrayLike




'''
----------------------------
Constants and Probabilities
----------------------------
'''

def derive_constants(params: SystemParams) -> DerivedConstants:
    params.validate()

    alpha_b = (params.sigma2_nm + params.sigma2_sm) / (params.sigma2_ne + params.sigma2_se)
    alpha_i = params.sigma2_nm / params.sigma2_ne
    beta = 1.0 + params.sigma2_sm / params.sigma2_nm

    # exp(-theta*T*B*log2(x)) == x ** (-kappa)
    kappa = params.theta * params.frame_T * params.bandwidth_B / LN2

    return DerivedConstants(alpha_b=alpha_b, alpha_i=alpha_i, beta=beta, kappa=kappa)


def state_probabilities(rho: float, p_d: float, p_f: float) -> StateProbabilities:
    for name, value in (('rho', rho), ('p_d', p_d), ('p_f', p_f)):
        if not 0.0 <= value <= 1.0:
            raise ParameterException(f'{name} must be a probability, got {value}')

    return StateProbabilities(
        p_b=rho * p_d + (1.0 - rho) * p_f,
        p_i=(1.0 - rho) * (1.0 - p_f),
        p_0=rho * (1.0 - p_d),
    )


def scenario_probabilities(rho: float, p_d: float, p_f: float) -> np.ndarray:
    '''Per-frame probabilities of S1..S4, in Scenario order'''
    state_probabilities(rho, p_d, p_f)
    return np.array([rho * p_d, rho * (1.0 - p_d), (1.0 - rho) * p_f, (1.0 - rho) * (1.0 - p_f)])




'''
--------------
Fading Sampling
--------------
'''

def make_generator(seed: int, stream: Union[int, Tuple[int, ...]] = 0) -> np.random.Generator:
    '''Counter-based generator; distinct streams (ints or key tuples) of one seed never overlap'''
    spawn_key = tuple(stream) if isinstance(stream, tuple) else (stream,)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def sample_fading(seed: int, n: int, params: SystemParams, stream: Union[int, Tuple[int, ...]] = 0) -> FadingDraws:
    '''
    n i.i.d. Rayleigh draws: z_m ~ Exp(mean sigma2_m), z_e ~ Exp(mean sigma2_e),
    by inverse-CDF transform of Philox uniforms
    '''
    if n < 1:
        raise ParameterException(f'need at least one fading draw, got n={n}')

    u = make_generator(seed, stream).random((2, n))
    unit_exp = -np.log1p(-u)

    return FadingDraws(params.sigma2_m * unit_exp[0], params.sigma2_e * unit_exp[1])




'''
-------------------------
Instantaneous Secure Rates
-------------------------
'''

def _check_power(mu: ArrayLike):
    if np.any(np.asarray(mu) < 0):
        raise ParameterException('normalized power must be non-negative')


def _log2_capacity(bandwidth_B: float, zeta: ArrayLike) -> ArrayLike:
    return bandwidth_B * np.log1p(zeta) / LN2


def capacity_terms(k: Scenario, draw, mu: ArrayLike, params: SystemParams,
                   consts: DerivedConstants) -> Tuple[ArrayLike, ArrayLike]:
    '''
    (C_mk, C_ek) in bits/s: main and eavesdropper channel capacities of scenario k.
    PU-active scenarios see interference at both receivers
    '''
    _check_power(mu)

    if k.pu_active:
        zeta_m = draw.z_m * params.snr * mu / consts.beta
        zeta_e = draw.z_e * consts.alpha_b * params.snr * mu / consts.beta
    else:
        zeta_m = draw.z_m * params.snr * mu
        zeta_e = draw.z_e * consts.alpha_i * params.snr * mu

    return _log2_capacity(params.bandwidth_B, zeta_m), _log2_capacity(params.bandwidth_B, zeta_e)


def secrecy_capacity(k: Scenario, draw, mu: ArrayLike, params: SystemParams,
                     consts: DerivedConstants) -> ArrayLike:
    '''[C_mk - C_ek]+ in bits/s'''
    c_m, c_e = capacity_terms(k, draw, mu, params, consts)
    return np.maximum(c_m - c_e, 0.0)


def coded_rates(detected_busy: bool, draw, mu: ArrayLike, params: SystemParams, consts: DerivedConstants,
                rate_policy: RatePolicy = RatePolicy.CONFUSION) -> Tuple[ArrayLike, ArrayLike]:
    '''
    (total coded rate, confusion rate) ST uses for a sensing decision.
    Sensed busy: C_m1 with confusion pinned to C_e3 (or C_e1 under the naive policy).
    Sensed idle: C_m4 with confusion C_e4
    '''
    if not detected_busy:
        return capacity_terms(Scenario.S4, draw, mu, params, consts)

    c_m1, c_e1 = capacity_terms(Scenario.S1, draw, mu, params, consts)
    if rate_policy is RatePolicy.NAIVE:
        return c_m1, c_e1

    _, c_e3 = capacity_terms(Scenario.S3, draw, mu, params, consts)
    return c_m1, c_e3


def secure_rate(detected_busy: bool, draw, mu: ArrayLike, params: SystemParams, consts: DerivedConstants,
                rate_policy: RatePolicy = RatePolicy.CONFUSION) -> ArrayLike:
    '''Secret-data rate r_b (sensed busy) or r_i (sensed idle), bits/s'''
    coded, confusion = coded_rates(detected_busy, draw, mu, params, consts, rate_policy)
    return np.maximum(coded - confusion, 0.0)


def scenario_outcome(k: Scenario, draw, policy: 'PolicyPair', params: SystemParams, consts: DerivedConstants,
                     rate_policy: RatePolicy = RatePolicy.CONFUSION) -> OutcomeRecord:
    '''
    Delivery of one frame (or a batch of frames sharing scenario k).
    A frame is reliable when the coded rate fits the main channel of the actual scenario and
    secret when the confusion rate saturates the actual eavesdropper channel.
    Miss-detected frames (S2) are always lost and left to ARQ
    '''
    mu = policy.mu_b if k.detected_busy else policy.mu_i
    _check_power(mu)

    coded, confusion = coded_rates(k.detected_busy, draw, mu, params, consts, rate_policy)
    rate = np.maximum(coded - confusion, 0.0)
    c_m, c_e = capacity_terms(k, draw, mu, params, consts)

    if k is Scenario.S2:
        reliable = np.zeros_like(np.asarray(rate), dtype=bool)
    else:
        reliable = coded <= c_m + RATE_SLACK * np.maximum(1.0, c_m)

    # no secret payload means nothing to leak
    secret = (rate <= 0.0) | (confusion >= c_e - RATE_SLACK * np.maximum(1.0, c_e))

    service_bits = np.where(reliable, params.frame_T * rate, 0.0)

    if np.ndim(service_bits) == 0:
        return OutcomeRecord(bool(reliable), bool(secret), float(service_bits))
    return OutcomeRecord(reliable, secret, service_bits)
