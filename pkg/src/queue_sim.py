'''
Frame-level simulation of the secondary link with an infinite data buffer.
Every frame draws fading and a scenario, serves secret bits per the rate policy and
updates Q <- max(0, Q + arrival - service); the post-warm-up queue gives the tail Pr(Q >= q)
'''

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from joblib import Parallel, delayed

from src.channel import (SystemParams, derive_constants, sample_fading, make_generator,
                         scenario_probabilities, scenario_outcome)
from src.exceptions import ParameterException, SolverException
from src.policy_source import PolicySource
from src.system_constants import Scenario, RatePolicy, SimDefaults

logger = logging.getLogger(__name__)




'''
------------
Domain Types
------------
'''

@dataclass(frozen=True)
class SimConfig:

    n_frames: int
    arrival_rate: float  # bits/frame
    seed: int
    params: SystemParams
    policy_source: PolicySource
    rate_policy: RatePolicy = RatePolicy.CONFUSION
    replications: int = 1
    n_jobs: int = 1
    warmup_fraction: float = SimDefaults.WARMUP_FRACTION

    def validate(self):
        if self.n_frames < SimDefaults.MIN_FRAMES:
            raise ParameterException(f'n_frames must be at least {SimDefaults.MIN_FRAMES}, got {self.n_frames}')
        if not self.arrival_rate >= 0:
            raise ParameterException(f'arrival_rate must be non-negative, got {self.arrival_rate}')
        if self.replications < 1:
            raise ParameterException('replications must be at least 1')
        if not 0 <= self.warmup_fraction < 1:
            raise ParameterException('warmup_fraction must lie in [0, 1)')


@dataclass(frozen=True)
class SimResult:

    q_thresholds: np.ndarray  # bits
    tail_probability: np.ndarray
    decay_estimate: Optional[float]  # 1/bits; None when the tail is too thin to fit
    mean_service: float  # bits/frame
    outage_counts: Dict[str, Dict[str, int]]
    scenario_counts: np.ndarray  # frames per scenario, S1..S4
    unstable: bool
    arrival_rate: float
    n_frames: int
    replications: int
    max_queue: float = 0.0
    notes: Dict[str, str] = field(default_factory=dict)

    def summary(self) -> dict:
        out = {
            'arrival_rate_bits_frame': self.arrival_rate,
            'decay_estimate': self.decay_estimate,
            'mean_service_bits_frame': self.mean_service,
            'unstable': self.unstable,
            'n_frames': self.n_frames,
            'replications': self.replications,
            'max_queue_bits': self.max_queue,
        }
        for k in Scenario:
            counts = self.outage_counts[k.name]
            out[f'frames_{k.name.lower()}'] = counts['frames']
            out[f'reliability_outages_{k.name.lower()}'] = counts['reliability_outages']
            out[f'security_outages_{k.name.lower()}'] = counts['security_outages']
        return out




'''
----------------
Queue Recursion
----------------
'''

def lindley_queue(arrival_rate: float, service: np.ndarray) -> np.ndarray:
    '''
    Q_n = max(0, Q_{n-1} + a - s_n) from Q_0 = 0, via the running minimum of the net-input
    random walk: Q_n = S_n - min(0, min_{k<=n} S_k)
    '''
    walk = np.cumsum(arrival_rate - service)
    return walk - np.minimum(0.0, np.minimum.accumulate(walk))


def _run_replication(cfg: SimConfig, replication: int) -> dict:
    n = cfg.n_frames
    key = 2 + replication

    draws = sample_fading(cfg.seed, n, cfg.params, stream=(key, 0))
    probs = scenario_probabilities(cfg.params.rho, cfg.params.p_d, cfg.params.p_f)
    scenarios = make_generator(cfg.seed, (key, 1)).choice(len(Scenario), size=n, p=probs / probs.sum())

    policies = cfg.policy_source.powers(draws)
    consts = derive_constants(cfg.params)

    service = np.zeros(n)
    outages = {}
    for k in Scenario:
        idx = np.flatnonzero(scenarios == k.index)
        record = scenario_outcome(k, draws[idx], policies[idx], cfg.params, consts, cfg.rate_policy)
        service[idx] = record.service_bits
        outages[k.name] = {
            'frames': int(idx.size),
            'reliability_outages': int(np.count_nonzero(~np.asarray(record.reliable, dtype=bool))),
            'security_outages': int(np.count_nonzero(~np.asarray(record.secret, dtype=bool))),
        }

    queue = lindley_queue(cfg.arrival_rate, service)
    warmup = int(cfg.warmup_fraction * n)

    logger.debug('replication %d: mean service %.6g bits/frame, max queue %.6g bits',
                 replication, service.mean(), queue.max())

    return {'queue': queue[warmup:], 'service_total': float(service.sum()), 'outages': outages,
            'scenario_counts': np.bincount(scenarios, minlength=len(Scenario))}




'''
--------------
Tail Analysis
--------------
'''

def tail_thresholds(queue: np.ndarray, arrival_rate: float, points: int = SimDefaults.TAIL_POINTS) -> np.ndarray:
    '''Logarithmic grid of 50 thresholds ending at the largest queue seen'''
    q_high = max(float(queue.max()) if queue.size else 0.0, arrival_rate, 1.0)
    return np.geomspace(q_high / 10 ** SimDefaults.TAIL_SPAN_DECADES, q_high, points)


def tail_probability(queue: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    '''Empirical Pr(Q >= q) for every threshold'''
    ordered = np.sort(queue)
    return 1.0 - np.searchsorted(ordered, thresholds, side='left') / ordered.size


def estimate_decay(q_thresholds: np.ndarray, tail: np.ndarray) -> float:
    '''Negated least-squares slope of ln Pr(Q >= q) against q over the 1e-5..1e-1 band'''
    q_thresholds = np.asarray(q_thresholds, dtype=float)
    tail = np.asarray(tail, dtype=float)

    low, high = SimDefaults.TAIL_BAND
    band = (tail >= low) & (tail <= high)
    if np.count_nonzero(band) < SimDefaults.MIN_TAIL_POINTS:
        raise SolverException(
            f'insufficient tail mass: {np.count_nonzero(band)} points in [{low}, {high}], '
            f'need {SimDefaults.MIN_TAIL_POINTS}',
            {'points_in_band': int(np.count_nonzero(band))},
        )

    slope, _ = np.polyfit(q_thresholds[band], np.log(tail[band]), 1)
    return max(0.0, -float(slope))




'''
----------
Simulation
----------
'''

def simulate_queue(cfg: SimConfig) -> SimResult:
    cfg.validate()

    runs = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_run_replication)(cfg, r) for r in range(cfg.replications)
    )

    queue = np.concatenate([run['queue'] for run in runs])
    total_frames = cfg.n_frames * cfg.replications
    mean_service = sum(run['service_total'] for run in runs) / total_frames

    outage_counts = {k.name: {'frames': 0, 'reliability_outages': 0, 'security_outages': 0} for k in Scenario}
    for run in runs:
        for name, counts in run['outages'].items():
            for tally, value in counts.items():
                outage_counts[name][tally] += value
    scenario_counts = np.sum([run['scenario_counts'] for run in runs], axis=0)

    thresholds = tail_thresholds(queue, cfg.arrival_rate)
    tail = tail_probability(queue, thresholds)

    notes = {}
    try:
        decay = estimate_decay(thresholds, tail)
    except SolverException as e:
        decay = None
        notes['decay_estimate'] = str(e)
        logger.info('no decay estimate: %s', e)

    unstable = cfg.arrival_rate > 0 and cfg.arrival_rate >= mean_service
    if unstable:
        logger.warning('arrival rate %.6g bits/frame is not below mean service %.6g; queue is unstable',
                       cfg.arrival_rate, mean_service)

    return SimResult(
        q_thresholds=thresholds,
        tail_probability=tail,
        decay_estimate=decay,
        mean_service=mean_service,
        outage_counts=outage_counts,
        scenario_counts=scenario_counts,
        unstable=unstable,
        arrival_rate=cfg.arrival_rate,
        n_frames=cfg.n_frames,
        replications=cfg.replications,
        max_queue=float(queue.max()) if queue.size else 0.0,
        notes=notes,
    )


def arrival_from_capacity(r_e: float, params: SystemParams, fraction: float = SimDefaults.ARRIVAL_FRACTION) -> float:
    '''Constant arrival in bits/frame at a fraction of R_e (bits/s/Hz)'''
    if fraction < 0 or not math.isfinite(r_e):
        raise ParameterException('arrival fraction must be non-negative and R_e finite')
    return fraction * r_e * params.bandwidth_B * params.frame_T
