''' Execution of one experiment: dispatches the configured command, then exports the table and its metadata '''

import logging
import sys
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.artifacts import export_results
from src.capacity import maximize_capacity, sweep
from src.channel import SystemParams, derive_constants, state_probabilities, sample_fading
from src.config_processor import RunConfig
from src.exceptions import ParameterException, ConfigException, SolverException
from src.policy_source import PolicySource, CalibratedPolicy, FixedPolicy
from src.power_solver import SolverConfig, calibrate_gamma
from src.queue_sim import SimConfig, simulate_queue, arrival_from_capacity
from src.system_constants import Command, ExitCode, PolicySourceKind, SimDefaults, TOOL_VERSION

logger = logging.getLogger(__name__)


def iteration_counts(params: SystemParams, cfg: Optional[SolverConfig] = None, seed: int = 1,
                     n: int = SimDefaults.MIN_FRAMES) -> np.ndarray:
    '''Per-draw max(iters_b, iters_i) of the calibrated optimal policy'''
    if n < SimDefaults.MIN_FRAMES:
        raise ParameterException(f'iteration statistics need at least {SimDefaults.MIN_FRAMES} draws, got {n}')

    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    draws = sample_fading(seed, n, params)
    policies = calibrate_gamma(draws, params, consts, probs, cfg).policies
    return np.maximum(policies.iters_b, policies.iters_i)


def iteration_histogram(params: SystemParams, cfg: Optional[SolverConfig] = None, seed: int = 1,
                        n: int = SimDefaults.MIN_FRAMES) -> pd.DataFrame:
    '''Normalized distribution of iteration counts; 0 means a closed-form or zero-power draw'''
    counts = iteration_counts(params, cfg, seed, n)
    frequency = np.bincount(counts)
    return pd.DataFrame({
        'iterations': np.arange(frequency.size),
        'probability': frequency / counts.size,
    })


class Experiment:

    def __init__(self, config: RunConfig):
        self.config = config
        self.summary = {}

    def metadata(self) -> dict:
        config = self.config
        meta = {
            'tool_version': TOOL_VERSION,
            'command': config.command,
            'seed': config.seed,
            'n_draws': config.n_draws,
            'rate_policy': config.rate_policy,
            'snr_db': config.params.snr_db,
        }
        meta.update(config.params.to_dict())
        meta.update(config.solver.to_dict())
        meta.update(self.summary)
        return meta

    def run_eval(self) -> pd.DataFrame:
        config = self.config
        result = maximize_capacity(config.params, config.solver, config.seed, config.n_draws, config.rate_policy)
        print(f'R_e = {result.r_e:.6g} bits/s/Hz ({result.r_e_bits_frame:.6g} bits/frame), log gamma0 = {result.log_gamma0:.6g}')
        return pd.DataFrame([result.to_dict()])

    def run_sweep(self) -> pd.DataFrame:
        config = self.config
        spec = config.sweep
        self.summary['sweep_axis'] = spec.axis.key
        self.summary['sweep_grid'] = list(spec.grid)
        if spec.sensing_pairs:
            self.summary['sensing_pairs'] = [list(pair) for pair in spec.sensing_pairs]

        frame = sweep(spec, config.solver, config.seed, config.n_draws, config.n_jobs, config.rate_policy)
        failed = int((frame['status'] != 'ok').sum())
        self.summary['failed_points'] = failed
        print(f'Swept {spec.axis.key} over {len(spec.grid)} points, {failed} failed')
        return frame

    def run_iters(self) -> pd.DataFrame:
        config = self.config
        frame = iteration_histogram(config.params, config.solver, config.seed, config.n_draws)
        mean = float((frame['iterations'] * frame['probability']).sum())
        self.summary['mean_iterations'] = mean
        print(f'Mean iterations per draw: {mean:.4g}')
        return frame

    def policy_source(self, log_gamma0: Optional[float]) -> PolicySource:
        config, sim = self.config, self.config.sim
        if sim.policy_source is PolicySourceKind.FIXED:
            return FixedPolicy(config.params, sim.fixed_mu_b, sim.fixed_mu_i)
        return CalibratedPolicy(config.params, config.solver, config.seed, config.n_draws, log_gamma0)

    def run_simulate(self) -> pd.DataFrame:
        config, sim = self.config, self.config.sim

        log_gamma0 = None
        arrival_rate = sim.arrival_rate
        if arrival_rate is None:
            capacity = maximize_capacity(config.params, config.solver, config.seed, config.n_draws,
                                         config.rate_policy)
            log_gamma0 = capacity.log_gamma0
            arrival_rate = arrival_from_capacity(capacity.r_e, config.params, sim.arrival_fraction)
            self.summary['r_e_bits_s_hz'] = capacity.r_e

        source = self.policy_source(log_gamma0)
        sim_config = SimConfig(
            n_frames=sim.n_frames,
            arrival_rate=arrival_rate,
            seed=config.seed,
            params=config.params,
            policy_source=source,
            rate_policy=config.rate_policy,
            replications=sim.replications,
            n_jobs=config.n_jobs,
        )
        print(f'Simulating {sim.n_frames} frames x {sim.replications} at {arrival_rate:.6g} bits/frame')
        result = simulate_queue(sim_config)

        self.summary.update(source.describe())
        self.summary.update(result.summary())
        if result.unstable:
            print('Queue is unstable: arrival rate is not below mean service')

        return pd.DataFrame({'q_threshold_bits': result.q_thresholds, 'tail_probability': result.tail_probability})

    def run_selftest(self) -> pd.DataFrame:
        from src.selftest import run_selftest

        frame = run_selftest(self.config)
        passed = int(frame['passed'].sum())
        self.summary['properties_passed'] = passed
        self.summary['properties_total'] = len(frame)
        for row in frame.itertuples():
            print(f"{'PASS' if row.passed else 'FAIL'}  {row.property}: {row.detail}")
        return frame

    def run(self) -> Tuple[pd.DataFrame, dict]:
        '''Runs the command and exports its table and sidecar'''
        handlers = {
            Command.EVAL: self.run_eval,
            Command.SWEEP: self.run_sweep,
            Command.ITERS: self.run_iters,
            Command.SIMULATE: self.run_simulate,
            Command.SELFTEST: self.run_selftest,
        }
        frame = handlers[self.config.command]()
        metadata = self.metadata()
        export_results(frame, self.config.output_path, metadata)
        print(f'Wrote {self.config.output_path}')
        return frame, metadata


def run(config: RunConfig) -> int:
    '''Exit status: 0 success, 1 usage error, 2 numerical failure'''
    try:
        frame, metadata = Experiment(config).run()
    except (ParameterException, ConfigException) as e:
        print(f'error: {e}', file=sys.stderr)
        return ExitCode.USAGE
    except SolverException as e:
        print(f'numerical failure: {e}', file=sys.stderr)
        for key in sorted(e.diagnostics):
            print(f'  {key} = {e.diagnostics[key]}', file=sys.stderr)
        return ExitCode.NUMERICAL
    except OSError as e:
        print(f'error: cannot write results: {e}', file=sys.stderr)
        return ExitCode.USAGE

    if config.command is Command.SELFTEST and metadata['properties_passed'] < metadata['properties_total']:
        return ExitCode.NUMERICAL
    return ExitCode.SUCCESS
