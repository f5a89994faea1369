''' reads experiment config files and turns the resolved key/value pairs into a RunConfig '''

import ast
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from src.capacity import SweepSpec
from src.channel import SystemParams, db_to_linear
from src.exceptions import ConfigException, ParameterException
from src.power_solver import SolverConfig
from src.system_constants import Command, ConfigKeys, PolicySourceKind, RatePolicy, SweepAxis


@dataclass(frozen=True)
class SimSettings:
    '''How to build the simulator run; the policy source is calibrated only when the run starts'''

    n_frames: int
    arrival_rate: Optional[float]  # bits/frame; None -> arrival_fraction of R_e
    arrival_fraction: float
    replications: int
    policy_source: PolicySourceKind
    fixed_mu_b: float
    fixed_mu_i: float


@dataclass(frozen=True)
class RunConfig:

    command: Command
    params: SystemParams
    solver: SolverConfig
    output_path: str
    seed: int
    n_draws: int
    n_jobs: int = 1
    rate_policy: RatePolicy = RatePolicy.CONFUSION
    sweep: Optional[SweepSpec] = None
    sim: Optional[SimSettings] = None
    verbose: int = 0
    values: Dict[str, Any] = field(default_factory=dict)




'''
-------
Parsing
-------
'''

def parse_value(text: str) -> Any:
    '''Python literal when it parses as one, otherwise the bare string'''
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_lines(lines, source: str = '<config>') -> Dict[str, Any]:
    '''key = value lines; # starts a comment, blank lines are skipped'''
    values = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigException(f'{source}:{number}: expected "key = value", got "{raw.rstrip()}"')

        key, text = line.split('=', 1)
        values[key.strip()] = parse_value(text)
    return values


def process_config(file_name: str) -> Dict[str, Any]:
    try:
        with open(file_name, 'r') as f:
            values = parse_lines(f, file_name)
    except OSError as e:
        raise ConfigException(f'cannot read config file {file_name}: {e}')

    check_keys(values)
    return values


def check_keys(values: Dict[str, Any]):
    for key in values:
        if key not in ConfigKeys.DEFAULTS:
            raise ConfigException(f'unknown config key "{key}"')




'''
--------------------
Typed Lookups
--------------------
'''

def string_to_command(command_str: str) -> Command:
    for command in Command:
        if command.value == command_str:
            return command
    raise ConfigException(f'unknown command "{command_str}"; expected one of {[c.value for c in Command]}')


def string_to_axis(axis_str: str) -> SweepAxis:
    for axis in SweepAxis:
        if axis.key == axis_str:
            return axis
    raise ConfigException(f'unknown sweep axis "{axis_str}"; expected one of {[a.key for a in SweepAxis]}')


def string_to_rate_policy(policy_str: str) -> RatePolicy:
    for policy in RatePolicy:
        if policy.value == policy_str:
            return policy
    raise ConfigException(f'unknown rate policy "{policy_str}"')


def string_to_policy_source(source_str: str) -> PolicySourceKind:
    for kind in PolicySourceKind:
        if kind.value == source_str:
            return kind
    raise ConfigException(f'unknown policy source "{source_str}"')


def _number(values: Dict[str, Any], key: str, kind=float):
    value = values[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigException(f'{key} must be a number, got {value!r}')
    if kind is int:
        if value != int(value):
            raise ConfigException(f'{key} must be an integer, got {value!r}')
        return int(value)
    return float(value)




'''
----------------
RunConfig Builder
----------------
'''

def build_run_config(overrides: Dict[str, Any]) -> RunConfig:
    '''Defaults, then file values, then command-line values, validated as a whole'''
    check_keys(overrides)
    values = dict(ConfigKeys.DEFAULTS)
    values.update(overrides)

    command = string_to_command(values['command'])

    params = SystemParams(
        rho=_number(values, 'rho'),
        p_d=_number(values, 'p_d'),
        p_f=_number(values, 'p_f'),
        sigma2_nm=_number(values, 'sigma2_nm'),
        sigma2_ne=_number(values, 'sigma2_ne'),
        sigma2_sm=_number(values, 'sigma2_sm'),
        sigma2_se=_number(values, 'sigma2_se'),
        sigma2_m=_number(values, 'sigma2_m'),
        sigma2_e=_number(values, 'sigma2_e'),
        bandwidth_B=_number(values, 'bandwidth_B'),
        frame_T=_number(values, 'frame_T'),
        snr=db_to_linear(_number(values, 'snr_db')),
        theta=_number(values, 'theta'),
    )

    solver = SolverConfig(
        fp_tolerance=_number(values, 'fp_tolerance'),
        max_fp_iters=_number(values, 'max_fp_iters', int),
        gamma_tolerance=_number(values, 'gamma_tolerance'),
        max_gamma_iters=_number(values, 'max_gamma_iters', int),
        gamma_bracket=(_number(values, 'gamma_low'), _number(values, 'gamma_high')),
    )

    seed = _number(values, 'seed', int)
    n_draws = _number(values, 'n_draws', int)
    n_jobs = _number(values, 'n_jobs', int)
    verbose = _number(values, 'verbose', int)
    if n_draws < 1:
        raise ConfigException(f'n_draws must be at least 1, got {n_draws}')
    if n_jobs == 0:
        raise ConfigException('n_jobs must be non-zero')

    sweep = None
    if command is Command.SWEEP:
        sweep = _build_sweep(values, params)

    sim = None
    if command is Command.SIMULATE:
        sim = _build_sim(values)

    output_path = str(values['output_path'])
    _check_writable(output_path)

    try:
        params.validate()
        solver.validate()
        if sweep is not None:
            sweep.validate()
    except ParameterException as e:
        raise ConfigException(str(e))

    return RunConfig(
        command=command,
        params=params,
        solver=solver,
        output_path=output_path,
        seed=seed,
        n_draws=n_draws,
        n_jobs=n_jobs,
        rate_policy=string_to_rate_policy(values['rate_policy']),
        sweep=sweep,
        sim=sim,
        verbose=verbose,
        values=values,
    )


def _build_sweep(values: Dict[str, Any], params: SystemParams) -> SweepSpec:
    axis = string_to_axis(values['sweep_axis'])

    if axis is SweepAxis.SENSING:
        pairs = values['sensing_pairs']
        if not isinstance(pairs, (list, tuple)) or not pairs:
            raise ConfigException('sensing_pairs must be a non-empty list of (p_f, p_d) pairs')
        try:
            return SweepSpec.over_sensing(pairs, params)
        except (TypeError, ValueError):
            raise ConfigException(f'sensing_pairs must hold (p_f, p_d) pairs, got {pairs!r}')

    grid = values['sweep_grid']
    if not isinstance(grid, (list, tuple)):
        raise ConfigException(f'sweep_grid must be a list of numbers, got {grid!r}')
    try:
        grid = tuple(float(v) for v in grid)
    except (TypeError, ValueError):
        raise ConfigException(f'sweep_grid must be a list of numbers, got {grid!r}')
    return SweepSpec(axis, grid, params)


def _build_sim(values: Dict[str, Any]) -> SimSettings:
    arrival_rate = values['arrival_rate']
    if arrival_rate is not None:
        arrival_rate = _number(values, 'arrival_rate')
        if arrival_rate < 0:
            raise ConfigException(f'arrival_rate must be non-negative, got {arrival_rate}')

    replications = _number(values, 'replications', int)
    if replications < 1:
        raise ConfigException('replications must be at least 1')

    return SimSettings(
        n_frames=_number(values, 'n_frames', int),
        arrival_rate=arrival_rate,
        arrival_fraction=_number(values, 'arrival_fraction'),
        replications=replications,
        policy_source=string_to_policy_source(values['policy_source']),
        fixed_mu_b=_number(values, 'fixed_mu_b'),
        fixed_mu_i=_number(values, 'fixed_mu_i'),
    )


def _check_writable(output_path: str):
    directory = os.path.dirname(output_path) or '.'
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise ConfigException(f'output directory {directory} is not writable: {e}')
    if not os.access(directory, os.W_OK):
        raise ConfigException(f'output directory {directory} is not writable')
