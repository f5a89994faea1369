'''initializes and specifies system constants, enumerations and defaults'''
from enum import Enum




'''
------------------------
Transmission Enumerations
------------------------
'''

class Scenario(Enum):
    '''The four (actual PU activity, sensing decision) combinations of a frame'''

    def __init__(self, pu_active: bool, detected_busy: bool):
        self.pu_active = pu_active
        self.detected_busy = detected_busy

    S1 = (True, True)    # busy, detected busy
    S2 = (True, False)   # busy, detected idle (miss-detection)
    S3 = (False, True)   # idle, detected busy (false alarm)
    S4 = (False, False)  # idle, detected idle

    @property
    def index(self) -> int:
        return list(Scenario).index(self)


class Branch(Enum):
    '''Power policy branch chosen from the sensing decision'''

    def __init__(self, detected_busy: bool):
        self.detected_busy = detected_busy

    BUSY = True
    IDLE = False


class RatePolicy(Enum):
    '''
    Rate used when the channel is sensed busy.
    CONFUSION pins the confusion rate to the idle eavesdropper capacity C_e3,
    NAIVE uses r_b = C_1 and leaks in false-alarm frames
    '''

    CONFUSION = 'confusion'
    NAIVE = 'naive'


class SweepAxis(Enum):

    def __init__(self, key: str):
        self.key = key

    THETA = 'theta'
    SNR = 'snr'  # grid in dB
    BETA = 'beta'
    SENSING = 'sensing'  # grid indexes sensing_pairs


class Command(Enum):

    EVAL = 'eval'
    SWEEP = 'sweep'
    ITERS = 'iters'
    SIMULATE = 'simulate'
    SELFTEST = 'selftest'


class PolicySourceKind(Enum):

    CALIBRATED = 'calibrated'
    FIXED = 'fixed'




'''
--------------------------
Baseline and Solver Values
--------------------------
'''

TOOL_VERSION = '1.0.0'


class BaselineParams:
    '''Parameter values of the reference numerical study'''

    RHO = 0.1
    P_D = 0.9
    P_F = 0.1

    SIGMA2_NM = 1.0
    SIGMA2_NE = 1.0
    SIGMA2_SM = 1.0
    SIGMA2_SE = 1.0
    SIGMA2_M = 1.0
    SIGMA2_E = 1.0

    BANDWIDTH_B = 100.0  # Hz
    FRAME_T = 1.0  # seconds
    SNR_DB = 10.0
    THETA = 0.01


class SolverDefaults:

    FP_TOLERANCE = 1e-8  # absolute, in normalized power
    MAX_FP_ITERS = 500

    GAMMA_TOLERANCE = 1e-4  # relative residual of the interference constraint
    MAX_GAMMA_ITERS = 200
    GAMMA_BRACKET = (1e-6, 1e3)
    GAMMA_EXPANSION = 10.0  # first bracket growth factor; the log step doubles after each widening
    MAX_BRACKET_EXPANSIONS = 60
    LOG_GAMMA_LIMIT = 1e4

    FP_COLLAPSE = 4e-15  # bracket width, relative to max(1, mu), treated as converged

    ORACLE_TOLERANCE = 1e-10  # relative to max(1, mu)
    ORACLE_MAX_STEPS = 200
    ORACLE_BRACKET_FACTOR = 10.0

    QUADRATURE_DEG = 32


class SimDefaults:

    MIN_FRAMES = 10**4
    WARMUP_FRACTION = 0.1
    TAIL_POINTS = 50
    TAIL_SPAN_DECADES = 3.0  # log grid spans q_max / 10**3 .. q_max
    TAIL_BAND = (1e-5, 1e-1)
    MIN_TAIL_POINTS = 5
    ARRIVAL_FRACTION = 0.95


class ExitCode:

    SUCCESS = 0
    USAGE = 1
    NUMERICAL = 2




'''
-----------------
Configuration Keys
-----------------
'''

class ConfigKeys:
    '''Every key accepted in a config file or as a --flag, with its default'''

    DEFAULTS = {
        'command': Command.EVAL.value,
        'seed': 1,
        'n_draws': 10**5,
        'n_jobs': 1,
        'output_path': 'results/eval.csv',
        'verbose': 0,

        # system parameters
        'rho': BaselineParams.RHO,
        'p_d': BaselineParams.P_D,
        'p_f': BaselineParams.P_F,
        'sigma2_nm': BaselineParams.SIGMA2_NM,
        'sigma2_ne': BaselineParams.SIGMA2_NE,
        'sigma2_sm': BaselineParams.SIGMA2_SM,
        'sigma2_se': BaselineParams.SIGMA2_SE,
        'sigma2_m': BaselineParams.SIGMA2_M,
        'sigma2_e': BaselineParams.SIGMA2_E,
        'bandwidth_B': BaselineParams.BANDWIDTH_B,
        'frame_T': BaselineParams.FRAME_T,
        'snr_db': BaselineParams.SNR_DB,
        'theta': BaselineParams.THETA,
        'rate_policy': RatePolicy.CONFUSION.value,

        # solver
        'fp_tolerance': SolverDefaults.FP_TOLERANCE,
        'max_fp_iters': SolverDefaults.MAX_FP_ITERS,
        'gamma_tolerance': SolverDefaults.GAMMA_TOLERANCE,
        'max_gamma_iters': SolverDefaults.MAX_GAMMA_ITERS,
        'gamma_low': SolverDefaults.GAMMA_BRACKET[0],
        'gamma_high': SolverDefaults.GAMMA_BRACKET[1],

        # sweep
        'sweep_axis': SweepAxis.THETA.key,
        'sweep_grid': [0.001, 0.01, 0.1, 1.0, 10.0],
        'sensing_pairs': [(0.1, 0.9), (0.4, 0.6)],

        # queue simulation
        'n_frames': 10**6,
        'arrival_rate': None,  # bits/frame; None -> arrival_fraction of R_e
        'arrival_fraction': SimDefaults.ARRIVAL_FRACTION,
        'replications': 1,
        'policy_source': PolicySourceKind.CALIBRATED.value,
        'fixed_mu_b': 1.0,
        'fixed_mu_i': 1.0,
    }
