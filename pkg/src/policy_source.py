''' specifies a policy source object that the queue simulator asks for the transmit powers of each frame '''

import logging
import math
from typing import Optional

from src.channel import SystemParams, FadingDraws, derive_constants, state_probabilities, sample_fading
from src.exceptions import ParameterException
from src.power_solver import SolverConfig, PolicyPair, calibrate_gamma, solve_policy

logger = logging.getLogger(__name__)


class PolicySource:
	'''
	Child classes write the powers method: given the fading draws of a batch of frames,
	return the (mu_b, mu_i) the secondary transmitter uses in each
	'''
	def __init__(self, params: SystemParams):
		self.params = params


	def powers(self, draws: FadingDraws) -> PolicyPair:
		raise NotImplementedError()


	def describe(self) -> dict:
		return {'policy_source': type(self).__name__}


class CalibratedPolicy(PolicySource):
	'''Optimal policy at a gamma0 calibrated once on its own draw set (or given directly as log_gamma0)'''
	def __init__(self, params: SystemParams, cfg: Optional[SolverConfig] = None, seed: int = 1,
				 n_draws: int = 10**5, log_gamma0: Optional[float] = None):
		super().__init__(params)
		self.cfg = cfg or SolverConfig()
		self.consts = derive_constants(params)
		self.probs = state_probabilities(params.rho, params.p_d, params.p_f)

		if log_gamma0 is None:
			draws = sample_fading(seed, n_draws, params)
			log_gamma0 = calibrate_gamma(draws, params, self.consts, self.probs, self.cfg).log_gamma0
		elif not math.isfinite(log_gamma0):
			raise ParameterException(f'log_gamma0 must be finite, got {log_gamma0}')

		self.log_gamma0 = log_gamma0
		logger.info('calibrated policy source at log gamma0=%.9g', log_gamma0)


	def powers(self, draws: FadingDraws) -> PolicyPair:
		return solve_policy(draws, None, self.params, self.consts, self.probs, self.cfg, log_gamma0=self.log_gamma0)


	def describe(self) -> dict:
		return {'policy_source': 'calibrated', 'log_gamma0': self.log_gamma0}


class FixedPolicy(PolicySource):
	'''The same (mu_b, mu_i) in every frame'''
	def __init__(self, params: SystemParams, mu_b: float, mu_i: float):
		super().__init__(params)
		if mu_b < 0 or mu_i < 0:
			raise ParameterException('fixed powers must be non-negative')
		self.mu_b = mu_b
		self.mu_i = mu_i


	def powers(self, draws: FadingDraws) -> PolicyPair:
		return PolicyPair.constant(self.mu_b, self.mu_i, len(draws))


	def describe(self) -> dict:
		return {'policy_source': 'fixed', 'fixed_mu_b': self.mu_b, 'fixed_mu_i': self.mu_i}
