import pytest

from src.channel import SystemParams, derive_constants, state_probabilities, sample_fading


@pytest.fixture
def baseline_params():
    return SystemParams()


@pytest.fixture
def baseline_consts(baseline_params):
    return derive_constants(baseline_params)


@pytest.fixture
def baseline_probs(baseline_params):
    return state_probabilities(baseline_params.rho, baseline_params.p_d, baseline_params.p_f)


@pytest.fixture
def draws(baseline_params):
    return sample_fading(7, 2000, baseline_params)


@pytest.fixture
def worked_params():
    '''beta = 2, alpha_i = 1, alpha_b = beta alpha_i, SNR = 1, p_b = 0.18, p_i = 0.81'''
    return SystemParams(sigma2_se=0.0, snr=1.0)
