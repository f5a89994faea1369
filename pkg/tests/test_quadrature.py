import math

import numpy as np
import pytest

from src.capacity import effective_secure_capacity
from src.channel import derive_constants, state_probabilities, sample_fading
from src.exceptions import ParameterException
from src.power_solver import calibrate_gamma, active_mask
from src.quadrature import (active_region_nodes, inactive_probability, quadrature_average_power,
                            quadrature_capacity)
from src.system_constants import Branch


@pytest.mark.parametrize('branch', [Branch.BUSY, Branch.IDLE])
def test_weights_cover_the_active_region(branch, baseline_params, baseline_consts, baseline_probs):
    nodes, weights = active_region_nodes(branch, baseline_params, baseline_consts, baseline_probs, 0.05, deg=32)
    assert len(nodes) == 32 * 32
    idle = inactive_probability(branch, baseline_params, baseline_consts, baseline_probs, 0.05)
    assert weights.sum() == pytest.approx(1.0 - idle, rel=1e-9)


@pytest.mark.parametrize('branch', [Branch.BUSY, Branch.IDLE])
def test_every_node_gets_power(branch, baseline_params, baseline_consts, baseline_probs):
    nodes, _ = active_region_nodes(branch, baseline_params, baseline_consts, baseline_probs, 0.05, deg=16)
    assert np.all(active_mask(branch, nodes, 0.05, baseline_params, baseline_consts, baseline_probs))


def test_unlinked_eavesdropper_collapses_axis(baseline_params):
    params = baseline_params.updated(sigma2_e=0.0)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    nodes, weights = active_region_nodes(Branch.IDLE, params, consts, probs, 0.05, deg=12)
    assert len(nodes) == 12
    assert np.all(nodes.z_e == 0.0)
    offset = 0.05 * (1.0 - params.p_d) / probs.p_i
    assert weights.sum() == pytest.approx(math.exp(-offset), rel=1e-12)


def test_empty_branch_has_no_nodes(baseline_params):
    params = baseline_params.updated(rho=1.0, p_d=0.5)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    nodes, weights = active_region_nodes(Branch.IDLE, params, consts, probs, 0.05)
    assert len(nodes) == 0 and weights.size == 0
    assert inactive_probability(Branch.IDLE, params, consts, probs, 0.05) == 1.0


def test_degree_must_be_positive(baseline_params, baseline_consts, baseline_probs):
    with pytest.raises(ParameterException):
        active_region_nodes(Branch.IDLE, baseline_params, baseline_consts, baseline_probs, 0.05, deg=0)


def test_quadrature_converges_in_degree(baseline_params, baseline_consts, baseline_probs):
    coarse = quadrature_capacity(0.05, baseline_params, baseline_consts, baseline_probs, deg=32)
    fine = quadrature_capacity(0.05, baseline_params, baseline_consts, baseline_probs, deg=64)
    assert coarse == pytest.approx(fine, rel=1e-4)


def test_quadrature_agrees_with_monte_carlo(baseline_params, baseline_consts, baseline_probs):
    draws = sample_fading(1, 10**5, baseline_params)
    calibration = calibrate_gamma(draws, baseline_params, baseline_consts, baseline_probs)
    log_gamma0 = calibration.log_gamma0

    power = quadrature_average_power(None, baseline_params, baseline_consts, baseline_probs,
                                     log_gamma0=log_gamma0)
    assert power == pytest.approx(1.0, rel=0.01)

    monte_carlo = effective_secure_capacity(draws, calibration.policies, baseline_params, baseline_probs)
    quadrature = quadrature_capacity(None, baseline_params, baseline_consts, baseline_probs,
                                     log_gamma0=log_gamma0)
    assert quadrature == pytest.approx(monte_carlo, rel=5e-3)


def test_quadrature_capacity_falls_with_gamma(baseline_params):
    params = baseline_params.updated(theta=0.1)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    loose = quadrature_capacity(1e-4, params, consts, probs, deg=16)
    tight = quadrature_capacity(1e-1, params, consts, probs, deg=16)
    assert loose > tight >= 0.0


def test_large_theta_uses_the_log_sum(baseline_params):
    params = baseline_params.updated(theta=10.0)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    value = quadrature_capacity(None, params, consts, probs, deg=16, log_gamma0=-200.0)
    assert math.isfinite(value) and value > 0
