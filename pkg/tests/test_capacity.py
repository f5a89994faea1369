import math

import numpy as np
import pytest

from src.capacity import (SWEEP_COLUMNS, SweepSpec, effective_secure_capacity, ergodic_rate, capacity_cap,
                          maximize_capacity, sweep, sensing_gain)
from src.channel import (SystemParams, FadingDraws, derive_constants, state_probabilities, secure_rate,
                         sample_fading)
from src.exceptions import ParameterException
from src.power_solver import PolicyPair, calibrate_gamma
from src.system_constants import SweepAxis, RatePolicy


def _constant_draws(n=10):
    return FadingDraws(np.full(n, 2.0), np.full(n, 0.5))


@pytest.mark.parametrize('theta', [1e-3, 0.1, 5.0])
def test_deterministic_service_gives_its_rate(theta):
    params = SystemParams(rho=1.0, p_d=1.0, theta=theta)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    draws = _constant_draws()
    policies = PolicyPair.constant(1.0, 0.0, len(draws))

    rate = secure_rate(True, draws[0], 1.0, params, derive_constants(params))
    assert rate > 0
    assert effective_secure_capacity(draws, policies, params, probs) == pytest.approx(rate / params.bandwidth_B)
    assert ergodic_rate(draws, policies, params, probs) == pytest.approx(rate / params.bandwidth_B)


def test_zero_policies_give_zero(draws, baseline_params, baseline_probs):
    policies = PolicyPair.constant(0.0, 0.0, len(draws))
    assert effective_secure_capacity(draws, policies, baseline_params, baseline_probs) == 0.0
    assert ergodic_rate(draws, policies, baseline_params, baseline_probs) == 0.0


def test_zero_theta_is_rejected(draws, baseline_params, baseline_probs):
    policies = PolicyPair.constant(1.0, 1.0, len(draws))
    with pytest.raises(ParameterException):
        effective_secure_capacity(draws, policies, baseline_params.updated(theta=0.0), baseline_probs)


def test_misaligned_policies_are_rejected(draws, baseline_params, baseline_probs):
    with pytest.raises(ParameterException):
        effective_secure_capacity(draws, PolicyPair.constant(1.0, 1.0, 3), baseline_params, baseline_probs)


def test_capacity_bounded_by_cap_and_ergodic_rate(draws, baseline_params, baseline_probs):
    policies = PolicyPair.constant(1e6, 1e6, len(draws))
    r_e = effective_secure_capacity(draws, policies, baseline_params, baseline_probs)
    assert 0.0 < r_e <= capacity_cap(baseline_params)
    assert r_e <= ergodic_rate(draws, policies, baseline_params, baseline_probs)


def test_cap_without_missed_detections_is_unbounded(baseline_params):
    assert capacity_cap(baseline_params.updated(p_d=1.0)) == math.inf
    assert capacity_cap(baseline_params) == pytest.approx(-math.log(0.01) / (0.01 * 100.0))


def test_naive_rate_policy_reports_more_rate(draws, baseline_params, baseline_probs):
    policies = PolicyPair.constant(1.0, 1.0, len(draws))
    proposed = effective_secure_capacity(draws, policies, baseline_params, baseline_probs)
    naive = effective_secure_capacity(draws, policies, baseline_params, baseline_probs,
                                      rate_policy=RatePolicy.NAIVE)
    assert naive >= proposed


def test_maximize_capacity_result(draws, baseline_params):
    result = maximize_capacity(baseline_params, draws=draws, seed=7)
    assert 0.0 < result.r_e <= result.ergodic_rate
    assert result.n_draws == len(draws)
    assert result.r_e_bits_frame == pytest.approx(result.r_e * 100.0)
    assert result.log_gamma0 == pytest.approx(math.log(result.gamma0))
    assert set(SWEEP_COLUMNS) - {'axis_value', 'status'} <= set(result.to_dict())


def test_maximize_capacity_is_deterministic(baseline_params):
    first = maximize_capacity(baseline_params, seed=4, n=1000)
    second = maximize_capacity(baseline_params, seed=4, n=1000)
    assert first == second


def test_small_theta_approaches_ergodic_rate(draws, baseline_params):
    result = maximize_capacity(baseline_params.updated(theta=1e-5), draws=draws)
    assert result.r_e == pytest.approx(result.ergodic_rate, rel=0.01)


def test_small_theta_gap_is_half_the_service_variance(draws, baseline_params):
    params = baseline_params.updated(theta=1e-4)
    consts = derive_constants(params)
    probs = state_probabilities(params.rho, params.p_d, params.p_f)
    policies = calibrate_gamma(draws, params, consts, probs).policies

    r_b = secure_rate(True, draws, policies.mu_b, params, consts) * params.frame_T
    r_i = secure_rate(False, draws, policies.mu_i, params, consts) * params.frame_T
    mean = np.mean(probs.p_b * r_b + probs.p_i * r_i)
    variance = np.mean(probs.p_b * r_b ** 2 + probs.p_i * r_i ** 2) - mean ** 2
    expected = (mean - params.theta * variance / 2.0) / (params.bandwidth_B * params.frame_T)

    assert variance > 0
    assert effective_secure_capacity(draws, policies, params, probs) == pytest.approx(expected, rel=1e-3)


def test_capacity_falls_with_beta(draws, baseline_params):
    low = maximize_capacity(baseline_params.with_beta(1.0), draws=draws)
    high = maximize_capacity(baseline_params.with_beta(4.0), draws=draws)
    assert low.r_e > high.r_e


def test_theta_sweep(baseline_params):
    spec = SweepSpec(SweepAxis.THETA, (0.001, 0.01, 0.1, 1.0), baseline_params)
    table = sweep(spec, seed=2, n=2000)
    assert list(table.columns) == SWEEP_COLUMNS
    assert list(table['axis_value']) == [0.001, 0.01, 0.1, 1.0]
    assert (table['status'] == 'ok').all()
    assert np.all(np.diff(table['r_e_bits_s_hz']) <= 0)
    assert (table['n_draws'] == 2000).all()


def test_sweep_parallel_matches_serial(baseline_params):
    spec = SweepSpec(SweepAxis.SNR, (0.0, 10.0), baseline_params)
    serial = sweep(spec, seed=2, n=1000, n_jobs=1)
    parallel = sweep(spec, seed=2, n=1000, n_jobs=2)
    assert serial.equals(parallel)


def test_sweep_records_failed_point(baseline_params):
    spec = SweepSpec.over_sensing([(0.1, 0.9), (0.1, 1.0)], baseline_params)
    table = sweep(spec, seed=2, n=500)
    assert table['status'][0] == 'ok'
    assert table['status'][1].startswith('error')
    assert math.isnan(table['r_e_bits_s_hz'][1])
    assert table['axis_value'][1] == 1.0


@pytest.mark.parametrize('spec', [
    SweepSpec(SweepAxis.THETA, ()),
    SweepSpec(SweepAxis.THETA, (0.1, 0.01)),
    SweepSpec(SweepAxis.THETA, (0.0, 0.1)),
    SweepSpec(SweepAxis.BETA, (0.5, 2.0)),
    SweepSpec(SweepAxis.SENSING, (0.0, 1.0), sensing_pairs=((0.1, 0.9),)),
])
def test_invalid_sweep_specs(spec):
    with pytest.raises(ParameterException):
        spec.validate()


def test_point_params_per_axis(baseline_params):
    assert SweepSpec(SweepAxis.SNR, (20.0,), baseline_params).point_params(20.0).snr == pytest.approx(100.0)
    beta_params = SweepSpec(SweepAxis.BETA, (4.0,), baseline_params).point_params(4.0)
    assert derive_constants(beta_params).beta == pytest.approx(4.0)
    sensing = SweepSpec.over_sensing([(0.5, 0.8)], baseline_params).point_params(0.0)
    assert (sensing.p_f, sensing.p_d) == (0.5, 0.8)


def test_sensing_gain_columns(baseline_params):
    table = sensing_gain(baseline_params, (0.1, 0.9), (0.5, 0.9), [0.01, 0.1], seed=3, n=1000)
    assert list(table.columns) == ['theta', 'r_e_hi', 'r_e_lo', 'gap']
    np.testing.assert_allclose(table['gap'], table['r_e_hi'] - table['r_e_lo'])
    assert np.all(table['gap'] > 0)


def test_sweep_shares_draws_across_points(baseline_params):
    spec = SweepSpec(SweepAxis.THETA, (0.01,), baseline_params)
    table = sweep(spec, seed=5, n=1000)
    direct = maximize_capacity(baseline_params, seed=5, draws=sample_fading(5, 1000, baseline_params))
    assert table['r_e_bits_s_hz'][0] == direct.r_e
