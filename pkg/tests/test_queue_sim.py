import numpy as np
import pytest

from src.channel import scenario_probabilities
from src.exceptions import ParameterException, SolverException
from src.policy_source import PolicySource, CalibratedPolicy, FixedPolicy
from src.queue_sim import (SimConfig, lindley_queue, tail_thresholds, tail_probability, estimate_decay,
                           simulate_queue, arrival_from_capacity)
from src.system_constants import Scenario


def test_lindley_recursion():
    queue = lindley_queue(1.0, np.array([0.0, 3.0, 0.0, 0.5]))
    np.testing.assert_allclose(queue, [1.0, 0.0, 1.0, 1.5])


def test_lindley_matches_loop():
    service = np.random.default_rng(0).exponential(2.0, 500)
    expected, q = [], 0.0
    for s in service:
        q = max(0.0, q + 1.5 - s)
        expected.append(q)
    np.testing.assert_allclose(lindley_queue(1.5, service), expected, atol=1e-9)


def test_decay_of_synthetic_geometric_tail():
    q = np.linspace(0.0, 600.0, 50)
    assert estimate_decay(q, np.exp(-0.02 * q)) == pytest.approx(0.02, rel=0.02)


def test_decay_needs_tail_mass():
    q = np.geomspace(1e-3, 1.0, 50)
    with pytest.raises(SolverException):
        estimate_decay(q, np.zeros(50))


def test_tail_probability_is_non_increasing():
    queue = np.random.default_rng(1).exponential(10.0, 5000)
    thresholds = tail_thresholds(queue, 1.0)
    tail = tail_probability(queue, thresholds)
    assert len(thresholds) == 50
    assert thresholds[-1] == pytest.approx(queue.max())
    assert np.all(np.diff(tail) <= 0)
    assert tail[-1] == pytest.approx(1.0 / queue.size)


def _config(params, policy, arrival_rate, **kwargs):
    return SimConfig(n_frames=kwargs.pop('n_frames', 10**4), arrival_rate=arrival_rate, seed=3, params=params,
                     policy_source=policy, **kwargs)


def test_zero_arrival_keeps_queue_empty(baseline_params):
    result = simulate_queue(_config(baseline_params, FixedPolicy(baseline_params, 1.0, 1.0), 0.0))
    assert np.all(result.tail_probability == 0.0)
    assert result.max_queue == 0.0
    assert result.decay_estimate is None
    assert 'decay_estimate' in result.notes
    assert not result.unstable


def test_overload_is_flagged_not_raised(baseline_params):
    result = simulate_queue(_config(baseline_params, FixedPolicy(baseline_params, 1.0, 1.0), 1e6))
    assert result.unstable
    assert result.max_queue > 0


def test_calibrated_policy_never_leaks(baseline_params):
    policy = CalibratedPolicy(baseline_params, seed=2, n_draws=2000)
    result = simulate_queue(_config(baseline_params, policy, 50.0))

    for k in Scenario:
        counts = result.outage_counts[k.name]
        assert counts['security_outages'] == 0
        if k is Scenario.S2:
            assert counts['reliability_outages'] == counts['frames']
        else:
            assert counts['reliability_outages'] == 0


def test_scenario_frequencies(baseline_params):
    n = 10**4
    result = simulate_queue(_config(baseline_params, FixedPolicy(baseline_params, 1.0, 1.0), 10.0, n_frames=n))
    probs = scenario_probabilities(baseline_params.rho, baseline_params.p_d, baseline_params.p_f)
    freq = result.scenario_counts / n
    std_err = np.sqrt(probs * (1 - probs) / n)
    assert np.all(np.abs(freq - probs) <= 4 * std_err)


def test_replications_merge(baseline_params):
    result = simulate_queue(_config(baseline_params, FixedPolicy(baseline_params, 1.0, 1.0), 10.0,
                                    replications=3))
    assert result.scenario_counts.sum() == 3 * 10**4
    assert result.replications == 3
    assert sum(c['frames'] for c in result.outage_counts.values()) == 3 * 10**4


def test_simulation_is_deterministic(baseline_params):
    policy = FixedPolicy(baseline_params, 2.0, 0.5)
    first = simulate_queue(_config(baseline_params, policy, 100.0))
    second = simulate_queue(_config(baseline_params, policy, 100.0))
    np.testing.assert_array_equal(first.tail_probability, second.tail_probability)
    assert first.mean_service == second.mean_service


def test_summary_has_per_scenario_counts(baseline_params):
    result = simulate_queue(_config(baseline_params, FixedPolicy(baseline_params, 1.0, 1.0), 10.0))
    summary = result.summary()
    assert summary['frames_s1'] + summary['frames_s2'] + summary['frames_s3'] + summary['frames_s4'] == 10**4
    assert summary['security_outages_s3'] == 0


@pytest.mark.parametrize('changes', [
    {'n_frames': 100}, {'arrival_rate': -1.0}, {'replications': 0}, {'warmup_fraction': 1.0},
])
def test_invalid_sim_config(changes, baseline_params):
    fields = {'n_frames': 10**4, 'arrival_rate': 1.0, 'seed': 1, 'params': baseline_params,
              'policy_source': FixedPolicy(baseline_params, 1.0, 1.0)}
    fields.update(changes)
    with pytest.raises(ParameterException):
        SimConfig(**fields).validate()


def test_arrival_from_capacity(baseline_params):
    assert arrival_from_capacity(2.0, baseline_params) == pytest.approx(0.95 * 2.0 * 100.0)
    with pytest.raises(ParameterException):
        arrival_from_capacity(float('nan'), baseline_params)


def test_fixed_policy(baseline_params, draws):
    policy = FixedPolicy(baseline_params, 1.5, 0.5)
    pair = policy.powers(draws)
    assert len(pair) == len(draws)
    assert np.all(pair.mu_b == 1.5) and np.all(pair.mu_i == 0.5)
    assert policy.describe()['fixed_mu_b'] == 1.5
    with pytest.raises(ParameterException):
        FixedPolicy(baseline_params, -1.0, 0.5)


def test_base_policy_source_is_abstract(baseline_params, draws):
    with pytest.raises(NotImplementedError):
        PolicySource(baseline_params).powers(draws)


def test_calibrated_policy_accepts_known_gamma(baseline_params, draws):
    policy = CalibratedPolicy(baseline_params, log_gamma0=-5.0)
    assert policy.describe() == {'policy_source': 'calibrated', 'log_gamma0': -5.0}
    assert len(policy.powers(draws)) == len(draws)
    with pytest.raises(ParameterException):
        CalibratedPolicy(baseline_params, log_gamma0=float('inf'))
