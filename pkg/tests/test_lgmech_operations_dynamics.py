# coding=utf-8
"""Tests for best-response dynamics"""

# stdlib imports
import math
# non-stdlib imports
import numpy as np
import pytest
# local imports
import lgmech.errors
import lgmech.models.message
import lgmech.models.options
import lgmech.models.scenario
import lgmech.models.topology
import lgmech.models.utility
import lgmech.operations.centralized
import lgmech.operations.generate
import lgmech.operations.mechanism
import lgmech.operations.ne
# module under test
import lgmech.operations.dynamics as dynamics


def _decoupled_quadratic():
    # u_i = a_i - a_i^2 on a complete graph of three users
    t = lgmech.models.topology.build_topology(np.ones((3, 3)))
    utilities = [
        lgmech.models.utility.UtilitySpec(
            i, 'quadratic', {
                'p': {str(j): 1.0 if j == i else 0.0 for j in range(3)},
                'q': {str(j): 1.0 if j == i else 0.0 for j in range(3)},
            }, t.r_sets[i])
        for i in range(3)
    ]
    boxes = [lgmech.models.utility.ActionBox(0, 1) for _ in range(3)]
    return lgmech.models.scenario.Scenario(t, utilities, boxes)


def _profile(topology, rows):
    return lgmech.models.message.MessageProfile(topology, [
        lgmech.models.message.Message(a, p) for a, p in rows])


def _constructed(scenario):
    sol = lgmech.operations.centralized.solve_centralized(scenario)
    prices = lgmech.operations.ne.personalized_prices_from_optimum(
        scenario, sol.actions)
    return lgmech.operations.ne.construct_ne(scenario, sol.actions, prices)


def test_best_response_analytic_argmax():
    scenario = _decoupled_quadratic()
    # successors of user 0 for good 0 are users 1 and 2: l_00 = 0.2
    profile = _profile(scenario.topology, [
        ([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
        ([0.2, 0.0, 0.0], [0.3, 0.0, 0.0]),
        ([0.2, 0.0, 0.0], [0.1, 0.0, 0.0]),
    ])
    br = dynamics.best_response(scenario, profile, 0)
    # maximize a - a^2 - 0.2 a at a = 0.4, so 0.4 + x = 1.2
    assert br.actions[0] == pytest.approx(0.8, abs=1e-6)
    assert br.actions[1:].tolist() == [0.0, 0.0]
    assert br.prices.tolist() == [0.0, 0.0, 0.0]
    new = profile.replace(0, br)
    assert lgmech.operations.mechanism.allocate_action(
        new, scenario.topology, 0) == pytest.approx(0.4, abs=1e-6)
    assert lgmech.operations.mechanism.payoff(new, scenario, 0) >= \
        lgmech.operations.mechanism.payoff(profile, scenario, 0)


def test_best_response_restores_box():
    scenario = _decoupled_quadratic()
    profile = _profile(scenario.topology, [
        ([3.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
        ([3.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
        ([3.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
    ])
    assert lgmech.operations.mechanism.payoff(profile, scenario, 0) is \
        lgmech.models.utility.NEG_INF
    br = dynamics.best_response(scenario, profile, 0)
    new = profile.replace(0, br)
    a0 = lgmech.operations.mechanism.allocate_action(
        new, scenario.topology, 0)
    assert scenario.boxes[0].contains(a0)
    assert a0 == pytest.approx(0.5, abs=1e-6)
    assert math.isfinite(
        lgmech.operations.mechanism.payoff(new, scenario, 0))


def test_best_response_fixed_point():
    scenario = lgmech.operations.generate.three_user_scenario()
    profile = _constructed(scenario)
    for i in range(scenario.n):
        local = lgmech.operations.mechanism.LocalPayoff(
            scenario, profile, i)
        br = dynamics.best_response(scenario, profile, i)
        gain = lgmech.operations.mechanism.payoff_gain(
            local.value(br.actions, br.prices),
            local.value(profile[i].actions, profile[i].prices))
        assert gain <= 1e-8


def test_best_response_drops_disagreeing_prices():
    scenario = _decoupled_quadratic()
    profile = _profile(scenario.topology, [
        ([0.0, 0.5, 0.7], [1.0, 1.0, 1.0]),
        ([0.6, 0.5, 0.7], [0.0, 0.0, 0.0]),
        ([0.6, 0.5, 0.9], [0.0, 0.0, 0.0]),
    ])
    br = dynamics.best_response(scenario, profile, 0)
    # user 0 agrees with its successor (user 1) on goods 1 and 2 only
    assert br.prices.tolist()[1:] == [1.0, 1.0]
    assert br.prices[0] == 0.0


def test_best_response_not_converged():
    scenario = _decoupled_quadratic()
    profile = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    with pytest.raises(lgmech.errors.InnerNotConvergedError) as exc:
        dynamics.best_response(
            scenario, profile, 0,
            lgmech.models.options.BestResponse(max_iter=1, tol=1e-14))
    assert exc.value.user == 0
    assert exc.value.iterations == 1
    assert isinstance(exc.value.message, lgmech.models.message.Message)


def test_run_dynamics_fixed_point():
    scenario = lgmech.operations.generate.three_user_scenario()
    profile = _constructed(scenario)
    traj = dynamics.run_dynamics(scenario, profile)
    assert traj.converged
    assert traj.converged_at == 0
    assert traj.profile_delta == 0
    assert traj.sweeps == 1
    assert traj.final_profile == profile
    assert traj.verification.is_equilibrium
    assert traj.inner_failures == 0
    assert all(rec[3] == 0 for rec in traj.records)
    d = traj.to_dict()
    assert d['converged']
    assert d['snapshots'] == [0, 1]


def test_run_dynamics_from_zero():
    scenario = lgmech.operations.generate.three_user_scenario()
    init = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    opts = lgmech.models.options.Dynamics(max_iter=40, stride=10)
    traj = dynamics.run_dynamics(scenario, init, opts)
    assert traj.iterates[0] == (0, init)
    assert [s for s, _ in traj.iterates[:-1]] == list(
        range(0, traj.sweeps, 10))[:len(traj.iterates) - 1]
    assert len(traj.payoffs) == traj.sweeps + 1
    assert len(traj.records) == 3 * traj.sweeps
    # each undamped candidate is at least as good, so the first update
    # of user 0 cannot lower its payoff
    assert traj.records[0][2] >= traj.payoffs[0][0]
    if traj.converged:
        actions = lgmech.operations.mechanism.compute_actions(
            traj.final_profile, scenario.topology)
        assert np.allclose(actions, 0.25, atol=1e-4)
        assert traj.verification.is_equilibrium
    else:
        assert traj.converged_at is None


@pytest.mark.parametrize('schedule', ['random', 'simultaneous'])
def test_run_dynamics_deterministic(schedule):
    scenario = lgmech.operations.generate.complete_scenario(4, seed=5)
    init = lgmech.models.message.MessageProfile.random(
        scenario.topology, np.random.default_rng(1), 0.5, 0.5)
    opts = lgmech.models.options.Dynamics(
        schedule=schedule, max_iter=15, seed=9)
    a = dynamics.run_dynamics(scenario, init, opts)
    b = dynamics.run_dynamics(scenario, init, opts)
    assert a.records == b.records
    assert a.payoffs == b.payoffs
    assert a.final_profile == b.final_profile
    assert a.converged == b.converged


def test_run_dynamics_invalid_options():
    scenario = lgmech.operations.generate.three_user_scenario()
    init = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    with pytest.raises(ValueError):
        dynamics.run_dynamics(
            scenario, init, lgmech.models.options.Dynamics(damping=0))
    with pytest.raises(ValueError):
        dynamics.run_dynamics(
            scenario, init, lgmech.models.options.Dynamics(damping=1.5))
    with pytest.raises(ValueError):
        dynamics.run_dynamics(
            scenario, init, lgmech.models.options.Dynamics(stride=0))
    with pytest.raises(ValueError):
        dynamics.run_dynamics(
            scenario, init, lgmech.models.options.Dynamics(schedule='async'))
