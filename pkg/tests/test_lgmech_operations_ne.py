# coding=utf-8
"""Tests for equilibrium construction and verification"""

# stdlib imports
import math
import pathlib
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
# module under test
import lgmech.operations.ne as ne

_SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / 'scenarios'


def _construct(scenario):
    sol = lgmech.operations.centralized.solve_centralized(scenario)
    prices = ne.personalized_prices_from_optimum(scenario, sol.actions)
    return sol.actions, prices, ne.construct_ne(scenario, sol.actions, prices)


def _recompute_column(pi):
    k = len(pi)
    return [pi[(q + 1) % k] - pi[(q + 2) % k] for q in range(k)]


def test_personalized_prices_three_user():
    scenario = lgmech.operations.generate.three_user_scenario()
    a_star = np.full(3, 0.25)
    prices = ne.personalized_prices_from_optimum(scenario, a_star)
    assert len(prices) == 9
    for i in range(3):
        for j in range(3):
            expected = 1.0 if i == j else -0.5
            assert prices[(i, j)] == pytest.approx(expected)
    for j in range(3):
        assert prices.column_sum(j, (0, 1, 2)) == 0
        assert prices.column(j, (2, 0, 1)).tolist() == [
            prices[(2, j)], prices[(0, j)], prices[(1, j)]]
    d = prices.to_dict()
    assert {'i': 0, 'j': 1, 'value': prices[(0, 1)]} in d

    with pytest.raises(lgmech.errors.KKTNotSatisfiedError) as exc:
        ne.personalized_prices_from_optimum(scenario, np.full(3, 0.5))
    assert exc.value.max_residual > 1e-6
    assert exc.value.to_dict()['error'] == 'KKTNotSatisfiedError'


def test_personalized_prices_interior_own_gradient():
    scenario = lgmech.models.scenario.load_scenario(
        _SCENARIOS / 'hurwicz_quadratic.json')
    sol = lgmech.operations.centralized.solve_centralized(scenario)
    prices = ne.personalized_prices_from_optimum(scenario, sol.actions)
    for i, spec in enumerate(scenario.utilities):
        grad = spec.gradient(scenario.local(i, sol.actions))
        assert prices[(i, i)] == pytest.approx(
            grad[spec.own_position], abs=1e-7)


def test_solve_price_system():
    pi = ne.solve_price_system([1.0, -0.5, -0.5], (0, 1, 2))
    assert np.allclose(pi, [0.5, 1.0, 0.0])
    # same differences as (2, 3, 1) * 0.5 up to a constant
    assert np.allclose(pi - np.array([1.0, 1.5, 0.5]), -0.5)
    assert np.allclose(_recompute_column(pi), [1.0, -0.5, -0.5])

    assert ne.solve_price_system([0, 0, 0, 0]).tolist() == [0, 0, 0, 0]

    pi = ne.solve_price_system([1, -1, 0])
    assert np.min(pi) == 0
    assert np.allclose(_recompute_column(pi), [1, -1, 0])

    rng = np.random.default_rng(0)
    for k in range(3, 12):
        col = rng.normal(size=k)
        col[-1] = -np.sum(col[:-1])
        pi = ne.solve_price_system(col)
        assert np.min(pi) == 0
        assert np.allclose(_recompute_column(pi), col, atol=1e-12)

    with pytest.raises(lgmech.errors.InconsistentColumnError) as exc:
        ne.solve_price_system([1, 1, -1])
    assert exc.value.residual == 1
    with pytest.raises(lgmech.errors.ValidationError):
        ne.solve_price_system([1, -1])
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        ne.solve_price_system([1, -1, 0], (0, 1))


def test_construct_ne_three_user():
    scenario = lgmech.operations.generate.three_user_scenario()
    a_star, prices, profile = _construct(scenario)
    for i in range(3):
        assert profile[i].actions.tolist() == a_star.tolist()
    assert np.allclose(
        profile[0].prices, [0.5, 0.0, 1.0], atol=1e-6)
    alloc = lgmech.operations.mechanism.compute_outcome(
        profile, scenario.topology, scenario.index_table)
    assert np.allclose(a_star, 0.25, atol=1e-6)
    assert np.allclose(alloc.actions, a_star, rtol=0, atol=1e-12)
    assert abs(alloc.tax_sum) <= 1e-9
    for i in range(3):
        linear = math.fsum(
            prices[(i, j)] * a_star[j] for j in range(3))
        assert alloc.taxes[i] == pytest.approx(linear, abs=1e-12)
        assert lgmech.operations.mechanism.payoff(
            profile, scenario, i) >= 0

    cond = ne.check_ne_conditions(scenario, profile, a_star, prices)
    assert cond.holds()
    assert cond.averaging <= 1e-15
    assert cond.complementarity == 0
    assert cond.min_price == 0
    assert 'averaging' in cond.to_dict()
    assert np.all(ne.check_price_taking(scenario, a_star, prices) <= 1e-7)


@pytest.mark.parametrize('name', [
    'three_user.json', 'advertising.json', 'hurwicz_quadratic.json'])
def test_construct_ne_round_trip(name):
    scenario = lgmech.models.scenario.load_scenario(_SCENARIOS / name)
    a_star, prices, profile = _construct(scenario)
    table = scenario.index_table
    for i, r_set in enumerate(scenario.topology.r_sets):
        for j in r_set:
            assert abs(lgmech.operations.mechanism.personalized_price(
                profile, scenario.topology, table, i, j) -
                prices[(i, j)]) <= 1e-9
    for m in profile.messages:
        assert np.all(m.prices >= 0)
    assert ne.check_ne_conditions(scenario, profile, a_star, prices).holds()


def test_construct_ne_degenerate():
    t = lgmech.models.topology.build_topology(np.ones((3, 3)))
    utilities = [
        lgmech.models.utility.UtilitySpec(
            i, 'linear', {
                'c': {str(j): 1.0 if j == i else 0.0 for j in range(3)},
                'b': 1.0,
            }, t.r_sets[i])
        for i in range(3)
    ]
    boxes = [lgmech.models.utility.ActionBox(-1, 1) for _ in range(3)]
    scenario = lgmech.models.scenario.Scenario(t, utilities, boxes)
    a_star, prices, profile = _construct(scenario)
    assert a_star.tolist() == [0, 0, 0]
    assert all(v == 0 for v in prices.values.values())
    for m in profile.messages:
        assert not np.any(m.actions)
        assert not np.any(m.prices)
    alloc = lgmech.operations.mechanism.compute_outcome(
        profile, t, scenario.index_table)
    assert not np.any(alloc.taxes)


def test_verify_ne_three_user():
    scenario = lgmech.operations.generate.three_user_scenario()
    _, _, profile = _construct(scenario)
    report = ne.verify_ne(
        scenario, profile,
        lgmech.models.options.Verification(random_deviations=10000, seed=1))
    assert report.is_equilibrium
    assert report.worst_gain <= 1e-6
    assert report.deviations_tested == 3 * 10001
    assert all(report.inner_converged)
    assert report.payoffs[0] >= 0
    d = report.to_dict()
    assert d['is_equilibrium']
    assert len(d['per_user_gains']) == 3


def test_verify_ne_hurwicz_quadratic():
    scenario = lgmech.models.scenario.load_scenario(
        _SCENARIOS / 'hurwicz_quadratic.json')
    _, _, profile = _construct(scenario)
    report = ne.verify_ne(scenario, profile)
    assert report.is_equilibrium


def test_verify_ne_detects_deviations():
    scenario = lgmech.operations.generate.three_user_scenario()
    _, _, profile = _construct(scenario)
    msg = profile[0]
    shifted = profile.replace(0, lgmech.models.message.Message(
        msg.actions + np.array([0.1, 0.0, 0.0]), msg.prices))
    opts = lgmech.models.options.Verification(random_deviations=500)
    report = ne.verify_ne(scenario, shifted, opts)
    assert not report.is_equilibrium
    assert report.worst_gain > 1e-6

    zero = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    report = ne.verify_ne(scenario, zero, opts)
    assert not report.is_equilibrium
    assert report.per_user_gains[0] > 0


def test_verify_ne_best_response_only():
    scenario = lgmech.operations.generate.three_user_scenario()
    zero = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    report = ne.verify_ne(
        scenario, zero, lgmech.models.options.Verification(
            random_deviations=0, gain_tol=1e-3))
    assert report.deviations_tested == 3
    assert not report.is_equilibrium
    assert report.gain_tolerances.tolist() == [1e-3] * 3


def test_ne_report():
    report = ne.NEReport([0.0, 2e-6], [1e-6, 1e-6], 10, [1.0, 2.0],
                         [True, True])
    assert report.worst_gain == 2e-6
    assert not report.is_equilibrium
    report = ne.NEReport([], [], 0, [], [])
    assert report.worst_gain == 0
    assert report.is_equilibrium
