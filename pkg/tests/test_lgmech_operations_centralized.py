# coding=utf-8
"""Tests for the centralized welfare solver"""

# stdlib imports
# non-stdlib imports
import numpy as np
import pytest
# local imports
import lgmech.errors
import lgmech.models.options
import lgmech.models.scenario
import lgmech.models.topology
import lgmech.models.utility
import lgmech.operations.generate
# module under test
import lgmech.operations.centralized as centralized


def _single_quadratic():
    # a lone user cannot satisfy the three-user cycles; solve on a
    # complete graph with decoupled quadratic utilities instead
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


def test_social_welfare():
    scenario = lgmech.operations.generate.three_user_scenario()
    assert centralized.social_welfare(scenario, [0.25] * 3) == \
        pytest.approx(3 * 0.375)
    assert centralized.social_welfare(scenario, [0, 0, 0]) == 0
    assert centralized.social_welfare(scenario, [0.25, 1.5, 0.25]) is \
        lgmech.models.utility.NEG_INF
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        centralized.social_welfare(scenario, [0.25, 0.25])


def test_welfare_gradient():
    scenario = lgmech.operations.generate.three_user_scenario()
    # own term 1 and two neighbor terms of -0.5 each
    assert np.allclose(
        centralized.welfare_gradient(scenario, [0.25] * 3), [0, 0, 0])
    g = centralized.welfare_gradient(scenario, [0, 0, 0])
    assert np.all(np.isfinite(g))
    assert np.all(g > 1e5)
    assert centralized.evaluation_point(scenario, [0, 0.5, 0]).tolist() == [
        1e-12, 0.5, 1e-12]


def test_solve_three_user():
    scenario = lgmech.operations.generate.three_user_scenario()
    sol = centralized.solve_centralized(
        scenario, lgmech.models.options.Solver(tol=1e-10))
    assert sol.converged
    assert np.allclose(sol.actions, [0.25] * 3, atol=1e-6)
    assert sol.objective == pytest.approx(1.125)
    assert sol.kkt.max_residual <= 1e-9
    assert np.all(sol.kkt.multipliers == 0)
    assert sol.kkt.active_bounds == [None] * 3
    assert sol.gradient_norm <= 1e-10
    # accepted iterates never decrease welfare
    trace = np.array(sol.trace)
    assert np.all(np.diff(trace) >= -1e-12)
    assert sol.to_dict()['kkt']['max_residual'] == sol.kkt.max_residual
    assert 'converged=True' in repr(sol)


def test_solve_against_closed_form():
    for alpha, beta in ((0.3, 1.5), (0.7, 3.0)):
        scenario = lgmech.operations.generate.three_user_scenario(
            alpha, beta)
        expected = (alpha / (2 * beta)) ** (1 / (beta - alpha))
        sol = centralized.solve_centralized(scenario)
        assert np.max(np.abs(sol.actions - expected)) <= 1e-6


def test_solve_against_grid_search():
    scenario = lgmech.operations.generate.three_user_scenario()
    sol = centralized.solve_centralized(scenario)
    grid = np.linspace(0, 1, 101)
    a = np.stack(np.meshgrid(grid, grid, grid, indexing='ij'), axis=-1)
    # each user: sqrt of own action minus squares of the other two
    welfare = np.sum(np.sqrt(a), axis=-1) - 2.0 * np.sum(a * a, axis=-1)
    best = float(welfare.max())
    assert abs(sol.objective - best) <= 1e-3


def test_solve_single_quadratic():
    sol = centralized.solve_centralized(_single_quadratic())
    assert np.allclose(sol.actions, [0.5] * 3, atol=1e-8)


def test_solve_advertising_boundary():
    scenario = lgmech.operations.generate.advertising_scenario()
    sol = centralized.solve_centralized(scenario)
    assert sol.actions.tolist() == [0, 10, 8, 0, 6]
    kkt = sol.kkt
    assert kkt.active_bounds == ['lower', 'upper', 'upper', 'lower', 'upper']
    assert kkt.multipliers[1] == pytest.approx(2.8)
    assert kkt.multipliers[2] == pytest.approx(2.5)
    assert kkt.multipliers[4] == pytest.approx(2.0)
    assert kkt.multipliers[0] == pytest.approx(0.1)
    assert kkt.max_residual <= 1e-12


def test_kkt_residual():
    scenario = lgmech.operations.generate.three_user_scenario()
    rep = centralized.kkt_residual(scenario, [0, 0, 0])
    assert rep.max_residual > 1e5
    assert rep.active_bounds == ['lower'] * 3
    assert np.all(rep.multipliers == 0)
    assert rep.max_residual <= centralized.GRADIENT_CAP

    rep = centralized.kkt_residual(scenario, [0.25, 2.0, 0.25])
    assert rep.max_residual == float('inf')
    d = rep.to_dict()
    assert d['active_bounds'][1] is None
    assert 'KKTReport' in repr(rep)


def test_solve_errors():
    scenario = lgmech.operations.generate.three_user_scenario()
    with pytest.raises(lgmech.errors.NotConvergedError) as exc:
        centralized.solve_centralized(
            scenario, lgmech.models.options.Solver(max_iter=2, tol=1e-14))
    assert exc.value.solution.iterations == 2
    assert not exc.value.solution.converged
    assert exc.value.to_dict()['iterations'] == 2

    t = lgmech.models.topology.build_topology(np.ones((3, 3)))
    utilities = [
        lgmech.models.utility.UtilitySpec(
            i, 'quadratic', {
                'p': {str(j): 0.0 for j in range(3)},
                'q': {str(j): -1.0 for j in range(3)},
            }, t.r_sets[i], validate=False)
        for i in range(3)
    ]
    boxes = [lgmech.models.utility.ActionBox(-1, 1) for _ in range(3)]
    scenario = lgmech.models.scenario.Scenario(
        t, utilities, boxes, check_concavity=False)
    with pytest.raises(lgmech.errors.NonConcaveUtilityError):
        centralized.solve_centralized(scenario)


def test_projected_gradient_norm():
    lower = np.array([0.0, 0.0])
    upper = np.array([1.0, 1.0])
    assert centralized.projected_gradient_norm(
        np.array([1.0, 0.5]), np.array([3.0, 0.0]), lower, upper) == 0
    assert centralized.projected_gradient_norm(
        np.array([0.5, 0.5]), np.array([-0.2, 0.1]), lower, upper) == \
        pytest.approx(0.2)


def _three_user_wide_boxes():
    base = lgmech.operations.generate.three_user_scenario()
    boxes = [lgmech.models.utility.ActionBox(-1, 1) for _ in range(3)]
    return lgmech.models.scenario.Scenario(
        base.topology, base.utilities, boxes, name='wide')


def test_solve_power_box_below_zero():
    scenario = _three_user_wide_boxes()
    assert scenario.lower.tolist() == [-1, -1, -1]
    assert scenario.domain_lower.tolist() == [0, 0, 0]
    sol = centralized.solve_centralized(scenario)
    assert sol.converged
    assert np.allclose(sol.actions, 0.25, atol=1e-6)
    assert np.all(sol.actions >= 0)
    assert sol.kkt.max_residual <= 1e-6
    assert sol.kkt.active_bounds == [None] * 3

    rep = centralized.kkt_residual(scenario, [-0.5, 0.25, 0.25])
    assert rep.max_residual == float('inf')


def test_solve_generated_power_sweep():
    for seed in range(50):
        scenario = lgmech.operations.generate.generate_scenario(
            8, 0.4, 'power', seed)
        sol = centralized.solve_centralized(scenario)
        assert sol.converged, seed
        assert sol.gradient_norm <= scenario.solver.tol, seed
        trace = np.array(sol.trace)
        assert np.all(np.diff(trace) >= -1e-12), seed
