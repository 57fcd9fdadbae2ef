# coding=utf-8
"""Tests for audit"""

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
import lgmech.models.utility
import lgmech.operations.generate
# module under test
import lgmech.operations.audit as audit

_SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / 'scenarios'
_FAST = lgmech.models.options.Verification(random_deviations=300)
_SWEEP = lgmech.models.options.Verification(random_deviations=50)


@pytest.mark.parametrize('name', [
    'three_user.json', 'advertising.json', 'hurwicz_quadratic.json'])
def test_certify_bundled_scenarios(name):
    scenario = lgmech.models.scenario.load_scenario(_SCENARIOS / name)
    cert = audit.certify_scenario(scenario, _FAST)
    rep = cert.audit
    assert rep.passed
    assert rep.budget_balanced
    assert rep.individually_rational
    assert rep.feasible
    assert rep.optimal
    assert rep.optimality_gap <= 1e-6
    assert rep.price_column_residual <= 1e-9
    assert rep.ne_report.is_equilibrium
    assert rep.centralized_converged
    assert np.allclose(rep.allocation.actions, cert.solution.actions)
    d = rep.to_dict()
    assert d['passed']
    assert d['outcome']['actions'] == rep.allocation.actions.tolist()
    assert 'nash_verification' in d


def test_audit_random_profile():
    scenario = lgmech.operations.generate.three_user_scenario()
    rng = np.random.default_rng(4)
    profile = lgmech.models.message.MessageProfile.random(
        scenario.topology, rng, 0.3, 1.0)
    rep = audit.full_audit(scenario, profile, _FAST)
    assert rep.budget_balanced
    assert rep.price_column_residual <= 1e-9
    assert not rep.ne_report.is_equilibrium
    assert not rep.passed
    assert 'passed=False' in repr(rep)


def test_audit_zero_profile():
    scenario = lgmech.operations.generate.three_user_scenario()
    zero = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    rep = audit.full_audit(scenario, zero, _FAST)
    assert rep.ir_margins.tolist() == [0.0, 0.0, 0.0]
    assert rep.individually_rational
    assert rep.mechanism_objective == 0
    assert rep.optimality_gap == pytest.approx(1.125, abs=1e-6)
    assert not rep.optimal
    assert not rep.passed


def test_audit_infeasible_profile():
    scenario = lgmech.operations.generate.three_user_scenario()
    t = scenario.topology
    profile = lgmech.models.message.MessageProfile(t, [
        lgmech.models.message.Message([2.0] * 3, [0.0] * 3)
        for _ in range(3)])
    rep = audit.full_audit(scenario, profile, _FAST)
    assert not rep.feasible
    assert rep.optimality_gap == math.inf
    assert np.all(rep.ir_margins == -math.inf)
    assert not rep.individually_rational
    assert rep.kkt_max_residual == math.inf


def test_audit_reuses_solution_and_checks_topology():
    scenario = lgmech.operations.generate.three_user_scenario()
    cert = audit.certify_scenario(scenario, _FAST)
    rep = audit.full_audit(scenario, cert.profile, _FAST, cert.solution)
    assert rep.centralized_objective == cert.solution.objective
    assert rep.passed

    other = lgmech.operations.generate.complete_scenario(4)
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        audit.full_audit(
            scenario,
            lgmech.models.message.MessageProfile.zeros(other.topology))


def test_audit_centralized_not_converged():
    scenario = lgmech.operations.generate.three_user_scenario()
    scenario = scenario.with_options(
        solver=lgmech.models.options.Solver(max_iter=1, tol=1e-14))
    zero = lgmech.models.message.MessageProfile.zeros(scenario.topology)
    rep = audit.full_audit(scenario, zero, _FAST)
    assert not rep.centralized_converged
    assert rep.to_dict()['centralized_converged'] is False


def test_ir_margins():
    scenario = lgmech.operations.generate.three_user_scenario()
    cert = audit.certify_scenario(scenario, _FAST)
    margins = audit.ir_margins(scenario, cert.profile)
    assert np.all(margins >= 0)
    assert np.allclose(margins, cert.audit.ir_margins)


@pytest.mark.parametrize('family', ['power', 'linear', 'quadratic'])
def test_certify_generated(family):
    for seed in range(50):
        scenario = lgmech.operations.generate.generate_scenario(
            8, 0.4, family, seed)
        cert = audit.certify_scenario(scenario, _SWEEP)
        rep = cert.audit
        assert rep.budget_balanced, seed
        assert rep.individually_rational, seed
        assert rep.feasible, seed
        assert np.all(rep.allocation.actions >= scenario.lower - 1e-9), seed
        assert np.all(rep.allocation.actions <= scenario.upper + 1e-9), seed
        assert rep.optimality_gap <= 1e-6, seed
        assert rep.passed, seed


def test_certify_power_box_below_zero():
    base = lgmech.operations.generate.three_user_scenario()
    boxes = [lgmech.models.utility.ActionBox(-1, 1) for _ in range(3)]
    scenario = lgmech.models.scenario.Scenario(
        base.topology, base.utilities, boxes, name='wide')
    cert = audit.certify_scenario(scenario, _FAST)
    assert cert.audit.passed
    assert np.allclose(cert.audit.allocation.actions, 0.25, atol=1e-6)
    assert cert.audit.ne_report.is_equilibrium
