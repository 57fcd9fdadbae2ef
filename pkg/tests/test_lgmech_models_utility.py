# coding=utf-8
"""Tests for models utility"""

# stdlib imports
import math
import pickle
# non-stdlib imports
import numpy as np
import pytest
# local imports
import lgmech.errors
# module under test
import lgmech.models.utility as utility


def _power():
    return utility.UtilitySpec(
        0, 'power', {'alpha': 0.5, 'beta': {'1': 2, '2': 2}}, (0, 1, 2))


def _linear():
    return utility.UtilitySpec(
        0, 'linear', {'c': {'0': 1, '1': 1}, 'b': 1}, (0, 1))


def _quadratic(k=3, rng=None):
    rng = rng or np.random.default_rng(1)
    keys = list(range(k))
    return utility.UtilitySpec(
        0, utility.UtilityFamily.Quadratic, {
            'p': {str(j): rng.uniform(-1, 1) for j in keys},
            'q': {str(j): rng.uniform(0.1, 1) for j in keys},
        }, keys)


def test_neg_inf():
    assert utility.NEG_INF is utility._NegativeInfinity()
    assert utility.NEG_INF < -1e308
    assert utility.NEG_INF < -math.inf
    assert not utility.NEG_INF < utility.NEG_INF
    assert utility.NEG_INF <= utility.NEG_INF
    assert 0 > utility.NEG_INF
    assert float(utility.NEG_INF) == -math.inf
    assert utility.is_neg_inf(utility.NEG_INF)
    assert not utility.is_neg_inf(-math.inf)
    assert pickle.loads(pickle.dumps(utility.NEG_INF)) is utility.NEG_INF
    with pytest.raises(TypeError):
        utility.NEG_INF + 1
    with pytest.raises(TypeError):
        utility.NEG_INF - 1.0


def test_action_box():
    box = utility.ActionBox(-1, 2)
    assert box.lo == -1.0
    assert box.hi == 2.0
    assert box.midpoint == 0.5
    assert box.contains(2 + 1e-13)
    assert not box.contains(2 + 1e-9)
    assert box.clamp(5) == 2.0
    assert box.clamp(-5) == -1.0
    assert box.constraint_value(0) == -1.0
    assert box.constraint_value(3) == 1.0
    assert box.to_list() == [-1.0, 2.0]
    assert box == utility.ActionBox(-1.0, 2.0)
    assert len({box, utility.ActionBox(-1, 2)}) == 1

    bad = ((0.5, 1), (-1, -0.5), (0, 0), (-math.inf, 1), (0, math.nan))
    for lo, hi in bad:
        with pytest.raises(lgmech.errors.ValidationError) as exc:
            utility.ActionBox(lo, hi)
        assert exc.value.assumption == 'action box'


def test_utility_spec_validation():
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'power', {'alpha': 1.5, 'beta': {'1': 2, '2': 2}}, (0, 1, 2))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'power', {'alpha': 0.5, 'beta': {'1': 1, '2': 2}}, (0, 1, 2))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'power', {'alpha': 0.5, 'beta': {'1': 2}}, (0, 1, 2))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(0, 'power', {'beta': {'1': 2}}, (0, 1))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'linear', {'c': {'0': 1, '1': -1}, 'b': 1}, (0, 1))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'linear', {'c': {'0': 1, '1': 1}, 'b': -1}, (0, 1))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'linear', {'c': [1, 1], 'b': 1}, (0, 1))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'quadratic', {'p': {'0': 1}, 'q': {'0': -1}}, (0,))
    with pytest.raises(lgmech.errors.ValidationError):
        utility.UtilitySpec(
            0, 'linear', {'c': {'1': 1}, 'b': 1}, (1,))
    with pytest.raises(ValueError):
        utility.UtilitySpec(0, 'cubic', {}, (0,))


def test_utility_spec_params():
    spec = _power()
    assert spec.requires_nonnegative
    assert spec.own_position == 0
    assert spec.params == {'alpha': 0.5, 'beta': {'1': 2.0, '2': 2.0}}
    assert spec.to_dict()['family'] == 'power'
    spec = _linear()
    assert not spec.requires_nonnegative
    assert spec.params == {'c': {'0': 1.0, '1': 1.0}, 'b': 1.0}
    assert 'linear' in repr(spec)


def test_evaluate_utility():
    box = utility.ActionBox(0, 1)
    assert utility.evaluate_utility(
        _power(), box, [0.25, 0.25, 0.25]) == pytest.approx(0.375)
    assert utility.evaluate_utility(
        _linear(), utility.ActionBox(-5, 5), [2, 3]) == pytest.approx(3)
    assert utility.evaluate_utility(
        _power(), box, [2, 0.25, 0.25]) is utility.NEG_INF
    assert utility.evaluate_utility(
        _linear(), box, [2, 0]) is utility.NEG_INF
    assert utility.evaluate_utility(
        _power(), box, [0.25, -0.1, 0.25]) is utility.NEG_INF
    # float noise below the box tolerance is absorbed
    assert utility.evaluate_utility(
        _power(), box, [1 + 1e-13, 0, 0]) == pytest.approx(1)
    # a box reaching below zero leaves the power domain at zero
    wide = utility.ActionBox(-1, 1)
    assert utility.evaluate_utility(
        _power(), wide, [-0.5, 0.25, 0.25]) is utility.NEG_INF
    assert utility.evaluate_utility(
        _power(), wide, [0.25, 0.25, 0.25]) == pytest.approx(0.375)
    lo, _ = utility.sampling_bounds(_power(), wide)
    assert lo[0] == 0
    assert utility.evaluate_utility(_power(), box, [0, 0, 0]) == 0
    assert utility.evaluate_utility(_linear(), box, [0, 0]) == 0
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        utility.evaluate_utility(_power(), box, [0.25, 0.25])


def test_aggregate_utility():
    box = utility.ActionBox(0, 1)
    a = [0.25, 0.25, 0.25]
    assert utility.aggregate_utility(
        _power(), box, a, 0.1) == pytest.approx(0.275)
    assert utility.aggregate_utility(_power(), box, a, 0) == \
        utility.evaluate_utility(_power(), box, a)
    assert utility.aggregate_utility(
        _power(), box, [1.5, 0, 0], -100) is utility.NEG_INF
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        utility.aggregate_utility(_power(), box, [0.25], 0)


def test_utility_gradient():
    assert np.allclose(
        utility.utility_gradient(_power(), [0.25, 0.25, 0.25]),
        [1, -0.5, -0.5])
    assert np.allclose(utility.utility_gradient(_linear(), [7, -3]), [0, 1])
    spec = utility.UtilitySpec(
        0, 'quadratic', {'p': {'0': 1}, 'q': {'0': 1}}, (0,))
    assert np.allclose(utility.utility_gradient(spec, [0.5]), [0])
    with pytest.raises(lgmech.errors.NotDifferentiableAtError):
        utility.utility_gradient(_power(), [0, 0.25, 0.25])
    with pytest.raises(lgmech.errors.NotDifferentiableAtError):
        utility.utility_gradient(_power(), [0.25, -0.25, 0.25])


@pytest.mark.parametrize('family', ['power', 'linear', 'quadratic'])
def test_gradient_matches_finite_differences(family):
    rng = np.random.default_rng(7)
    h = 1e-6
    tiny = 1e-12
    if family == 'power':
        spec = utility.UtilitySpec(
            1, family, {'alpha': 0.3, 'beta': {'0': 1.5, '2': 3.0}},
            (0, 1, 2))
    elif family == 'linear':
        spec = utility.UtilitySpec(
            1, family, {'c': {'0': 0.5, '1': 2.0, '2': 1.0}, 'b': 0.7},
            (0, 1, 2))
    else:
        spec = _quadratic(rng=rng)
    checked = 0
    while checked < 100:
        a = rng.uniform(0.1, 2.0, 3)
        grad = utility.utility_gradient(spec, a)
        # relative error is ill conditioned near stationary coordinates
        if np.min(np.abs(grad)) < 0.05:
            continue
        for p in range(3):
            e = np.zeros(3)
            e[p] = h
            fd = (spec.value(a + e) - spec.value(a - e)) / (2 * h)
            assert abs(fd - grad[p]) / max(abs(grad[p]), tiny) <= 1e-6
        checked += 1


def test_check_concavity():
    box = utility.ActionBox(0, 1)
    res = utility.check_concavity(_power(), box, 256, 0)
    assert res.concave
    res = utility.check_concavity(_linear(), utility.ActionBox(-1, 1))
    assert res.concave
    assert res.worst_violation == pytest.approx(0, abs=1e-12)
    assert utility.check_concavity(_quadratic(), box).concave
    assert utility.check_concavity(_linear(), box, sample_count=0).concave

    spec = utility.UtilitySpec(
        0, 'quadratic', {'p': {'0': 0}, 'q': {'0': -1}}, (0,),
        validate=False)
    res = utility.check_concavity(spec, box, 64, 3)
    assert not res.concave
    assert res.worst_violation > 0


def test_sampling_bounds():
    lo, hi = utility.sampling_bounds(_power(), utility.ActionBox(0, 1))
    assert lo.tolist() == [0, 0, 0]
    assert hi.tolist() == [1, 2, 2]
    lo, hi = utility.sampling_bounds(_linear(), utility.ActionBox(-3, 1))
    assert lo.tolist() == [-3, -6]
    assert hi.tolist() == [1, 6]
