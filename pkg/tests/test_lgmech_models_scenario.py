# coding=utf-8
"""Tests for models scenario"""

# stdlib imports
import json
import pathlib
# non-stdlib imports
import numpy as np
import pytest
# local imports
import lgmech.errors
import lgmech.models.message
import lgmech.models.options
import lgmech.models.topology
# module under test
import lgmech.models.scenario as scenario

_SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / 'scenarios'


def _three_user_data():
    return json.loads(
        (_SCENARIOS / 'three_user.json').read_text(encoding='utf-8'))


def test_load_bundled_scenarios():
    s = scenario.load_scenario(_SCENARIOS / 'three_user.json')
    assert s.n == 3
    assert s.name == 'three_user'
    assert s.families == ['power']
    assert s.solver.tol == 1e-10
    assert s.nonnegative.tolist() == [True, True, True]
    assert s.lower.tolist() == [0, 0, 0]
    assert s.upper.tolist() == [1, 1, 1]
    assert s.index_table.cycles == ((0, 1, 2),) * 3
    assert s.local(1, [1, 2, 3]).tolist() == [1, 2, 3]

    s = scenario.load_scenario(_SCENARIOS / 'advertising.json')
    assert s.n == 5
    assert s.families == ['linear']
    assert not np.any(s.nonnegative)
    assert s.local(3, [0, 1, 2, 3, 4]).tolist() == [1, 3, 4]

    s = scenario.load_scenario(_SCENARIOS / 'hurwicz_quadratic.json')
    assert s.index_policy == lgmech.models.topology.IndexPolicy.Shuffled
    assert s.families == ['quadratic']


def test_save_load_roundtrip(tmpdir):
    s = scenario.load_scenario(_SCENARIOS / 'hurwicz_quadratic.json')
    path = pathlib.Path(str(tmpdir)) / 'sub' / 'copy.json'
    scenario.save_scenario(s, path)
    t = scenario.load_scenario(path)
    assert t.to_dict() == s.to_dict()
    assert t.index_table == s.index_table


def test_topology_path(tmpdir):
    tmp = pathlib.Path(str(tmpdir))
    data = _three_user_data()
    (tmp / 'graph.json').write_text(json.dumps(
        {'adjacency': data['topology']['adjacency']}))
    data['topology'] = {'path': 'graph.json'}
    (tmp / 'scen.json').write_text(json.dumps(data))
    s = scenario.load_scenario(tmp / 'scen.json')
    assert s.n == 3
    assert s.to_dict()['topology'] == {'path': 'graph.json'}

    data['topology'] = {'path': 'missing.json'}
    (tmp / 'scen.json').write_text(json.dumps(data))
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.load_scenario(tmp / 'scen.json')
    assert exc.value.path.endswith('missing.json')


def test_parse_errors(tmpdir):
    tmp = pathlib.Path(str(tmpdir))
    (tmp / 'bad.json').write_text('{\n  "version": 1,\n  "users": [\n}\n')
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.load_scenario(tmp / 'bad.json')
    assert exc.value.line == 4
    assert exc.value.column is not None
    assert 'line 4' in str(exc.value)
    assert exc.value.to_dict()['line'] == 4

    with pytest.raises(lgmech.errors.ParseError):
        scenario.load_scenario(tmp / 'nothere.json')

    with pytest.raises(lgmech.errors.ParseError):
        scenario.Scenario.from_dict([])

    data = _three_user_data()
    data['version'] = 2
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.Scenario.from_dict(data)
    assert exc.value.field == 'version'

    data = _three_user_data()
    data['topology'] = {'edges': []}
    with pytest.raises(lgmech.errors.ParseError):
        scenario.Scenario.from_dict(data)

    data = _three_user_data()
    data['users'][1]['utility']['family'] = 'cobb-douglas'
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.Scenario.from_dict(data)
    assert exc.value.field == 'users[1].utility.family'

    data = _three_user_data()
    del data['users'][2]['box']
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.Scenario.from_dict(data)
    assert exc.value.field == 'users[2]'

    data = _three_user_data()
    data['solver'] = {'tolerance': 1}
    with pytest.raises(lgmech.errors.ParseError) as exc:
        scenario.Scenario.from_dict(data)
    assert exc.value.field == 'solver'

    data = _three_user_data()
    data['index_policy'] = 'random'
    with pytest.raises(lgmech.errors.ParseError):
        scenario.Scenario.from_dict(data)


def test_validation_errors():
    data = _three_user_data()
    data['topology']['adjacency'][1][1] = 0
    with pytest.raises(lgmech.errors.MissingSelfLoopError):
        scenario.Scenario.from_dict(data)

    data = _three_user_data()
    data['users'].pop()
    with pytest.raises(lgmech.errors.ValidationError):
        scenario.Scenario.from_dict(data)

    # PowerFamily actions keep their box, their domain starts at 0
    data = _three_user_data()
    data['users'][1]['box'] = [-0.5, 1.0]
    s = scenario.Scenario.from_dict(data)
    assert s.lower.tolist() == [0.0, -0.5, 0.0]
    assert s.domain_lower.tolist() == [0.0, 0.0, 0.0]

    data = _three_user_data()
    data['users'][0]['box'] = [0.2, 1.0]
    with pytest.raises(lgmech.errors.ValidationError) as exc:
        scenario.Scenario.from_dict(data)
    assert exc.value.assumption == 'action box'

    data = _three_user_data()
    data['users'][0]['utility']['params']['alpha'] = 2
    with pytest.raises(lgmech.errors.ValidationError):
        scenario.Scenario.from_dict(data)


def test_scenario_ctor_checks():
    s = scenario.load_scenario(_SCENARIOS / 'three_user.json')
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        scenario.Scenario(s.topology, s.utilities[:2], s.boxes)
    with pytest.raises(lgmech.errors.DimensionMismatchError):
        scenario.Scenario(s.topology, s.utilities, s.boxes[:2])
    with pytest.raises(lgmech.errors.ValidationError):
        scenario.Scenario(
            s.topology, list(reversed(s.utilities)), s.boxes)


def test_with_options():
    s = scenario.load_scenario(_SCENARIOS / 'hurwicz_quadratic.json')
    t = s.with_options(
        solver=lgmech.models.options.Solver(tol=1e-6), seed=s.seed + 1)
    assert t.solver.tol == 1e-6
    assert t.seed == s.seed + 1
    assert t.topology is s.topology
    u = s.with_options(index_policy='ascending')
    assert u.index_table.cycles == s.topology.c_sets
    assert 'hurwicz' in repr(s)


def test_read_profile(tmpdir):
    s = scenario.load_scenario(_SCENARIOS / 'three_user.json')
    p = lgmech.models.message.MessageProfile.random(
        s.topology, np.random.default_rng(2))
    path = pathlib.Path(str(tmpdir)) / 'profile.json'
    path.write_text(json.dumps(p.to_dict()))
    assert scenario.read_profile(path, s.topology) == p
