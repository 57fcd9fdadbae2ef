# Copyright (c) The lgmech Authors
#
# All rights reserved.
#
# MIT License
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED *AS IS*, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
# FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

# stdlib imports
import json
import logging
import pathlib
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors
import lgmech.models.message
import lgmech.models.options
import lgmech.models.topology
import lgmech.models.utility

# create logger
logger = logging.getLogger(__name__)
# global defines
_SUPPORTED_SCENARIO_VERSIONS = frozenset((1,))


class Scenario(object):
    """Model inputs: topology, utilities, boxes, solver settings and the
    cyclic index policy"""
    def __init__(
            self, topology, utilities, boxes, solver=None,
            index_policy=lgmech.models.topology.IndexPolicy.Ascending,
            seed=0, name='scenario', topology_path=None,
            check_concavity=True):
        # type: (Scenario, lgmech.models.topology.NetworkTopology, list,
        #        list, lgmech.models.options.Solver,
        #        lgmech.models.topology.IndexPolicy, int, str, str,
        #        bool) -> None
        """Ctor for Scenario
        :param Scenario self: this
        :param NetworkTopology topology: topology
        :param list utilities: UtilitySpec per user
        :param list boxes: ActionBox per user
        :param lgmech.models.options.Solver solver: solver options
        :param IndexPolicy index_policy: cyclic index policy
        :param int seed: rng seed for shuffled indices and searches
        :param str name: scenario name
        :param str topology_path: adjacency file, if not inline
        :param bool check_concavity: run the sampled midpoint test
        """
        self._topology = topology
        self._utilities = tuple(utilities)
        self._boxes = tuple(boxes)
        self._solver = solver or lgmech.models.options.Solver()
        self._index_policy = lgmech.models.topology.IndexPolicy(index_policy)
        self._seed = int(seed)
        self._name = name
        self._topology_path = topology_path
        n = topology.n
        if len(self._utilities) != n:
            raise lgmech.errors.DimensionMismatchError(
                n, len(self._utilities), what='utilities')
        if len(self._boxes) != n:
            raise lgmech.errors.DimensionMismatchError(
                n, len(self._boxes), what='action boxes')
        for i, spec in enumerate(self._utilities):
            if spec.user != i or spec.neighbors != topology.r_sets[i]:
                raise lgmech.errors.ValidationError(
                    'utility of user {} must be defined over R_{} = '
                    '{}'.format(i, i, list(topology.r_sets[i])),
                    assumption='utility parameters')
        self._nonnegative = np.zeros(n, dtype=bool)
        for spec in self._utilities:
            if spec.requires_nonnegative:
                self._nonnegative[list(spec.neighbors)] = True
        if check_concavity:
            for i, spec in enumerate(self._utilities):
                res = lgmech.models.utility.check_concavity(
                    spec, self._boxes[i], self._solver.concavity_samples,
                    self._seed + i)
                if not res.concave:
                    raise lgmech.errors.NonConcaveUtilityError(
                        i, res.worst_violation)
        self._table = lgmech.models.topology.assign_cyclic_indices(
            topology, self._index_policy, self._seed)
        self._lower = np.array([b.lo for b in self._boxes])
        self._upper = np.array([b.hi for b in self._boxes])
        # PowerFamily arguments are finite only on the nonnegative side
        self._domain_lower = np.where(
            self._nonnegative, np.maximum(self._lower, 0.0), self._lower)

    @property
    def name(self):
        return self._name

    @property
    def n(self):
        return self._topology.n

    @property
    def topology(self):
        return self._topology

    @property
    def index_table(self):
        # type: (Scenario) -> lgmech.models.topology.CyclicIndexTable
        """Cyclic index table built with the scenario's policy"""
        return self._table

    @property
    def index_policy(self):
        return self._index_policy

    @property
    def seed(self):
        return self._seed

    @property
    def utilities(self):
        return self._utilities

    @property
    def boxes(self):
        return self._boxes

    @property
    def solver(self):
        return self._solver

    @property
    def lower(self):
        # type: (Scenario) -> np.ndarray
        """Box lower bounds per user"""
        return self._lower

    @property
    def upper(self):
        # type: (Scenario) -> np.ndarray
        """Box upper bounds per user"""
        return self._upper

    @property
    def domain_lower(self):
        # type: (Scenario) -> np.ndarray
        """Lower bounds of the region where every utility is finite: the
        box lower bound, raised to 0 where a PowerFamily utility reads
        the action"""
        return self._domain_lower

    @property
    def nonnegative(self):
        # type: (Scenario) -> np.ndarray
        """Mask of users whose action enters some PowerFamily utility"""
        return self._nonnegative

    @property
    def families(self):
        return sorted({s.family.value for s in self._utilities})

    def local(self, i, actions):
        # type: (Scenario, int, np.ndarray) -> np.ndarray
        """Restrict a full action vector to R_i"""
        return np.asarray(actions, dtype=float)[list(self._topology.r_sets[i])]

    def with_options(self, solver=None, index_policy=None, seed=None):
        # type: (Scenario, lgmech.models.options.Solver,
        #        lgmech.models.topology.IndexPolicy, int) -> Scenario
        """Copy with different solver options, index policy or seed
        :param Scenario self: this
        :param Solver solver: solver options
        :param IndexPolicy index_policy: index policy
        :param int seed: seed
        :rtype: Scenario
        :return: new scenario
        """
        return Scenario(
            self._topology, self._utilities, self._boxes,
            solver=solver or self._solver,
            index_policy=index_policy or self._index_policy,
            seed=self._seed if seed is None else seed,
            name=self._name, topology_path=self._topology_path,
            check_concavity=False)

    def to_dict(self):
        # type: (Scenario) -> dict
        """Scenario JSON object
        :param Scenario self: this
        :rtype: dict
        :return: JSON-ready dict
        """
        if self._topology_path is not None:
            topo = {'path': str(self._topology_path)}
        else:
            topo = {'adjacency': self._topology.to_adjacency()}
        return {
            'version': 1,
            'name': self._name,
            'topology': topo,
            'users': [
                {'box': self._boxes[i].to_list(),
                 'utility': self._utilities[i].to_dict()}
                for i in range(self.n)
            ],
            'solver': dict(self._solver._asdict()),
            'index_policy': self._index_policy.value,
            'seed': self._seed,
        }

    @classmethod
    def from_dict(cls, data, base_path=None):
        # type: (type, dict, pathlib.Path) -> Scenario
        """Build and validate a scenario from its JSON object
        :param type cls: class
        :param dict data: parsed JSON
        :param pathlib.Path base_path: directory for relative topology paths
        :rtype: Scenario
        :return: scenario
        """
        if not isinstance(data, dict):
            raise lgmech.errors.ParseError(
                'scenario must be a JSON object', field='$')
        version = data.get('version', 1)
        if version not in _SUPPORTED_SCENARIO_VERSIONS:
            raise lgmech.errors.ParseError(
                'unsupported scenario version {}'.format(version),
                field='version')
        topo_path = None
        topo = data.get('topology')
        if not isinstance(topo, dict):
            raise lgmech.errors.ParseError(
                'topology must be an object with "adjacency" or "path"',
                field='topology')
        if 'adjacency' in topo:
            adjacency = topo['adjacency']
        elif 'path' in topo:
            topo_path = topo['path']
            path = pathlib.Path(topo_path)
            if base_path is not None and not path.is_absolute():
                path = pathlib.Path(base_path) / path
            adjacency = _read_json(path)
            if isinstance(adjacency, dict):
                adjacency = adjacency.get('adjacency')
        else:
            raise lgmech.errors.ParseError(
                'topology must contain "adjacency" or "path"',
                field='topology')
        if not isinstance(adjacency, list):
            raise lgmech.errors.ParseError(
                'adjacency must be a list of rows', field='topology.adjacency')
        topology = lgmech.models.topology.build_topology(adjacency)
        users = data.get('users')
        if not isinstance(users, list):
            raise lgmech.errors.ParseError(
                'users must be a list', field='users')
        if len(users) != topology.n:
            raise lgmech.errors.ValidationError(
                'scenario lists {} users but the graph has {}'.format(
                    len(users), topology.n), assumption='users')
        utilities = []
        boxes = []
        for i, user in enumerate(users):
            field = 'users[{}]'.format(i)
            try:
                lo, hi = user['box']
                ut = user['utility']
                family = ut['family']
                params = ut['params']
            except (KeyError, TypeError, ValueError):
                raise lgmech.errors.ParseError(
                    'user entry needs "box": [lo, hi] and "utility": '
                    '{family, params}', field=field) from None
            try:
                family = lgmech.models.utility.UtilityFamily(family)
            except ValueError:
                raise lgmech.errors.ParseError(
                    'unknown utility family "{}"'.format(family),
                    field=field + '.utility.family') from None
            if not isinstance(params, dict):
                raise lgmech.errors.ParseError(
                    'params must be an object',
                    field=field + '.utility.params')
            boxes.append(lgmech.models.utility.ActionBox(lo, hi))
            utilities.append(lgmech.models.utility.UtilitySpec(
                i, family, params, topology.r_sets[i]))
        try:
            solver = lgmech.models.options.solver_from_config(
                data.get('solver'))
        except (TypeError, ValueError) as exc:
            raise lgmech.errors.ParseError(
                str(exc), field='solver') from None
        try:
            policy = lgmech.models.topology.IndexPolicy(
                data.get('index_policy', 'ascending'))
        except ValueError:
            raise lgmech.errors.ParseError(
                'index_policy must be "ascending" or "shuffled"',
                field='index_policy') from None
        return cls(
            topology, utilities, boxes, solver=solver, index_policy=policy,
            seed=data.get('seed', 0), name=data.get('name', 'scenario'),
            topology_path=topo_path)

    def __repr__(self):
        return 'Scenario(name={}, n={}, families={})'.format(
            self._name, self.n, self.families)


def _read_json(path):
    # type: (pathlib.Path) -> object
    """Read a JSON file, mapping failures to ParseError with location
    :param pathlib.Path path: file
    :rtype: object
    :return: parsed JSON
    """
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise lgmech.errors.ParseError(
            'cannot read file: {}'.format(exc.strerror), path=path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise lgmech.errors.ParseError(
            exc.msg, path=path, line=exc.lineno, column=exc.colno) from None


def load_scenario(path):
    # type: (str) -> Scenario
    """Load and fully validate a scenario file
    :param str path: scenario JSON file
    :rtype: Scenario
    :return: scenario
    """
    path = pathlib.Path(path)
    data = _read_json(path)
    scenario = Scenario.from_dict(data, base_path=path.parent)
    logger.debug('loaded scenario {} from {}: n={} families={}'.format(
        scenario.name, path, scenario.n, scenario.families))
    return scenario


def save_scenario(scenario, path):
    # type: (Scenario, str) -> None
    """Write a scenario file
    :param Scenario scenario: scenario
    :param str path: destination
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(scenario.to_dict(), indent=2, sort_keys=True) + '\n',
        encoding='utf-8')


def read_profile(path, topology):
    # type: (str, lgmech.models.topology.NetworkTopology) ->
    #        lgmech.models.message.MessageProfile
    """Load a message-profile file for a topology
    :param str path: profile JSON file
    :param NetworkTopology topology: topology
    :rtype: lgmech.models.message.MessageProfile
    :return: profile
    """
    return lgmech.models.message.MessageProfile.from_dict(
        topology, _read_json(path))
