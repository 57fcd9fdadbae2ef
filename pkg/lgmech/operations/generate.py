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
import logging
# non-stdlib imports
import networkx
import numpy as np
# local imports
import lgmech.errors
import lgmech.models.scenario
import lgmech.models.topology
import lgmech.models.utility

# create logger
logger = logging.getLogger(__name__)
# global defines
_DUMMY_COST = 0.1


def random_topology(n, density, rng):
    # type: (int, float, np.random.Generator) -> np.ndarray
    """Random directed influence graph with self loops and every column
    topped up to at least three affected users
    :param int n: number of users
    :param float density: edge probability
    :param np.random.Generator rng: generator
    :rtype: np.ndarray
    :return: adjacency matrix
    """
    if n < lgmech.models.topology.MIN_CYCLE_SIZE:
        raise lgmech.errors.ValidationError(
            'n = {} < 3 users cannot give every good three '
            'affected users'.format(n), assumption='cycle size')
    if not 0 <= density <= 1:
        raise ValueError('density {} not in [0, 1]'.format(density))
    graph = networkx.gnp_random_graph(
        n, density, seed=int(rng.integers(2**32)), directed=True)
    # edge j -> i: j's action affects i
    g = networkx.to_numpy_array(
        graph, nodelist=list(range(n)), dtype=np.int8).T.copy()
    np.fill_diagonal(g, 1)
    for j in range(n):
        missing = lgmech.models.topology.MIN_CYCLE_SIZE - int(g[:, j].sum())
        if missing > 0:
            pool = np.flatnonzero(g[:, j] == 0)
            added = rng.choice(pool, size=missing, replace=False)
            g[np.sort(added), j] = 1
            logger.debug('good {} topped up with users {}'.format(
                j, sorted(int(k) for k in added)))
    return g


def _power_utility(i, r_set, rng):
    alpha = float(rng.uniform(0.2, 0.8))
    beta = {
        str(j): float(rng.uniform(1.5, 3.0)) for j in r_set if j != i}
    return {'alpha': alpha, 'beta': beta}, lgmech.models.utility.ActionBox(
        0.0, 1.0)


def _linear_utility(i, r_set, rng):
    c = {str(j): float(rng.uniform(0.0, 1.0)) for j in r_set}
    b = float(rng.uniform(0.5, 2.0))
    hi = float(rng.uniform(0.5, 2.0))
    return {'c': c, 'b': b}, lgmech.models.utility.ActionBox(0.0, hi)


def _quadratic_utility(i, r_set, rng):
    p = {str(j): float(rng.uniform(-1.0, 1.0)) for j in r_set}
    q = {str(j): float(rng.uniform(0.1, 1.0)) for j in r_set}
    lo = -float(rng.uniform(0.5, 2.0))
    hi = float(rng.uniform(0.5, 2.0))
    return {'p': p, 'q': q}, lgmech.models.utility.ActionBox(lo, hi)


_FAMILY_SAMPLERS = {
    lgmech.models.utility.UtilityFamily.Power: _power_utility,
    lgmech.models.utility.UtilityFamily.Linear: _linear_utility,
    lgmech.models.utility.UtilityFamily.Quadratic: _quadratic_utility,
}


def generate_scenario(
        n, density, family, seed,
        index_policy=lgmech.models.topology.IndexPolicy.Ascending,
        solver=None):
    # type: (int, float, str, int, lgmech.models.topology.IndexPolicy,
    #        lgmech.models.options.Solver) -> lgmech.models.scenario.Scenario
    """Random scenario; identical arguments give identical scenarios
    :param int n: number of users
    :param float density: edge probability
    :param str family: utility family value
    :param int seed: seed
    :param IndexPolicy index_policy: cyclic index policy
    :param lgmech.models.options.Solver solver: solver options
    :rtype: Scenario
    :return: scenario
    """
    family = lgmech.models.utility.UtilityFamily(family)
    rng = np.random.default_rng(seed)
    g = random_topology(n, density, rng)
    topology = lgmech.models.topology.build_topology(g)
    utilities = []
    boxes = []
    sampler = _FAMILY_SAMPLERS[family]
    for i, r_set in enumerate(topology.r_sets):
        params, box = sampler(i, r_set, rng)
        utilities.append(
            lgmech.models.utility.UtilitySpec(i, family, params, r_set))
        boxes.append(box)
    return lgmech.models.scenario.Scenario(
        topology, utilities, boxes, solver=solver,
        index_policy=index_policy, seed=seed,
        name='{}-n{}-d{}-s{}'.format(family.value, n, density, seed))


def three_user_scenario(alpha=0.5, beta=2.0):
    # type: (float, float) -> lgmech.models.scenario.Scenario
    """Three users on a complete graph with power utilities
    u_i = a_i^alpha - sum_{j != i} a_j^beta and boxes [0, 1]"""
    topology = lgmech.models.topology.build_topology(np.ones((3, 3)))
    utilities = [
        lgmech.models.utility.UtilitySpec(
            i, lgmech.models.utility.UtilityFamily.Power,
            {'alpha': alpha,
             'beta': {str(j): beta for j in range(3) if j != i}},
            topology.r_sets[i])
        for i in range(3)
    ]
    boxes = [lgmech.models.utility.ActionBox(0.0, 1.0) for _ in range(3)]
    return lgmech.models.scenario.Scenario(
        topology, utilities, boxes, name='three_user')


def complete_scenario(n=4, seed=0):
    # type: (int, int) -> lgmech.models.scenario.Scenario
    """Every user affects every other user; quadratic utilities"""
    rng = np.random.default_rng(seed)
    topology = lgmech.models.topology.build_topology(np.ones((n, n)))
    utilities = []
    boxes = []
    for i, r_set in enumerate(topology.r_sets):
        params, box = _quadratic_utility(i, r_set, rng)
        utilities.append(lgmech.models.utility.UtilitySpec(
            i, lgmech.models.utility.UtilityFamily.Quadratic, params, r_set))
        boxes.append(box)
    return lgmech.models.scenario.Scenario(
        topology, utilities, boxes, seed=seed,
        name='hurwicz_quadratic_n{}'.format(n))


def advertising_scenario(bids=(1.0, 1.5, 0.8), max_impressions=(10.0, 8.0,
                                                                 6.0)):
    # type: (tuple, tuple) -> lgmech.models.scenario.Scenario
    """Clustered display advertising: user 0 is the publisher, users 1, 2
    and 4 run clusters with bids, user 3 only appears inside clusters.
    Users 0 and 3 have no cluster of their own; their actions carry a
    small cost so the optimum pins them at 0, and they are wired into
    enough neighborhoods to give every good three affected users"""
    b1, b2, b4 = (float(b) for b in bids)
    r_sets = [
        (0, 1, 2, 3, 4),
        (0, 1, 2),
        (0, 1, 2, 4),
        (1, 3, 4),
        (2, 3, 4),
    ]
    params = [
        {'c': {'0': 0.0, '1': b1, '2': b2, '3': 0.0, '4': b4},
         'b': _DUMMY_COST},
        {'c': {'0': 0.0, '1': 1.6, '2': 0.4}, 'b': b1},
        {'c': {'0': 0.0, '1': 0.7, '2': 1.9, '4': 0.3}, 'b': b2},
        {'c': {'1': 0.5, '3': 0.0, '4': 0.6}, 'b': _DUMMY_COST},
        {'c': {'2': 0.2, '3': 0.0, '4': 1.1}, 'b': b4},
    ]
    topology = lgmech.models.topology.NetworkTopology.from_r_sets(5, r_sets)
    utilities = [
        lgmech.models.utility.UtilitySpec(
            i, lgmech.models.utility.UtilityFamily.Linear, params[i],
            topology.r_sets[i])
        for i in range(5)
    ]
    hi = [1.0, max_impressions[0], max_impressions[1], 1.0,
          max_impressions[2]]
    boxes = [lgmech.models.utility.ActionBox(0.0, h) for h in hi]
    return lgmech.models.scenario.Scenario(
        topology, utilities, boxes, name='advertising')
