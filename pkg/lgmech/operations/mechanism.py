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
import math
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors
import lgmech.models.message
import lgmech.models.utility

# create logger
logger = logging.getLogger(__name__)


def allocate_action(profile, topology, i):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.topology.NetworkTopology, int) -> float
    """Allocated action of user i: mean of the proposals for i made by
    the users in C_i
    :param MessageProfile profile: message profile
    :param NetworkTopology topology: topology
    :param int i: user
    :rtype: float
    :return: allocated action
    """
    c_set = topology.c_sets[i]
    return math.fsum(
        profile.action_proposal(k, i) for k in c_set) / len(c_set)


def compute_actions(profile, topology, users=None):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.topology.NetworkTopology, list) -> np.ndarray
    """Allocated actions for all users, or only for the given ones (other
    entries are left as NaN)
    :param MessageProfile profile: message profile
    :param NetworkTopology topology: topology
    :param list users: subset of users
    :rtype: np.ndarray
    :return: actions
    """
    if users is None:
        users = range(topology.n)
        actions = np.empty(topology.n)
    else:
        actions = np.full(topology.n, np.nan)
    for j in users:
        actions[j] = allocate_action(profile, topology, j)
    return actions


def personalized_price(profile, topology, table, i, j):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.topology.NetworkTopology,
    #        lgmech.models.topology.CyclicIndexTable, int, int) -> float
    """l_ij: price proposal of i's first cyclic successor in C_j minus that
    of its second successor
    :param MessageProfile profile: message profile
    :param NetworkTopology topology: topology
    :param CyclicIndexTable table: cyclic indices
    :param int i: user
    :param int j: good
    :rtype: float
    :return: personalized price
    """
    if table.index_of(i, j) == 0:
        raise lgmech.errors.NotInCycleError(i, j)
    s1 = table.successor(j, i, 1)
    s2 = table.successor(j, i, 2)
    return profile.price_proposal(s1, j) - profile.price_proposal(s2, j)


def compute_tax(profile, topology, table, i, actions=None):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.topology.NetworkTopology,
    #        lgmech.models.topology.CyclicIndexTable, int,
    #        np.ndarray) -> float
    """Tax of user i: for every good j in R_i, the price term l_ij a_j,
    plus i's own penalty for disagreeing with its successor, minus the
    successor's penalty for disagreeing with the second successor
    :param MessageProfile profile: message profile
    :param NetworkTopology topology: topology
    :param CyclicIndexTable table: cyclic indices
    :param int i: user
    :param np.ndarray actions: precomputed allocated actions
    :rtype: float
    :return: tax
    """
    terms = []
    for j in topology.r_sets[i]:
        s1 = table.successor(j, i, 1)
        s2 = table.successor(j, i, 2)
        pi_s1 = profile.price_proposal(s1, j)
        a_i = profile.action_proposal(i, j)
        a_s1 = profile.action_proposal(s1, j)
        a_s2 = profile.action_proposal(s2, j)
        if actions is None:
            a_hat = allocate_action(profile, topology, j)
        else:
            a_hat = actions[j]
        terms.append((pi_s1 - profile.price_proposal(s2, j)) * a_hat)
        terms.append(profile.price_proposal(i, j) * (a_i - a_s1) ** 2)
        terms.append(-pi_s1 * (a_s1 - a_s2) ** 2)
    return math.fsum(terms)


def compute_outcome(profile, topology, table):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.topology.NetworkTopology,
    #        lgmech.models.topology.CyclicIndexTable) ->
    #        lgmech.models.message.Allocation
    """Outcome function: allocated actions, taxes and personalized prices
    :param MessageProfile profile: message profile
    :param NetworkTopology topology: topology
    :param CyclicIndexTable table: cyclic indices
    :rtype: Allocation
    :return: allocation
    """
    actions = compute_actions(profile, topology)
    taxes = np.array([
        compute_tax(profile, topology, table, i, actions)
        for i in range(topology.n)])
    prices = {
        (i, j): personalized_price(profile, topology, table, i, j)
        for i in range(topology.n) for j in topology.r_sets[i]
    }
    return lgmech.models.message.Allocation(actions, taxes, prices)


def payoff(profile, scenario, i):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.scenario.Scenario, int) -> float
    """Aggregate utility of user i at the outcome of a profile
    :param MessageProfile profile: message profile
    :param Scenario scenario: scenario
    :param int i: user
    :rtype: float or NEG_INF
    :return: payoff
    """
    topology = scenario.topology
    r_set = topology.r_sets[i]
    actions = compute_actions(profile, topology, r_set)
    tax = compute_tax(profile, topology, scenario.index_table, i, actions)
    return lgmech.models.utility.aggregate_utility(
        scenario.utilities[i], scenario.boxes[i], actions[list(r_set)], tax)


def payoffs(profile, scenario, allocation=None):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.scenario.Scenario,
    #        lgmech.models.message.Allocation) -> list
    """Payoffs of every user
    :param MessageProfile profile: message profile
    :param Scenario scenario: scenario
    :param Allocation allocation: precomputed outcome
    :rtype: list
    :return: payoff per user (float or NEG_INF)
    """
    if allocation is None:
        allocation = compute_outcome(
            profile, scenario.topology, scenario.index_table)
    return [
        lgmech.models.utility.aggregate_utility(
            scenario.utilities[i], scenario.boxes[i],
            scenario.local(i, allocation.actions), allocation.taxes[i])
        for i in range(scenario.n)
    ]


def payoff_gain(new, old):
    # type: (float, float) -> float
    """new - old over extended reals, as a float
    :param float new: new payoff (float or NEG_INF)
    :param float old: old payoff (float or NEG_INF)
    :rtype: float
    :return: gain (may be +/-inf)
    """
    if new is lgmech.models.utility.NEG_INF:
        return 0.0 if old is lgmech.models.utility.NEG_INF else -math.inf
    if old is lgmech.models.utility.NEG_INF:
        return math.inf
    return new - old


class LocalPayoff(object):
    """User i's payoff as a function of its own message, with every other
    message held fixed"""
    def __init__(self, scenario, profile, i):
        # type: (LocalPayoff, lgmech.models.scenario.Scenario,
        #        lgmech.models.message.MessageProfile, int) -> None
        """Ctor for LocalPayoff
        :param LocalPayoff self: this
        :param Scenario scenario: scenario
        :param MessageProfile profile: profile whose other messages are fixed
        :param int i: user
        """
        topology = scenario.topology
        table = scenario.index_table
        self._user = i
        self._spec = scenario.utilities[i]
        self._box = scenario.boxes[i]
        r_set = topology.r_sets[i]
        k = len(r_set)
        self._sums = np.empty(k)
        self._sizes = np.empty(k)
        self._prices = np.empty(k)
        self._succ_actions = np.empty(k)
        penalty = []
        for p, j in enumerate(r_set):
            c_set = topology.c_sets[j]
            self._sums[p] = math.fsum(
                profile.action_proposal(m, j) for m in c_set if m != i)
            self._sizes[p] = len(c_set)
            s1 = table.successor(j, i, 1)
            s2 = table.successor(j, i, 2)
            pi_s1 = profile.price_proposal(s1, j)
            self._prices[p] = pi_s1 - profile.price_proposal(s2, j)
            self._succ_actions[p] = profile.action_proposal(s1, j)
            penalty.append(pi_s1 * (
                self._succ_actions[p] - profile.action_proposal(s2, j)) ** 2)
        self._penalty = math.fsum(penalty)
        self._own = self._spec.own_position

    @property
    def user(self):
        return self._user

    @property
    def personalized_prices(self):
        # type: (LocalPayoff) -> np.ndarray
        """l_ij over R_i; independent of i's own message"""
        return self._prices

    @property
    def successor_actions(self):
        # type: (LocalPayoff) -> np.ndarray
        """Action proposals of i's first successor for each good"""
        return self._succ_actions

    def allocated(self, x):
        # type: (LocalPayoff, np.ndarray) -> np.ndarray
        """Allocated actions over R_i given i's action proposals"""
        return (self._sums + x) / self._sizes

    def proposal_bounds(self):
        # type: (LocalPayoff) -> Tuple[np.ndarray, np.ndarray]
        """Box on i's action proposals that keeps the allocation inside
        A_i and, for PowerFamily, inside the nonnegative orthant
        :param LocalPayoff self: this
        :rtype: tuple
        :return: (lower, upper)
        """
        lower = np.full(self._sums.shape, -np.inf)
        upper = np.full(self._sums.shape, np.inf)
        if self._spec.requires_nonnegative:
            lower = -self._sums.copy()
        o = self._own
        lo = self._box.lo
        if self._spec.requires_nonnegative:
            lo = max(lo, 0.0)
        lower[o] = lo * self._sizes[o] - self._sums[o]
        upper[o] = self._box.hi * self._sizes[o] - self._sums[o]
        return lower, upper

    def values(self, x, p):
        # type: (LocalPayoff, np.ndarray, np.ndarray) -> np.ndarray
        """Payoffs for a stack of messages; -inf marks infeasible rows
        :param LocalPayoff self: this
        :param np.ndarray x: action proposals, shape (s, |R_i|)
        :param np.ndarray p: price proposals, shape (s, |R_i|)
        :rtype: np.ndarray
        :return: payoffs
        """
        x = np.atleast_2d(x)
        p = np.atleast_2d(p)
        a = self.allocated(x)
        tol = lgmech.models.utility.BOX_TOLERANCE
        own = a[:, self._own]
        ok = (own >= self._box.lo - tol) & (own <= self._box.hi + tol)
        if self._spec.requires_nonnegative:
            ok &= np.all(a >= -tol, axis=1)
            a = np.maximum(a, 0.0)
        tax = a @ self._prices + np.sum(
            p * (x - self._succ_actions) ** 2, axis=1) - self._penalty
        with np.errstate(invalid='ignore'):
            vals = self._spec.value(a) - tax
        return np.where(ok, vals, -np.inf)

    def value(self, x, p):
        # type: (LocalPayoff, np.ndarray, np.ndarray) -> float
        """Payoff of a single message, NEG_INF when infeasible"""
        val = float(self.values(x, p)[0])
        if val == -math.inf:
            return lgmech.models.utility.NEG_INF
        return val

    def action_gradient(self, x):
        # type: (LocalPayoff, np.ndarray) -> np.ndarray
        """Gradient in i's action proposals with i's own prices at zero;
        PowerFamily arguments are lifted to 1e-12 first
        :param LocalPayoff self: this
        :param np.ndarray x: action proposals
        :rtype: np.ndarray
        :return: gradient
        """
        a = self.allocated(np.asarray(x, dtype=float))
        if self._spec.requires_nonnegative:
            a = np.maximum(a, 1e-12)
        return (self._spec.gradient(a) - self._prices) / self._sizes
