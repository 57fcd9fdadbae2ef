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
import lgmech.models.options
import lgmech.models.topology
import lgmech.models.utility
import lgmech.operations.centralized
import lgmech.operations.dynamics
import lgmech.operations.mechanism
import lgmech.util

# create logger
logger = logging.getLogger(__name__)
# global defines
COLUMN_TOLERANCE = 1e-9
DEFAULT_KKT_TOLERANCE = 1e-6
_RELATIVE_GAIN_TOLERANCE = 1e-6


class PersonalizedPrices(object):
    """Sparse personalized prices l*_ij keyed by (i, j), j in R_i"""
    def __init__(self, values):
        # type: (PersonalizedPrices, dict) -> None
        self._values = {
            (int(i), int(j)): float(v) for (i, j), v in values.items()}

    @property
    def values(self):
        return self._values

    def __getitem__(self, key):
        return self._values[key]

    def __len__(self):
        return len(self._values)

    def column(self, j, cycle):
        # type: (PersonalizedPrices, int, tuple) -> np.ndarray
        """Prices of good j ordered like cycle"""
        return np.array([self._values[(i, j)] for i in cycle])

    def column_sum(self, j, c_set):
        # type: (PersonalizedPrices, int, tuple) -> float
        """Sum over k in C_j of l*_kj"""
        return math.fsum(self._values[(k, j)] for k in c_set)

    def to_dict(self):
        return [
            {'i': i, 'j': j, 'value': v}
            for (i, j), v in sorted(self._values.items())
        ]

    def __repr__(self):
        return 'PersonalizedPrices(entries={})'.format(len(self._values))


class NEConditions(object):
    """Residuals of the equilibrium characterization system for a
    profile against (a*, l*)"""
    def __init__(self, averaging, price_difference, complementarity,
                 min_price):
        self.averaging = averaging
        self.price_difference = price_difference
        self.complementarity = complementarity
        self.min_price = min_price

    def holds(self, tol=COLUMN_TOLERANCE):
        # type: (NEConditions, float) -> bool
        """Check all four conditions
        :param NEConditions self: this
        :param float tol: residual tolerance
        :rtype: bool
        :return: if conditions hold
        """
        return (self.averaging <= tol and
                self.price_difference <= tol and
                self.complementarity <= tol and
                self.min_price >= 0)

    def to_dict(self):
        return {
            'averaging': self.averaging,
            'price_difference': self.price_difference,
            'complementarity': self.complementarity,
            'min_price': self.min_price,
        }

    def __repr__(self):
        return 'NEConditions({})'.format(self.to_dict())


class NEReport(object):
    """Outcome of the unilateral deviation search"""
    def __init__(self, per_user_gains, gain_tolerances, deviations_tested,
                 payoffs, inner_converged):
        # type: (NEReport, np.ndarray, np.ndarray, int, list, list) -> None
        """Ctor for NEReport
        :param NEReport self: this
        :param np.ndarray per_user_gains: best gain found per user
        :param np.ndarray gain_tolerances: tolerance per user
        :param int deviations_tested: number of deviations evaluated
        :param list payoffs: payoff per user at the profile
        :param list inner_converged: best-response convergence per user
        """
        self._gains = np.asarray(per_user_gains, dtype=float)
        self._tols = np.asarray(gain_tolerances, dtype=float)
        self._tested = int(deviations_tested)
        self._payoffs = list(payoffs)
        self._inner = list(inner_converged)

    @property
    def per_user_gains(self):
        return self._gains

    @property
    def gain_tolerances(self):
        return self._tols

    @property
    def worst_gain(self):
        # type: (NEReport) -> float
        """Largest payoff improvement found"""
        return float(np.max(self._gains)) if self._gains.size > 0 else 0.0

    @property
    def is_equilibrium(self):
        # type: (NEReport) -> bool
        """No user found a deviation gaining more than its tolerance"""
        return bool(np.all(self._gains <= self._tols))

    @property
    def deviations_tested(self):
        return self._tested

    @property
    def payoffs(self):
        return self._payoffs

    @property
    def inner_converged(self):
        return self._inner

    def to_dict(self):
        return {
            'is_equilibrium': self.is_equilibrium,
            'worst_gain': self.worst_gain,
            'per_user_gains': self._gains.tolist(),
            'gain_tolerances': self._tols.tolist(),
            'deviations_tested': self._tested,
            'payoffs': [float(p) for p in self._payoffs],
            'inner_converged': self._inner,
        }

    def __repr__(self):
        return 'NEReport(is_equilibrium={}, worst_gain={!r})'.format(
            self.is_equilibrium, self.worst_gain)


def personalized_prices_from_optimum(scenario, a_star, tol=None):
    # type: (lgmech.models.scenario.Scenario, np.ndarray,
    #        float) -> PersonalizedPrices
    """Lindahl-type prices at an optimum: l*_ij = du_i/da_j for j != i,
    and l*_ii closes the column sum of good i to zero
    :param Scenario scenario: scenario
    :param np.ndarray a_star: optimal actions
    :param float tol: KKT tolerance
    :rtype: PersonalizedPrices
    :return: prices
    """
    if tol is None:
        tol = DEFAULT_KKT_TOLERANCE
    a_star = np.asarray(a_star, dtype=float)
    report = lgmech.operations.centralized.kkt_residual(scenario, a_star)
    if report.max_residual > tol:
        raise lgmech.errors.KKTNotSatisfiedError(report, tol)
    x = lgmech.operations.centralized.evaluation_point(scenario, a_star)
    topology = scenario.topology
    values = {}
    for i, spec in enumerate(scenario.utilities):
        grad = spec.gradient(x[list(topology.r_sets[i])])
        for p, j in enumerate(topology.r_sets[i]):
            if j != i:
                values[(i, j)] = float(grad[p])
    for j in range(topology.n):
        values[(j, j)] = -math.fsum(
            values[(k, j)] for k in topology.c_sets[j] if k != j)
    return PersonalizedPrices(values)


def solve_price_system(l_column, cycle=None):
    # type: (np.ndarray, tuple) -> np.ndarray
    """Nonnegative price proposals whose cyclic differences reproduce a
    column of personalized prices. Position 1 anchors the telescoping and
    the result is shifted by -min
    :param np.ndarray l_column: l_ij ordered by cycle position
    :param tuple cycle: users in cycle order (length check only)
    :rtype: np.ndarray
    :return: price proposal per cycle position
    """
    col = np.asarray(l_column, dtype=float).reshape(-1)
    k = col.shape[0]
    if cycle is not None and len(cycle) != k:
        raise lgmech.errors.DimensionMismatchError(
            len(cycle), k, what='price column')
    if k < lgmech.models.topology.MIN_CYCLE_SIZE:
        raise lgmech.errors.ValidationError(
            'price column has {} < 3 entries'.format(k),
            assumption='cycle size')
    residual = math.fsum(col)
    if abs(residual) > COLUMN_TOLERANCE * max(1.0, math.fsum(np.abs(col))):
        raise lgmech.errors.InconsistentColumnError(residual)
    pi = np.zeros(k)
    # l at position q equals pi[q + 1] - pi[q + 2] (cyclic, 1-based)
    pi[1] = pi[0] - col[k - 1]
    for q in range(k - 2):
        pi[q + 2] = pi[q + 1] - col[q]
    return pi - np.min(pi)


def construct_ne(scenario, a_star, prices):
    # type: (lgmech.models.scenario.Scenario, np.ndarray,
    #        PersonalizedPrices) -> lgmech.models.message.MessageProfile
    """Canonical equilibrium profile: everyone proposes a* and the price
    proposals of each good solve its price system
    :param Scenario scenario: scenario
    :param np.ndarray a_star: optimal actions
    :param PersonalizedPrices prices: prices from the optimum
    :rtype: MessageProfile
    :return: profile
    """
    a_star = np.asarray(a_star, dtype=float)
    topology = scenario.topology
    table = scenario.index_table
    proposals = {}
    for j, cycle in enumerate(table.cycles):
        pi = solve_price_system(prices.column(j, cycle), cycle)
        for pos, i in enumerate(cycle):
            proposals[(i, j)] = pi[pos]
    messages = []
    for i, r_set in enumerate(topology.r_sets):
        messages.append(lgmech.models.message.Message(
            a_star[list(r_set)], [proposals[(i, j)] for j in r_set]))
    return lgmech.models.message.MessageProfile(topology, messages)


def check_ne_conditions(scenario, profile, a_star, prices):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile, np.ndarray,
    #        PersonalizedPrices) -> NEConditions
    """Residuals of the characterization system: allocation equals a*,
    cyclic price differences equal l*, no proposer both disagrees with
    its successor and charges a price, prices nonnegative
    :param Scenario scenario: scenario
    :param MessageProfile profile: profile
    :param np.ndarray a_star: optimal actions
    :param PersonalizedPrices prices: target prices
    :rtype: NEConditions
    :return: residuals
    """
    topology = scenario.topology
    table = scenario.index_table
    a_star = np.asarray(a_star, dtype=float)
    actions = lgmech.operations.mechanism.compute_actions(profile, topology)
    averaging = float(np.max(np.abs(actions - a_star), initial=0.0))
    price_diff = 0.0
    comp = 0.0
    min_price = math.inf
    for i, r_set in enumerate(topology.r_sets):
        for j in r_set:
            l_ij = lgmech.operations.mechanism.personalized_price(
                profile, topology, table, i, j)
            price_diff = max(price_diff, abs(l_ij - prices[(i, j)]))
            s1 = table.successor(j, i, 1)
            pi = profile.price_proposal(i, j)
            comp = max(comp, abs(pi * (
                profile.action_proposal(i, j) -
                profile.action_proposal(s1, j)) ** 2))
            min_price = min(min_price, pi)
    return NEConditions(averaging, price_diff, comp, min_price)


def check_price_taking(scenario, a_star, prices, tol=DEFAULT_KKT_TOLERANCE):
    # type: (lgmech.models.scenario.Scenario, np.ndarray,
    #        PersonalizedPrices, float) -> np.ndarray
    """First-order residual, per user, of maximizing u_i(a) - sum_j
    l*_ij a_j over a_i in A_i with neighbor actions free; zero residuals
    mean every user would choose a* at the prices l*
    :param Scenario scenario: scenario
    :param np.ndarray a_star: optimal actions
    :param PersonalizedPrices prices: prices
    :param float tol: bound detection tolerance
    :rtype: np.ndarray
    :return: residual per user
    """
    a_star = np.asarray(a_star, dtype=float)
    x = lgmech.operations.centralized.evaluation_point(scenario, a_star)
    topology = scenario.topology
    residuals = np.zeros(topology.n)
    for i, spec in enumerate(scenario.utilities):
        r_set = topology.r_sets[i]
        slope = spec.gradient(x[list(r_set)]) - np.array(
            [prices[(i, j)] for j in r_set])
        own = spec.own_position
        box = scenario.boxes[i]
        others = np.delete(slope, own)
        worst = float(np.max(np.abs(others), initial=0.0))
        s = float(slope[own])
        if a_star[i] >= box.hi - tol:
            s = max(0.0, -s)
        elif a_star[i] <= scenario.domain_lower[i] + tol:
            s = max(0.0, s)
        else:
            s = abs(s)
        residuals[i] = max(worst, s)
    return residuals


def _sample_ball(rng, count, dim, radius):
    # type: (np.random.Generator, int, int, float) -> np.ndarray
    """Uniform samples from a Euclidean ball"""
    direction = rng.normal(size=(count, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    scale = radius * rng.uniform(size=(count, 1)) ** (1.0 / dim)
    return direction / norms * scale


def verify_ne(scenario, profile, options=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile,
    #        lgmech.models.options.Verification) -> NEReport
    """Search for profitable unilateral deviations: random messages around
    each user's message plus an inner best response
    :param Scenario scenario: scenario
    :param MessageProfile profile: profile to test
    :param lgmech.models.options.Verification options: search options
    :rtype: NEReport
    :return: report
    """
    opts = options or lgmech.models.options.Verification()
    start = lgmech.util.datetime_now()
    rng = np.random.default_rng(opts.seed)
    max_price = max(
        (float(np.max(m.prices, initial=0.0)) for m in profile.messages),
        default=0.0)
    price_hi = opts.price_factor * (max_price if max_price > 0 else 1.0)
    gains = np.zeros(scenario.n)
    tols = np.zeros(scenario.n)
    base_payoffs = []
    inner = []
    tested = 0
    for i in range(scenario.n):
        local = lgmech.operations.mechanism.LocalPayoff(scenario, profile, i)
        msg = profile[i]
        base = local.value(msg.actions, msg.prices)
        base_payoffs.append(base)
        k = len(msg)
        best = -math.inf
        count = opts.random_deviations
        if count > 0:
            x = msg.actions + _sample_ball(rng, count, k, opts.action_radius)
            p = rng.uniform(0.0, price_hi, size=(count, k))
            top = float(np.max(local.values(x, p)))
            best = lgmech.operations.mechanism.payoff_gain(
                top if top > -math.inf else lgmech.models.utility.NEG_INF,
                base)
            tested += count
        converged = True
        try:
            br = lgmech.operations.dynamics.best_response(
                scenario, profile, i, opts.best_response)
        except lgmech.errors.InnerNotConvergedError as exc:
            logger.debug(str(exc))
            br = exc.message
            converged = False
        inner.append(converged)
        tested += 1
        best = max(best, lgmech.operations.mechanism.payoff_gain(
            local.value(br.actions, br.prices), base))
        gains[i] = best
        if opts.gain_tol is not None:
            tols[i] = opts.gain_tol
        elif base is lgmech.models.utility.NEG_INF:
            tols[i] = _RELATIVE_GAIN_TOLERANCE
        else:
            tols[i] = _RELATIVE_GAIN_TOLERANCE * max(1.0, abs(base))
    report = NEReport(gains, tols, tested, base_payoffs, inner)
    logger.info(
        'verified profile on {} in {:.3f}s: deviations={} worst gain={!r} '
        'equilibrium={}'.format(
            scenario.name, lgmech.util.elapsed_seconds(start), tested,
            report.worst_gain, report.is_equilibrium))
    return report
