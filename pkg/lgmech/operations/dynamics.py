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
import enum
import logging
import math
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors
import lgmech.models.message
import lgmech.models.options
import lgmech.models.utility
import lgmech.operations.centralized
import lgmech.operations.mechanism
import lgmech.operations.ne
import lgmech.util

# create logger
logger = logging.getLogger(__name__)
# global defines
_MIN_STEP = 1e-20


class Schedule(enum.Enum):
    RoundRobin = 'round-robin'
    Random = 'random'
    Simultaneous = 'simultaneous'


class Trajectory(object):
    """Recorded best-response process"""
    def __init__(
            self, iterates, payoffs, records, converged, profile_delta,
            sweeps, converged_at=None, verification=None,
            inner_failures=0):
        # type: (Trajectory, list, list, list, bool, float, int, int,
        #        lgmech.operations.ne.NEReport, int) -> None
        """Ctor for Trajectory
        :param Trajectory self: this
        :param list iterates: (sweep, MessageProfile) snapshots
        :param list payoffs: payoff vector per sweep
        :param list records: (iteration, user, payoff, delta) per update
        :param bool converged: final profile passed verification
        :param float profile_delta: last sweep's max message change
        :param int sweeps: sweeps performed
        :param int converged_at: sweep at which convergence was declared
        :param NEReport verification: final verification report
        :param int inner_failures: non-converged inner best responses
        """
        self._iterates = iterates
        self._payoffs = payoffs
        self._records = records
        self._converged = converged
        self._delta = profile_delta
        self._sweeps = sweeps
        self._converged_at = converged_at
        self._verification = verification
        self._inner_failures = inner_failures

    @property
    def iterates(self):
        return self._iterates

    @property
    def payoffs(self):
        return self._payoffs

    @property
    def records(self):
        return self._records

    @property
    def converged(self):
        return self._converged

    @property
    def profile_delta(self):
        return self._delta

    @property
    def sweeps(self):
        return self._sweeps

    @property
    def converged_at(self):
        return self._converged_at

    @property
    def verification(self):
        return self._verification

    @property
    def inner_failures(self):
        return self._inner_failures

    @property
    def final_profile(self):
        # type: (Trajectory) -> lgmech.models.message.MessageProfile
        """Last recorded profile"""
        return self._iterates[-1][1]

    def to_dict(self):
        return {
            'converged': self._converged,
            'converged_at': self._converged_at,
            'sweeps': self._sweeps,
            'profile_delta': self._delta,
            'inner_failures': self._inner_failures,
            'payoffs': [[float(p) for p in row] for row in self._payoffs],
            'snapshots': [s for s, _ in self._iterates],
            'final_profile': self.final_profile.to_dict(),
            'verification': (
                None if self._verification is None
                else self._verification.to_dict()),
        }

    def __repr__(self):
        return 'Trajectory(sweeps={}, converged={}, delta={!r})'.format(
            self._sweeps, self._converged, self._delta)


def _keep_agreeing_prices(message, local, x, agree_tol):
    # type: (lgmech.models.message.Message,
    #        lgmech.operations.mechanism.LocalPayoff, np.ndarray,
    #        float) -> np.ndarray
    """Own price proposals survive only where i agrees with its first
    successor, since elsewhere any positive price is a pure penalty"""
    agree = np.abs(x - local.successor_actions) <= agree_tol
    return np.where(agree, message.prices, 0.0)


def best_response(scenario, profile, i, options=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile, int,
    #        lgmech.models.options.BestResponse) ->
    #        lgmech.models.message.Message
    """Approximate maximizer of user i's payoff over its own message with
    every other message fixed. Action proposals follow projected gradient
    ascent inside the bounds that keep the allocation feasible; price
    proposals are dropped to zero unless the proposal agrees with the
    first successor
    :param Scenario scenario: scenario
    :param MessageProfile profile: current profile
    :param int i: responding user
    :param lgmech.models.options.BestResponse options: options
    :rtype: Message
    :return: best response (the current message if it cannot be improved)
    """
    opts = options or lgmech.models.options.BestResponse()
    local = lgmech.operations.mechanism.LocalPayoff(scenario, profile, i)
    msg = profile[i]
    zero = np.zeros(len(msg))
    lower, upper = local.proposal_bounds()
    x = np.clip(msg.actions, lower, upper)
    f = float(local.values(x, zero)[0])
    g = local.action_gradient(x)
    norm = lgmech.operations.centralized.projected_gradient_norm(
        x, g, lower, upper)
    it = 0
    while norm > opts.tol and it < opts.max_iter:
        it += 1
        t = opts.step
        accepted = False
        while t >= _MIN_STEP:
            d = np.clip(x + t * g, lower, upper) - x
            dmax = float(np.max(np.abs(d), initial=0.0))
            if dmax > opts.trust_radius:
                d *= opts.trust_radius / dmax
            x_new = x + d
            f_new = float(local.values(x_new, zero)[0])
            if f_new > -math.inf:
                g_new = local.action_gradient(x_new)
                if (f_new >= f + opts.armijo * float(g @ d) or
                        float(g_new @ d) >= 0):
                    accepted = True
                    break
            t *= opts.shrink
        if not accepted:
            logger.debug('best response of user {} stalled at iteration '
                         '{}'.format(i, it))
            break
        x, f, g = x_new, f_new, g_new
        norm = lgmech.operations.centralized.projected_gradient_norm(
            x, g, lower, upper)
    prices = _keep_agreeing_prices(msg, local, x, opts.agree_tol)
    if np.array_equal(x, msg.actions) and np.array_equal(prices, msg.prices):
        result = msg
    else:
        result = lgmech.models.message.Message(x, prices)
        gain = lgmech.operations.mechanism.payoff_gain(
            local.value(result.actions, result.prices),
            local.value(msg.actions, msg.prices))
        if gain < 0:
            result = msg
    if norm > opts.tol and it >= opts.max_iter:
        raise lgmech.errors.InnerNotConvergedError(i, result, it)
    return result


def _payoff_vector(profile, scenario):
    # type: (lgmech.models.message.MessageProfile,
    #        lgmech.models.scenario.Scenario) -> list
    return [
        float(p) for p in lgmech.operations.mechanism.payoffs(
            profile, scenario)
    ]


def run_dynamics(scenario, init, options=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile,
    #        lgmech.models.options.Dynamics) -> Trajectory
    """Damped best-response iteration. A sweep updates every user once;
    the run stops when a sweep moves no message by more than tol (then
    the profile is verified) or after max_iter sweeps
    :param Scenario scenario: scenario
    :param MessageProfile init: starting profile
    :param lgmech.models.options.Dynamics options: options
    :rtype: Trajectory
    :return: trajectory
    """
    opts = options or lgmech.models.options.Dynamics()
    schedule = Schedule(opts.schedule)
    theta = float(opts.damping)
    if not 0 < theta <= 1:
        raise ValueError('damping {} not in (0, 1]'.format(theta))
    if opts.stride < 1:
        raise ValueError('stride {} must be at least 1'.format(opts.stride))
    rng = np.random.default_rng(opts.seed)
    start = lgmech.util.datetime_now()
    profile = init
    iterates = [(0, init)]
    payoffs = [_payoff_vector(init, scenario)]
    records = []
    converged = False
    converged_at = None
    report = None
    failures = 0
    delta = math.inf
    sweep = 0
    step = 0

    def respond(snapshot, i):
        nonlocal failures
        try:
            return best_response(scenario, snapshot, i, opts.best_response)
        except lgmech.errors.InnerNotConvergedError as exc:
            logger.warning(str(exc))
            failures += 1
            return exc.message

    while sweep < opts.max_iter:
        if schedule == Schedule.Random:
            order = [int(u) for u in rng.permutation(scenario.n)]
        else:
            order = list(range(scenario.n))
        if schedule == Schedule.Simultaneous:
            snapshot = profile
            candidates = {i: respond(snapshot, i) for i in order}
        delta = 0.0
        for i in order:
            old = profile[i]
            if schedule == Schedule.Simultaneous:
                br = candidates[i]
            else:
                br = respond(profile, i)
            new = old if br == old else old.blend(br, theta)
            change = new.distance(old)
            delta = max(delta, change)
            profile = profile.replace(i, new)
            step += 1
            records.append((step, i, float(
                lgmech.operations.mechanism.payoff(profile, scenario, i)),
                change))
        sweep += 1
        payoffs.append(_payoff_vector(profile, scenario))
        if sweep % opts.stride == 0:
            iterates.append((sweep, profile))
        logger.debug('sweep {}: delta={!r}'.format(sweep, delta))
        if delta <= opts.tol:
            report = lgmech.operations.ne.verify_ne(
                scenario, profile, opts.verification)
            converged = report.is_equilibrium
            if converged:
                converged_at = sweep - 1
            break
    if iterates[-1][1] is not profile:
        iterates.append((sweep, profile))
    logger.info(
        'dynamics on {} ({}) finished in {:.3f}s: sweeps={} delta={!r} '
        'converged={}'.format(
            scenario.name, schedule.value,
            lgmech.util.elapsed_seconds(start), sweep, delta, converged))
    return Trajectory(
        iterates, payoffs, records, converged, delta, sweep, converged_at,
        report, failures)
