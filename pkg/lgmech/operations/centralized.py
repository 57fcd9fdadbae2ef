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
import lgmech.models.utility
import lgmech.util

# create logger
logger = logging.getLogger(__name__)
# global defines
EVALUATION_FLOOR = 1e-12
GRADIENT_CAP = 1e12
_BOUND_TOLERANCE = 1e-12


class KKTReport(object):
    """Per-user KKT multipliers and residuals of the welfare problem"""
    def __init__(self, multipliers, stationarity, complementarity, active):
        # type: (KKTReport, np.ndarray, np.ndarray, np.ndarray,
        #        list) -> None
        """Ctor for KKTReport
        :param KKTReport self: this
        :param np.ndarray multipliers: lambda_i >= 0
        :param np.ndarray stationarity: stationarity residuals
        :param np.ndarray complementarity: complementarity residuals
        :param list active: 'lower', 'upper' or None per user
        """
        self._multipliers = np.asarray(multipliers, dtype=float)
        self._stationarity = np.asarray(stationarity, dtype=float)
        self._complementarity = np.asarray(complementarity, dtype=float)
        self._active = list(active)

    @property
    def multipliers(self):
        return self._multipliers

    @property
    def stationarity_residuals(self):
        return self._stationarity

    @property
    def complementarity_residuals(self):
        return self._complementarity

    @property
    def active_bounds(self):
        return self._active

    @property
    def max_residual(self):
        # type: (KKTReport) -> float
        """Largest stationarity or complementarity residual"""
        return float(max(
            np.max(self._stationarity, initial=0.0),
            np.max(self._complementarity, initial=0.0)))

    def to_dict(self):
        return {
            'multipliers': self._multipliers.tolist(),
            'stationarity_residuals': self._stationarity.tolist(),
            'complementarity_residuals': self._complementarity.tolist(),
            'active_bounds': self._active,
            'max_residual': self.max_residual,
        }

    def __repr__(self):
        return 'KKTReport(max_residual={!r})'.format(self.max_residual)


class CentralizedSolution(object):
    """Best iterate of the welfare maximization"""
    def __init__(
            self, actions, objective, kkt, iterations, converged,
            gradient_norm, trace):
        self._actions = np.asarray(actions, dtype=float)
        self._actions.setflags(write=False)
        self._objective = objective
        self._kkt = kkt
        self._iterations = iterations
        self._converged = converged
        self._gradient_norm = gradient_norm
        self._trace = tuple(trace)

    @property
    def actions(self):
        return self._actions

    @property
    def objective(self):
        return self._objective

    @property
    def kkt(self):
        return self._kkt

    @property
    def iterations(self):
        return self._iterations

    @property
    def converged(self):
        return self._converged

    @property
    def gradient_norm(self):
        # type: (CentralizedSolution) -> float
        """Projected-gradient infinity norm at the returned iterate"""
        return self._gradient_norm

    @property
    def trace(self):
        # type: (CentralizedSolution) -> tuple
        """Objective value of every accepted iterate"""
        return self._trace

    def to_dict(self):
        return {
            'actions': self._actions.tolist(),
            'objective': self._objective,
            'iterations': self._iterations,
            'converged': self._converged,
            'gradient_norm': self._gradient_norm,
            'kkt': self._kkt.to_dict(),
        }

    def __repr__(self):
        return ('CentralizedSolution(objective={!r}, iterations={}, '
                'converged={})').format(
                    self._objective, self._iterations, self._converged)


def evaluation_point(scenario, a):
    # type: (lgmech.models.scenario.Scenario, np.ndarray) -> np.ndarray
    """Lift PowerFamily arguments to at least 1e-12 so gradients stay
    finite
    :param Scenario scenario: scenario
    :param np.ndarray a: actions
    :rtype: np.ndarray
    :return: evaluation point
    """
    a = np.asarray(a, dtype=float)
    return np.where(
        scenario.nonnegative, np.maximum(a, EVALUATION_FLOOR), a)


def social_welfare(scenario, a):
    # type: (lgmech.models.scenario.Scenario, np.ndarray) -> float
    """F(a) = sum_i u_i(a_{R_i}); NEG_INF if any utility is
    :param Scenario scenario: scenario
    :param np.ndarray a: actions
    :rtype: float or NEG_INF
    :return: welfare
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (scenario.n,):
        raise lgmech.errors.DimensionMismatchError(
            scenario.n, a.shape[0] if a.ndim == 1 else a.shape,
            what='action profile')
    values = []
    for i, spec in enumerate(scenario.utilities):
        u = lgmech.models.utility.evaluate_utility(
            spec, scenario.boxes[i], scenario.local(i, a))
        if u is lgmech.models.utility.NEG_INF:
            return lgmech.models.utility.NEG_INF
        values.append(u)
    return math.fsum(values)


def welfare_gradient(scenario, a):
    # type: (lgmech.models.scenario.Scenario, np.ndarray) -> np.ndarray
    """s_j = d/da_j sum_{k in C_j} u_k, evaluated at the lifted point
    :param Scenario scenario: scenario
    :param np.ndarray a: actions
    :rtype: np.ndarray
    :return: gradient
    """
    x = evaluation_point(scenario, a)
    grad = np.zeros(scenario.n)
    for i, spec in enumerate(scenario.utilities):
        r_set = list(scenario.topology.r_sets[i])
        grad[r_set] += spec.gradient(x[r_set])
    return grad


def _welfare(scenario, x):
    return social_welfare(scenario, evaluation_point(scenario, x))


def kkt_residual(scenario, a):
    # type: (lgmech.models.scenario.Scenario, np.ndarray) -> KKTReport
    """KKT multipliers and residuals of the box-constrained welfare
    problem at a
    :param Scenario scenario: scenario
    :param np.ndarray a: actions
    :rtype: KKTReport
    :return: KKT report
    """
    a = np.asarray(a, dtype=float)
    s = np.clip(welfare_gradient(scenario, a), -GRADIENT_CAP, GRADIENT_CAP)
    n = scenario.n
    lam = np.zeros(n)
    stat = np.zeros(n)
    comp = np.zeros(n)
    active = [None] * n
    tol = lgmech.models.utility.BOX_TOLERANCE
    for i, box in enumerate(scenario.boxes):
        lo = float(scenario.domain_lower[i])
        if not box.contains(a[i]) or a[i] < lo - tol:
            stat[i] = math.inf
            continue
        at_lo = a[i] <= lo + _BOUND_TOLERANCE * max(1.0, abs(lo))
        at_hi = a[i] >= box.hi - _BOUND_TOLERANCE * max(1.0, abs(box.hi))
        if at_hi:
            active[i] = 'upper'
            lam[i] = max(0.0, s[i])
            stat[i] = max(0.0, -s[i])
            comp[i] = abs(lam[i] * (box.hi - a[i]))
        elif at_lo:
            active[i] = 'lower'
            lam[i] = max(0.0, -s[i])
            stat[i] = max(0.0, s[i])
            comp[i] = abs(lam[i] * (a[i] - lo))
        else:
            stat[i] = abs(s[i])
    return KKTReport(lam, stat, comp, active)


def projected_gradient_norm(x, g, lower, upper):
    # type: (np.ndarray, np.ndarray, np.ndarray, np.ndarray) -> float
    """Infinity norm of clip(x + g) - x"""
    return float(np.max(np.abs(np.clip(x + g, lower, upper) - x),
                        initial=0.0))


def solve_centralized(scenario, options=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.options.Solver) -> CentralizedSolution
    """Maximize sum_i u_i over the product of action boxes by projected
    gradient ascent with Armijo backtracking
    :param Scenario scenario: scenario
    :param lgmech.models.options.Solver options: solver options
    :rtype: CentralizedSolution
    :return: solution
    """
    opts = options or scenario.solver
    for i, spec in enumerate(scenario.utilities):
        res = lgmech.models.utility.check_concavity(
            spec, scenario.boxes[i], opts.concavity_samples,
            scenario.seed + i)
        if not res.concave:
            raise lgmech.errors.NonConcaveUtilityError(
                i, res.worst_violation)
    start = lgmech.util.datetime_now()
    lower = scenario.domain_lower
    upper = scenario.upper
    x = 0.5 * (lower + upper)
    f = _welfare(scenario, x)
    g = welfare_gradient(scenario, x)
    trace = [f]
    norm = projected_gradient_norm(x, g, lower, upper)
    converged = norm <= opts.tol
    trial = opts.step
    it = 0
    while not converged and it < opts.max_iter:
        it += 1
        t = trial
        accepted = False
        while t >= opts.min_step:
            x_new = np.clip(x + t * g, lower, upper)
            d = x_new - x
            f_new = _welfare(scenario, x_new)
            if f_new is not lgmech.models.utility.NEG_INF:
                g_new = welfare_gradient(scenario, x_new)
                # concavity: a nonnegative end slope means no overshoot
                if (f_new >= f + opts.armijo * float(g @ d) or
                        float(g_new @ d) >= 0):
                    accepted = True
                    break
            t *= opts.shrink
        if not accepted:
            logger.debug('line search stalled at iteration {}'.format(it))
            break
        # next trial step: Barzilai-Borwein, else grow the accepted one
        curvature = float(d @ (g - g_new))
        if curvature > 0:
            trial = float(d @ d) / curvature
        else:
            trial = t / opts.shrink
        trial = min(max(trial, opts.min_step), opts.max_step)
        x, f, g = x_new, f_new, g_new
        trace.append(f)
        norm = projected_gradient_norm(x, g, lower, upper)
        converged = norm <= opts.tol
        if it % 1000 == 0:
            logger.debug(
                'iteration {}: objective={!r} gradient norm={!r}'.format(
                    it, f, norm))
    solution = CentralizedSolution(
        x, f, kkt_residual(scenario, x), it, converged, norm, trace)
    logger.info(
        'centralized solve of {} finished in {:.3f}s: iterations={} '
        'objective={!r} gradient norm={!r} converged={}'.format(
            scenario.name, lgmech.util.elapsed_seconds(start), it, f, norm,
            converged))
    if not converged:
        raise lgmech.errors.NotConvergedError(solution)
    return solution
