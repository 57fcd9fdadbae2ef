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
import collections
import logging
import math
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors
import lgmech.models.options
import lgmech.models.utility
import lgmech.operations.centralized
import lgmech.operations.mechanism
import lgmech.operations.ne
import lgmech.util

# create logger
logger = logging.getLogger(__name__)
# global defines
BUDGET_TOLERANCE = 1e-9
IR_TOLERANCE = 1e-9
GAP_TOLERANCE = 1e-6
PRICE_TOLERANCE = 1e-9

# named tuples
Certification = collections.namedtuple(
    'Certification', [
        'solution',
        'prices',
        'profile',
        'audit',
    ]
)


class AuditReport(object):
    """Allocation property checks of one profile on one scenario"""
    def __init__(
            self, allocation, feasible, ir_margins, optimality_gap,
            kkt_max_residual, price_column_residual, ne_report,
            centralized_objective, mechanism_objective,
            centralized_converged=True):
        self.allocation = allocation
        self.feasible = feasible
        self.ir_margins = np.asarray(ir_margins, dtype=float)
        self.optimality_gap = optimality_gap
        self.kkt_max_residual = kkt_max_residual
        self.price_column_residual = price_column_residual
        self.ne_report = ne_report
        self.centralized_objective = centralized_objective
        self.mechanism_objective = mechanism_objective
        self.centralized_converged = centralized_converged

    @property
    def budget_residual(self):
        return self.allocation.budget_residual

    @property
    def budget_balanced(self):
        return (self.budget_residual <=
                BUDGET_TOLERANCE * self.allocation.budget_scale)

    @property
    def individually_rational(self):
        return bool(np.all(self.ir_margins >= -IR_TOLERANCE))

    @property
    def optimal(self):
        return self.feasible and self.optimality_gap <= GAP_TOLERANCE

    @property
    def passed(self):
        # type: (AuditReport) -> bool
        """Every recorded property holds"""
        return (self.budget_balanced and self.individually_rational and
                self.optimal and
                self.price_column_residual <= PRICE_TOLERANCE and
                self.ne_report.is_equilibrium)

    def to_dict(self):
        return {
            'passed': self.passed,
            'budget_residual': self.budget_residual,
            'budget_balanced': self.budget_balanced,
            'feasible': self.feasible,
            'ir_margins': self.ir_margins.tolist(),
            'individually_rational': self.individually_rational,
            'optimality_gap': self.optimality_gap,
            'centralized_objective': float(self.centralized_objective),
            'mechanism_objective': float(self.mechanism_objective),
            'centralized_converged': self.centralized_converged,
            'kkt_max_residual': self.kkt_max_residual,
            'price_column_residual': self.price_column_residual,
            'outcome': self.allocation.to_dict(),
            'nash_verification': self.ne_report.to_dict(),
        }

    def __repr__(self):
        return ('AuditReport(passed={}, budget_residual={!r}, '
                'optimality_gap={!r})').format(
                    self.passed, self.budget_residual, self.optimality_gap)


def ir_margins(scenario, profile, allocation=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile,
    #        lgmech.models.message.Allocation) -> np.ndarray
    """u_i^A at the outcome minus u_i^A at zero actions and zero tax"""
    if allocation is None:
        allocation = lgmech.operations.mechanism.compute_outcome(
            profile, scenario.topology, scenario.index_table)
    values = lgmech.operations.mechanism.payoffs(
        profile, scenario, allocation)
    margins = np.empty(scenario.n)
    for i, spec in enumerate(scenario.utilities):
        baseline = lgmech.models.utility.aggregate_utility(
            spec, scenario.boxes[i], np.zeros(len(spec.neighbors)), 0.0)
        margins[i] = lgmech.operations.mechanism.payoff_gain(
            values[i], baseline)
    return margins


def full_audit(scenario, profile, verification=None, solution=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.message.MessageProfile,
    #        lgmech.models.options.Verification,
    #        lgmech.operations.centralized.CentralizedSolution) ->
    #        AuditReport
    """Run budget, individual rationality, optimality gap, KKT and Nash
    checks on a profile. Property failures are recorded, not raised
    :param Scenario scenario: scenario
    :param MessageProfile profile: profile
    :param lgmech.models.options.Verification verification: NE search
    :param CentralizedSolution solution: reuse an existing solve
    :rtype: AuditReport
    :return: report
    """
    if profile.topology != scenario.topology:
        raise lgmech.errors.DimensionMismatchError(
            scenario.n, profile.topology.n, what='profile topology')
    start = lgmech.util.datetime_now()
    topology = scenario.topology
    allocation = lgmech.operations.mechanism.compute_outcome(
        profile, topology, scenario.index_table)
    actions = allocation.actions
    feasible = all(
        box.contains(actions[i]) for i, box in enumerate(scenario.boxes))
    margins = ir_margins(scenario, profile, allocation)
    central_converged = True
    if solution is None:
        try:
            solution = lgmech.operations.centralized.solve_centralized(
                scenario)
        except lgmech.errors.NotConvergedError as exc:
            logger.warning(str(exc))
            solution = exc.solution
            central_converged = False
    mech_objective = lgmech.operations.centralized.social_welfare(
        scenario, actions)
    if mech_objective is lgmech.models.utility.NEG_INF:
        gap = math.inf
    else:
        gap = float(solution.objective) - mech_objective
    kkt = lgmech.operations.centralized.kkt_residual(
        scenario, actions).max_residual
    column = max(
        (abs(allocation.price_column_sum(j, topology.c_sets[j]))
         for j in range(topology.n)), default=0.0)
    ne_report = lgmech.operations.ne.verify_ne(
        scenario, profile, verification)
    report = AuditReport(
        allocation, feasible, margins, gap, kkt, column, ne_report,
        solution.objective, mech_objective, central_converged)
    logger.info(
        'audit of {} finished in {:.3f}s: passed={} budget={!r} gap={!r} '
        'equilibrium={}'.format(
            scenario.name, lgmech.util.elapsed_seconds(start), report.passed,
            report.budget_residual, gap, ne_report.is_equilibrium))
    return report


def certify_scenario(scenario, verification=None, kkt_tol=None):
    # type: (lgmech.models.scenario.Scenario,
    #        lgmech.models.options.Verification, float) -> Certification
    """Solve, build the canonical equilibrium and audit it
    :param Scenario scenario: scenario
    :param lgmech.models.options.Verification verification: NE search
    :param float kkt_tol: KKT tolerance for the price construction
    :rtype: Certification
    :return: solution, prices, profile and audit
    """
    solution = lgmech.operations.centralized.solve_centralized(scenario)
    prices = lgmech.operations.ne.personalized_prices_from_optimum(
        scenario, solution.actions, kkt_tol)
    profile = lgmech.operations.ne.construct_ne(
        scenario, solution.actions, prices)
    report = full_audit(scenario, profile, verification, solution)
    return Certification(solution, prices, profile, report)
