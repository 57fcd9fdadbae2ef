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
import queue
# non-stdlib imports
# local imports
import lgmech.errors
import lgmech.models.offload
import lgmech.models.options
import lgmech.models.scenario
import lgmech.operations.audit
import lgmech.util

# create logger
logger = logging.getLogger(__name__)

_RECORDED_ERRORS = (
    lgmech.errors.ValidationError,
    lgmech.errors.NotInCycleError,
    lgmech.errors.ParseError,
    lgmech.errors.NotDifferentiableAtError,
    lgmech.errors.KKTNotSatisfiedError,
    lgmech.errors.NotConvergedError,
    lgmech.errors.InnerNotConvergedError,
)


def certify_summary(scenario_data, verification_fields):
    # type: (dict, dict) -> dict
    """Certify one scenario given as a dict; failures become records
    :param dict scenario_data: scenario dict
    :param dict verification_fields: Verification fields as a dict
    :rtype: dict
    :return: summary
    """
    name = scenario_data.get('name')
    try:
        scenario = lgmech.models.scenario.Scenario.from_dict(scenario_data)
        verification = lgmech.models.options.Verification(
            **verification_fields)
        cert = lgmech.operations.audit.certify_scenario(
            scenario, verification)
    except _RECORDED_ERRORS as exc:
        ret = exc.to_dict()
    except Exception as exc:
        # workers always report back; collect counts results
        logger.exception('certification of {} failed'.format(name))
        ret = {'error': type(exc).__name__, 'message': str(exc)}
    else:
        ret = None
    if ret is not None:
        ret['scenario'] = name
        ret['passed'] = False
        return ret
    audit = cert.audit
    return {
        'scenario': name,
        'n': scenario.n,
        'family': scenario.families,
        'passed': audit.passed,
        'budget_residual': audit.budget_residual,
        'min_ir_margin': float(audit.ir_margins.min()),
        'optimality_gap': audit.optimality_gap,
        'kkt_max_residual': audit.kkt_max_residual,
        'worst_gain': audit.ne_report.worst_gain,
        'is_equilibrium': audit.ne_report.is_equilibrium,
    }


def _portable(scenario):
    # type: (lgmech.models.scenario.Scenario) -> dict
    """Scenario dict with the adjacency inlined"""
    data = scenario.to_dict()
    data['topology'] = {'adjacency': scenario.topology.to_adjacency()}
    return data


class ScenarioAuditOffload(lgmech.models.offload._MultiprocessOffload):
    """Certify scenarios on worker processes"""
    def __init__(self, num_workers):
        # type: (ScenarioAuditOffload, int) -> None
        super().__init__(
            ScenarioAuditOffload._worker_process, num_workers,
            'scenario audit')

    @staticmethod
    def _worker_process(term_signal, task_queue, done_cv, done_queue):
        # type: (multiprocessing.Value, multiprocessing.Queue,
        #        multiprocessing.Condition, multiprocessing.Queue) -> None
        """Certify queued scenarios
        :param multiprocessing.Value term_signal: termination signal
        :param multiprocessing.Queue task_queue: task queue
        :param multiprocessing.Condition done_cv: done condition variable
        :param multiprocessing.Queue done_queue: done queue
        """
        while term_signal.value != 1:
            try:
                index, scenario_data, fields = task_queue.get(True, 0.1)
            except queue.Empty:
                continue
            summary = certify_summary(scenario_data, fields)
            done_cv.acquire()
            done_queue.put((index, summary))
            done_cv.notify()
            done_cv.release()

    def add_scenario(self, index, scenario, verification):
        # type: (ScenarioAuditOffload, int,
        #        lgmech.models.scenario.Scenario,
        #        lgmech.models.options.Verification) -> None
        """Queue a scenario for certification
        :param ScenarioAuditOffload self: this
        :param int index: result slot
        :param Scenario scenario: scenario
        :param lgmech.models.options.Verification verification: options
        """
        self._put_task(
            (index, _portable(scenario), dict(verification._asdict())))


def run_batch(scenarios, verification=None, processes=1):
    # type: (list, lgmech.models.options.Verification, int) -> list
    """Certify independent scenarios, in-process or on a worker pool
    :param list scenarios: scenarios
    :param lgmech.models.options.Verification verification: NE search
    :param int processes: worker processes
    :rtype: list
    :return: summaries in input order
    """
    verification = verification or lgmech.models.options.Verification()
    start = lgmech.util.datetime_now()
    if processes <= 1 or len(scenarios) <= 1:
        fields = dict(verification._asdict())
        results = [certify_summary(_portable(s), fields) for s in scenarios]
    else:
        offload = ScenarioAuditOffload(min(processes, len(scenarios)))
        try:
            for index, scenario in enumerate(scenarios):
                offload.add_scenario(index, scenario, verification)
            done = offload.collect(len(scenarios))
        finally:
            offload.finalize_processes()
        results = [summary for _, summary in sorted(
            done, key=lambda x: x[0])]
    passed = sum(1 for r in results if r['passed'])
    logger.info('batch of {} scenarios finished in {:.3f}s: {} passed'.format(
        len(results), lgmech.util.elapsed_seconds(start), passed))
    return results
