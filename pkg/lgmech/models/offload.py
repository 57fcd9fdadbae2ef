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
import multiprocessing
import queue

# create logger
logger = logging.getLogger(__name__)


class _MultiprocessOffload(object):
    """Pool of scenario workers. A worker loop takes
    (term_signal, task_queue, done_cv, done_queue), pulls tasks until
    term_signal is 1 and notifies done_cv after each result"""
    __slots__ = [
        '_task_queue', '_done_queue', '_done_cv', '_term_signal', '_procs',
        '_submitted',
    ]

    def __init__(self, target, num_workers, description=None):
        # type: (_MultiprocessOffload, function, int, str) -> None
        """Start num_workers processes running target
        :param _MultiprocessOffload self: this
        :param function target: worker loop
        :param int num_workers: worker count, at least 1
        :param str description: label for log lines
        """
        if num_workers is None or num_workers < 1:
            raise ValueError('invalid num_workers: {}'.format(num_workers))
        self._task_queue = multiprocessing.Queue()
        self._done_queue = multiprocessing.Queue()
        self._done_cv = multiprocessing.Condition()
        self._term_signal = multiprocessing.Value('i', 0)
        self._submitted = 0
        args = (
            self._term_signal, self._task_queue, self._done_cv,
            self._done_queue,
        )
        self._procs = [
            multiprocessing.Process(target=target, args=args)
            for _ in range(num_workers)
        ]
        for proc in self._procs:
            proc.start()
        logger.debug('started {} {} workers'.format(
            num_workers, description or 'scenario'))

    @property
    def terminated(self):
        return self._term_signal.value == 1

    @property
    def submitted(self):
        # type: (_MultiprocessOffload) -> int
        """Number of tasks queued so far"""
        return self._submitted

    def _put_task(self, task):
        # type: (_MultiprocessOffload, tuple) -> None
        self._task_queue.put(task)
        self._submitted += 1

    def finalize_processes(self):
        # type: (_MultiprocessOffload) -> None
        """Raise the termination signal and join every worker"""
        self._term_signal.value = 1
        for proc in self._procs:
            proc.join()

    def _next_result(self):
        try:
            return self._done_queue.get_nowait()
        except queue.Empty:
            return None

    def collect(self, count, poll=1.0):
        # type: (_MultiprocessOffload, int, float) -> list
        """Wait for count results; fails once every worker has exited
        with results still missing
        :param _MultiprocessOffload self: this
        :param int count: results expected
        :param float poll: seconds between liveness checks
        :rtype: list
        :return: results in arrival order
        """
        results = []
        while len(results) < count:
            item = self._next_result()
            if item is not None:
                results.append(item)
            elif not any(proc.is_alive() for proc in self._procs):
                raise RuntimeError(
                    '{} of {} scenario results missing after all workers '
                    'exited'.format(count - len(results), count))
            else:
                with self._done_cv:
                    self._done_cv.wait(poll)
        logger.debug('collected {} results'.format(count))
        return results
