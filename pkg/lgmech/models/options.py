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
import multiprocessing
import pathlib
# non-stdlib imports
# local imports
import lgmech.util

# create logger
logger = logging.getLogger(__name__)

# named tuples
Solver = collections.namedtuple(
    'Solver', [
        'step',
        'shrink',
        'armijo',
        'max_iter',
        'tol',
        'concavity_samples',
        'min_step',
        'max_step',
    ],
    defaults=(1.0, 0.5, 1e-4, 50000, 1e-8, 256, 1e-20, 1e6),
)
BestResponse = collections.namedtuple(
    'BestResponse', [
        'step',
        'shrink',
        'armijo',
        'max_iter',
        'tol',
        'trust_radius',
        'agree_tol',
    ],
    defaults=(1.0, 0.5, 1e-4, 5000, 1e-8, 10.0, 1e-9),
)
Verification = collections.namedtuple(
    'Verification', [
        'random_deviations',
        'seed',
        'gain_tol',
        'action_radius',
        'price_factor',
        'best_response',
    ],
    defaults=(4000, 0, None, 1.0, 2.0, BestResponse()),
)
Dynamics = collections.namedtuple(
    'Dynamics', [
        'schedule',
        'damping',
        'max_iter',
        'tol',
        'seed',
        'stride',
        'best_response',
        'verification',
    ],
    defaults=(
        'round-robin', 0.5, 500, 1e-9, 0, 1, BestResponse(),
        Verification(random_deviations=500),
    ),
)
Generation = collections.namedtuple(
    'Generation', [
        'n',
        'density',
        'family',
        'seed',
        'count',
        'index_policy',
    ],
    defaults=(10, 0.3, 'power', 0, 1, 'ascending'),
)

_SOLVER_CONFIG_KEYS = frozenset(Solver._fields)


def solver_from_config(conf, base=None):
    # type: (dict, Solver) -> Solver
    """Create solver options from a config block, keeping unspecified
    fields from base
    :param dict conf: config block
    :param Solver base: base options
    :rtype: Solver
    :return: solver options
    """
    if base is None:
        base = Solver()
    if lgmech.util.is_none_or_empty(conf):
        return base
    unknown = set(conf.keys()) - _SOLVER_CONFIG_KEYS
    if len(unknown) > 0:
        raise ValueError('unknown solver settings: {}'.format(
            ', '.join(sorted(unknown))))
    opts = base._replace(**{k: v for k, v in conf.items() if v is not None})
    if opts.step <= 0 or not 0 < opts.shrink < 1:
        raise ValueError('invalid solver step or shrink: {} {}'.format(
            opts.step, opts.shrink))
    if opts.tol <= 0 or opts.max_iter < 1:
        raise ValueError('invalid solver tol or max_iter: {} {}'.format(
            opts.tol, opts.max_iter))
    if not 0 < opts.min_step <= opts.step <= opts.max_step:
        raise ValueError(
            'solver steps must satisfy 0 < min_step <= step <= max_step: '
            '{} {} {}'.format(opts.min_step, opts.step, opts.max_step))
    return opts


class General(object):
    """General Options"""
    def __init__(
            self, log_file=None, log_level=None, verbose=False, quiet=False,
            strict=False, out_dir=None, processes=None):
        """Ctor for General Options
        :param General self: this
        :param str log_file: log file
        :param str log_level: log level name
        :param bool verbose: verbose output
        :param bool quiet: quiet
        :param bool strict: treat property failures as errors
        :param str out_dir: report output directory
        :param int processes: worker processes for batch runs
        """
        self.log_file = log_file
        self.log_level = log_level
        self.verbose = verbose
        self.quiet = quiet
        self.strict = strict
        if lgmech.util.is_not_empty(out_dir):
            self.out_dir = pathlib.Path(out_dir)
        else:
            self.out_dir = pathlib.Path('.')
        if processes is None or processes < 1:
            processes = max(1, multiprocessing.cpu_count() >> 1)
        self.processes = processes
