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
import csv
import json
import logging
import math
import pathlib
import platform
# non-stdlib imports
import networkx
import numpy as np
# local imports
import lgmech.util
import lgmech.version

# create logger
logger = logging.getLogger(__name__)
# global defines
REPORT_VERSION = 1
TRAJECTORY_HEADER = ('iteration', 'user', 'payoff', 'delta')


def _json_ready(obj):
    # type: (object) -> object
    """Convert numpy values and non-finite floats into JSON-safe values;
    non-finite floats become the strings inf, -inf and nan"""
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)) or (
            hasattr(obj, '__float__') and not isinstance(obj, (int, str))):
        val = float(obj)
        if math.isnan(val):
            return 'nan'
        if math.isinf(val):
            return 'inf' if val > 0 else '-inf'
        return val
    return obj


def format_float(val):
    # type: (float) -> str
    """17 significant digits, always with a decimal point or exponent"""
    text = '{:.17g}'.format(val)
    if math.isfinite(val) and '.' not in text and 'e' not in text:
        text += '.0'
    return text


def _encode(obj, depth):
    # type: (object, int) -> str
    """JSON text of a _json_ready value, indented by two spaces"""
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if len(obj) == 0:
            return '{}'
        pad = '  ' * (depth + 1)
        items = [
            '{}{}: {}'.format(pad, json.dumps(k), _encode(obj[k], depth + 1))
            for k in sorted(obj)
        ]
        return '{{\n{}\n{}}}'.format(',\n'.join(items), '  ' * depth)
    if isinstance(obj, list):
        if len(obj) == 0:
            return '[]'
        pad = '  ' * (depth + 1)
        items = [pad + _encode(v, depth + 1) for v in obj]
        return '[\n{}\n{}]'.format(',\n'.join(items), '  ' * depth)
    return json.dumps(obj)


def dumps(obj):
    # type: (object) -> str
    """Serialize for reports with sorted keys; floats are written with
    17 significant digits"""
    return _encode(_json_ready(obj), 0)


def build_report(command, scenario, **sections):
    # type: (str, lgmech.models.scenario.Scenario, dict) -> dict
    """Report envelope shared by every command
    :param str command: command name
    :param Scenario scenario: scenario or None
    :param dict sections: command specific sections
    :rtype: dict
    :return: report
    """
    report = {
        'version': REPORT_VERSION,
        'command': command,
        'scenario': None if scenario is None else scenario.name,
        'generated': lgmech.util.datetime_now().isoformat(),
        'lgmech_version': lgmech.version.__version__,
    }
    report.update(sections)
    return _json_ready(report)


def write_json(obj, path):
    # type: (object, pathlib.Path) -> pathlib.Path
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + '\n', encoding='utf-8')
    logger.debug('wrote {}'.format(path))
    return path


def write_report(report, out_dir):
    # type: (dict, pathlib.Path) -> pathlib.Path
    """Write <out_dir>/<command>.json
    :param dict report: report from build_report
    :param pathlib.Path out_dir: output directory
    :rtype: pathlib.Path
    :return: written path
    """
    return write_json(
        report, pathlib.Path(out_dir) / '{}.json'.format(report['command']))


def write_trajectory_csv(trajectory, path):
    # type: (lgmech.operations.dynamics.Trajectory,
    #        pathlib.Path) -> pathlib.Path
    """One row per user update: iteration, user, payoff, message delta
    :param Trajectory trajectory: trajectory
    :param pathlib.Path path: csv path
    :rtype: pathlib.Path
    :return: written path
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as fd:
        writer = csv.writer(fd)
        writer.writerow(TRAJECTORY_HEADER)
        for iteration, user, payoff, delta in trajectory.records:
            writer.writerow(
                (iteration, user, format_float(float(payoff)),
                 format_float(float(delta))))
    return path


def error_json(exc):
    # type: (Exception) -> str
    """Machine-readable error record for stderr"""
    if hasattr(exc, 'to_dict'):
        record = exc.to_dict()
    else:
        record = {'error': type(exc).__name__, 'message': str(exc)}
    return json.dumps(_json_ready(record), sort_keys=True)


def output_parameters(general_options, command, scenario=None, **extra):
    # type: (lgmech.models.options.General, str,
    #        lgmech.models.scenario.Scenario, dict) -> None
    """Log a banner of run parameters
    :param lgmech.models.options.General general_options: general options
    :param str command: command
    :param Scenario scenario: scenario
    :param dict extra: additional parameters to list
    """
    if general_options.quiet:
        return
    sep = '============================================'
    log = []
    log.append(sep)
    log.append('           lgmech parameters')
    log.append(sep)
    log.append('           lgmech version: {}'.format(
        lgmech.version.__version__))
    log.append('                 platform: {}'.format(platform.platform()))
    log.append('               components: {}={} numpy={} networkx={}'.format(
        platform.python_implementation(), platform.python_version(),
        np.__version__, networkx.__version__))
    log.append('                  command: {}'.format(command))
    if scenario is not None:
        log.append('                 scenario: {} (n={})'.format(
            scenario.name, scenario.n))
        log.append('             index policy: {}'.format(
            scenario.index_policy.value))
    log.append('                 log file: {}'.format(
        general_options.log_file))
    log.append('         output directory: {}'.format(
        general_options.out_dir))
    log.append('                   strict: {}'.format(
        general_options.strict))
    for key in sorted(extra):
        log.append('{:>25}: {}'.format(key.replace('_', ' '), extra[key]))
    log.append(sep)
    log = '\n'.join(log)
    if lgmech.util.is_not_empty(general_options.log_file):
        print(log)
    logger.info('\n{}'.format(log))
