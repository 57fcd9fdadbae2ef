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
# non-stdlib imports
# local imports
import lgmech.models.options
import lgmech.util


# global defines
_SUPPORTED_YAML_CONFIG_VERSIONS = frozenset((1,))


# enums
class Action(enum.Enum):
    Solve = 'solve'
    ConstructNe = 'construct-ne'
    Verify = 'verify'
    Dynamics = 'dynamics'
    Audit = 'audit'
    Gen = 'gen'
    Batch = 'batch'


def add_cli_options(cli_options, action):
    # type: (dict, Action) -> None
    """Adds CLI options to the configuration object
    :param dict cli_options: CLI options dict
    :param Action action: action
    """
    cli_options['_action'] = action.value
    tol = cli_options.get('tol')
    seed = cli_options.get('seed')
    arg = {
        'scenario': cli_options.get('scenario'),
        'profile': cli_options.get('profile'),
        'solver': {
            'tol': tol if action in (Action.Solve, Action.ConstructNe)
            else None,
        },
        'verification': {
            'random_deviations': cli_options.get('deviations'),
            'seed': seed,
            'gain_tol': tol if action in (
                Action.Verify, Action.Audit, Action.Batch) else None,
        },
        'dynamics': {
            'schedule': cli_options.get('schedule'),
            'damping': cli_options.get('damping'),
            'max_iter': cli_options.get('max_iter'),
            'tol': tol if action == Action.Dynamics else None,
            'seed': seed,
        },
        'gen': {
            'n': cli_options.get('n'),
            'density': cli_options.get('density'),
            'family': cli_options.get('family'),
            'seed': seed,
            'count': cli_options.get('count'),
            'index_policy': cli_options.get('index_policy'),
        },
    }
    cli_options[action.value] = arg


def _merge_setting(cli_options, conf, name, name_cli=None, default=None):
    # type: (dict, dict, str, str, Any) -> Any
    """Merge a setting, preferring the CLI option if set
    :param dict cli_options: cli options
    :param dict conf: configuration sub-block
    :param str name: key name
    :param str name_cli: override key name for cli_options
    :param Any default: default value to set if missing
    :rtype: Any
    :return: merged setting value
    """
    val = cli_options.get(name_cli or name)
    if val is None:
        val = conf.get(name, default)
    return val


def _merge_block(config, cli_block, name, defaults):
    # type: (dict, dict, str, tuple) -> dict
    """Merge one option block: CLI value, then config value, then the
    namedtuple default"""
    conf = config.get(name) or {}
    unknown = set(conf.keys()) - set(defaults._fields)
    if len(unknown) > 0:
        raise ValueError('unknown {} settings: {}'.format(
            name, ', '.join(sorted(unknown))))
    return {
        field: _merge_setting(
            cli_block, conf, field, default=getattr(defaults, field))
        for field in defaults._fields
        if field not in ('best_response', 'verification')
    }


def merge_global_settings(config, cli_options):
    # type: (dict, dict) -> None
    """Merge "global" CLI options into main config
    :param dict config: config dict
    :param dict cli_options: cli options
    """
    # check for valid version from YAML
    if (not lgmech.util.is_none_or_empty(config) and
            ('version' not in config or
             config['version'] not in _SUPPORTED_YAML_CONFIG_VERSIONS)):
        raise ValueError('"version" not specified in YAML config or invalid')
    action = cli_options['_action']
    if action not in set(a.value for a in Action):
        raise ValueError('invalid action: {}'.format(action))
    arg = cli_options.get(action, {})
    if 'options' not in config or config['options'] is None:
        config['options'] = {}
    config['options'] = {
        'log_file': _merge_setting(cli_options, config['options'], 'log_file'),
        'log_level': _merge_setting(
            cli_options, config['options'], 'log_level'),
        'verbose': _merge_setting(
            cli_options, config['options'], 'verbose', default=False),
        'quiet': _merge_setting(
            cli_options, config['options'], 'quiet', default=False),
        'strict': _merge_setting(
            cli_options, config['options'], 'strict', default=False),
        'out_dir': _merge_setting(
            cli_options, config['options'], 'out_dir', name_cli='out',
            default='.'),
        'processes': _merge_setting(
            cli_options, config['options'], 'processes', default=0),
    }
    solver = config.get('solver') or {}
    cli_solver = {
        k: v for k, v in arg.get('solver', {}).items() if v is not None}
    config['solver'] = lgmech.util.merge_dict(dict(solver), cli_solver)
    config['best_response'] = _merge_block(
        config, {}, 'best_response', lgmech.models.options.BestResponse())
    if action == Action.Dynamics.value:
        verification = lgmech.models.options.Dynamics().verification
    else:
        verification = lgmech.models.options.Verification()
    config['verification'] = _merge_block(
        config, arg.get('verification', {}), 'verification', verification)
    config['dynamics'] = _merge_block(
        config, arg.get('dynamics', {}), 'dynamics',
        lgmech.models.options.Dynamics())
    config['gen'] = _merge_block(
        config, arg.get('gen', {}), 'gen',
        lgmech.models.options.Generation())
    config['scenario'] = arg.get('scenario') or config.get('scenario')
    config['profile'] = arg.get('profile') or config.get('profile')


def create_general_options(config, action):
    # type: (dict, Action) -> lgmech.models.options.General
    """Create a General Options object from configuration
    :param dict config: config dict
    :param Action action: action
    :rtype: lgmech.models.options.General
    :return: general options object
    """
    conf = config['options']
    return lgmech.models.options.General(
        log_file=conf['log_file'],
        log_level=conf['log_level'],
        verbose=conf['verbose'],
        quiet=conf['quiet'],
        strict=conf['strict'],
        out_dir=conf['out_dir'],
        processes=conf['processes'] if action == Action.Batch else 1,
    )


def create_solver_options(config, base):
    # type: (dict, lgmech.models.options.Solver) ->
    #        lgmech.models.options.Solver
    """Create Solver options from configuration on top of a scenario's
    :param dict config: config dict
    :param lgmech.models.options.Solver base: scenario solver options
    :rtype: lgmech.models.options.Solver
    :return: solver options
    """
    return lgmech.models.options.solver_from_config(config['solver'], base)


def create_best_response_options(config):
    # type: (dict) -> lgmech.models.options.BestResponse
    return lgmech.models.options.BestResponse(**config['best_response'])


def create_verification_options(config):
    # type: (dict) -> lgmech.models.options.Verification
    """Create Verification options from configuration
    :param dict config: config dict
    :rtype: lgmech.models.options.Verification
    :return: verification options
    """
    conf = config['verification']
    if conf['random_deviations'] < 0:
        raise ValueError('random_deviations must be >= 0: {}'.format(
            conf['random_deviations']))
    if conf['gain_tol'] is not None and conf['gain_tol'] < 0:
        raise ValueError('gain_tol must be >= 0: {}'.format(
            conf['gain_tol']))
    return lgmech.models.options.Verification(
        best_response=create_best_response_options(config), **conf)


def create_dynamics_options(config):
    # type: (dict) -> lgmech.models.options.Dynamics
    """Create Dynamics options from configuration
    :param dict config: config dict
    :rtype: lgmech.models.options.Dynamics
    :return: dynamics options
    """
    conf = config['dynamics']
    if not 0 < conf['damping'] <= 1:
        raise ValueError('damping must lie in (0, 1]: {}'.format(
            conf['damping']))
    return lgmech.models.options.Dynamics(
        best_response=create_best_response_options(config),
        verification=create_verification_options(config), **conf)


def create_generation_options(config):
    # type: (dict) -> lgmech.models.options.Generation
    """Create Generation options from configuration
    :param dict config: config dict
    :rtype: lgmech.models.options.Generation
    :return: generation options
    """
    conf = config['gen']
    if conf['count'] < 1:
        raise ValueError('count must be >= 1: {}'.format(conf['count']))
    return lgmech.models.options.Generation(**conf)
