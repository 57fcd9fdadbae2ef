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
import functools
import json
import logging
import multiprocessing
import pathlib
import sys
# non-stdlib imports
import click
import numpy as np
import ruamel.yaml
# lgmech library imports
import lgmech.api
import lgmech.errors
import lgmech.operations.report
import lgmech.util
# local imports
try:
    import cli.settings as settings
except (SystemError, ImportError):  # noqa
    try:
        from . import settings
    except (SystemError, ImportError):  # noqa
        # for local testing
        import settings

# create logger
logger = logging.getLogger('lgmech')
# global defines
_CONTEXT_SETTINGS = dict(help_option_names=['-h', '--help'])
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_STRUCTURAL = 2


class CliContext(object):
    """CliContext class: holds context for CLI commands"""
    def __init__(self):
        """Ctor for CliContext"""
        self.config = None
        self.cli_options = {}
        self.general_options = None
        self.show_config = False

    def initialize(self, action):
        # type: (CliContext, settings.Action) -> None
        """Initialize context
        :param CliContext self: this
        :param settings.Action action: action
        """
        self._init_config()
        self.general_options = settings.create_general_options(
            self.config, action)

    def _read_yaml_file(self, yaml_file):
        # type: (CliContext, pathlib.Path) -> None
        """Read a yaml file into self.config
        :param CliContext self: this
        :param pathlib.Path yaml_file: yaml file to load
        """
        yaml = ruamel.yaml.YAML(typ='safe')
        with yaml_file.open('r') as f:
            if self.config is None:
                self.config = yaml.load(f)
            else:
                self.config = lgmech.util.merge_dict(
                    yaml.load(f), self.config)

    def _init_config(self):
        # type: (CliContext) -> None
        """Initializes configuration of the context
        :param CliContext self: this
        """
        # load yaml config file into memory
        if lgmech.util.is_not_empty(self.cli_options.get('yaml_config')):
            yaml_config = pathlib.Path(self.cli_options['yaml_config'])
            self._read_yaml_file(yaml_config)
        if self.config is None:
            self.config = {}
        # merge "global" cli options with config
        settings.merge_global_settings(self.config, self.cli_options)
        # set log file if specified
        logfile = self.config['options'].get('log_file', None)
        lgmech.util.setup_logger(logger, logfile)
        level = self.config['options'].get('log_level')
        if self.config['options'].get('quiet', False):
            level = level or 'WARNING'
        if self.config['options'].get('verbose', False):
            level = 'DEBUG'
            lgmech.util.set_verbose_logger_handlers()
        lgmech.util.set_log_level(logger, level)
        # output mixed config
        if self.show_config:
            logger.debug('config: \n{}'.format(
                json.dumps(self.config, indent=4, sort_keys=True)))
            logger.debug('cli config: \n{}'.format(
                json.dumps(
                    self.cli_options[self.cli_options['_action']],
                    indent=4, sort_keys=True)))
        del self.show_config


# create a pass decorator for shared context between commands
pass_cli_context = click.make_pass_decorator(CliContext, ensure=True)


def _store_option(name, *param_decls, **attrs):
    # type: (str, tuple, dict) -> function
    """Build a click option whose value lands in cli_options[name]"""
    def decorator(f):
        def callback(ctx, param, value):
            clictx = ctx.ensure_object(CliContext)
            clictx.cli_options[name] = value
            return value
        return click.option(
            *param_decls, expose_value=False, callback=callback,
            **attrs)(f)
    return decorator


_config_option = _store_option(
    'yaml_config', '--config', default=None,
    help='YAML configuration file', envvar='LGM_CONFIG_FILE')
_count_option = _store_option(
    'count', '--count', type=int, default=None,
    help='Number of scenarios to generate [1]')
_damping_option = _store_option(
    'damping', '--damping', type=float, default=None,
    help='Damping theta in (0, 1] for best-response updates [0.5]')
_density_option = _store_option(
    'density', '--density', type=float, default=None,
    help='Edge probability of generated graphs [0.3]')
_deviations_option = _store_option(
    'deviations', '--deviations', type=int, default=None,
    help='Random unilateral deviations tested per user [4000]')
_family_option = _store_option(
    'family', '--family', type=click.Choice(['power', 'linear', 'quadratic']),
    default=None, help='Utility family of generated scenarios [power]')
_index_policy_option = _store_option(
    'index_policy', '--index-policy',
    type=click.Choice(['ascending', 'shuffled']), default=None,
    help='Cyclic index policy of generated scenarios [ascending]')
_log_file_option = _store_option(
    'log_file', '--log-file', default=None, help='Log to file specified')
_log_level_option = _store_option(
    'log_level', '--log-level', default=None,
    help='Log level; falls back to LGM_LOG then INFO')
_max_iter_option = _store_option(
    'max_iter', '--max-iter', type=int, default=None,
    help='Maximum best-response sweeps [500]')
_n_option = _store_option(
    'n', '--n', type=int, default=None,
    help='Number of users of generated scenarios [10]')
_out_option = _store_option(
    'out', '--out', default=None, help='Output directory [.]')
_processes_option = _store_option(
    'processes', '--processes', type=int, default=None,
    help='Worker processes for batch runs [cpu count / 2]')
_profile_option = _store_option(
    'profile', '--profile', default=None, help='Message profile JSON file')
_quiet_option = _store_option(
    'quiet', '-q', '--quiet', is_flag=True, default=None,
    help='Quiet mode')
_scenario_option = _store_option(
    'scenario', '--scenario', default=None, help='Scenario JSON file')
_schedule_option = _store_option(
    'schedule', '--schedule',
    type=click.Choice(['round-robin', 'random', 'simultaneous']),
    default=None, help='Best-response update schedule [round-robin]')
_seed_option = _store_option(
    'seed', '--seed', type=click.IntRange(0, 2**64 - 1), default=None,
    help='Random seed')
_strict_option = _store_option(
    'strict', '--strict', is_flag=True, default=None,
    help='Exit nonzero when a recorded property check fails')
_tol_option = _store_option(
    'tol', '--tol', type=float, default=None,
    help='Tolerance: solver gradient norm, NE gain or dynamics delta')
_verbose_option = _store_option(
    'verbose', '-v', '--verbose', is_flag=True, default=None,
    help='Verbose output')


def _show_config_option(f):
    def callback(ctx, param, value):
        clictx = ctx.ensure_object(CliContext)
        clictx.show_config = value
        return value
    return click.option(
        '--show-config',
        expose_value=False,
        is_flag=True,
        help='Show configuration',
        callback=callback)(f)


def common_options(f):
    f = _verbose_option(f)
    f = _strict_option(f)
    f = _show_config_option(f)
    f = _quiet_option(f)
    f = _out_option(f)
    f = _log_level_option(f)
    f = _log_file_option(f)
    f = _config_option(f)
    return f


def scenario_options(f):
    f = _tol_option(f)
    f = _seed_option(f)
    f = _scenario_option(f)
    return f


def verification_options(f):
    f = _deviations_option(f)
    return f


def dynamics_options(f):
    f = _schedule_option(f)
    f = _profile_option(f)
    f = _max_iter_option(f)
    f = _damping_option(f)
    return f


def gen_options(f):
    f = _seed_option(f)
    f = _n_option(f)
    f = _index_policy_option(f)
    f = _family_option(f)
    f = _density_option(f)
    f = _count_option(f)
    return f


def _structural_errors(f):
    """Map structural failures to exit status 2 with an error record on
    stderr"""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            code = f(*args, **kwargs)
        except (ValueError, RuntimeError, OSError) as exc:
            logger.debug('structural error', exc_info=True)
            click.echo(lgmech.operations.report.error_json(exc), err=True)
            sys.exit(EXIT_STRUCTURAL)
        sys.exit(code)
    return wrapper


def _load_scenario(ctx):
    # type: (CliContext) -> lgmech.api.Scenario
    path = ctx.config['scenario']
    if lgmech.util.is_none_or_empty(path):
        raise ValueError('--scenario is required')
    scenario = lgmech.api.load_scenario(path)
    solver = settings.create_solver_options(ctx.config, scenario.solver)
    if solver != scenario.solver:
        scenario = scenario.with_options(solver=solver)
    return scenario


def _load_profile(ctx, scenario, required=True):
    # type: (CliContext, lgmech.api.Scenario, bool) ->
    #        lgmech.api.MessageProfile
    path = ctx.config['profile']
    if lgmech.util.is_none_or_empty(path):
        if required:
            raise ValueError('--profile is required')
        return None
    return lgmech.api.read_profile(path, scenario.topology)


def _finish(ctx, report, passed, gate=True):
    # type: (CliContext, dict, bool, bool) -> int
    """Write the command report and pick the exit status"""
    path = lgmech.operations.report.write_report(
        report, ctx.general_options.out_dir)
    logger.info('report written to {}'.format(path))
    if passed or not gate:
        return EXIT_OK
    return EXIT_CHECK_FAILED


@click.group(context_settings=_CONTEXT_SETTINGS)
@click.version_option(version=lgmech.__version__)
@click.pass_context
def cli(ctx):
    """lgmech: decentralized mechanism for local public goods"""
    pass


@cli.command('solve')
@scenario_options
@common_options
@pass_cli_context
@_structural_errors
def solve(ctx):
    """Solve the centralized welfare problem of a scenario"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Solve)
    ctx.initialize(settings.Action.Solve)
    scenario = _load_scenario(ctx)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'solve', scenario,
        solver_tol=scenario.solver.tol)
    try:
        solution = lgmech.api.solve_centralized(scenario)
    except lgmech.errors.NotConvergedError as exc:
        logger.error(str(exc))
        solution = exc.solution
    report = lgmech.operations.report.build_report(
        'solve', scenario, centralized=solution.to_dict())
    return _finish(ctx, report, solution.converged)


@cli.command('construct-ne')
@scenario_options
@common_options
@pass_cli_context
@_structural_errors
def construct_ne(ctx):
    """Build the canonical equilibrium profile from the optimum"""
    settings.add_cli_options(ctx.cli_options, settings.Action.ConstructNe)
    ctx.initialize(settings.Action.ConstructNe)
    scenario = _load_scenario(ctx)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'construct-ne', scenario)
    solution = lgmech.api.solve_centralized(scenario)
    prices = lgmech.api.personalized_prices_from_optimum(
        scenario, solution.actions)
    profile = lgmech.api.construct_ne(scenario, solution.actions, prices)
    allocation = lgmech.api.compute_outcome(
        profile, scenario.topology, scenario.index_table)
    conditions = lgmech.api.check_ne_conditions(
        scenario, profile, solution.actions, prices)
    price_taking = lgmech.api.check_price_taking(
        scenario, solution.actions, prices)
    profile_path = lgmech.operations.report.write_json(
        profile.to_dict(), ctx.general_options.out_dir / 'profile.json')
    logger.info('profile written to {}'.format(profile_path))
    report = lgmech.operations.report.build_report(
        'construct-ne', scenario,
        centralized=solution.to_dict(),
        personalized_prices=prices.to_dict(),
        profile=profile.to_dict(),
        outcome=allocation.to_dict(),
        conditions=conditions.to_dict(),
        price_taking_residuals=price_taking,
    )
    passed = (conditions.holds() and allocation.budget_residual <=
              1e-9 * allocation.budget_scale)
    return _finish(ctx, report, passed)


@cli.command('verify')
@verification_options
@_profile_option
@scenario_options
@common_options
@pass_cli_context
@_structural_errors
def verify(ctx):
    """Search a message profile for profitable unilateral deviations"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Verify)
    ctx.initialize(settings.Action.Verify)
    scenario = _load_scenario(ctx)
    profile = _load_profile(ctx, scenario)
    verification = settings.create_verification_options(ctx.config)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'verify', scenario,
        deviations=verification.random_deviations,
        verification_seed=verification.seed)
    allocation = lgmech.api.compute_outcome(
        profile, scenario.topology, scenario.index_table)
    ne_report = lgmech.api.verify_ne(scenario, profile, verification)
    report = lgmech.operations.report.build_report(
        'verify', scenario, outcome=allocation.to_dict(),
        nash_verification=ne_report.to_dict())
    return _finish(ctx, report, ne_report.is_equilibrium)


@cli.command('dynamics')
@verification_options
@dynamics_options
@scenario_options
@common_options
@pass_cli_context
@_structural_errors
def dynamics(ctx):
    """Run damped best-response dynamics from a profile (zero if none)"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Dynamics)
    ctx.initialize(settings.Action.Dynamics)
    scenario = _load_scenario(ctx)
    init = _load_profile(ctx, scenario, required=False)
    if init is None:
        init = lgmech.api.MessageProfile.zeros(scenario.topology)
    options = settings.create_dynamics_options(ctx.config)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'dynamics', scenario,
        schedule=options.schedule, damping=options.damping,
        max_sweeps=options.max_iter, dynamics_tol=options.tol)
    trajectory = lgmech.api.run_dynamics(scenario, init, options)
    out = ctx.general_options.out_dir
    lgmech.operations.report.write_trajectory_csv(
        trajectory, out / 'trajectory.csv')
    lgmech.operations.report.write_json(
        trajectory.final_profile.to_dict(), out / 'profile.json')
    final = lgmech.api.compute_outcome(
        trajectory.final_profile, scenario.topology, scenario.index_table)
    report = lgmech.operations.report.build_report(
        'dynamics', scenario, trajectory=trajectory.to_dict(),
        outcome=final.to_dict())
    return _finish(
        ctx, report, trajectory.converged,
        gate=ctx.general_options.strict)


@cli.command('audit')
@verification_options
@_profile_option
@scenario_options
@common_options
@pass_cli_context
@_structural_errors
def audit(ctx):
    """Run budget, rationality, optimality, KKT and Nash checks"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Audit)
    ctx.initialize(settings.Action.Audit)
    scenario = _load_scenario(ctx)
    profile = _load_profile(ctx, scenario)
    verification = settings.create_verification_options(ctx.config)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'audit', scenario,
        deviations=verification.random_deviations)
    result = lgmech.api.full_audit(scenario, profile, verification)
    report = lgmech.operations.report.build_report(
        'audit', scenario, audit=result.to_dict())
    return _finish(
        ctx, report, result.passed, gate=ctx.general_options.strict)


def _generate(config):
    # type: (dict) -> list
    gen = settings.create_generation_options(config)
    return [
        lgmech.api.generate_scenario(
            gen.n, gen.density, gen.family, gen.seed + k,
            index_policy=gen.index_policy)
        for k in range(gen.count)
    ]


@cli.command('gen')
@gen_options
@common_options
@pass_cli_context
@_structural_errors
def gen(ctx):
    """Generate random scenarios"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Gen)
    ctx.initialize(settings.Action.Gen)
    lgmech.operations.report.output_parameters(ctx.general_options, 'gen')
    for scenario in _generate(ctx.config):
        path = ctx.general_options.out_dir / '{}.json'.format(scenario.name)
        lgmech.api.save_scenario(scenario, path)
        logger.info('scenario written to {}'.format(path))
        if not ctx.general_options.quiet:
            click.echo(str(path))
    return EXIT_OK


@cli.command('batch')
@_processes_option
@verification_options
@gen_options
@_scenario_option
@common_options
@pass_cli_context
@_structural_errors
def batch(ctx):
    """Certify many scenarios: a directory given by --scenario, or
    generated ones"""
    settings.add_cli_options(ctx.cli_options, settings.Action.Batch)
    ctx.initialize(settings.Action.Batch)
    source = ctx.config['scenario']
    if lgmech.util.is_not_empty(source):
        source = pathlib.Path(source)
        paths = sorted(source.glob('*.json')) if source.is_dir() else [source]
        scenarios = [lgmech.api.load_scenario(p) for p in paths]
    else:
        scenarios = _generate(ctx.config)
    verification = settings.create_verification_options(ctx.config)
    lgmech.operations.report.output_parameters(
        ctx.general_options, 'batch', scenarios=len(scenarios),
        processes=ctx.general_options.processes)
    results = lgmech.api.run_batch(
        scenarios, verification, ctx.general_options.processes)
    passed = all(r['passed'] for r in results)
    report = lgmech.operations.report.build_report(
        'batch', None, results=results,
        passed_count=int(np.sum([r['passed'] for r in results])))
    return _finish(ctx, report, passed, gate=ctx.general_options.strict)


if __name__ == '__main__':
    multiprocessing.freeze_support()
    cli()
