__doc__ = """
Command line interface: coopsim thresholds|classify|run|sweep

Exit codes: 0 success, 2 config or parameter error, 3 runtime error.
"""

import argparse
import logging
import os
import sys
from . import settings
from .cache import RunCache
from .common import (ConfigError, CoopSimError, InvalidParameter, ResultWriter, UnreachableThreshold,
                     add_file_handler, logger, set_console_level)
from .config import read_config, to_sweep_config, to_world_config
from .experiments import NamedExperiment, experiment_sweeps, run_sweeps
from .game import GameSpec, Regime, Strategy, classify_game, format_ordering, ordering, payoff_matrix, regime, solve_threshold
from .world import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

SERIES_HEADER = ('tick', 'cooperator_fraction')
SWEEP_HEADER = ('strategy', 'tuning', 'population', 'ipc', 'icpc', 'icpd', 'x', 'seed', 'tail_mean',
                'final_fraction', 'status')
PLOT_HEADER = ('x', 'mean_tail')


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected a number, got {!r}'.format(text))


def _strategy(text):
    try:
        return Strategy.parse(text)
    except InvalidParameter as e:
        raise argparse.ArgumentTypeError(e.problem)


def _seed(args, fallback=None):
    """--seed flag, then the config's seed, then COOPSIM_SEED
    """
    if args.seed is not None:
        return args.seed
    return fallback if fallback is not None else settings.env_seed()


def cmd_thresholds(args):
    """Print the x at which each condition becomes an equality
    """
    status = EXIT_OK
    for condition in (Regime.ESS, Regime.RD, Regime.AD):
        name = condition.value.lower()
        try:
            x = solve_threshold(args.strategy, condition, args.b, args.c)
        except UnreachableThreshold as e:
            print('{}_x=unreachable'.format(name))
            logger.error('%s', e)
            status = EXIT_CONFIG
        else:
            print('{}_x={!r}'.format(name, x))
    return status


def cmd_classify(args):
    spec = GameSpec(args.strategy, args.b, args.c, args.x)
    matrix = payoff_matrix(spec)
    for name, value in matrix.items():
        print('{}={!r}'.format(name, value))
    print('ordering={}'.format(format_ordering(ordering(matrix))))
    print('class={}'.format(classify_game(spec).value))
    print('regime={}'.format(regime(spec).value))
    return EXIT_OK


def write_series(metrics, output):
    with ResultWriter(output) as writer:
        writer.writerow(SERIES_HEADER)
        for tick in range(1, len(metrics.series)):
            writer.writerow((tick, float(metrics.series[tick])))
        writer.comment(metrics.summary())


def cmd_run(args):
    cfg = read_config(args.config)
    config = to_world_config(cfg, seed=_seed(args, cfg.get('run', 'seed')), iterations=args.iterations,
                             window=args.window)
    logger.info('running %s x=%s seed=%s for %d ticks', config.spec.strategy.value, config.spec.x, config.seed,
                config.iterations)
    metrics = run(config, progress=lambda tick, fraction: logger.info('tick %d: cooperator fraction %s', tick, fraction))
    write_series(metrics, args.output)
    logger.info('%s', metrics.summary())
    return EXIT_OK


def _sweeps(args):
    try:
        name = NamedExperiment.parse(args.target)
    except InvalidParameter:
        if not os.path.exists(args.target):
            raise InvalidParameter('target', 'not an experiment name or config file: {!r}'.format(args.target))
        cfg = read_config(args.target)
        return [to_sweep_config(cfg, strategy=args.strategy, seed=_seed(args, cfg.get('run', 'seed')),
                                iterations=args.iterations, window=args.window, repetitions=args.repetitions)]
    iterations = settings.iterations if args.iterations is None else args.iterations
    return experiment_sweeps(name, args.strategy, iterations=iterations, base_seed=_seed(args), window=args.window,
                             repetitions=args.repetitions)


def write_sweep(results, output, per_seed=False):
    with ResultWriter(output) as writer:
        writer.writerow(SWEEP_HEADER)
        for result in results:
            meta = result.sweep.metadata()
            prefix = (meta.strategy, meta.tuning, meta.population, meta.ipc, meta.icpc, meta.icpd)
            if per_seed:
                for cell in result.cells:
                    writer.writerow(prefix + (cell.cell.x, cell.cell.seed, cell.tail_mean, cell.final_fraction,
                                              cell.status))
            else:
                for row in result.rows:
                    writer.writerow(prefix + (row.x, result.sweep.base_seed, row.tail_mean, row.final_fraction,
                                              row.status))


def write_plot_data(results, output):
    with ResultWriter(output) as writer:
        writer.writerow(PLOT_HEADER)
        for result in results:
            if len(results) > 1:
                writer.comment(result.sweep.metadata().fingerprint())
            writer.writerows(result.curve())


def cmd_sweep(args):
    sweeps = _sweeps(args)
    cache = RunCache(args.cache) if args.cache else None
    try:
        results = run_sweeps(sweeps, jobs=args.jobs, cache=cache)
    finally:
        if cache is not None:
            cache.close()
    write_sweep(results, args.output, per_seed=args.per_seed)
    if args.plot_data:
        write_plot_data(results, args.plot_data)
    failed = sum(row.status != 'ok' for result in results for row in result.rows)
    if failed:
        logger.warning('%d sweep rows have errors', failed)
    logger.info('wrote %d sweeps to %s', len(results), args.output)
    return EXIT_OK


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got {!r}'.format(text))
    if value < 1:
        raise argparse.ArgumentTypeError('must be at least 1, got {}'.format(value))
    return value


def _count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got {!r}'.format(text))
    if value < 0:
        raise argparse.ArgumentTypeError('must not be negative, got {}'.format(value))
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog='coopsim', description='Cultural evolution of cooperation simulator')
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug messages to the console')
    parser.add_argument('--log-file', help='also write the log to this file')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    thresholds = commands.add_parser('thresholds', help='x values where the ESS, RD and AD conditions hold with equality')
    thresholds.add_argument('strategy', type=_strategy, help='KS, DR or IR')
    thresholds.add_argument('b', type=_number, help='benefit')
    thresholds.add_argument('c', type=_number, help='cost')
    thresholds.set_defaults(func=cmd_thresholds)

    classify = commands.add_parser('classify', help='payoff matrix and game class')
    classify.add_argument('strategy', type=_strategy, help='KS, DR or IR')
    classify.add_argument('b', type=_number, help='benefit')
    classify.add_argument('c', type=_number, help='cost')
    classify.add_argument('x', type=_number, help='the probability r, w or q')
    classify.set_defaults(func=cmd_classify)

    run_cmd = commands.add_parser('run', help='simulate one config and write the cooperator fraction series')
    run_cmd.add_argument('config', help='config file')
    run_cmd.add_argument('output', help='series CSV to write')
    run_cmd.add_argument('--seed', type=_count, help='overrides [run] seed and COOPSIM_SEED')
    run_cmd.add_argument('--window', type=_positive_int, help='ticks averaged for the tail mean')
    run_cmd.add_argument('--iterations', type=_count, help='overrides [run] iterations')
    run_cmd.set_defaults(func=cmd_run)

    sweep = commands.add_parser('sweep', help='run an experiment or sweep config and write the aggregated CSV')
    sweep.add_argument('target', help='experiment name ({}) or config file with a [sweep] section'.format(
        ', '.join(experiment.value for experiment in NamedExperiment)))
    sweep.add_argument('strategy', type=_strategy, help='KS, DR or IR')
    sweep.add_argument('output', help='sweep CSV to write')
    sweep.add_argument('--seed', type=_count, help='base seed of the sweep')
    sweep.add_argument('--jobs', type=_positive_int, default=1, help='worker processes')
    sweep.add_argument('--plot-data', help='also write x,mean_tail to this file')
    sweep.add_argument('--window', type=_positive_int, help='ticks averaged for the tail mean')
    sweep.add_argument('--iterations', type=_count, help='ticks per run')
    sweep.add_argument('--repetitions', type=_positive_int, help='seeds per x')
    sweep.add_argument('--per-seed', action='store_true', help='one row per repetition instead of the mean')
    sweep.add_argument('--cache', nargs='?', const=settings.cache_file,
                       help='sqlite file of finished cells, reused on rerun (default {})'.format(settings.cache_file))
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_console_level(logger, logging.DEBUG)
    if args.log_file:
        add_file_handler(logger, args.log_file)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameter, UnreachableThreshold) as e:
        logger.error('%s', e)
        return EXIT_CONFIG
    except CoopSimError as e:
        logger.error('%s', e)
        return EXIT_RUNTIME
    except OSError as e:
        logger.error('%s: %s', getattr(e, 'filename', None) or 'output', e.strerror or e)
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
