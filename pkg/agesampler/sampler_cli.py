#!/usr/bin/python3

"""CLI for running sampling experiments and analysing their tables.

    sampler_cli.py [options] simulate <config.json>
    sampler_cli.py [options] oracle <config.json>
    sampler_cli.py [options] ensemble <config.json>
    sampler_cli.py [options] fit <ensemble.csv> --quantity mse_gamma
    sampler_cli.py [options] compare <a.csv> <b.csv> --variant a,b

Every command writes CSV files into the output directory and exits 0
only once all of them are written."""

import json
import os
import sys
from optparse import OptionParser

from agesampler import utils
from agesampler import config as experiment
from agesampler import ensemble
from agesampler import models
from agesampler import oracle
from agesampler import report
from agesampler import simulator

SIMULATE = "simulate"
ORACLE = "oracle"
ENSEMBLE = "ensemble"
FIT = "fit"
COMPARE = "compare"

COMMAND_ARGS = {SIMULATE: 1, ORACLE: 1, ENSEMBLE: 1, FIT: 1, COMPARE: 2}
COMMANDS = [SIMULATE, ORACLE, ENSEMBLE, FIT, COMPARE]


def build_parser():
    parser = OptionParser(
        usage="%prog [options] <" + "|".join(COMMANDS) + "> <file> [file]")

    parser.add_option("-d", "--debug",
                      dest="debug",
                      action="store_const",
                      const=True,
                      default=False,
                      help="Log at debug level")
    parser.add_option("-O", "--output",
                      dest="output",
                      default=".",
                      help="Directory the result tables are written to")
    # The option string overrides top-level config keys
    # e.g. optionstr = "seed=3,horizon_epochs=1000"
    parser.add_option("-o", "--option",
                      dest="optionstr",
                      help="Override config values (key=value,...)")
    parser.add_option("-q", "--quantity",
                      dest="quantity",
                      default=report.MSE_GAMMA,
                      help="Quantity to fit (%s)" % " | ".join(
                          report.QUANTITIES))
    parser.add_option("-v", "--variant",
                      dest="variant",
                      help="Variant to fit when a table holds several; "
                           "compare takes a or a,b")
    parser.add_option("-m", "--method",
                      dest="method",
                      help="Oracle method (%s)" % " | ".join(
                          oracle.METHODS + [oracle.METHOD_GRID]))
    parser.add_option("-p", "--plots",
                      dest="plots",
                      action="store_const",
                      const=True,
                      default=False,
                      help="Also write SVG plots next to the tables")
    return parser


def parse_variants(command, string):
    """'a' names the variant in both tables, 'a,b' one per table."""
    names = [name.strip() for name in string.split(',')]
    if len(names) == 1:
        return names[0], names[0]
    if command == COMPARE and len(names) == 2 and all(names):
        return names[0], names[1]
    raise utils.InvalidArgument('variant', string,
                                'a' if command != COMPARE else 'a or a,b')


def parse_cmd_args(argv=None):
    parser = build_parser()
    (options, args) = parser.parse_args(argv)

    if not args or args[0] not in COMMANDS:
        raise utils.ArgumentError("You must specify a command: %s"
                                  % " | ".join(COMMANDS))
    command = args[0]
    files = args[1:]
    if len(files) != COMMAND_ARGS[command]:
        raise utils.ArgumentError("'%s' takes %d file argument(s), got %d"
                                  % (command, COMMAND_ARGS[command],
                                     len(files)))

    config = {'command': command,
              'files': files,
              'debug': options.debug,
              'output': options.output,
              'quantity': options.quantity,
              'variant': options.variant,
              'variants': (None, None),
              'method': options.method,
              'plots': options.plots,
              'overrides': {}}

    if options.quantity not in report.QUANTITIES:
        raise utils.InvalidArgument('quantity', options.quantity,
                                    report.QUANTITIES)
    if options.method and options.method not in oracle.METHODS + \
            [oracle.METHOD_GRID]:
        raise utils.InvalidArgument('method', options.method,
                                    oracle.METHODS + [oracle.METHOD_GRID])
    if options.variant:
        config['variants'] = parse_variants(command, options.variant)
    if options.optionstr:
        config['overrides'] = experiment.kvp_string_to_rec(options.optionstr)
    return config


def output_path(config, name):
    if not os.path.isdir(config['output']):
        os.makedirs(config['output'])
    return os.path.join(config['output'], name)


def load_experiment(config):
    exp = experiment.load_config(config['files'][0], config['overrides'])
    method = config['method']
    if method and method != oracle.METHOD_GRID:
        run = exp.get_run_config().copy_with(oracle_method=method)
        exp = experiment.ExperimentConfig(exp.get_name(), run,
                                          exp.ensemble_spec, exp.raw)
    return exp


def run_simulate(config):
    exp = load_experiment(config)
    run_config = exp.get_run_config()
    solution = simulator.solve_oracle(run_config)
    result = simulator.run(run_config, solution)
    written = [models.trace_table(result).write(
        output_path(config, "%s_trace.csv" % exp.get_name()))]
    if config['plots']:
        written += report.plot_run(result, config['output'])
    print(json.dumps(result.get_summary(), sort_keys=True))
    return written


def run_oracle(config):
    exp = load_experiment(config)
    run_config = exp.get_run_config()
    comments = models.run_comments(run_config)[:1] + \
        ["f_max=%r" % run_config.f_max]
    if config['method'] == oracle.METHOD_GRID:
        solution = oracle.grid_bruteforce(
            run_config.channel, run_config.f_max,
            oracle.default_theta_grid(run_config.channel),
            run_config.oracle_n, run_config.crn_seed)
    else:
        solution = simulator.solve_oracle(run_config)
    comments.append("dinkelbach_residual=%r" % oracle.dinkelbach_residual(
        solution, run_config.channel, run_config.oracle_n,
        run_config.crn_seed, run_config.oracle_method))
    written = [models.oracle_table(solution, comments).write(
        output_path(config, "%s_oracle.csv" % exp.get_name()))]
    print(json.dumps(solution.to_record(), sort_keys=True))
    return written


def run_ensemble(config):
    exp = load_experiment(config)
    raw, summary = ensemble.run_ensemble(exp.get_ensemble_spec())
    written = [raw.write(output_path(config, "%s_ensemble_raw.csv"
                                     % exp.get_name())),
               summary.write(output_path(config, "%s_ensemble.csv"
                                         % exp.get_name()))]
    if config['plots']:
        written.append(report.plot_regret(summary, config['output']))
    return written


def run_fit(config):
    path = config['files'][0]
    summary = models.ENSEMBLE_SUMMARY.read(path)
    table = report.fit_table(summary, config['quantity'], config['variant'])
    name = os.path.splitext(os.path.basename(path))[0]
    written = [table.write(output_path(config, "%s_fit_%s.csv"
                                       % (name, config['quantity'])))]
    print(table.to_csv())
    return written


def run_compare(config):
    table_a = models.ENSEMBLE_RAW.read(config['files'][0])
    table_b = models.ENSEMBLE_RAW.read(config['files'][1])
    variant_a, variant_b = config['variants']
    table = report.compare_variance(table_a, table_b, variant_a, variant_b)
    written = [table.write(output_path(config, "compare.csv"))]
    print(table.to_csv())
    return written


COMMAND_HANDLERS = {SIMULATE: run_simulate,
                    ORACLE: run_oracle,
                    ENSEMBLE: run_ensemble,
                    FIT: run_fit,
                    COMPARE: run_compare}


@utils.log_exceptions
def run_command(config):
    utils.log.info("Options: %s" % config)
    written = COMMAND_HANDLERS[config['command']](config)
    for path in written:
        utils.log.info("Wrote %s" % path)
    return written


def main(argv=None):
    """Returns the process exit code"""
    try:
        config = parse_cmd_args(argv)
    except Exception as e:
        sys.stderr.write("Error: %s\n" % e)
        return 2

    utils.init_logging(config['debug'])
    try:
        run_command(config)
    except Exception as e:
        sys.stderr.write("Error: %s\n" % e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
