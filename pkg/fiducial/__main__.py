#!/usr/bin/env python

"""
Samples Doob fiducial distributions: statistic chains T_{m+1} = H_m(T_m, Z_m)
are started at the observed statistic and run to a long horizon, the terminal
values approximate the law of the limit. Samples can be compared with closed
form Fisher fiducial laws and checked with convergence diagnostics.

Subcommands have additional help information, query with: `{subcommand} --help`
"""
from argparse import ArgumentParser
from collections import OrderedDict

import logging
import sys

import numpy as np

from fiducial import engine
from fiducial.config import (
    Config,
    ConfigException,
    ConfigOption,
    ExclusiveOptions,
    InvalidConfig,
    OptionRequired,
    one_of,
    read_config_file
)
from fiducial.diagnostics import (
    DiagnosticsReport,
    increment_diagnostic,
    kakutani_diagnostic,
    series_diagnostic,
    uniform_pair_bounds
)
from fiducial.model import NumericDomainError, UnsupportedModel
from fiducial.oracles import OracleDistribution, cdf_table, ks_distance
from fiducial.plugin import find_models
from fiducial.regression import (
    REGRESSION_MODELS,
    fit_least_squares,
    load_regression_csv,
    run_regression_fiducial
)
from fiducial.report import ReportWriter, RunInfo, read_samples
from fiducial.sink import LoggingSink
from fiducial.util import chain_seed, float_list, name_list, positive_int, seed_int


logger = logging.getLogger('fiducial')


EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_NUMERIC = 3

SEEDING = 'chain b: Philox(SeedSequence(SeedSequence(entropy=master_seed, spawn_key=(b,))' \
          '.generate_state(1, uint64)[0])), innovations drawn in chunks of {} steps'.format(engine.STEP_CHUNK)


class Parser(ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


class GlobalConfig(Config):
    OUT_PATH = ConfigOption(
        default='.',
        description='Output directory for the written files'
    )
    CONFIG = ConfigOption(
        description='Path to a `key = value` file with option values for the subcommand '
                    'and the model, flags given on the command line override it'
    )
    QUIET = ConfigOption(
        converter=bool,
        default=False,
        description='Disable logging.'
    )


class RunConfig(Config):
    MODEL = ConfigOption(
        required=True,
        description='Model family, one of the registered family names'
    )
    N = ConfigOption(
        converter=positive_int,
        description='Index n of the observed statistic, the sample size. '
                    'Defaults to the number of observations with --data'
    )
    STATISTIC = ConfigOption(
        converter=float_list,
        description='Observed statistic t_n, one number per coordinate, e.g. `0,1` for normalmv'
    )
    DATA = ConfigOption(
        description='Whitespace separated raw observations, the statistic is computed from them'
    )
    SEED = ConfigOption(
        converter=seed_int,
        default=0,
        description='Master seed of the run'
    )

    __constraints__ = [
        ExclusiveOptions('DATA', 'STATISTIC')
    ]


class SampleConfig(RunConfig):
    HORIZON = ConfigOption(
        converter=positive_int,
        description='Horizon N of every chain, defaults to n + {}'.format(engine.HORIZON_OFFSET)
    )
    CHAINS = ConfigOption(
        converter=positive_int,
        default=1000,
        description='Number of chains B'
    )
    WARN_INCREMENT = ConfigOption(
        converter=float,
        default=engine.INCREMENT_THRESHOLD,
        description='Warn when a state changes by more than this over the last {} steps'.format(
            engine.INCREMENT_WINDOW
        )
    )
    BINS = ConfigOption(
        converter=int,
        default=0,
        description='Also write hist_<column>.csv with this many bins per column, 0 disables'
    )


class CompareConfig(SampleConfig):
    REFERENCE = ConfigOption(
        description='Samples CSV whose first column, in parameter space, replaces the Fisher fiducial oracle '
                    'by its empirical distribution'
    )


class DiagnoseConfig(RunConfig):
    UPPER = ConfigOption(
        converter=positive_int,
        description='Last index M of the diagnostic series, defaults to n + {}'.format(engine.HORIZON_OFFSET)
    )
    DRAWS = ConfigOption(
        converter=positive_int,
        default=10000,
        description='Innovation draws per term for families without closed form moments'
    )
    WINDOW = ConfigOption(
        converter=positive_int,
        default=engine.INCREMENT_WINDOW,
        description='Trailing window of the increment diagnostic'
    )


class RegressConfig(Config):
    DATA = ConfigOption(
        required=True,
        description='CSV file with a header row'
    )
    RESPONSE = ConfigOption(
        required=True,
        description='Name of the response column'
    )
    COLUMNS = ConfigOption(
        converter=name_list,
        description='Covariate columns, all other columns by default'
    )
    REGRESSION = ConfigOption(
        converter=one_of(tuple(sorted(REGRESSION_MODELS))),
        default='logistic',
        description='Regression model'
    )
    SIGMA = ConfigOption(
        converter=float,
        default=1.0,
        description='Noise standard deviation of the linear model'
    )
    RAW = ConfigOption(
        converter=bool,
        default=False,
        description='Do not min-max standardize the covariates'
    )
    NO_INTERCEPT = ConfigOption(
        converter=bool,
        default=False,
        description='Do not add an intercept column'
    )
    THETA = ConfigOption(
        converter=float_list,
        description='Starting coefficients, skips the least squares fit'
    )
    MAX_ITERATIONS = ConfigOption(
        converter=positive_int,
        default=1000,
        description='Function evaluations allowed to the least squares fit'
    )
    HORIZON = ConfigOption(
        converter=positive_int,
        description='Horizon N of every chain, defaults to n + {}'.format(engine.HORIZON_OFFSET)
    )
    CHAINS = ConfigOption(
        converter=positive_int,
        default=1000,
        description='Number of chains B'
    )
    SEED = ConfigOption(
        converter=seed_int,
        default=0,
        description='Master seed of the run'
    )
    REDRAW = ConfigOption(
        converter=bool,
        default=False,
        description='Redraw a covariate row when phi(x, theta) = 0 instead of failing the chain'
    )
    BINS = ConfigOption(
        converter=int,
        default=0,
        description='Also write hist_<column>.csv with this many bins per coefficient, 0 disables'
    )


class HistConfig(Config):
    SAMPLES = ConfigOption(
        required=True,
        description='Samples CSV as written by sample, compare or regress'
    )
    BINS = ConfigOption(
        converter=positive_int,
        default=20,
        description='Number of equal-width bins per column'
    )


def read_observations(path):
    return np.loadtxt(path, dtype=float, ndmin=1).ravel()


def create_model(config, options, models):
    name = config['MODEL']
    try:
        Model = models[name]
    except KeyError:
        raise InvalidConfig('unknown model {!r}, expected one of {}'.format(name, ', '.join(sorted(models))))

    model_config = Model.Config()
    model_config.update_from_object(options, convert=False, ignore_additional=True)
    return Model.from_config(model_config)


def resolve_start(model, config):
    """
    The model to run, the observed statistic and n, either from --data or
    from --statistic and --n.
    """
    n = config['N']

    if config['DATA']:
        data = read_observations(config['DATA'])
        model, statistic = model.from_data(data)
        if n is None:
            n = data.size
        elif n != data.size:
            raise InvalidConfig('--n={} does not match the {} observation(s) of {}'.format(
                n, data.size, config['DATA']
            ))
    elif config['STATISTIC'] is not None:
        statistic = config['STATISTIC']
        if n is None:
            raise OptionRequired('N', RunConfig.N)
    else:
        raise InvalidConfig('one of --statistic or --data is required')

    return model, statistic, n


def check_range(name, value, n):
    if value is not None and value <= n:
        raise InvalidConfig('--{} must exceed n={}, got {}'.format(name, n, value))


def summary_document(run_info, sample_set, **extra):
    document = dict(
        tool='fiducial',
        version=run_info.version,
        command=run_info.command,
        model=run_info.model,
        n=sample_set.n,
        statistic=sample_set.statistic,
        horizon=sample_set.horizon,
        chains=sample_set.chains,
        master_seed=sample_set.master_seed,
        seeding=SEEDING,
        summaries=sample_set.summaries,
        adjustments=sample_set.adjustments,
        increment_sup=sample_set.increment_sup,
        config=run_info.config_dict(),
        commandline=run_info.commandline
    )
    document.update(extra)
    return document


def write_histograms(writer, names, values, bins):
    if bins < 0:
        raise InvalidConfig('--bins must not be negative, got {}'.format(bins))
    if bins:
        for j, name in enumerate(names):
            writer.write_histogram(name, values[:, j], bins)


def _sample(config, model, writer, sink):
    model, statistic, n = resolve_start(model, config)
    check_range('horizon', config['HORIZON'], n)

    sample_set = engine.sample_fiducial(
        model, statistic, n, horizon=config['HORIZON'], chains=config['CHAINS'],
        master_seed=config['SEED'], sink=sink, increment_threshold=config['WARN_INCREMENT']
    )
    names, values = sample_set.columns()
    writer.write_samples(names, values)
    return model, sample_set, names, values


def cmd_sample(config, model, writer, sink):
    model, sample_set, names, values = _sample(config, model, writer, sink)

    run_info = RunInfo.create('sample', config, model.config, model=model.NAME)
    writer.write_json('summary.json', summary_document(run_info, sample_set))
    writer.write_lines('config.txt', run_info.config_lines())
    write_histograms(writer, names, values, config['BINS'])

    summaries = sample_set.summaries
    return writer.render(
        'sample.txt',
        model_name=model.DISPLAY_NAME or model.NAME,
        chains=sample_set.chains,
        n=sample_set.n,
        horizon=sample_set.horizon,
        master_seed=sample_set.master_seed,
        statistic=sample_set.statistic.tolist()[:8],
        summaries=[(name, summaries[name]) for name in names],
        adjustments=sample_set.adjustments,
        files=writer.files
    )


def cmd_compare(config, model, writer, sink):
    model, sample_set, names, values = _sample(config, model, writer, sink)
    if len(names) != 1:
        raise UnsupportedModel(model.NAME, 'comparison with a one-dimensional reference law')

    parameter = np.asarray(model.to_parameter(values), dtype=float)[:, 0]
    if config['REFERENCE']:
        _, reference = read_samples(config['REFERENCE'])
        oracle = OracleDistribution.empirical(reference[:, 0])
    else:
        oracle = model.oracle(sample_set.statistic, sample_set.n)

    ks = ks_distance(parameter, oracle)
    rows = cdf_table(parameter, oracle)

    run_info = RunInfo.create('compare', config, model.config, model=model.NAME)
    writer.write_csv('cdf.csv', ['level', 'x', 'empirical', 'oracle'], rows)
    writer.write_json('compare.json', dict(
        tool='fiducial',
        version=run_info.version,
        model=model.NAME,
        n=sample_set.n,
        statistic=sample_set.statistic,
        horizon=sample_set.horizon,
        chains=sample_set.chains,
        master_seed=sample_set.master_seed,
        seeding=SEEDING,
        ks=ks,
        oracle=dict(
            kind=oracle.kind,
            parameters=oracle.parameters,
            mean=oracle.mean(),
            description=oracle.describe()
        ),
        sample=dict(
            mean=float(parameter.mean()),
            sd=float(parameter.std(ddof=1)) if parameter.size > 1 else 0.0
        ),
        config=run_info.config_dict(),
        commandline=run_info.commandline
    ))
    writer.write_lines('config.txt', run_info.config_lines())
    write_histograms(writer, names, values, config['BINS'])

    return writer.render(
        'compare.txt',
        model_name=model.DISPLAY_NAME or model.NAME,
        chains=sample_set.chains,
        n=sample_set.n,
        horizon=sample_set.horizon,
        oracle=oracle.describe(),
        ks=ks,
        sample_mean=float(parameter.mean()),
        oracle_mean=oracle.mean(),
        files=writer.files
    )


def cmd_diagnose(config, model, writer, sink):
    model, statistic, n = resolve_start(model, config)
    check_range('upper', config['UPPER'], n)
    upper = config['UPPER'] or engine.default_horizon(n)

    report = DiagnosticsReport(model)
    unsupported = []

    try:
        report.merge(kakutani_diagnostic(model, n, upper))
    except UnsupportedModel:
        unsupported.append('kakutani')

    seed = chain_seed(config['SEED'], 0)
    _, trajectory = engine.run_chain(model, statistic, n, horizon=upper, seed=seed, trajectory=True)

    try:
        report.merge(series_diagnostic(model, trajectory, n, upper, seed=seed, draws=config['DRAWS']))
    except UnsupportedModel:
        unsupported.append('series')

    if hasattr(model, 'series_bounds'):
        report.merge(uniform_pair_bounds(model, n, upper))
    report.merge(increment_diagnostic(trajectory, n, window=config['WINDOW']))

    for name in unsupported:
        sink.info('{} diagnostic is not available for {}'.format(name, model.NAME))

    run_info = RunInfo.create('diagnose', config, model.config, model=model.NAME)
    writer.write_csv('diagnostics.csv', ['diagnostic', 'm', 'term', 'partial_sum'], report.rows())
    writer.write_lines('config.txt', run_info.config_lines())

    return writer.render(
        'diagnose.txt',
        model_name=model.DISPLAY_NAME or model.NAME,
        n=n,
        upper=upper,
        series=list(report.all_series()),
        unsupported=unsupported,
        files=writer.files
    )


def cmd_regress(config, model, writer, sink):
    dataset = load_regression_csv(
        config['DATA'], config['RESPONSE'],
        standardize=not config['RAW'], intercept=not config['NO_INTERCEPT'], columns=config['COLUMNS']
    )
    check_range('horizon', config['HORIZON'], dataset.n)

    if config['REGRESSION'] == 'linear':
        regression = REGRESSION_MODELS['linear'](sigma=config['SIGMA'])
    else:
        regression = REGRESSION_MODELS[config['REGRESSION']]()

    fit = None
    if config['THETA'] is not None:
        theta = np.asarray(config['THETA'], dtype=float)
        if theta.shape != (dataset.p,):
            raise InvalidConfig('--theta needs {} value(s) for {}, got {}'.format(
                dataset.p, ', '.join(dataset.columns), theta.size
            ))
    else:
        fit = fit_least_squares(dataset, regression, max_iterations=config['MAX_ITERATIONS'])
        theta = fit.theta
        sink.info('least squares fit {}: theta = {!r}'.format(fit.status, theta.tolist()))

    sample_set = run_regression_fiducial(
        dataset, regression, theta, chains=config['CHAINS'], horizon=config['HORIZON'],
        master_seed=config['SEED'], redraw=config['REDRAW'], sink=sink
    )
    names, values = sample_set.columns()
    writer.write_samples(names, values)

    run_info = RunInfo.create('regress', config, model=regression.NAME)
    writer.write_json('summary.json', summary_document(
        run_info, sample_set,
        fit=None if fit is None else dict(
            theta=fit.theta, loss=fit.loss, gradient_norm=fit.gradient_norm,
            iterations=fit.iterations, status=fit.status
        ),
        dataset=dict(
            rows=dataset.n,
            columns=dataset.columns,
            response=dataset.response,
            standardized=dataset.standardized,
            minimums=dataset.minimums,
            maximums=dataset.maximums
        )
    ))
    writer.write_lines('config.txt', run_info.config_lines())
    write_histograms(writer, names, values, config['BINS'])

    summaries = sample_set.summaries
    return writer.render(
        'regress.txt',
        model_name=regression.NAME,
        chains=sample_set.chains,
        n=sample_set.n,
        horizon=sample_set.horizon,
        master_seed=sample_set.master_seed,
        fit=fit,
        start=theta.tolist(),
        summaries=[(name, summaries[name]) for name in names],
        files=writer.files
    )


def cmd_hist(config, model, writer, sink):
    names, values = read_samples(config['SAMPLES'])

    histograms = []
    for j, name in enumerate(names):
        histograms.append((name, writer.write_histogram(name, values[:, j], config['BINS'])))

    return writer.render('hist.txt', histograms=histograms, files=writer.files)


COMMANDS = OrderedDict([
    ('sample', (SampleConfig, True, cmd_sample, 'Sample the Doob fiducial distribution of a model')),
    ('compare', (CompareConfig, True, cmd_compare, 'Sample and compare with the Fisher fiducial law')),
    ('diagnose', (DiagnoseConfig, True, cmd_diagnose, 'Convergence diagnostics along one chain')),
    ('regress', (RegressConfig, False, cmd_regress, 'Regression fiducial sample from a CSV dataset')),
    ('hist', (HistConfig, False, cmd_hist, 'Equal-width histograms of a samples CSV')),
])


def init_subparsers(parser, models, file_values):
    subparsers = parser.add_subparsers(
        dest='subparser_name',
        description='Command to run'
    )
    subparsers.required = True

    configs = dict()
    model_options = set()
    for Model in models.values():
        model_options.update(name for name, _ in Model.Config().items())

    for command, (CommandConfig, uses_models, _, help) in COMMANDS.items():
        config = CommandConfig()
        subparser = subparsers.add_parser(command, help=help, description=help)
        config.init_parser(subparser, defaults=config.parser_defaults(file_values))

        known = set(name for name, _ in config.items())
        if uses_models:
            seen = set(known)
            for Model in models.values():
                model_config = Model.Config()
                model_config.init_parser(subparser, skip=seen, defaults=model_config.parser_defaults(file_values))
                seen.update(name for name, _ in model_config.items())
            known = seen

        configs[command] = (config, known)

    return configs


def pre_parse_config(args):
    pre_parser = ArgumentParser(add_help=False)
    pre_parser.add_argument('--config', dest='CONFIG', default=None)
    known, _ = pre_parser.parse_known_args(args=args)
    if known.CONFIG is None:
        return None, dict()
    return known.CONFIG, read_config_file(known.CONFIG)


def main(args=None):
    # Initialize logging as early as possible
    if not '--quiet' in (args or sys.argv):
        logging.basicConfig(
            format='[%(asctime)s][%(levelname)s\t][%(name)-7s\t]: %(message)s',
            datefmt='%d.%m.%Y %H:%M:%S', level=logging.INFO
        )

    logging_sink = LoggingSink(logger=logger)

    parser = Parser(prog='fiducial', description=__doc__)

    try:
        config_path, file_values = pre_parse_config(args)
        models = find_models()

        global_config = GlobalConfig()
        global_config.init_parser(parser)
        configs = init_subparsers(parser, models, file_values)
    except (ConfigException, IOError) as e:
        parser.error(str(e))

    ns = parser.parse_args(args=args)

    global_config.update_from_object(ns, convert=False, ignore_additional=True)
    config, known = configs[ns.subparser_name]
    config.update_from_object(ns, convert=False, ignore_additional=True)

    unknown = sorted(set(file_values) - known)
    if unknown:
        parser.error('{}: unknown key(s) for {}: {}'.format(
            config_path, ns.subparser_name, ', '.join(key.lower().replace('_', '-') for key in unknown)
        ))

    _, uses_models, command, _ = COMMANDS[ns.subparser_name]
    writer = ReportWriter(global_config['OUT_PATH'])

    try:
        global_config.validate()
        config.validate()

        model = create_model(config, ns, models) if uses_models else None
        output = command(config, model, writer, logging_sink)
    except ConfigException as e:
        writer.remove_written()
        sys.stderr.write('fiducial: error: {}\n'.format(e))
        return EXIT_USAGE
    except NumericDomainError as e:
        writer.remove_written()
        sys.stderr.write('fiducial: numeric domain error: {}\n'.format(e))
        return EXIT_NUMERIC
    except Exception as e:
        writer.remove_written()
        logger.debug('run failed', exc_info=True)
        sys.stderr.write('fiducial: error: {}\n'.format(e))
        return EXIT_RUNTIME

    sys.stdout.write(output)
    return 0


if __name__ == '__main__':
    sys.exit(main())
