import json
import os

import numpy as np
import pytest

from fiducial.__main__ import EXIT_NUMERIC, EXIT_RUNTIME, EXIT_USAGE, main
from fiducial.models import Uniform
from fiducial.report import read_samples


def run(out, *args):
    return main(['--quiet', '--out-path', str(out)] + list(args))


EXPONENTIAL = ['--model', 'exponential', '--n', '20', '--statistic', '1', '--chains', '50',
               '--horizon', '120', '--seed', '3']


def read(path):
    with open(str(path), 'rb') as f:
        return f.read()


def test_sample(tmp_path, capsys):
    assert run(tmp_path, 'sample', *EXPONENTIAL) == 0
    assert sorted(os.listdir(str(tmp_path))) == ['config.txt', 'samples.csv', 'summary.json']

    names, values = read_samples(str(tmp_path / 'samples.csv'))
    assert names == ['t']
    assert values.shape == (50, 1)
    assert read(tmp_path / 'samples.csv').startswith(b'chain_id,t\n0,')

    summary = json.loads(read(tmp_path / 'summary.json').decode('utf-8'))
    assert summary['command'] == 'sample'
    assert summary['model'] == 'exponential'
    assert summary['n'] == 20
    assert summary['horizon'] == 120
    assert summary['chains'] == 50
    assert summary['master_seed'] == 3
    assert summary['statistic'] == [1.0]
    assert sorted(summary['summaries']['t']) == ['mean', 'quantiles', 'sd']
    assert summary['config']['model'] == 'exponential'
    assert summary['commandline'].startswith('fiducial sample ')

    assert 'Exponential fiducial sample: 50 chain(s)' in capsys.readouterr().out


def test_sample_is_deterministic(tmp_path):
    first, second = tmp_path / 'first', tmp_path / 'second'
    assert run(first, 'sample', *EXPONENTIAL) == 0
    assert run(second, 'sample', *EXPONENTIAL) == 0

    for name in ('samples.csv', 'summary.json', 'config.txt'):
        assert read(first / name) == read(second / name)


def test_config_echo_reproduces_the_run(tmp_path):
    first, second = tmp_path / 'first', tmp_path / 'second'
    assert run(first, 'sample', '--model', 'weibull', '--n', '30', '--statistic', '2.5', '--chains', '20',
               '--horizon', '90', '--seed', '8', '--reset') == 0

    lines = read(first / 'config.txt').decode('utf-8').splitlines()
    assert 'model = weibull' in lines
    assert 'reset = true' in lines

    assert run(second, '--config', str(first / 'config.txt'), 'sample') == 0
    assert read(first / 'samples.csv') == read(second / 'samples.csv')
    assert read(first / 'summary.json') == read(second / 'summary.json')


def test_flags_override_config_file(tmp_path):
    path = tmp_path / 'run.txt'
    path.write_text(u'model = normal\nn = 10\nstatistic = 0.5\nchains = 7\n')

    assert run(tmp_path / 'out', '--config', str(path), 'sample', '--chains', '4', '--horizon', '30') == 0
    _, values = read_samples(str(tmp_path / 'out' / 'samples.csv'))
    assert values.shape == (4, 1)


def test_data_file(tmp_path):
    data = tmp_path / 'data.txt'
    data.write_text(u'0.5\n1.5\n1.0\n2.0\n')

    assert run(tmp_path / 'out', 'sample', '--model', 'exponential', '--data', str(data),
               '--chains', '5', '--horizon', '50') == 0
    summary = json.loads(read(tmp_path / 'out' / 'summary.json').decode('utf-8'))
    assert summary['n'] == 4
    assert summary['statistic'] == [1.25]

    assert run(tmp_path / 'bad', 'sample', '--model', 'exponential', '--data', str(data), '--n', '5') == EXIT_USAGE
    assert run(tmp_path / 'bad', 'sample', '--model', 'exponential', '--data', str(tmp_path / 'missing.txt')) \
        == EXIT_RUNTIME


def test_histograms(tmp_path):
    assert run(tmp_path, 'sample', '--bins', '5', *EXPONENTIAL) == 0
    assert os.path.exists(str(tmp_path / 'hist_t.csv'))

    out = tmp_path / 'hist'
    assert run(out, 'hist', '--samples', str(tmp_path / 'samples.csv'), '--bins', '7') == 0
    _, rows = read_samples(str(out / 'hist_t.csv'))
    assert rows.shape == (7, 3)
    assert rows[:, 2].sum() == 50


def test_compare_with_oracle(tmp_path):
    assert run(tmp_path, 'compare', *EXPONENTIAL) == 0

    document = json.loads(read(tmp_path / 'compare.json').decode('utf-8'))
    assert document['oracle']['kind'] == 'inverse-gamma'
    assert document['oracle']['parameters'] == {'shape': 20.0, 'scale': 20.0}
    assert 0.0 < document['ks'] <= 1.0

    lines = read(tmp_path / 'cdf.csv').decode('utf-8').splitlines()
    assert lines[0] == 'level,x,empirical,oracle'
    assert len(lines) == 100


def test_compare_with_reference(tmp_path):
    reference = tmp_path / 'reference'
    assert run(reference, 'sample', *EXPONENTIAL) == 0

    out = tmp_path / 'compare'
    assert run(out, 'compare', '--reference', str(reference / 'samples.csv'), *EXPONENTIAL) == 0
    document = json.loads(read(out / 'compare.json').decode('utf-8'))
    assert document['oracle']['kind'] == 'empirical'
    assert document['ks'] <= 1.0 / 50 + 1e-12


def test_compare_needs_a_scalar_model(tmp_path):
    assert run(tmp_path, 'compare', '--model', 'normalmv', '--n', '10', '--statistic', '0,1',
               '--chains', '5', '--horizon', '30') == EXIT_USAGE
    assert os.listdir(str(tmp_path)) == []


def test_diagnose(tmp_path):
    assert run(tmp_path, 'diagnose', '--model', 'uniform', '--n', '50', '--statistic', '0.96',
               '--upper', '200') == 0
    lines = read(tmp_path / 'diagnostics.csv').decode('utf-8').splitlines()
    assert lines[0] == 'diagnostic,m,term,partial_sum'
    diagnostics = set(line.split(',')[0] for line in lines[1:])
    assert {'kakutani', 'series1[t]', 'series2[t]', 'increment_sup'} <= diagnostics


def test_diagnose_without_product_form(tmp_path, capsys):
    assert run(tmp_path, 'diagnose', '--model', 'normal', '--n', '10', '--statistic', '0', '--upper', '60') == 0
    assert 'kakutani: not available' in capsys.readouterr().out


def test_regress(tmp_path):
    data = tmp_path / 'passengers.csv'
    data.write_text(u'age,survived\n' + u''.join(
        u'{},{}\n'.format(age, int(age % 3 == 0)) for age in range(1, 31)
    ))

    out = tmp_path / 'out'
    assert run(out, 'regress', '--data', str(data), '--response', 'survived', '--chains', '10',
               '--horizon', '80', '--seed', '2') == 0

    names, values = read_samples(str(out / 'samples.csv'))
    assert names == ['intercept', 'age']
    assert values.shape == (10, 2)

    summary = json.loads(read(out / 'summary.json').decode('utf-8'))
    assert len(summary['fit']['theta']) == 2
    assert summary['dataset']['rows'] == 30
    assert summary['dataset']['minimums'] == [1.0]

    assert run(tmp_path / 'theta', 'regress', '--data', str(data), '--response', 'survived',
               '--theta', '0', '--chains', '2', '--horizon', '40') == EXIT_USAGE


def test_regress_malformed_dataset(tmp_path):
    data = tmp_path / 'bad.csv'
    data.write_text(u'age,survived\n1,0\nold,1\n')
    assert run(tmp_path / 'out', 'regress', '--data', str(data), '--response', 'survived') == EXIT_RUNTIME
    assert not os.path.exists(str(tmp_path / 'out' / 'samples.csv'))


def test_failed_chains_exit_numeric(tmp_path, capsys):
    assert run(tmp_path, 'sample', '--model', 'weibull', '--floor', '10', '--n', '5', '--statistic', '10.001',
               '--chains', '20', '--horizon', '50') == EXIT_NUMERIC
    assert os.listdir(str(tmp_path)) == []
    assert 'numeric domain error' in capsys.readouterr().err

    assert run(tmp_path, 'sample', '--model', 'exponential', '--n', '5', '--statistic', '-1') == EXIT_NUMERIC


@pytest.mark.parametrize('args', [
    ['sample', '--model', 'cauchy', '--n', '5', '--statistic', '1'],
    ['sample', '--model', 'exponential', '--statistic', '1'],
    ['sample', '--model', 'exponential', '--n', '5'],
    ['sample', '--model', 'exponential', '--n', '5', '--statistic', '1', '--horizon', '5'],
    ['sample', '--model', 'exponential', '--n', '5', '--statistic', '1', '--data', 'data.txt'],
    ['sample', '--model', 'gamma', '--shape', '-1', '--n', '5', '--statistic', '1'],
    ['sample', '--model', 'copula', '--rho', '0.5', '--n', '5', '--statistic', '1'],
    ['sample', '--model', 'exponential', '--n', '5', '--statistic', '1', '--bins', '-2'],
])
def test_configuration_errors(tmp_path, args):
    assert run(tmp_path, *args) == EXIT_USAGE
    assert os.listdir(str(tmp_path)) == []


@pytest.mark.parametrize('args', [
    [],
    ['sample', '--no-such-flag'],
    ['sample', '--chains', 'many'],
    ['histogram'],
])
def test_usage_errors(tmp_path, args):
    with pytest.raises(SystemExit) as e:
        run(tmp_path, *args)
    assert e.value.code == EXIT_USAGE


def test_unknown_config_file_key(tmp_path):
    path = tmp_path / 'run.txt'
    path.write_text(u'model = exponential\ncolour = blue\n')
    with pytest.raises(SystemExit) as e:
        run(tmp_path, '--config', str(path), 'sample')
    assert e.value.code == EXIT_USAGE


@pytest.mark.slow
def test_compare_normal_against_its_oracle(tmp_path):
    assert run(tmp_path, 'compare', '--model', 'normal', '--n', '50', '--statistic', '0', '--chains', '10000',
               '--seed', '12') == 0
    document = json.loads(read(tmp_path / 'compare.json').decode('utf-8'))
    assert document['oracle']['kind'] == 'normal'
    assert document['ks'] < 0.05


@pytest.mark.slow
def test_compare_uniform_maximum_against_its_oracle(tmp_path):
    n, maximum = 50, 0.947
    assert run(tmp_path, 'compare', '--model', 'uniform', '--maximum', '--n', str(n), '--statistic', str(maximum),
               '--chains', '10000', '--horizon', str(n + 5000), '--seed', '14') == 0
    document = json.loads(read(tmp_path / 'compare.json').decode('utf-8'))
    assert document['oracle']['kind'] == 'pareto'
    assert document['oracle']['mean'] == pytest.approx(n * maximum / (n - 1.0), rel=1e-12)

    # the Doob mean is bracketed below the Pareto mean n x / (n - 1)
    sample = document['sample']
    se = sample['sd'] / np.sqrt(document['chains'])
    low, high = Uniform.mean_bounds(n, maximum)
    assert low - 4 * se <= sample['mean'] <= high + 4 * se
    assert high < document['oracle']['mean']
    assert 0.0 < document['ks'] < 1.0


def test_regress_single_chain(tmp_path):
    data = tmp_path / 'passengers.csv'
    data.write_text(u'age,survived\n' + u''.join(
        u'{},{}\n'.format(age, int(age % 2 == 0)) for age in range(1, 21)
    ))
    assert run(tmp_path / 'out', 'regress', '--data', str(data), '--response', 'survived', '--chains', '1',
               '--horizon', '60') == 0
    _, values = read_samples(str(tmp_path / 'out' / 'samples.csv'))
    assert values.shape == (1, 2)
