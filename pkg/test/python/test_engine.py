import numpy as np
import pytest
import scipy.special

from fiducial.engine import (
    CHAIN_BLOCK,
    ChainFailure,
    ChainState,
    normal_closed_form_sample,
    run_chain,
    sample_fiducial,
    step,
    tail_sum_inverse_squares,
    worker_count
)
from fiducial.model import FlaggedStep, ModelDomainError
from fiducial.models import Exponential, Gamma, Normal, NormalMeanVariance, Uniform, UniformPair, Weibull
from fiducial.oracles import fisher_oracle, ks_distance, ks_two_sample
from fiducial.sink import CollectingSink, NullSink
from fiducial.util import chain_generator, chain_seed


def within_se(values, expected, k=4.0):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / np.sqrt(values.size)
    return abs(values.mean() - expected) <= k * se


def test_step():
    state = step(Normal(sigma=1.0), ChainState(9, np.array([0.3])), 0.0)
    assert state.m == 10
    assert state.value.tolist() == [0.3]

    state = step(Exponential(), ChainState(5, np.array([2.0])), 0.0, m=5)
    assert state.value[0] == pytest.approx(2.0 * 5.0 / 6.0, rel=1e-15)

    with pytest.raises(ModelDomainError):
        step(Exponential(), ChainState(5, np.array([2.0])), 0.0, m=6)


def test_step_below_floor_is_flagged():
    with pytest.raises(FlaggedStep) as e:
        step(Weibull(floor=0.5), ChainState(1, np.array([0.6])), 40.0)
    assert e.value.m == 1
    assert e.value.state.tolist() == [0.6]
    assert float(e.value.z) == 40.0


def test_run_chain_is_deterministic():
    model = Exponential()
    first = run_chain(model, [1.0], 10, horizon=400, seed=5)
    second = run_chain(model, [1.0], 10, horizon=400, seed=5)
    other = run_chain(model, [1.0], 10, horizon=400, seed=6)

    assert first.m == 400
    assert np.array_equal(first.value, second.value)
    assert not np.array_equal(first.value, other.value)


def test_run_chain_composes_steps():
    seed = chain_seed(3, 0)
    terminal, path = run_chain(Normal(sigma=1.0), [0.5], 4, horizon=7, seed=seed, trajectory=True)

    z = chain_generator(seed).standard_normal(3)
    t = 0.5
    expected = [t]
    for m, value in zip((4, 5, 6), z):
        t = t + 1.0 * value / (m + 1.0)
        expected.append(t)

    assert path.shape == (4, 1)
    assert path[:, 0] == pytest.approx(expected, abs=1e-15)
    assert terminal.value[0] == pytest.approx(expected[-1], abs=1e-15)


def test_streams_do_not_depend_on_the_horizon():
    model = Exponential()
    seed = chain_seed(1, 7)
    short = run_chain(model, [1.0], 10, horizon=300, seed=seed)
    _, path = run_chain(model, [1.0], 10, horizon=700, seed=seed, trajectory=True)
    assert np.array_equal(short.value, path[300 - 10])


def test_run_chain_horizon_must_exceed_n():
    with pytest.raises(ModelDomainError):
        run_chain(Exponential(), [1.0], 10, horizon=10)


def test_single_chain_matches_run_chain():
    model = Exponential()
    sample_set = sample_fiducial(model, [1.0], 20, horizon=300, chains=1, master_seed=9,
                                 workers=1, sink=NullSink())
    chain = run_chain(model, [1.0], 20, horizon=300, seed=chain_seed(9, 0))
    assert np.array_equal(sample_set.samples[0], chain.value)


def test_chains_do_not_depend_on_chain_count():
    model = Normal(sigma=2.0)
    small = sample_fiducial(model, [0.0], 5, horizon=100, chains=3, master_seed=4, workers=1, sink=NullSink())
    large = sample_fiducial(model, [0.0], 5, horizon=100, chains=8, master_seed=4, workers=1, sink=NullSink())
    assert np.array_equal(small.samples, large.samples[:3])


@pytest.mark.parametrize('workers', [2, 4, 16])
def test_workers_do_not_change_samples(workers):
    model = Exponential()
    chains = 3 * CHAIN_BLOCK + 52
    serial = sample_fiducial(model, [1.0], 5, horizon=40, chains=chains, master_seed=11,
                             workers=1, sink=NullSink())
    parallel = sample_fiducial(model, [1.0], 5, horizon=40, chains=chains, master_seed=11,
                               workers=workers, sink=NullSink())

    assert serial.samples.shape == (chains, 1)
    assert np.array_equal(serial.samples, parallel.samples)
    assert serial.increment_sup == parallel.increment_sup


def test_sample_fiducial_arguments():
    with pytest.raises(ValueError):
        sample_fiducial(Exponential(), [1.0], 10, chains=0, sink=NullSink())
    with pytest.raises(ModelDomainError):
        sample_fiducial(Exponential(), [1.0], 10, horizon=5, sink=NullSink())
    with pytest.raises(ModelDomainError):
        sample_fiducial(Exponential(), [-1.0], 10, sink=NullSink())


def test_sample_set_summaries():
    sample_set = sample_fiducial(NormalMeanVariance(), [0.0, 1.0], 10, horizon=60, chains=50,
                                 master_seed=2, workers=1, sink=NullSink())
    summaries = sample_set.summaries
    assert sorted(summaries) == ['mean', 'variance']
    assert sorted(summaries['mean']['quantiles']) == [0.025, 0.25, 0.5, 0.75, 0.975]
    assert summaries['variance']['mean'] > 0
    assert sample_set.chains == 50


def test_failed_chains_are_collected():
    model = Weibull(floor=10.0)
    sink = CollectingSink()
    with pytest.raises(ChainFailure) as e:
        sample_fiducial(model, [10.001], 5, horizon=50, chains=20, master_seed=1, workers=1, sink=sink)

    events = e.value.events
    assert events
    assert e.value.chains == 20
    assert len(sink.events) == len(events)
    assert [event.chain for event in events] == sorted(set(event.chain for event in events))

    for event in events:
        assert 5 <= event.m < 50
        assert event.state[0] >= 10.0
        with pytest.raises(FlaggedStep):
            step(model, ChainState(event.m, event.state), event.z)


def test_reset_counts_adjustments():
    sink = CollectingSink()
    sample_set = sample_fiducial(Weibull(floor=10.0, reset=True), [10.001], 5, horizon=50, chains=20,
                                 master_seed=1, workers=1, sink=sink)
    assert sample_set.adjustments > 0
    assert (sample_set.samples >= 10.0).all()
    assert any('clamped or reset' in message.content for message in sink.warnings)


def test_increment_warning():
    sink = CollectingSink()
    sample_set = sample_fiducial(Exponential(), [1.0], 2, horizon=20, chains=50, master_seed=3,
                                 workers=1, sink=sink)
    assert sample_set.increment_sup > 0.05
    assert any('consider a longer horizon' in message.content for message in sink.warnings)

    sink = CollectingSink()
    sample_fiducial(Exponential(), [1.0], 2, horizon=20, chains=50, master_seed=3,
                    workers=1, sink=sink, increment_threshold=None)
    assert not sink.warnings


def test_worker_count(monkeypatch):
    monkeypatch.setenv('FIDUCIAL_WORKERS', '3')
    assert worker_count() == 3

    for value in ('0', 'many'):
        monkeypatch.setenv('FIDUCIAL_WORKERS', value)
        with pytest.raises(ValueError):
            worker_count()

    monkeypatch.delenv('FIDUCIAL_WORKERS')
    assert worker_count() >= 1


def test_tail_sum_inverse_squares():
    assert tail_sum_inverse_squares(1) == pytest.approx(np.pi ** 2 / 6.0 - 1.0, rel=1e-11)

    previous = None
    for n in range(1, 30):
        value = tail_sum_inverse_squares(n)
        assert 1.0 / (n + 1.0) < value < 1.0 / n
        if previous is not None:
            assert value < previous
        previous = value

    for n in (1, 10, 50, 10 ** 6):
        assert tail_sum_inverse_squares(n) == pytest.approx(float(scipy.special.polygamma(1, n + 1)), rel=1e-10)

    with pytest.raises(ValueError):
        tail_sum_inverse_squares(0)


def test_normal_closed_form_sample():
    values = normal_closed_form_sample(0.5, 2.0, 10, [0.0, 1.0])
    assert values[0] == 0.5
    assert values[1] == pytest.approx(0.5 + 2.0 * np.sqrt(tail_sum_inverse_squares(10)), rel=1e-15)

    with pytest.raises(ValueError):
        normal_closed_form_sample(0.5, 0.0, 10, [0.0])


@pytest.mark.slow
def test_normal_variance_acceptance():
    n, horizon, chains = 50, 2050, 100000
    sample_set = sample_fiducial(Normal(sigma=1.0), [0.0], n, horizon=horizon, chains=chains,
                                 master_seed=17, sink=NullSink())
    values = sample_set.samples[:, 0]

    variance = values.var(ddof=1)
    se = variance * np.sqrt(2.0 / (chains - 1.0))
    tail = tail_sum_inverse_squares(horizon)
    assert 1.0 / (n + 1.0) - tail - 4 * se <= variance <= 1.0 / n - tail + 4 * se
    assert within_se(values, 0.0)


@pytest.mark.slow
def test_normal_closed_form_matches_sequential():
    n, chains = 10, 100000
    sample_set = sample_fiducial(Normal(sigma=1.0), [0.0], n, horizon=n + 5000, chains=chains,
                                 master_seed=23, sink=NullSink())
    z = np.random.default_rng(23).standard_normal(chains)
    closed = normal_closed_form_sample(0.0, 1.0, n, z)

    assert ks_two_sample(sample_set.samples[:, 0], closed) < 0.015


@pytest.mark.slow
def test_exponential_acceptance():
    n = 100
    model = Exponential()

    sample_set = sample_fiducial(model, [1.0], n, horizon=n + 10000, chains=40000,
                                 master_seed=31, sink=NullSink())
    oracle = model.oracle(sample_set.statistic, n)
    assert oracle.kind == 'inverse-gamma'
    assert ks_distance(sample_set.samples[:, 0], oracle) < 0.05

    sample_set = sample_fiducial(model, [1.0], n, horizon=n + 10000, chains=10000,
                                 master_seed=37, sink=NullSink())
    assert within_se(sample_set.samples[:, 0], 1.0)


@pytest.mark.slow
def test_uniform_mean_acceptance():
    n = 50
    model = Uniform(maximum=True)
    sample_set = sample_fiducial(model, [0.947], n, horizon=n + 5000, chains=10000,
                                 master_seed=41, sink=NullSink())
    values = sample_set.samples[:, 0]

    low, high = Uniform.mean_bounds(n, 0.947)
    se = values.std(ddof=1) / np.sqrt(values.size)
    assert low - 4 * se <= values.mean() <= high + 4 * se
    assert fisher_oracle('uniform', 0.947, n).kind == 'pareto'


@pytest.mark.slow
def test_normalmv_coordinates_are_uncorrelated():
    sample_set = sample_fiducial(NormalMeanVariance(), [0.0, 1.0], 50, chains=1000,
                                 master_seed=43, sink=NullSink())
    correlation = np.corrcoef(sample_set.samples[:, 0], sample_set.samples[:, 1])[0, 1]
    assert abs(correlation) < 0.1


@pytest.mark.slow
def test_weibull_acceptance():
    sample_set = sample_fiducial(Weibull(), [3.0], 50, chains=1000, master_seed=47, sink=NullSink())
    values = sample_set.samples[:, 0]
    assert (values > 0).all()
    assert abs(values.mean() - 3.0) < 0.25


@pytest.mark.slow
@pytest.mark.parametrize('model, statistic', [
    (Exponential(), [1.0]),
    (Gamma(shape=2.0), [1.0]),
    (Normal(sigma=1.0), [0.0]),
    (NormalMeanVariance(), [0.0, 1.0]),
    (Uniform(), [0.947]),
    (UniformPair(), [0.5, 0.25]),
    (Weibull(), [3.0]),
], ids=lambda value: getattr(value, 'NAME', None))
def test_doubling_the_horizon_keeps_summary_means(model, statistic):
    n, chains = 50, 2000
    short = sample_fiducial(model, statistic, n, chains=chains, master_seed=53, sink=NullSink())
    long = sample_fiducial(model, statistic, n, horizon=2 * short.horizon, chains=chains,
                           master_seed=53, sink=NullSink())

    se = np.hypot(short.samples.std(axis=0, ddof=1), long.samples.std(axis=0, ddof=1)) / np.sqrt(chains)
    assert (np.abs(long.samples.mean(axis=0) - short.samples.mean(axis=0)) < 3 * se).all()
