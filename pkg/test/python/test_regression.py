import numpy as np
import pytest

from fiducial.engine import ChainFailure
from fiducial.model import FlaggedStep, ModelDomainError
from fiducial.regression import (
    DatasetError,
    LinearModel,
    LogisticModel,
    RegressionChain,
    RegressionDataset,
    bootstrap_covariate_stream,
    fit_least_squares,
    load_regression_csv,
    run_regression_fiducial,
    sgd_fiducial_step
)
from fiducial.sink import NullSink
from fiducial.util import chain_generator


def within_se(values, expected, k=4.0):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / np.sqrt(values.size)
    return abs(values.mean() - expected) <= k * se


@pytest.fixture
def passengers(tmp_path):
    path = tmp_path / 'passengers.csv'
    path.write_text(u'age,sex,survived\n10,0,1\n20,1,0\n\n30,0,1\n')
    return str(path)


def test_load_regression_csv(passengers):
    dataset = load_regression_csv(passengers, 'survived')
    assert dataset.columns == ('intercept', 'age', 'sex')
    assert dataset.n == 3
    assert dataset.X[:, 0].tolist() == [1.0, 1.0, 1.0]
    assert dataset.X[:, 1].tolist() == [0.0, 0.5, 1.0]
    assert dataset.X[:, 2].tolist() == [0.0, 1.0, 0.0]
    assert dataset.y.tolist() == [1.0, 0.0, 1.0]

    raw = load_regression_csv(passengers, 'survived', standardize=False, intercept=False, columns=['age'])
    assert raw.columns == ('age',)
    assert raw.X[:, 0].tolist() == [10.0, 20.0, 30.0]
    assert not raw.standardized


def test_load_regression_csv_errors(tmp_path, passengers):
    with pytest.raises(DatasetError) as e:
        load_regression_csv(passengers, 'fare')
    assert e.value.row == 1
    assert e.value.column == 'fare'

    path = tmp_path / 'bad.csv'
    path.write_text(u'age,survived\n10,1\nabc,0\n')
    with pytest.raises(DatasetError) as e:
        load_regression_csv(str(path), 'survived')
    assert e.value.row == 3
    assert e.value.column == 'age'

    path.write_text(u'age,survived\n10,1\n20\n')
    with pytest.raises(DatasetError) as e:
        load_regression_csv(str(path), 'survived')
    assert e.value.row == 3

    path.write_text(u'age,survived\n10,1\n10,0\n')
    with pytest.raises(DatasetError) as e:
        load_regression_csv(str(path), 'survived')
    assert e.value.column == 'age'

    path.write_text(u'age,survived\n')
    with pytest.raises(DatasetError):
        load_regression_csv(str(path), 'survived')


def test_standardization(passengers):
    dataset = load_regression_csv(passengers, 'survived')
    assert dataset.destandardize() == pytest.approx(np.array([[10.0, 0.0], [20.0, 1.0], [30.0, 0.0]]))

    again = dataset.standardize()
    assert np.array_equal(again.X, dataset.X)
    assert again.minimums == pytest.approx(dataset.minimums)
    assert again.maximums == pytest.approx(dataset.maximums)


def test_distinct_rows():
    dataset = RegressionDataset.from_arrays([[1.0], [0.0], [1.0], [1.0]], [0, 1, 1, 0])
    rows, counts = dataset.distinct_rows()
    assert rows.tolist() == [[0.0], [1.0]]
    assert counts.tolist() == [1, 3]


def test_fit_intercept_only_logistic():
    y = [1.0] * 6 + [0.0] * 4
    dataset = RegressionDataset.from_arrays(np.empty((10, 0)), y, columns=[], intercept=True)
    assert dataset.p == 1

    result = fit_least_squares(dataset, LogisticModel())
    assert result.status == 'converged'
    assert result.theta[0] == pytest.approx(np.log(1.5), abs=1e-6)

    result = fit_least_squares(dataset, LogisticModel(), init=[np.log(1.5)])
    assert result.iterations == 0


def test_fit_linear_recovers_coefficients():
    rng = np.random.default_rng(4)
    covariates = rng.uniform(size=(40, 2))
    theta = np.array([0.5, -1.5, 2.0])
    dataset = RegressionDataset.from_arrays(covariates, np.column_stack([np.ones(40), covariates]) @ theta,
                                            intercept=True)

    result = fit_least_squares(dataset, LinearModel(sigma=1.0))
    assert result.theta == pytest.approx(theta, abs=1e-6)
    assert result.loss < 1e-12


def test_logistic_formulas():
    model = LogisticModel()
    X = np.array([[1.0, 1.0], [1.0, -0.5]])
    theta = np.zeros(2)
    assert model.mean(X, theta).tolist() == [0.5, 0.5]
    assert model.gradient(X, theta).tolist() == [[0.25, 0.25], [0.25, -0.125]]
    assert model.phi(X, theta).tolist() == [0.125, 0.125]


def test_sgd_step():
    model = LogisticModel()
    m = 9
    assert sgd_fiducial_step([0.0], [1.0], 0.7, m, model)[0] == pytest.approx(1.0 / (m + 1.0), rel=1e-15)
    assert sgd_fiducial_step([0.0], [1.0], 0.2, m, model)[0] == pytest.approx(-1.0 / (m + 1.0), rel=1e-15)

    with pytest.raises(FlaggedStep):
        sgd_fiducial_step([0.0], [0.0], 0.2, m, model)


def test_sgd_step_moments():
    model = LogisticModel()
    theta, x, m = np.array([0.3, -0.2]), np.array([1.0, 0.5]), 9
    u = chain_generator(11).random(20000)
    changes = np.array([sgd_fiducial_step(theta, x, z, m, model) for z in u]) - theta

    bound = 1.0 / (m + 1.0) ** 2
    for j in range(theta.size):
        assert within_se(changes[:, j], 0.0)
        assert changes[:, j].var(ddof=1) <= 1.01 * bound

    # the coordinate with the largest |mu'_j| attains the bound
    assert changes[:, 0].var(ddof=1) == pytest.approx(bound, rel=0.01)
    assert changes[:, 1].var(ddof=1) == pytest.approx(0.25 * bound, rel=0.01)


def test_linear_model_sigma():
    with pytest.raises(ValueError):
        LinearModel(sigma=0.0)
    assert LinearModel(sigma=2.0).phi(np.array([[1.0, -3.0]]), np.zeros(2))[0] == pytest.approx(6.0)


def test_bootstrap_stream():
    dataset = RegressionDataset.from_arrays([[2.0]] * 5, [0, 1, 0, 1, 1])
    stream = bootstrap_covariate_stream(dataset, 3)
    assert [stream.draw_next().tolist() for _ in range(5)] == [[2.0]] * 5

    dataset = RegressionDataset.from_arrays([[0.0], [0.0], [0.0], [1.0]], [0, 1, 0, 1])
    weights = [bootstrap_covariate_stream(dataset, seed).weights[0] for seed in range(2000)]
    assert within_se(weights, 0.75)


def test_stream_layout():
    dataset = RegressionDataset.from_arrays([[0.0], [1.0], [1.0]], [0, 1, 1])
    chain = RegressionChain(dataset, LogisticModel(), redraw=True)
    block = chain.stream(chain_generator(1)).draw(7)
    assert block.shape == (7, 2 + chain.reserve)
    assert set(block[:, 0].tolist()) <= {0.0, 1.0}
    assert ((block[:, 1] >= 0) & (block[:, 1] < 1)).all()


def test_chain_start_index():
    dataset = RegressionDataset.from_arrays([[0.0], [1.0]], [0, 1])
    chain = RegressionChain(dataset, LogisticModel())
    with pytest.raises(ModelDomainError):
        chain.initial_state([0.0], 3)
    assert chain.initial_state([0.0], 2).tolist() == [0.0]


def test_degenerate_rows_fail_or_are_redrawn():
    X = [[0.0]] + [[1.0]] * 49
    y = [0.0, 1.0] * 25
    dataset = RegressionDataset.from_arrays(X, y)

    with pytest.raises(ChainFailure):
        run_regression_fiducial(dataset, LogisticModel(), [0.0], chains=20, horizon=100,
                                master_seed=2, workers=1, sink=NullSink())

    sample_set = run_regression_fiducial(dataset, LogisticModel(), [0.0], chains=20, horizon=100,
                                         master_seed=2, redraw=True, workers=1, sink=NullSink())
    assert sample_set.adjustments > 0
    assert np.isfinite(sample_set.samples).all()


def test_regression_chains_are_deterministic():
    rng = np.random.default_rng(6)
    covariates = rng.uniform(size=(30, 2))
    y = (rng.uniform(size=30) < 0.5).astype(float)
    dataset = RegressionDataset.from_arrays(covariates, y, intercept=True)

    first = run_regression_fiducial(dataset, LogisticModel(), np.zeros(3), chains=10, horizon=60,
                                    master_seed=5, workers=1, sink=NullSink())
    second = run_regression_fiducial(dataset, LogisticModel(), np.zeros(3), chains=10, horizon=60,
                                     master_seed=5, workers=1, sink=NullSink())
    assert np.array_equal(first.samples, second.samples)
    assert first.columns()[0] == ['intercept', 'x1', 'x2']


@pytest.mark.slow
def test_logistic_fiducial_variance_acceptance():
    rng = np.random.default_rng(0)
    n = 200
    covariates = rng.uniform(size=(n, 2))
    design = np.column_stack([np.ones(n), covariates])
    y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-design @ np.array([-0.5, 1.0, -1.0])))).astype(float)
    dataset = RegressionDataset.from_arrays(covariates, y, standardize=True, intercept=True)

    model = LogisticModel()
    theta_hat = fit_least_squares(dataset, model).theta
    horizon, chains = n + 1000, 10000
    sample_set = run_regression_fiducial(dataset, model, theta_hat, chains=chains, horizon=horizon,
                                         master_seed=9, sink=NullSink())

    bound = np.sum(1.0 / np.arange(n + 1, horizon + 1, dtype=float) ** 2)
    variances = sample_set.samples.var(axis=0, ddof=1)
    assert (variances <= bound + 4 * variances * np.sqrt(2.0 / (chains - 1.0))).all()

    chain = RegressionChain(dataset, model)
    draws = 100000
    rows = rng.choice(chain.counts.size, size=draws, p=chain.counts / float(chain.counts.sum()))
    z = np.column_stack([rows.astype(float), rng.uniform(size=draws)])
    increments = chain.increment(np.repeat(theta_hat[None, :], draws, axis=0), z, n)
    for j in range(dataset.p):
        assert within_se(increments[:, j], 0.0)
