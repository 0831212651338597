"""
Regression chains: theta_m is updated by a normalized stochastic gradient
step on a synthetic response Y = g(x, Z, theta_m), with x drawn from a
Bayesian bootstrap of the observed covariate rows.
"""
import numpy as np

from fiducial import engine
from fiducial.config import Config, ConfigOption
from fiducial.model import FlaggedStep, ModelDomainError, ModelSpec, StepResult, draw_innovations
from fiducial.util import chain_generator


RESERVE_ROWS = 4


class BootstrapStream(object):
    """
    Per-chain covariate stream: one Dirichlet(n_1, ..., n_k) weight draw
    over the k distinct rows when the stream opens, then i.i.d. rows from
    the weighted empirical law.

    `draw(count)` returns a (count, 2 + reserve) array of
    [row index, innovation, reserve row indices...], the innovation
    coming from `innovation` (a `fiducial.model.Innovation` kind).
    """
    def __init__(self, rows, counts, rng, innovation=None, reserve=0):
        self.rows = rows
        self.counts = np.asarray(counts)
        self.rng = rng
        self.innovation = innovation
        self.reserve = reserve

        if self.counts.size == 1:
            self.weights = np.ones(1)
        else:
            self.weights = rng.dirichlet(self.counts.astype(float))

    def indices(self, size):
        return self.rng.choice(self.counts.size, size=size, p=self.weights)

    def draw_next(self):
        return self.rows[self.indices(None)]

    def draw(self, count):
        columns = [self.indices(count).astype(float)]
        if self.innovation is not None:
            columns.append(draw_innovations(self.innovation, self.rng, count))
        if self.reserve:
            columns.extend(self.indices((self.reserve, count)).astype(float))
        return np.column_stack(columns)


def bootstrap_covariate_stream(dataset, seed):
    rows, counts = dataset.distinct_rows()
    return BootstrapStream(rows, counts, chain_generator(seed))


def _update(model, X, theta, z, m):
    """
    theta' = theta - (Y - mu) mu' / ((m + 1) phi) with Y = g(x, z, theta).
    Returns the new block and phi.
    """
    mu = model.mean(X, theta)
    gradient = model.gradient(X, theta)
    phi = model.phi(X, theta)
    response = model.simulate(X, z, theta)
    with np.errstate(divide='ignore', invalid='ignore'):
        change = (response - mu)[..., None] * gradient / ((m + 1.0) * phi[..., None])
    return theta - change, phi


def sgd_fiducial_step(theta, x, z, m, model):
    """
    One regression update of a single chain.

    :raises FlaggedStep: when phi(x, theta) = 0
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    updated, phi = _update(model, x[None, :], theta[None, :], np.atleast_1d(z), m)
    if not phi[0] > 0:
        raise FlaggedStep(m, theta, z, 'phi(x, theta) = 0 at x = {!r}'.format(x.tolist()))
    return updated[0]


class RegressionChainConfig(Config):
    REDRAW = ConfigOption(
        converter=bool,
        default=False,
        description='Replace covariate rows with phi = 0 by a fresh bootstrap row instead of failing the chain'
    )


class RegressionChain(ModelSpec):
    """
    The chain of regression coefficients for one dataset and regression model.
    """
    NAME = 'regression'
    DISPLAY_NAME = 'Regression'

    Config = RegressionChainConfig

    violation_reason = 'phi(x, theta) = 0 or coefficients not finite'

    def __init__(self, dataset, model, redraw=False):
        self.dataset = dataset
        self.regression = model
        self.rows, self.counts = dataset.distinct_rows()
        ModelSpec.__init__(self, redraw=redraw)

    @property
    def INNOVATION(self):
        return self.regression.INNOVATION

    @property
    def coordinates(self):
        return self.dataset.columns

    @property
    def dimension(self):
        return self.dataset.p

    @property
    def reserve(self):
        return RESERVE_ROWS if self.config['REDRAW'] else 0

    def stream(self, rng):
        return BootstrapStream(self.rows, self.counts, rng, innovation=self.regression.INNOVATION,
                               reserve=self.reserve)

    def advance(self, state, z, m):
        state = np.asarray(state, dtype=float)
        z = np.asarray(z, dtype=float)
        X = self.rows[z[:, 0].astype(np.int64)]
        result, phi = _update(self.regression, X, state, z[:, 1], m)

        degenerate = ~(phi > 0)
        adjusted = None
        if self.reserve:
            adjusted = np.zeros(state.shape[0], dtype=bool)
            for r in range(self.reserve):
                if not degenerate.any():
                    break
                chains = np.flatnonzero(degenerate)
                X = self.rows[z[chains, 2 + r].astype(np.int64)]
                redrawn, phi = _update(self.regression, X, state[chains], z[chains, 1], m)
                fixed = phi > 0
                result[chains[fixed]] = redrawn[fixed]
                adjusted[chains[fixed]] = True
                degenerate[chains[fixed]] = False

        return StepResult(result, adjusted, degenerate)

    def step(self, state, z, m):
        return self.advance(state, z, m).state

    def initial_state(self, values, n):
        if n != self.dataset.n:
            raise ModelDomainError('regression chains start at n = {} rows, got n={}'.format(self.dataset.n, n))
        return ModelSpec.initial_state(self, values, n)

    def phi(self, state):
        return np.asarray(state, dtype=float)

    def phi_inverse(self, u):
        return np.asarray(u, dtype=float)

    def increment(self, state, z, m):
        state = np.asarray(state, dtype=float)
        z = np.asarray(z, dtype=float)
        X = self.rows[z[:, 0].astype(np.int64)]
        updated, _ = _update(self.regression, X, state, z[:, 1], m)
        return updated - state

    def conditional_moments(self, state, m, rng=None, draws=10000):
        """
        Moments over rows from the empirical covariate law and innovations.
        """
        if rng is None:
            raise ValueError('regression moments need a generator')
        state = np.atleast_2d(np.asarray(state, dtype=float))
        rows = rng.choice(self.counts.size, size=draws, p=self.counts / float(self.counts.sum()))
        z = np.column_stack([rows.astype(float), draw_innovations(self.INNOVATION, rng, draws)])

        first = np.empty(state.shape)
        second = np.empty(state.shape)
        for i, row in enumerate(state):
            g = self.increment(np.repeat(row[None, :], draws, axis=0), z, m)
            first[i] = g.mean(axis=0)
            second[i] = (g * g).mean(axis=0)
        return first, second


def run_regression_fiducial(dataset, model, theta_hat, chains=1000, horizon=None, master_seed=0,
                            redraw=False, workers=None, sink=None):
    """
    B regression chains from theta_hat at index n = dataset.n, each with its
    own bootstrap covariate stream and innovation stream.
    """
    chain = RegressionChain(dataset, model, redraw=redraw)
    return engine.sample_fiducial(chain, theta_hat, dataset.n, horizon=horizon, chains=chains,
                                  master_seed=master_seed, workers=workers, sink=sink)
