"""
Model families: update rules H_m, their (phi, g_m) decompositions,
conditional moments and domain checks.

Every family works on blocks of chains at once, `state` has shape
(chains, dimension) and `z` has shape (chains,).
"""
import copy

import numpy as np
import scipy.integrate
import scipy.optimize
import scipy.special

from fiducial.config import Config, ConfigOption, InvalidHyperparameter, one_of
from fiducial.model import (
    Innovation,
    ModelDomainError,
    ModelSpec,
    StepResult,
    UnsupportedModel
)
from fiducial.util import positive_int


def _scalar(state):
    return np.asarray(state, dtype=float)[:, 0]


def _block(values):
    return np.asarray(values, dtype=float)[:, None]


def _positive(state):
    state = np.asarray(state, dtype=float)
    return ~(np.isfinite(state).all(axis=1) & (state > 0).all(axis=1))


def _sample(data, minimum=1):
    data = np.asarray(data, dtype=float).ravel()
    if data.size < minimum:
        raise ModelDomainError('expected at least {} observation(s), got {}'.format(minimum, data.size))
    if not np.isfinite(data).all():
        raise ModelDomainError('observations must be finite')
    return data


class ScalarLogModel(ModelSpec):
    """
    Multiplicative scalar chains T_{m+1} = T_m * factor_m(z), decomposed with
    phi = log and g_m = log(factor_m).
    """
    violation_reason = 't must be positive and finite'

    def factor(self, z, m):
        raise NotImplementedError

    def step(self, state, z, m):
        return _block(_scalar(state) * self.factor(z, m))

    def violations(self, state):
        return _positive(state)

    def phi(self, state):
        return np.log(state)

    def phi_inverse(self, u):
        return np.exp(u)

    def increment(self, state, z, m):
        return _block(np.broadcast_to(np.log(self.factor(z, m)), (np.shape(state)[0],)))


class GammaConfig(Config):
    SHAPE = ConfigOption(
        converter=float,
        default=1.0,
        description='Known shape a of the gamma observations (gamma)'
    )


class Gamma(ScalarLogModel):
    """
    Gamma observations with known shape a, statistic T = sample mean.
    H_m(t, z) = t (m + z/a) / (m + 1) with z ~ Gamma(a, 1).
    """
    NAME = 'gamma'
    DISPLAY_NAME = 'Gamma (known shape)'
    INNOVATION = Innovation.GAMMA

    Config = GammaConfig

    def validate(self):
        ScalarLogModel.validate(self)
        self.require('SHAPE', lambda a: a > 0 and np.isfinite(a), 'shape > 0')

    @property
    def shape(self):
        return self.config['SHAPE']

    @property
    def innovation_shape(self):
        return self.shape

    def factor(self, z, m):
        return (m + np.asarray(z) / self.shape) / (m + 1.0)

    def observed_statistic(self, data):
        data = _sample(data)
        if (data <= 0).any():
            raise ModelDomainError('gamma observations must be positive')
        return np.array([data.mean()])

    def to_parameter(self, samples):
        return self.shape / np.asarray(samples, dtype=float)

    def oracle(self, statistic, n):
        from fiducial.oracles import fisher_oracle
        return fisher_oracle('gamma', float(np.ravel(statistic)[0]), n, shape=self.shape)


class Exponential(ScalarLogModel):
    """
    Exponential observations with mean theta, statistic T = sample mean.
    H_m(t, z) = t (m + z) / (m + 1) with z ~ Exp(1).
    """
    NAME = 'exponential'
    DISPLAY_NAME = 'Exponential'
    INNOVATION = Innovation.EXPONENTIAL

    def factor(self, z, m):
        return (m + np.asarray(z)) / (m + 1.0)

    def kakutani_term(self, m):
        m = float(m)

        def integrand(z):
            ratio = (m + z) / (m + 1.0)
            return (1.0 - z) / ((m + 1.0) * (1.0 + np.sqrt(ratio))) * np.exp(-z)

        value, _ = scipy.integrate.quad(integrand, 0.0, np.inf, epsabs=1e-15, epsrel=1e-10, limit=200)
        return value

    def observed_statistic(self, data):
        data = _sample(data)
        if (data < 0).any():
            raise ModelDomainError('exponential observations must be non-negative')
        if data.sum() <= 0:
            raise ModelDomainError('exponential sample mean must be positive')
        return np.array([data.mean()])

    def oracle(self, statistic, n):
        from fiducial.oracles import fisher_oracle
        return fisher_oracle('exponential', float(np.ravel(statistic)[0]), n)


class UniformConfig(Config):
    MAXIMUM = ConfigOption(
        converter=bool,
        default=False,
        description='The statistic is the sample maximum x_(n), not (n+1)/n x_(n) (uniform)'
    )


class Uniform(ScalarLogModel):
    """
    Uniform on [0, theta], statistic T = (n+1)/n max(x).
    H_m(t, u) = (m+2)/(m+1) max(m/(m+1), u) t. Not a martingale.
    """
    NAME = 'uniform'
    DISPLAY_NAME = 'Uniform [0, theta]'
    INNOVATION = Innovation.UNIFORM
    MARTINGALE = False

    Config = UniformConfig

    def factor(self, z, m):
        return (m + 2.0) / (m + 1.0) * np.maximum(m / (m + 1.0), z)

    @staticmethod
    def factor_mean(m):
        """
        mu_m = E(factor_m), which is below one for every m >= 1.
        """
        m = float(m)
        return (m + 2.0) / (m + 1.0) * m / (m + 1.0) * (1.0 + 1.0 / (2.0 * m * (m + 1.0)))

    @staticmethod
    def mean_bounds(n, maximum):
        """
        Bracket of the Doob fiducial mean started from the sample maximum.
        """
        return maximum, maximum * np.exp(1.0 / (2.0 * n))

    @staticmethod
    def statistic_from_maximum(maximum, n):
        return (n + 1.0) / n * maximum

    @staticmethod
    def maximum_from_statistic(statistic, n):
        return n * statistic / (n + 1.0)

    def kakutani_term(self, m):
        m = float(m)
        numerator = 2.0 / 3.0 * np.sqrt((m + 1.0) / m) + m / (3.0 * (m + 1.0))
        denominator = np.sqrt(1.0 + 0.5 * (1.0 / m - 1.0 / (m + 1.0)))
        return 1.0 - numerator / denominator

    def initial_state(self, values, n):
        if self.config['MAXIMUM']:
            values = self.statistic_from_maximum(np.asarray(values, dtype=float), n)
        return ScalarLogModel.initial_state(self, values, n)

    def observed_statistic(self, data):
        data = _sample(data)
        if (data < 0).any():
            raise ModelDomainError('uniform [0, theta] observations must be non-negative')
        return np.array([self.statistic_from_maximum(data.max(), data.size)])

    def oracle(self, statistic, n):
        from fiducial.oracles import fisher_oracle
        maximum = self.maximum_from_statistic(float(np.ravel(statistic)[0]), n)
        return fisher_oracle('uniform', maximum, n)


class NormalConfig(Config):
    SIGMA = ConfigOption(
        converter=float,
        default=1.0,
        description='Known standard deviation of the observations (normal)'
    )


class Normal(ModelSpec):
    """
    Normal observations with known sigma, statistic T = sample mean.
    H_m(t, z) = t + sigma z / (m + 1).
    """
    NAME = 'normal'
    DISPLAY_NAME = 'Normal (known sigma)'
    INNOVATION = Innovation.NORMAL

    Config = NormalConfig

    def validate(self):
        ModelSpec.validate(self)
        self.require('SIGMA', lambda s: s > 0 and np.isfinite(s), 'sigma > 0')

    @property
    def sigma(self):
        return self.config['SIGMA']

    def step(self, state, z, m):
        return _block(_scalar(state) + self.sigma * np.asarray(z) / (m + 1.0))

    def phi(self, state):
        return np.asarray(state, dtype=float)

    def phi_inverse(self, u):
        return np.asarray(u, dtype=float)

    def increment(self, state, z, m):
        return _block(np.broadcast_to(self.sigma * np.asarray(z) / (m + 1.0), (np.shape(state)[0],)))

    def conditional_moments(self, state, m, rng=None, draws=10000):
        state = np.atleast_2d(state)
        first = np.zeros(state.shape)
        second = np.full(state.shape, self.sigma ** 2 / (m + 1.0) ** 2)
        return first, second

    def observed_statistic(self, data):
        return np.array([_sample(data).mean()])

    def oracle(self, statistic, n):
        from fiducial.oracles import fisher_oracle
        return fisher_oracle('normal', float(np.ravel(statistic)[0]), n, sigma=self.sigma)


class NormalMeanVarianceConfig(Config):
    CLAMP = ConfigOption(
        converter=bool,
        default=False,
        description='Clamp the variance chain from above at --clamp-limit (normalmv)'
    )
    CLAMP_LIMIT = ConfigOption(
        converter=float,
        default=1e6,
        description='Upper bound used by --clamp (normalmv)'
    )


class NormalMeanVariance(ModelSpec):
    """
    Normal observations with unknown mean and variance, state (t1, t2) =
    (sample mean, sample variance):

        t1' = t1 + sqrt(t2) z / (m + 1)
        t2' = t2 (1 - 1/m + z^2 / (m + 1))

    The variance drifts by -t2 / (m (m + 1)) per step, so the pair is not a
    martingale.
    """
    NAME = 'normalmv'
    DISPLAY_NAME = 'Normal (unknown mean and variance)'
    INNOVATION = Innovation.NORMAL
    COORDINATES = ('mean', 'variance')
    MIN_INDEX = 2
    MARTINGALE = False

    Config = NormalMeanVarianceConfig

    violation_reason = 'variance must be positive and finite'

    def validate(self):
        ModelSpec.validate(self)
        self.require('CLAMP_LIMIT', lambda c: c > 0, 'clamp_limit > 0')

    def _check_index(self, m):
        if m < self.MIN_INDEX:
            raise ModelDomainError('normalmv: updates need m >= 2, got m={}'.format(m))

    def step(self, state, z, m):
        return self.advance(state, z, m).state

    def advance(self, state, z, m):
        self._check_index(m)
        state = np.asarray(state, dtype=float)
        z = np.asarray(z, dtype=float)
        mean, variance = state[:, 0], state[:, 1]

        result = np.empty_like(state)
        result[:, 0] = mean + np.sqrt(variance) * z / (m + 1.0)
        result[:, 1] = variance * (1.0 - 1.0 / m + z * z / (m + 1.0))

        adjusted = None
        if self.config['CLAMP']:
            limit = self.config['CLAMP_LIMIT']
            adjusted = result[:, 1] > limit
            result[adjusted, 1] = limit
        return StepResult(result, adjusted, None)

    def violations(self, state):
        state = np.asarray(state, dtype=float)
        return ~(np.isfinite(state).all(axis=1) & (state[:, 1] > 0))

    def phi(self, state):
        return np.asarray(state, dtype=float)

    def phi_inverse(self, u):
        return np.asarray(u, dtype=float)

    def increment(self, state, z, m):
        self._check_index(m)
        state = np.asarray(state, dtype=float)
        z = np.asarray(z, dtype=float)
        g = np.empty(np.broadcast(state[:, 0], z).shape + (2,))
        g[:, 0] = np.sqrt(state[:, 1]) * z / (m + 1.0)
        g[:, 1] = state[:, 1] * (z * z / (m + 1.0) - 1.0 / m)
        return g

    def conditional_moments(self, state, m, rng=None, draws=10000):
        self._check_index(m)
        state = np.atleast_2d(np.asarray(state, dtype=float))
        variance = state[:, 1]
        m = float(m)

        first = np.zeros(state.shape)
        first[:, 1] = -variance / (m * (m + 1.0))

        second = np.empty(state.shape)
        second[:, 0] = variance / (m + 1.0) ** 2
        second[:, 1] = variance ** 2 * (3.0 / (m + 1.0) ** 2 - 2.0 / (m * (m + 1.0)) + 1.0 / m ** 2)
        return first, second

    def observed_statistic(self, data):
        data = _sample(data, minimum=2)
        return np.array([data.mean(), data.var(ddof=1)])


class WeibullConfig(Config):
    FLOOR = ConfigOption(
        converter=float,
        default=1e-8,
        description='Positivity floor of the shape chain (weibull)'
    )
    RESET = ConfigOption(
        converter=bool,
        default=False,
        description='Reset steps that fall below --floor to the floor instead of failing the chain (weibull)'
    )


class Weibull(ModelSpec):
    """
    Unit-scale Weibull with shape theta, f(x) = theta x^(theta-1) exp(-x^theta).
    Score-driven updates t' = t + s(x; t) / (m + 1) with x = z^(1/t).
    """
    NAME = 'weibull'
    DISPLAY_NAME = 'Weibull (shape)'
    INNOVATION = Innovation.EXPONENTIAL

    Config = WeibullConfig

    # E((1 + (1 - Z) log Z)^2) for Z ~ Exp(1)
    SCORE_INFORMATION = (1.0 - np.euler_gamma) ** 2 + np.pi ** 2 / 6.0

    def validate(self):
        ModelSpec.validate(self)
        self.require('FLOOR', lambda e: e > 0, 'floor > 0')

    @property
    def floor(self):
        return self.config['FLOOR']

    @property
    def violation_reason(self):
        return 't must stay above the floor {!r}'.format(self.floor)

    @staticmethod
    def score(x, theta):
        """
        s(x; theta) = 1/theta + log x - x^theta log x
        """
        x = np.asarray(x, dtype=float)
        log_x = np.log(x)
        return 1.0 / theta + log_x - np.power(x, theta) * log_x

    @staticmethod
    def innovation_score(z, theta):
        """
        The score at x = z^(1/theta), evaluated without forming x.
        """
        z = np.asarray(z, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            return (1.0 + (1.0 - z) * np.log(z)) / theta

    def step(self, state, z, m):
        return self.advance(state, z, m).state

    def advance(self, state, z, m):
        t = _scalar(state)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            result = t + self.innovation_score(z, t) / (m + 1.0)

        adjusted = None
        if self.config['RESET']:
            adjusted = ~(result > self.floor)
            result = np.where(adjusted, self.floor, result)
        return StepResult(_block(result), adjusted, None)

    def violations(self, state):
        state = np.asarray(state, dtype=float)
        inside = state > self.floor
        if self.config['RESET']:
            # reset chains sit exactly on the floor
            inside |= state == self.floor
        return ~(np.isfinite(state).all(axis=1) & inside.all(axis=1))

    def phi(self, state):
        return np.asarray(state, dtype=float)

    def phi_inverse(self, u):
        return np.asarray(u, dtype=float)

    def increment(self, state, z, m):
        return _block(self.innovation_score(z, _scalar(state)) / (m + 1.0))

    def conditional_moments(self, state, m, rng=None, draws=10000):
        state = np.atleast_2d(np.asarray(state, dtype=float))
        first = np.zeros(state.shape)
        second = self.SCORE_INFORMATION / (state * (m + 1.0)) ** 2
        return first, second

    def observed_statistic(self, data):
        """
        Maximum likelihood shape: the root of the summed score.
        """
        data = _sample(data)
        if (data <= 0).any():
            raise ModelDomainError('weibull observations must be positive')
        log_x = np.log(data)
        if np.all(log_x == 0):
            raise ModelDomainError('weibull shape is not identified when every observation equals 1')

        def total_score(theta):
            return data.size / theta + log_x.sum() - np.sum(np.power(data, theta) * log_x)

        low, high = 1e-3, 1.0
        while total_score(high) > 0:
            high *= 2.0
            if high > 1e6:
                raise ModelDomainError('weibull shape estimate diverges')
        while total_score(low) < 0:
            low /= 2.0
            if low < 1e-12:
                raise ModelDomainError('weibull shape estimate collapses to zero')
        return np.array([scipy.optimize.brentq(total_score, low, high, xtol=1e-14)])


class UniformPair(ModelSpec):
    """
    Uniform on [a - b, a + b], state (a, b) = (mid-range, unbiased half width).
    With v = (u - m/(m+1))^+ and w = (1/(m+1) - u)^+:

        a' = a + b (v - w)
        b' = b (1 - 2/(m(m+1)) + (m+2)/m (v + w))
    """
    NAME = 'uniform2'
    DISPLAY_NAME = 'Uniform [a - b, a + b]'
    INNOVATION = Innovation.UNIFORM
    COORDINATES = ('a', 'b')
    MIN_INDEX = 2
    MARTINGALE = False

    violation_reason = 'half width must be positive and finite'

    def _check_index(self, m):
        if m < self.MIN_INDEX:
            raise ModelDomainError('uniform2: updates need m >= 2, got m={}'.format(m))

    @staticmethod
    def tails(u, m):
        u = np.asarray(u, dtype=float)
        v = np.maximum(u - m / (m + 1.0), 0.0)
        w = np.maximum(1.0 / (m + 1.0) - u, 0.0)
        return v, w

    @staticmethod
    def contraction(m):
        return 1.0 - 2.0 / (m * (m + 1.0))

    def step(self, state, z, m):
        self._check_index(m)
        state = np.asarray(state, dtype=float)
        a, b = state[:, 0], state[:, 1]
        v, w = self.tails(z, m)

        result = np.empty_like(state)
        result[:, 0] = a + b * (v - w)
        result[:, 1] = b * (self.contraction(m) + (m + 2.0) / m * (v + w))
        return result

    def violations(self, state):
        state = np.asarray(state, dtype=float)
        return ~(np.isfinite(state).all(axis=1) & (state[:, 1] > 0))

    def phi(self, state):
        state = np.asarray(state, dtype=float)
        return np.column_stack([state[:, 0], np.log(state[:, 1])])

    def phi_inverse(self, u):
        u = np.asarray(u, dtype=float)
        return np.column_stack([u[:, 0], np.exp(u[:, 1])])

    def increment(self, state, z, m):
        self._check_index(m)
        state = np.asarray(state, dtype=float)
        v, w = self.tails(z, m)
        g = np.empty(np.broadcast(state[:, 0], v).shape + (2,))
        g[:, 0] = state[:, 1] * (v - w)
        g[:, 1] = np.log(self.contraction(m) + (m + 2.0) / m * (v + w))
        return g

    def conditional_moments(self, state, m, rng=None, draws=10000):
        self._check_index(m)
        state = np.atleast_2d(np.asarray(state, dtype=float))
        m = float(m)
        c0 = self.contraction(m)
        k = (m + 2.0) / m
        delta = 1.0 / (m + 1.0)

        def f1(y):
            return y * np.log(y) - y

        def f2(y):
            log_y = np.log(y)
            return y * (log_y * log_y - 2.0 * log_y + 2.0)

        # g_{m,1} is constant (log c0) on the middle band and log(c0 + k y)
        # on each tail, y running over [0, delta]
        log_c0 = np.log(c0)
        mean_log = (1.0 - 2.0 * delta) * log_c0 + 2.0 / k * (f1(c0 + k * delta) - f1(c0))
        mean_log_sq = (1.0 - 2.0 * delta) * log_c0 ** 2 + 2.0 / k * (f2(c0 + k * delta) - f2(c0))

        first = np.empty(state.shape)
        first[:, 0] = 0.0
        first[:, 1] = mean_log

        second = np.empty(state.shape)
        second[:, 0] = 2.0 * state[:, 1] ** 2 / (3.0 * (m + 1.0) ** 3)
        second[:, 1] = mean_log_sq
        return first, second

    @classmethod
    def series_bounds(cls, m):
        """
        Lower and upper bounds of E(g_{m,1}) and the upper bound of
        E(g_{m,1}^2) that make both series summable.
        """
        m = float(m)
        log_c0 = np.log(cls.contraction(m))
        log_top = np.log1p(1.0 / (m + 1.0))
        return dict(
            mean_lower=log_c0,
            mean_upper=log_c0 * (m - 1.0) / (m + 1.0) + log_top * 2.0 / (m + 1.0),
            second_upper=log_c0 ** 2 + log_top ** 2 * 2.0 / (m + 1.0),
        )

    def observed_statistic(self, data):
        data = _sample(data, minimum=2)
        low, high = data.min(), data.max()
        if high <= low:
            raise ModelDomainError('uniform2 needs at least two distinct observations')
        n = float(data.size)
        return np.array([(low + high) / 2.0, 0.5 * (n + 1.0) / (n - 1.0) * (high - low)])


def copula_weight(schedule, m):
    """
    Weight a_m of the distribution function update.
    """
    m = float(m)
    if schedule == 'harmonic':
        return 1.0 / (m + 1.0)
    if schedule == 'fong':
        return (2.0 - 1.0 / (m + 1.0)) / (m + 2.0)
    raise ValueError('unknown weight schedule {!r}'.format(schedule))


def copula_df_step(fs, z, rho, weight, epsilon=1e-13):
    """
    F' = (1 - a) F + a Phi((Phi^-1(F) - rho z) / sqrt(1 - rho^2)), pointwise
    on a grid. `fs` has shape (chains, G) or (G,), `z` one value per chain.
    """
    if not 0.0 < rho < 1.0:
        raise InvalidHyperparameter('rho', rho, '0 < rho < 1')
    if not 0.0 <= weight < 1.0:
        raise InvalidHyperparameter('a_m', weight, '0 <= a_m < 1')

    fs = np.asarray(fs, dtype=float)
    z = np.asarray(z, dtype=float)
    if fs.ndim == 2:
        z = z.reshape(-1, 1)

    clipped = np.clip(fs, epsilon, 1.0 - epsilon)
    moved = scipy.special.ndtr((scipy.special.ndtri(clipped) - rho * z) / np.sqrt(1.0 - rho * rho))
    return (1.0 - weight) * fs + weight * moved


FUNCTIONALS = {
    'one': lambda x: np.ones_like(x),
    'identity': lambda x: x,
    'square': lambda x: x * x,
}


def df_functional(xs, fs, g='identity'):
    """
    Stieltjes sum of g(midpoint) * dF over the grid cells. `g` is one of
    FUNCTIONALS or a callable.
    """
    if not callable(g):
        try:
            g = FUNCTIONALS[g]
        except KeyError:
            raise ValueError('unknown functional {!r}, expected one of {}'.format(g, ', '.join(sorted(FUNCTIONALS))))

    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    midpoints = 0.5 * (xs[1:] + xs[:-1])
    return np.sum(g(midpoints) * np.diff(fs, axis=-1), axis=-1)


class CopulaConfig(Config):
    RHO = ConfigOption(
        converter=float,
        description='Gaussian copula correlation, 0 < rho < 1 (copula)'
    )
    WEIGHTS = ConfigOption(
        converter=one_of(('harmonic', 'fong')),
        default='harmonic',
        description='Weight schedule a_m (copula)'
    )
    GRID_SIZE = ConfigOption(
        converter=positive_int,
        default=1024,
        description='Number of grid points of the distribution function (copula)'
    )
    EPSILON = ConfigOption(
        converter=float,
        default=1e-13,
        description='Clamp applied to F before the normal quantile transform (copula)'
    )
    FUNCTIONAL = ConfigOption(
        converter=one_of(tuple(sorted(FUNCTIONALS))),
        default='identity',
        description='Integrand g of the reported statistic T = int g dF (copula)'
    )


class Copula(ModelSpec):
    """
    Distribution function chain F_m on a fixed grid, driven by the bivariate
    Gaussian copula update. The grid spans the data range widened by three
    sample standard deviations and the chain starts at the data's ECDF.
    """
    NAME = 'copula'
    DISPLAY_NAME = 'Gaussian copula distribution function'
    INNOVATION = Innovation.NORMAL
    COORDINATES = ()
    MIN_INDEX = 1

    Config = CopulaConfig

    violation_reason = 'F must stay in [0, 1] and nondecreasing'

    xs = None

    def validate(self):
        ModelSpec.validate(self)
        self.require('RHO', lambda r: 0.0 < r < 1.0, '0 < rho < 1')
        self.require('GRID_SIZE', lambda g: g >= 2, 'grid_size >= 2')
        self.require('EPSILON', lambda e: 0.0 < e < 0.5, '0 < epsilon < 0.5')

    @property
    def rho(self):
        return self.config['RHO']

    @property
    def dimension(self):
        return self.config['GRID_SIZE']

    @property
    def coordinates(self):
        return tuple('F{}'.format(i) for i in range(self.dimension))

    def weight(self, m):
        return copula_weight(self.config['WEIGHTS'], m)

    def with_grid(self, xs):
        xs = np.asarray(xs, dtype=float)
        if xs.shape != (self.dimension,) or not (np.diff(xs) > 0).all():
            raise ModelDomainError('copula grid must be {} strictly increasing points'.format(self.dimension))
        model = copy.copy(self)
        model.xs = xs
        return model

    def from_data(self, data):
        data = _sample(data, minimum=2)
        spread = 3.0 * data.std(ddof=1)
        if not spread > 0:
            raise ModelDomainError('copula needs at least two distinct observations')

        model = self.with_grid(np.linspace(data.min() - spread, data.max() + spread, self.dimension))
        return model, model.ecdf(data)

    def initial_state(self, values, n):
        if self.xs is None:
            raise UnsupportedModel(self.NAME, 'chains without a data grid, start it from --data')
        return ModelSpec.initial_state(self, values, n)

    def ecdf(self, data):
        data = np.sort(np.asarray(data, dtype=float))
        return np.searchsorted(data, self.xs, side='right') / float(data.size)

    def step(self, state, z, m):
        return copula_df_step(state, z, self.rho, self.weight(m), epsilon=self.config['EPSILON'])

    def violations(self, state):
        state = np.asarray(state, dtype=float)
        finite = np.isfinite(state).all(axis=1)
        bounded = (state >= 0.0).all(axis=1) & (state <= 1.0).all(axis=1)
        monotone = (np.diff(state, axis=1) >= 0.0).all(axis=1)
        return ~(finite & bounded & monotone)

    def statistic(self, fs):
        return df_functional(self.xs, fs, self.config['FUNCTIONAL'])

    def median(self, fs):
        """
        Smallest grid point where F reaches one half.
        """
        fs = np.atleast_2d(fs)
        index = np.minimum((fs < 0.5).sum(axis=1), self.dimension - 1)
        return self.xs[index]

    def columns(self, samples):
        if self.xs is None:
            raise ModelDomainError('copula grid is not set, start the chain from data')
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        return ['statistic', 'median'], np.column_stack([self.statistic(samples), self.median(samples)])

    def observed_statistic(self, data):
        return self.from_data(data)[1]
