"""
Closed-form Fisher fiducial laws, the binomial bootstrap estimator of the
fiducial survivor function, the single-observation Weibull comparison
density, and distances between samples and reference laws.
"""
from collections import OrderedDict

import numpy as np
import scipy.integrate
import scipy.special
import scipy.stats

from fiducial.config import InvalidHyperparameter
from fiducial.model import NumericDomainError, ModelDomainError
from fiducial.util import chain_generator


CDF_LEVELS = tuple(np.round(np.arange(1, 100) / 100.0, 2))


# -- special functions -------------------------------------------------------

def normal_cdf(x):
    return scipy.special.ndtr(x)


def normal_quantile(p):
    p = np.asarray(p, dtype=float)
    if not ((p >= 0.0) & (p <= 1.0)).all():
        raise ModelDomainError('normal quantile needs 0 <= p <= 1, got {!r}'.format(p.tolist()))
    return scipy.special.ndtri(p)


def gamma_regularized(a, x):
    """
    Lower regularized incomplete gamma P(a, x).
    """
    if np.any(np.asarray(a) <= 0) or np.any(np.asarray(x) < 0):
        raise ValueError('incomplete gamma needs a > 0 and x >= 0')
    return scipy.special.gammainc(a, x)


def gamma_regularized_upper(a, x):
    if np.any(np.asarray(a) <= 0) or np.any(np.asarray(x) < 0):
        raise ValueError('incomplete gamma needs a > 0 and x >= 0')
    return scipy.special.gammaincc(a, x)


def beta_regularized(a, b, x):
    """
    Regularized incomplete beta I_x(a, b).
    """
    if np.any(np.asarray(a) <= 0) or np.any(np.asarray(b) <= 0):
        raise ValueError('incomplete beta needs a > 0 and b > 0')
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(x) > 1):
        raise ValueError('incomplete beta needs 0 <= x <= 1')
    return scipy.special.betainc(a, b, x)


# -- reference laws ----------------------------------------------------------

class OracleDistribution(object):
    """
    A reference law with cdf/pdf/quantile/mean. Closed-form kinds wrap a
    frozen `scipy.stats` distribution, the `empirical` kind wraps a sample.
    """
    KINDS = ('beta', 'gamma', 'inverse-gamma', 'normal', 'pareto', 'empirical')

    def __init__(self, kind, parameters, frozen=None, sample=None):
        if kind not in self.KINDS:
            raise ValueError('unknown oracle kind {!r}'.format(kind))

        self.kind = kind
        self.parameters = OrderedDict(parameters)
        self._frozen = frozen
        self._sample = None if sample is None else np.sort(np.asarray(sample, dtype=float))

    @classmethod
    def beta(cls, alpha, beta):
        return cls('beta', [('alpha', alpha), ('beta', beta)], frozen=scipy.stats.beta(alpha, beta))

    @classmethod
    def gamma(cls, shape, rate):
        return cls('gamma', [('shape', shape), ('rate', rate)],
                   frozen=scipy.stats.gamma(shape, scale=1.0 / rate))

    @classmethod
    def inverse_gamma(cls, shape, scale):
        return cls('inverse-gamma', [('shape', shape), ('scale', scale)],
                   frozen=scipy.stats.invgamma(shape, scale=scale))

    @classmethod
    def normal(cls, mean, sd):
        return cls('normal', [('mean', mean), ('sd', sd)], frozen=scipy.stats.norm(mean, sd))

    @classmethod
    def pareto(cls, index, scale):
        """
        Density index scale^index / x^(index + 1) on x > scale.
        """
        return cls('pareto', [('index', index), ('scale', scale)],
                   frozen=scipy.stats.pareto(index, scale=scale))

    @classmethod
    def empirical(cls, sample):
        sample = np.asarray(sample, dtype=float).ravel()
        if sample.size == 0:
            raise ValueError('empirical oracle needs a nonempty sample')
        return cls('empirical', [('size', int(sample.size))], sample=sample)

    def cdf(self, x):
        if self._frozen is not None:
            return self._frozen.cdf(x)
        return np.searchsorted(self._sample, x, side='right') / float(self._sample.size)

    def sf(self, x):
        if self._frozen is not None:
            return self._frozen.sf(x)
        return 1.0 - self.cdf(x)

    def pdf(self, x):
        if self._frozen is None:
            raise ValueError('the empirical oracle has no density')
        return self._frozen.pdf(x)

    def quantile(self, p):
        if self._frozen is not None:
            return self._frozen.ppf(p)
        return np.quantile(self._sample, p, method='inverted_cdf')

    def mean(self):
        if self._frozen is not None:
            return float(self._frozen.mean())
        return float(self._sample.mean())

    def support(self):
        if self._frozen is not None:
            return tuple(float(v) for v in self._frozen.support())
        return float(self._sample[0]), float(self._sample[-1])

    def describe(self):
        return '{}({})'.format(self.kind, ', '.join(
            '{}={}'.format(name, value) for name, value in self.parameters.items()
        ))

    def __repr__(self):
        return 'OracleDistribution<{}>'.format(self.describe())


def fisher_oracle(family, t_n, n, **extras):
    """
    Fisher fiducial law of a family given its observed statistic.

    * bernoulli: t_n successes, Beta(1 + t_n, n - t_n), needs t_n < n
    * poisson: t_n total count, Gamma(1 + t_n, rate n)
    * exponential: t_n sample mean, inverse-Gamma(n, scale n t_n)
    * gamma: t_n sample mean, known shape a, rate law Gamma(n a, rate n t_n)
    * normal: t_n sample mean, known sigma, N(t_n, sigma^2 / n)
    * uniform: t_n sample maximum, Pareto(n, t_n)
    """
    n = int(n)
    if n < 1:
        raise InvalidHyperparameter('n', n, 'n >= 1')
    t_n = float(t_n)

    if family == 'bernoulli':
        if not 0 <= t_n < n:
            raise ModelDomainError('bernoulli oracle is defined for 0 <= t_n < n, got t_n={!r}, n={}'.format(t_n, n))
        return OracleDistribution.beta(1.0 + t_n, float(n) - t_n)

    if family == 'poisson':
        if t_n < 0:
            raise ModelDomainError('poisson oracle needs t_n >= 0, got {!r}'.format(t_n))
        return OracleDistribution.gamma(1.0 + t_n, float(n))

    if family == 'exponential':
        if not t_n > 0:
            raise ModelDomainError('exponential oracle needs t_n > 0, got {!r}'.format(t_n))
        return OracleDistribution.inverse_gamma(float(n), n * t_n)

    if family == 'gamma':
        shape = float(extras.get('shape', 1.0))
        if not shape > 0:
            raise InvalidHyperparameter('shape', shape, 'shape > 0')
        if not t_n > 0:
            raise ModelDomainError('gamma oracle needs t_n > 0, got {!r}'.format(t_n))
        return OracleDistribution.gamma(n * shape, n * t_n)

    if family == 'normal':
        sigma = float(extras.get('sigma', 1.0))
        if not sigma > 0:
            raise InvalidHyperparameter('sigma', sigma, 'sigma > 0')
        return OracleDistribution.normal(t_n, sigma / np.sqrt(n))

    if family == 'uniform':
        if not t_n > 0:
            raise ModelDomainError('uniform oracle needs x_(n) > 0, got {!r}'.format(t_n))
        return OracleDistribution.pareto(float(n), t_n)

    raise ValueError('no Fisher fiducial oracle for family {!r}'.format(family))


def bootstrap_fiducial(theta_grid, t_n, n, chains, seed):
    """
    For every theta of the grid, the fraction of `chains` Binomial(n, theta)
    draws that exceed t_n, i.e. an estimate of 1 - F(t_n | theta), which is
    the Beta(1 + t_n, n - t_n) distribution function at theta.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    if ((theta_grid <= 0) | (theta_grid >= 1)).any():
        raise ValueError('bootstrap grid values must lie in (0, 1)')
    if not 0 <= t_n < n:
        raise ModelDomainError('bootstrap estimator needs 0 <= t_n < n')
    if chains < 1:
        raise ValueError('bootstrap needs at least one draw per grid point')

    rng = chain_generator(seed)
    estimates = np.empty(theta_grid.shape)
    for i, theta in enumerate(theta_grid):
        estimates[i] = np.count_nonzero(rng.binomial(n, theta, size=chains) > t_n) / float(chains)
    return estimates


def hannig_weibull_density(x, theta_grid):
    """
    Single-observation Weibull fiducial density x^theta exp(-x^theta),
    normalized on the grid with the trapezoid rule.
    """
    if not x > 0:
        raise ModelDomainError('weibull observation must be positive, got {!r}'.format(x))
    if x == 1:
        raise ModelDomainError('x = 1 gives a density constant in theta, which cannot be normalized')

    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.size < 2 or (theta_grid <= 0).any() or (np.diff(theta_grid) <= 0).any():
        raise ValueError('theta grid must hold at least two increasing positive values')

    u = np.power(float(x), theta_grid)
    values = u * np.exp(-u)
    total = scipy.integrate.trapezoid(values, theta_grid)
    if not total > 0:
        raise NumericDomainError('weibull density vanishes on the grid')
    return values / total


# -- distances ---------------------------------------------------------------

def _finite_sample(samples):
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError('KS distance needs a nonempty sample')
    if np.isnan(samples).any():
        raise NumericDomainError('KS distance: sample contains NaN')
    return samples


def ks_distance(samples, oracle):
    """
    sup |ECDF(samples) - oracle.cdf| over the sample points.
    """
    samples = _finite_sample(samples)
    return float(scipy.stats.kstest(samples, oracle.cdf).statistic)


def ks_two_sample(first, second):
    return float(scipy.stats.ks_2samp(_finite_sample(first), _finite_sample(second)).statistic)


def cdf_table(samples, oracle, levels=CDF_LEVELS):
    """
    Empirical and oracle cdf at the oracle quantiles of `levels`. Returns
    rows of (level, x, empirical, oracle).
    """
    samples = np.sort(_finite_sample(samples))
    levels = np.asarray(levels, dtype=float)
    xs = oracle.quantile(levels)
    empirical = np.searchsorted(samples, xs, side='right') / float(samples.size)
    return list(zip(levels.tolist(), np.asarray(xs, dtype=float).tolist(),
                    empirical.tolist(), np.asarray(oracle.cdf(xs), dtype=float).tolist()))
