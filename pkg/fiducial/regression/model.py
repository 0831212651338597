import numpy as np
import scipy.special

from fiducial.model import Innovation


def _linear_predictor(X, theta):
    return np.sum(np.asarray(X, dtype=float) * np.asarray(theta, dtype=float), axis=-1)


class RegressionModel(object):
    """
    Y = g(x, Z, theta) with a known error law. Every method is vectorized
    over rows: `X` is (k, p), `theta` is (p,) or (k, p).
    """
    NAME = None
    INNOVATION = None

    def mean(self, X, theta):
        """
        mu(x, theta) = E g(x, Z, theta)
        """
        raise NotImplementedError

    def gradient(self, X, theta):
        """
        Partial derivatives mu'_j(x, theta), shape (k, p).
        """
        raise NotImplementedError

    def second_moment(self, X, theta):
        """
        mu_2(x, theta) = E g(x, Z, theta)^2
        """
        raise NotImplementedError

    def simulate(self, X, z, theta):
        raise NotImplementedError

    def phi(self, X, theta):
        """
        sqrt(mu_2 - mu^2) max_j |mu'_j|, the step normalizer.
        """
        mu = self.mean(X, theta)
        variance = np.maximum(self.second_moment(X, theta) - mu * mu, 0.0)
        return np.sqrt(variance) * np.abs(self.gradient(X, theta)).max(axis=-1)

    def __repr__(self):
        return '{}()'.format(self.__class__.__name__)


class LogisticModel(RegressionModel):
    """
    P(Y = 1 | x) = e^(x'b) / (1 + e^(x'b)), simulated as 1(Z < mu) with
    Z ~ U(0, 1).
    """
    NAME = 'logistic'
    INNOVATION = Innovation.UNIFORM

    def mean(self, X, theta):
        return scipy.special.expit(_linear_predictor(X, theta))

    def gradient(self, X, theta):
        mu = self.mean(X, theta)
        return np.asarray(X, dtype=float) * (mu * (1.0 - mu))[..., None]

    def second_moment(self, X, theta):
        return self.mean(X, theta)

    def simulate(self, X, z, theta):
        return (np.asarray(z, dtype=float) < self.mean(X, theta)).astype(float)


class LinearModel(RegressionModel):
    """
    Y = x'theta + sigma Z with Z ~ N(0, 1).
    """
    NAME = 'linear'
    INNOVATION = Innovation.NORMAL

    def __init__(self, sigma=1.0):
        if not sigma > 0:
            raise ValueError('sigma must be positive, got {!r}'.format(sigma))
        self.sigma = float(sigma)

    def mean(self, X, theta):
        return _linear_predictor(X, theta)

    def gradient(self, X, theta):
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(X, np.broadcast(X, np.asarray(theta, dtype=float)).shape)

    def second_moment(self, X, theta):
        mu = self.mean(X, theta)
        return mu * mu + self.sigma ** 2

    def simulate(self, X, z, theta):
        return self.mean(X, theta) + self.sigma * np.asarray(z, dtype=float)

    def __repr__(self):
        return 'LinearModel(sigma={!r})'.format(self.sigma)


REGRESSION_MODELS = {
    LogisticModel.NAME: LogisticModel,
    LinearModel.NAME: LinearModel,
}


def logistic_model():
    return LogisticModel()
