import logging
from collections import namedtuple

import numpy as np
import scipy.optimize

from fiducial.model import NumericDomainError


logger = logging.getLogger(__name__)


GRADIENT_TOLERANCE = 1e-8
MAX_ITERATIONS = 1000


class FitDivergence(NumericDomainError):
    pass


FitResult = namedtuple('FitResult', ['theta', 'loss', 'gradient_norm', 'iterations', 'status'])


def squared_loss(dataset, model, theta):
    residual = dataset.y - model.mean(dataset.X, theta)
    return float(np.mean(residual * residual))


def loss_gradient(dataset, model, theta):
    """
    Gradient of the mean squared mu-loss, -2/n sum (y - mu) mu'.
    """
    residual = dataset.y - model.mean(dataset.X, theta)
    return -2.0 * np.mean(residual[:, None] * model.gradient(dataset.X, theta), axis=0)


def fit_least_squares(dataset, model, init=None, gradient_tolerance=GRADIENT_TOLERANCE,
                      max_iterations=MAX_ITERATIONS):
    """
    Minimizes (1/n) sum (y_i - mu(x_i, theta))^2 from `init` (zeros by
    default). `status` is 'converged' when the gradient norm fell below
    `gradient_tolerance`, 'max_iterations' otherwise.

    :raises FitDivergence: on a non-finite or increasing loss
    """
    theta = np.zeros(dataset.p) if init is None else np.array(init, dtype=float)
    if theta.shape != (dataset.p,) or not np.isfinite(theta).all():
        raise FitDivergence('initial value must be {} finite number(s), got {!r}'.format(dataset.p, init))

    initial_loss = squared_loss(dataset, model, theta)
    norm = float(np.linalg.norm(loss_gradient(dataset, model, theta)))
    if norm < gradient_tolerance:
        return FitResult(theta, initial_loss, norm, 0, 'converged')

    def residuals(t):
        return dataset.y - model.mean(dataset.X, t)

    def jacobian(t):
        return -model.gradient(dataset.X, t)

    result = scipy.optimize.least_squares(
        residuals, theta, jac=jacobian, method='trf',
        ftol=1e-15, xtol=1e-15, gtol=gradient_tolerance * 1e-2, max_nfev=max_iterations
    )

    theta = result.x
    loss = squared_loss(dataset, model, theta)
    if not np.isfinite(theta).all() or not np.isfinite(loss) or loss > initial_loss:
        raise FitDivergence('least squares fit diverged: loss {!r} -> {!r}'.format(initial_loss, loss))

    norm = float(np.linalg.norm(loss_gradient(dataset, model, theta)))
    status = 'converged' if norm < gradient_tolerance else 'max_iterations'
    if status != 'converged':
        logger.warning('least squares fit stopped after %d evaluations with gradient norm %r', result.nfev, norm)

    return FitResult(theta, loss, norm, int(result.nfev), status)
