"""
Base classes shared by every model family: the `ModelSpec` interface the
engine drives, innovation streams, and the numeric-domain errors raised when
a chain leaves its model's domain.
"""
from collections import namedtuple

import numpy as np

from fiducial.config import Config, InvalidConfig, InvalidHyperparameter


class NumericDomainError(ValueError):
    pass


class ModelDomainError(NumericDomainError):
    pass


class UnsupportedModel(InvalidConfig):
    def __init__(self, model, operation):
        InvalidConfig.__init__(self, 'model {!r} does not support {}'.format(model, operation))

        self.model = model
        self.operation = operation


class FlaggedStep(NumericDomainError):
    """
    A chain step whose result left the model domain (or was not finite).
    Carries everything needed to replay the step.
    """
    def __init__(self, m, state, z, reason, chain=None):
        self.m = int(m)
        self.state = np.array(state, dtype=float, copy=True)
        self.z = np.array(z, dtype=float, copy=True)
        self.reason = reason
        self.chain = chain

        NumericDomainError.__init__(self, 'chain {} flagged at m={}: {}'.format(
            '-' if chain is None else chain, self.m, reason
        ))


StepResult = namedtuple('StepResult', ['state', 'adjusted', 'flagged'])


class Innovation(object):
    """
    Distribution identifiers for the innovations Z_m.
    """
    NORMAL = 'normal'
    EXPONENTIAL = 'exponential'
    UNIFORM = 'uniform'
    GAMMA = 'gamma'


def draw_innovations(kind, rng, count, shape=None):
    """
    Draws `count` innovations in stream order. Normal uses numpy's ziggurat,
    exponential and uniform use inverse-CDF transforms of the stream, gamma
    uses numpy's rejection sampler (retries consume the same stream).
    """
    if kind == Innovation.NORMAL:
        return rng.standard_normal(count)
    if kind == Innovation.EXPONENTIAL:
        return -np.log1p(-rng.random(count))
    if kind == Innovation.UNIFORM:
        return rng.random(count)
    if kind == Innovation.GAMMA:
        return rng.standard_gamma(shape, count)
    raise ValueError('unknown innovation {!r}'.format(kind))


class InnovationStream(object):
    """
    Per-chain source of innovations. Models with per-chain random structure
    (e.g. a bootstrap weight draw) override `ModelSpec.stream`.
    """
    def __init__(self, model, rng):
        self.model = model
        self.rng = rng

    def draw(self, count):
        return draw_innovations(self.model.INNOVATION, self.rng, count, shape=self.model.innovation_shape)


class NullConfig(Config):
    pass


class ModelSpec(object):
    """
    A model family together with its fixed hyperparameters.

    States are handled in blocks: `state` arguments are float arrays of
    shape (chains, DIMENSION) and innovations have shape (chains,) or
    (chains, k). All step methods are pure functions of their inputs.
    """
    NAME = None
    DISPLAY_NAME = None
    INNOVATION = None
    COORDINATES = ('t',)
    MIN_INDEX = 1
    MARTINGALE = True  # E(T_{m+1} | T_m) = T_m in every coordinate

    Config = NullConfig

    def __init__(self, **hyperparameters):
        self.config = self.Config()
        self.config.update_from_dict(hyperparameters)
        self.validate()

    @classmethod
    def from_config(cls, config):
        model = cls.__new__(cls)
        model.config = config
        model.validate()
        return model

    def validate(self):
        self.config.validate()

    def require(self, name, predicate, expected):
        value = self.config[name]
        if value is None or not predicate(value):
            raise InvalidHyperparameter(name.lower(), value, expected)
        return value

    @property
    def name(self):
        return self.NAME

    @property
    def hyperparameters(self):
        return self.config.to_dict(transform=lambda x: x.lower())

    @property
    def dimension(self):
        return len(self.COORDINATES)

    @property
    def coordinates(self):
        return self.COORDINATES

    @property
    def innovation_shape(self):
        return None

    def __repr__(self):
        params = ', '.join('{}={!r}'.format(k, v) for k, v in sorted(self.hyperparameters.items()))
        return '{}({})'.format(self.__class__.__name__, params)

    def __getstate__(self):
        return dict(self.__dict__, config=self.config.to_dict())

    def __setstate__(self, state):
        values = state.pop('config')
        self.__dict__.update(state)
        self.config = self.Config()
        self.config.update_from_dict(values, convert=False)

    # -- chain interface ---------------------------------------------------

    def stream(self, rng):
        return InnovationStream(self, rng)

    def step(self, state, z, m):
        """
        Applies H_m to a block of states. Returns the new block.
        """
        raise NotImplementedError

    def advance(self, state, z, m):
        """
        Engine entry point: the step plus bookkeeping. `adjusted` marks chains
        whose step was altered by an opt-in clamp/reset, `flagged` marks chains
        the step itself rejected.
        """
        return StepResult(self.step(state, z, m), None, None)

    def violations(self, state):
        """
        Boolean mask of chains whose state is outside the model domain.
        """
        return ~np.isfinite(state).all(axis=1)

    violation_reason = 'state is not finite'

    def initial_state(self, values, n):
        """
        Validates the observed statistic and returns it as a (DIMENSION,) array.
        """
        if n < self.MIN_INDEX:
            raise ModelDomainError('{}: n must be >= {}, got {}'.format(self.NAME, self.MIN_INDEX, n))

        value = np.atleast_1d(np.asarray(values, dtype=float))
        if value.shape != (self.dimension,):
            raise ModelDomainError('{}: expected a statistic with {} coordinate(s) {}, got {!r}'.format(
                self.NAME, self.dimension, ', '.join(self.coordinates), values
            ))
        if self.violations(value[None, :])[0]:
            raise ModelDomainError('{}: statistic {!r} outside the model domain ({})'.format(
                self.NAME, values, self.violation_reason
            ))
        return value

    def observed_statistic(self, data):
        """
        Computes the starting statistic t_n from a raw sample.
        """
        raise UnsupportedModel(self.NAME, 'statistics from raw data')

    def from_data(self, data):
        """
        Returns the model to run and its starting statistic for a raw sample.
        Families whose state depends on the data (a grid, say) return a copy.
        """
        return self, self.observed_statistic(data)

    def columns(self, samples):
        """
        Names and values of the reported sample columns.
        """
        return list(self.coordinates), np.asarray(samples, dtype=float)

    # -- H_m = phi^-1(phi(t) + g_m(t, z)) -----------------------------------

    def phi(self, t):
        raise UnsupportedModel(self.NAME, 'the phi/g decomposition')

    def phi_inverse(self, u):
        raise UnsupportedModel(self.NAME, 'the phi/g decomposition')

    def increment(self, t, z, m):
        """
        g_m(t, z) such that step(t, z, m) = phi_inverse(phi(t) + g_m(t, z)).
        """
        raise UnsupportedModel(self.NAME, 'the phi/g decomposition')

    def conditional_moments(self, state, m, rng=None, draws=10000):
        """
        E(g_m(T_m, Z_m) | T_m) and E(g_m(T_m, Z_m)^2 | T_m) for a block of
        states, as two arrays of shape (chains, DIMENSION).

        The default integrates over `draws` innovations from `rng`; families
        with closed forms override it.
        """
        if rng is None:
            raise ValueError('{}: Monte Carlo moments need a generator'.format(self.NAME))

        state = np.atleast_2d(state)
        z = draw_innovations(self.INNOVATION, rng, draws, shape=self.innovation_shape)
        first = np.empty(state.shape)
        second = np.empty(state.shape)
        for i, row in enumerate(state):
            g = np.asarray(self.increment(np.repeat(row[None, :], draws, axis=0), z, m)).reshape(draws, -1)
            first[i] = g.mean(axis=0)
            second[i] = (g * g).mean(axis=0)
        return first, second

    def kakutani_term(self, m):
        """
        1 - a_m with a_m = E(sqrt(X_m)) of the normalized product factor.
        """
        raise UnsupportedModel(self.NAME, 'the Kakutani diagnostic')

    # -- parameter space and oracle -----------------------------------------

    def to_parameter(self, samples):
        """
        Optional map from statistic space to parameter space. Never applied
        implicitly.
        """
        return np.asarray(samples, dtype=float)

    def oracle(self, statistic, n):
        """
        Fisher fiducial oracle for this family, in the space returned by
        `to_parameter`.
        """
        raise UnsupportedModel(self.NAME, 'a Fisher fiducial oracle')
