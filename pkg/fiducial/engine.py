"""
Chain runner: advances a model's update rule from the observed statistic at
index n to the horizon N for many chains at once.

Chains are processed in blocks of CHAIN_BLOCK and every chain owns its own
generator, seeded from (master_seed, chain index) with `util.chain_seed`.
Innovations are drawn from a chain's generator in chunks of STEP_CHUNK steps,
so a chain's stream, and therefore its path, does not depend on the block it
runs in, the number of workers, or the horizon.
"""
import logging
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import scipy.special

from fiducial.model import FlaggedStep, NumericDomainError, ModelDomainError
from fiducial.sink import LoggingSink
from fiducial.util import chain_generator, chain_seed, memoize, summarize


logger = logging.getLogger(__name__)


CHAIN_BLOCK = 2048
STEP_CHUNK = 256

HORIZON_OFFSET = 1000
INCREMENT_WINDOW = 100
INCREMENT_THRESHOLD = 0.05

WORKERS_ENVIRONMENT = 'FIDUCIAL_WORKERS'


class ChainFailure(NumericDomainError):
    """
    Raised by `sample_fiducial` when at least one chain left its model domain.
    `events` holds one `FlaggedStep` per failed chain, in chain order.
    """
    def __init__(self, events, chains):
        self.events = list(events)
        self.chains = chains

        first = self.events[0]
        NumericDomainError.__init__(self, '{} of {} chain(s) failed, first: {}'.format(
            len(self.events), chains, first
        ))


ChainState = namedtuple('ChainState', ['m', 'value'])


def default_horizon(n):
    return n + HORIZON_OFFSET


def worker_count():
    """
    Worker processes for `sample_fiducial`, from FIDUCIAL_WORKERS or the
    number of logical CPUs.
    """
    value = os.environ.get(WORKERS_ENVIRONMENT)
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ValueError('{} must be a positive integer, got {!r}'.format(WORKERS_ENVIRONMENT, value))
        if workers < 1:
            raise ValueError('{} must be a positive integer, got {!r}'.format(WORKERS_ENVIRONMENT, value))
        return workers
    return os.cpu_count() or 1


def step(model, state, z, m=None):
    """
    One application of H_m to a single chain state.
    """
    if m is not None and m != state.m:
        raise ModelDomainError('state index {} does not match step index {}'.format(state.m, m))

    current = np.asarray(state.value, dtype=float).reshape(1, -1)
    innovation = np.asarray(z, dtype=float).reshape((1,) + np.shape(z))
    with np.errstate(all='ignore'):
        result = model.advance(current, innovation, state.m)

    flagged = result.flagged is not None and bool(result.flagged[0])
    if flagged or model.violations(result.state)[0]:
        raise FlaggedStep(state.m, state.value, z, model.violation_reason)
    return ChainState(state.m + 1, result.state[0])


BlockResult = namedtuple('BlockResult', ['first', 'samples', 'adjusted', 'increment_sup', 'events', 'trajectory'])


def run_block(model, initial, n, horizon, first, seeds, window=INCREMENT_WINDOW, record=False):
    """
    Runs the chains `first, first + 1, ...` (one per seed) from `initial` at
    index n to `horizon`. Chains that leave the model domain are frozen at
    their last valid state and reported in `events`.
    """
    count = len(seeds)
    state = np.repeat(np.asarray(initial, dtype=float).reshape(1, -1), count, axis=0)
    streams = [model.stream(chain_generator(seed)) for seed in seeds]

    failed = np.zeros(count, dtype=bool)
    adjusted = np.zeros(count, dtype=np.int64)
    increment_sup = np.zeros(count)
    events = []

    trajectory = None
    if record:
        trajectory = np.empty((count, horizon - n + 1, state.shape[1]))
        trajectory[:, 0] = state

    m = n
    while m < horizon:
        length = min(STEP_CHUNK, horizon - m)
        chunk = np.stack([stream.draw(length) for stream in streams])

        for i in range(length):
            z = chunk[:, i]
            with np.errstate(all='ignore'):
                result = model.advance(state, z, m)
                bad = model.violations(result.state)
            if result.flagged is not None:
                bad = bad | result.flagged

            for chain in np.flatnonzero(bad & ~failed):
                events.append(FlaggedStep(m, state[chain], z[chain], model.violation_reason, chain=first + chain))
            failed |= bad

            if result.adjusted is not None:
                adjusted += result.adjusted & ~failed

            if horizon - m <= window:
                with np.errstate(all='ignore'):
                    change = np.abs(result.state - state).max(axis=1)
                increment_sup = np.where(failed, increment_sup, np.maximum(increment_sup, change))

            state = np.where(failed[:, None], state, result.state)
            m += 1
            if record:
                trajectory[:, m - n] = state

    return BlockResult(first, state, adjusted, increment_sup, events, trajectory)


def run_chain(model, t_n, n, horizon=None, seed=0, trajectory=False):
    """
    Runs a single chain with the given 64-bit seed.

    :return: the terminal `ChainState`, or (terminal, path) with a
        (horizon - n + 1, dimension) path if `trajectory` is set
    :raises FlaggedStep: when the chain leaves its model domain
    """
    horizon = default_horizon(n) if horizon is None else horizon
    initial = model.initial_state(t_n, n)
    if horizon <= n:
        raise ModelDomainError('horizon {} must exceed n={}'.format(horizon, n))

    result = run_block(model, initial, n, horizon, 0, [seed], record=trajectory)
    if result.events:
        event = result.events[0]
        event.chain = None
        raise event

    terminal = ChainState(horizon, result.samples[0])
    if trajectory:
        return terminal, result.trajectory[0]
    return terminal


def _run_block_job(args):
    return run_block(*args)


class SampleSet(object):
    """
    Terminal values of B chains with their provenance.
    """
    def __init__(self, model, n, statistic, horizon, master_seed, samples,
                 adjustments=0, increment_sup=0.0, trajectories=None):
        self.model = model
        self.n = n
        self.statistic = np.asarray(statistic, dtype=float)
        self.horizon = horizon
        self.master_seed = master_seed
        self.samples = samples
        self.adjustments = int(adjustments)
        self.increment_sup = float(increment_sup)
        self.trajectories = trajectories

    @property
    def chains(self):
        return self.samples.shape[0]

    def columns(self):
        return self.model.columns(self.samples)

    @property
    def summaries(self):
        names, values = self.columns()
        summary = summarize(values)
        return dict(
            (name, dict(
                mean=float(summary['mean'][i]),
                sd=float(summary['sd'][i]),
                quantiles=dict((q, float(level[i])) for q, level in summary['quantiles'].items())
            ))
            for i, name in enumerate(names)
        )

    def __repr__(self):
        return 'SampleSet(model={!r}, n={}, horizon={}, chains={}, master_seed={})'.format(
            self.model, self.n, self.horizon, self.chains, self.master_seed
        )


def sample_fiducial(model, t_n, n, horizon=None, chains=1000, master_seed=0, workers=None,
                    sink=None, trajectory=False, increment_threshold=INCREMENT_THRESHOLD,
                    window=INCREMENT_WINDOW):
    """
    Monte Carlo approximation of the law of T_infinity: `chains` chains run
    from `t_n` at index n to `horizon`.

    The result depends only on (model, t_n, n, horizon, chains, master_seed).

    :raises ChainFailure: if any chain left its model domain
    """
    sink = sink or LoggingSink(logger=logger)
    horizon = default_horizon(n) if horizon is None else horizon
    initial = model.initial_state(t_n, n)
    if chains < 1:
        raise ValueError('need at least one chain, got {}'.format(chains))
    if horizon <= n:
        raise ModelDomainError('horizon {} must exceed n={}'.format(horizon, n))

    workers = worker_count() if workers is None else workers
    seeds = [chain_seed(master_seed, chain) for chain in range(chains)]
    jobs = [
        (model, initial, n, horizon, first, seeds[first:first + CHAIN_BLOCK], window, trajectory)
        for first in range(0, chains, CHAIN_BLOCK)
    ]

    sink.chains_started(model.NAME, chains, n, horizon, len(jobs))

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as executor:
            results = list(executor.map(_run_block_job, jobs))
    else:
        results = [run_block(*job) for job in jobs]

    results.sort(key=lambda r: r.first)
    events = [event for result in results for event in result.events]
    for event in events:
        sink.flagged(event)
    if events:
        raise ChainFailure(events, chains)

    samples = np.concatenate([result.samples for result in results])
    adjustments = sum(int(result.adjusted.sum()) for result in results)
    increment_sup = max(float(result.increment_sup.max()) for result in results)

    if adjustments:
        sink.adjusted(adjustments)
    if increment_threshold is not None and increment_sup > increment_threshold:
        sink.increment_exceeded(window, increment_sup, increment_threshold)

    trajectories = None
    if trajectory:
        trajectories = np.concatenate([result.trajectory for result in results])

    return SampleSet(model, n, initial, horizon, master_seed, samples,
                     adjustments=adjustments, increment_sup=increment_sup, trajectories=trajectories)


# -- normal closed form --------------------------------------------------------

TAIL_TOLERANCE = 1e-12
TAIL_MAX_TERMS = 10 ** 7


@memoize
def tail_sum_inverse_squares(n, tolerance=TAIL_TOLERANCE):
    """
    sum_{m > n} 1 / m^2: an explicit partial sum up to M plus the midpoint of
    the telescoping bracket (1/(M+1), 1/M) of the remainder, with M(M+1) large
    enough for the bracket to be below `tolerance` relative to the result.
    Falls back to the trigamma function when M would be impractically large.
    """
    n = int(n)
    if n < 1:
        raise ValueError('tail sum needs n >= 1, got {}'.format(n))

    target = (n + 1.0) / tolerance
    upper = int(np.ceil(np.sqrt(target)))
    while upper * (upper + 1.0) <= target:
        upper += 1
    upper = max(upper, n + 1)

    if upper - n > TAIL_MAX_TERMS:
        return float(scipy.special.polygamma(1, n + 1))

    terms = np.arange(upper, n, -1, dtype=float)
    partial = np.sum(1.0 / (terms * terms))
    remainder = 0.5 * (1.0 / upper + 1.0 / (upper + 1.0))
    return float(partial + remainder)


def normal_closed_form_sample(t_n, sigma, n, z):
    """
    The exact limit of the known-sigma normal chain: t_n + sigma z s_n with
    s_n^2 = sum_{m > n} 1/m^2.
    """
    if not sigma > 0:
        raise ValueError('sigma must be positive, got {!r}'.format(sigma))
    return t_n + sigma * np.asarray(z, dtype=float) * np.sqrt(tail_sum_inverse_squares(n))
