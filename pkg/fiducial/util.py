import functools
import os
from collections import OrderedDict

import numpy as np


MASK64 = (1 << 64) - 1

SUMMARY_QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


def makefiledir(path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def float_list(value):
    """
    Parses `1.5`, `0,1` or `4.98, -2.74` into a tuple of floats.
    """
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    if isinstance(value, (int, float)):
        return (float(value),)

    parts = [part for part in str(value).replace(';', ',').split(',') if part.strip()]
    if not parts:
        raise ValueError('empty list of numbers')
    return tuple(float(part) for part in parts)

float_list.__config_doc__ = 'Comma separated numbers'


def name_list(value):
    if isinstance(value, (list, tuple)):
        return tuple(value)
    names = tuple(part.strip() for part in str(value).split(',') if part.strip())
    if not names:
        raise ValueError('empty list of names')
    return names

name_list.__config_doc__ = 'Comma separated names'


def positive_int(value):
    result = int(value)
    if result <= 0:
        raise ValueError('expected a positive integer, got {!r}'.format(value))
    return result


def seed_int(value):
    result = int(value)
    if result < 0:
        raise ValueError('expected a non-negative seed, got {!r}'.format(value))
    return result & MASK64


def chain_seed(master_seed, chain):
    """
    Derives the 64-bit seed of chain `chain` from `master_seed`.

    The mix is numpy's SeedSequence hash of entropy=master_seed with
    spawn_key=(chain,), truncated to its first 64-bit word. It depends only
    on the two integers, never on execution order or worker count.
    """
    sequence = np.random.SeedSequence(entropy=int(master_seed) & MASK64, spawn_key=(int(chain),))
    return int(sequence.generate_state(1, np.uint64)[0])


def chain_generator(seed):
    """
    Counter-based generator for one chain: Philox keyed through
    SeedSequence(seed).
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & MASK64)))


def summarize(samples, quantiles=SUMMARY_QUANTILES):
    """
    Per-column mean, standard deviation (ddof=1, 0 for a single row) and
    quantiles (numpy's default linear interpolation).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]

    count = samples.shape[0]
    mean = samples.mean(axis=0)
    sd = samples.std(axis=0, ddof=1) if count > 1 else np.zeros(samples.shape[1])
    levels = np.quantile(samples, quantiles, axis=0)

    return OrderedDict([
        ('mean', mean),
        ('sd', sd),
        ('quantiles', OrderedDict((q, levels[i]) for i, q in enumerate(quantiles))),
    ])


def memoize(func):
    """
    Caches a pure function of scalar arguments. numpy scalars share cache
    entries with the equal Python numbers.
    """
    cache = dict()

    @functools.wraps(func)
    def memoized(*args):
        key = tuple(arg.item() if isinstance(arg, np.generic) else arg for arg in args)
        try:
            return cache[key]
        except KeyError:
            result = cache[key] = func(*args)
            return result

    memoized.cache = cache
    return memoized
