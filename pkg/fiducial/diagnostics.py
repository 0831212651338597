"""
Convergence diagnostics: Kakutani sums for product chains, the two series of
conditional moments of g_m along a trajectory, and trailing-window increment
statistics.
"""
from collections import namedtuple

import numpy as np

from fiducial.engine import INCREMENT_WINDOW
from fiducial.model import ModelDomainError, UnsupportedModel
from fiducial.util import chain_generator


DiagnosticRow = namedtuple('DiagnosticRow', ['diagnostic', 'm', 'term', 'partial_sum'])


class Series(object):
    """
    Terms of one diagnostic series indexed by m, and their partial sums.
    """
    def __init__(self, name, ms, terms):
        self.name = name
        self.ms = np.asarray(ms, dtype=np.int64)
        self.terms = np.asarray(terms, dtype=float)
        self.partial_sums = np.cumsum(self.terms)

    @property
    def total(self):
        return float(self.partial_sums[-1]) if self.partial_sums.size else 0.0

    def rows(self):
        for m, term, partial in zip(self.ms, self.terms, self.partial_sums):
            yield DiagnosticRow(self.name, int(m), float(term), float(partial))


class RunningMax(Series):
    def __init__(self, name, ms, terms, window):
        Series.__init__(self, name, ms, terms)
        self.window = window
        self.partial_sums = np.array([
            self.terms[max(0, i - window + 1):i + 1].max() for i in range(self.terms.size)
        ])


class DiagnosticsReport(object):
    def __init__(self, model):
        self.model = model
        self.kakutani = None
        self.series1 = []
        self.series2 = []
        self.increment_sup = None
        self.bounds = []

    def all_series(self):
        if self.kakutani is not None:
            yield self.kakutani
        for series in self.series1:
            yield series
        for series in self.series2:
            yield series
        for series in self.bounds:
            yield series
        if self.increment_sup is not None:
            yield self.increment_sup

    def rows(self):
        for series in self.all_series():
            for row in series.rows():
                yield row

    def merge(self, other):
        for name in ('kakutani', 'increment_sup'):
            if getattr(other, name) is not None:
                setattr(self, name, getattr(other, name))
        self.series1.extend(other.series1)
        self.series2.extend(other.series2)
        self.bounds.extend(other.bounds)
        return self


def kakutani_diagnostic(model, n, upper):
    """
    Terms 1 - a_m and their partial sums for m = n, ..., upper.

    :raises UnsupportedModel: for families without a product representation
    """
    if upper <= n:
        raise ModelDomainError('diagnostic range needs M > n, got n={}, M={}'.format(n, upper))

    ms = np.arange(n, upper + 1)
    report = DiagnosticsReport(model)
    report.kakutani = Series('kakutani', ms, [model.kakutani_term(m) for m in ms])
    return report


def series_diagnostic(model, trajectory, n, upper=None, seed=0, draws=10000):
    """
    Partial sums of E(g_m(T_m, Z_m) | T_m) and E(g_m(T_m, Z_m)^2 | T_m) along
    a trajectory T_n, T_{n+1}, ... as returned by `engine.run_chain`.
    Families without closed forms integrate over `draws` innovations from a
    generator seeded with `seed`.
    """
    trajectory = np.atleast_2d(np.asarray(trajectory, dtype=float))
    last = n + trajectory.shape[0] - 1
    upper = last if upper is None else min(upper, last)
    if upper <= n:
        raise ModelDomainError('diagnostic range needs M > n, got n={}, M={}'.format(n, upper))

    ms = np.arange(n, upper)
    rng = chain_generator(seed)

    # raises UnsupportedModel early for families without a decomposition
    model.phi(trajectory[:1])

    firsts, seconds = [], []
    for m in ms:
        first, second = model.conditional_moments(trajectory[m - n][None, :], int(m), rng=rng, draws=draws)
        firsts.append(first[0])
        seconds.append(second[0])
    firsts = np.array(firsts)
    seconds = np.array(seconds)

    report = DiagnosticsReport(model)
    for j, coordinate in enumerate(model.coordinates):
        report.series1.append(Series('series1[{}]'.format(coordinate), ms, firsts[:, j]))
        report.series2.append(Series('series2[{}]'.format(coordinate), ms, seconds[:, j]))
    return report


def increment_diagnostic(trajectory, n, window=INCREMENT_WINDOW):
    """
    Largest coordinate change |T_{m+1} - T_m| per step and its maximum over
    the trailing `window` steps.
    """
    trajectory = np.atleast_2d(np.asarray(trajectory, dtype=float))
    if trajectory.shape[0] < 2:
        raise ModelDomainError('increment diagnostic needs at least one step')

    changes = np.abs(np.diff(trajectory, axis=0)).max(axis=1)
    report = DiagnosticsReport(None)
    report.increment_sup = RunningMax('increment_sup', np.arange(n, n + changes.size), changes, window)
    return report


def uniform_pair_bounds(model, n, upper):
    """
    Analytic bounds on the moments of the log half-width increment of the
    two-parameter uniform chain, as series.
    """
    if not hasattr(model, 'series_bounds'):
        raise UnsupportedModel(model.NAME, 'series bounds')
    if upper <= n:
        raise ModelDomainError('diagnostic range needs M > n, got n={}, M={}'.format(n, upper))

    ms = np.arange(n, upper + 1)
    bounds = [model.series_bounds(m) for m in ms]

    report = DiagnosticsReport(model)
    for key in ('mean_lower', 'mean_upper', 'second_upper'):
        report.bounds.append(Series('bound_{}'.format(key), ms, [b[key] for b in bounds]))
    return report
