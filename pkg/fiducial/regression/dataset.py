import csv
import io

import numpy as np


class DatasetError(ValueError):
    """
    Malformed regression input. `row` is the 1-based line of the CSV file
    (the header is line 1), `column` the column name; either may be None.
    """
    def __init__(self, message, row=None, column=None):
        location = []
        if row is not None:
            location.append('line {}'.format(row))
        if column is not None:
            location.append('column {!r}'.format(column))

        ValueError.__init__(self, '{}{}'.format(
            ', '.join(location) + ': ' if location else '', message
        ))

        self.row = row
        self.column = column


class RegressionDataset(object):
    """
    Covariates X (n x p) and responses y. With `standardized`, every
    covariate column was min-max scaled into [0, 1] and `minimums`/`maximums`
    record the original ranges. An intercept column of ones, when present,
    comes first and is never scaled.
    """
    INTERCEPT = 'intercept'

    def __init__(self, X, y, columns, response, minimums=None, maximums=None, intercept=False):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.columns = tuple(columns)
        self.response = response
        self.minimums = None if minimums is None else np.asarray(minimums, dtype=float)
        self.maximums = None if maximums is None else np.asarray(maximums, dtype=float)
        self.intercept = intercept

        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise DatasetError('covariates and responses disagree in length')
        if self.X.shape[1] != len(self.columns):
            raise DatasetError('expected {} column names, got {}'.format(self.X.shape[1], len(self.columns)))
        if self.X.shape[0] == 0:
            raise DatasetError('dataset has no rows')

    @classmethod
    def from_arrays(cls, X, y, columns=None, response='y', standardize=False, intercept=False):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if columns is None:
            columns = ['x{}'.format(j + 1) for j in range(X.shape[1])]

        minimums = maximums = None
        if standardize:
            X, minimums, maximums = min_max_scale(X, columns)
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            columns = [cls.INTERCEPT] + list(columns)

        return cls(X, y, columns, response, minimums=minimums, maximums=maximums, intercept=intercept)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def standardized(self):
        return self.minimums is not None

    @property
    def covariates(self):
        return self.X[:, 1:] if self.intercept else self.X

    def destandardize(self, X=None):
        """
        Maps (scaled) covariates back to their original units, intercept
        column excluded.
        """
        X = self.covariates if X is None else np.asarray(X, dtype=float)
        if not self.standardized:
            return X
        return X * (self.maximums - self.minimums) + self.minimums

    def standardize(self):
        """
        Rescales the covariate columns into [0, 1] again. Scaling is
        idempotent: a standardized dataset comes back unchanged.
        """
        names = self.columns[1:] if self.intercept else self.columns
        scaled, minimums, maximums = min_max_scale(self.covariates, names)
        if self.standardized:
            minimums = self.minimums + minimums * (self.maximums - self.minimums)
            maximums = self.minimums + maximums * (self.maximums - self.minimums)

        X = np.column_stack([np.ones(self.n), scaled]) if self.intercept else scaled
        return RegressionDataset(X, self.y, self.columns, self.response,
                                 minimums=minimums, maximums=maximums, intercept=self.intercept)

    def distinct_rows(self):
        """
        Distinct covariate rows in increasing order and their multiplicities.
        """
        rows, counts = np.unique(self.X, axis=0, return_counts=True)
        return rows, counts

    def __repr__(self):
        return 'RegressionDataset(n={}, columns={!r}, response={!r})'.format(self.n, self.columns, self.response)


def min_max_scale(X, columns):
    X = np.asarray(X, dtype=float)
    minimums = X.min(axis=0)
    maximums = X.max(axis=0)
    for j, name in enumerate(columns):
        if not maximums[j] > minimums[j]:
            raise DatasetError('constant column cannot be min-max standardized', column=name)
    return (X - minimums) / (maximums - minimums), minimums, maximums


def load_regression_csv(path, response, standardize=True, intercept=True, columns=None):
    """
    Reads a CSV file with a header row. Every column other than `response`
    (or only `columns`, if given) becomes a covariate.

    :raises DatasetError: missing columns, non-numeric cells, constant columns
        under standardization
    """
    with io.open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise DatasetError('file is empty')

        if response not in header:
            raise DatasetError('response column not found', row=1, column=response)

        names = [name for name in header if name != response] if columns is None else list(columns)
        for name in names:
            if name not in header:
                raise DatasetError('covariate column not found', row=1, column=name)
        if not names and not intercept:
            raise DatasetError('no covariates and no intercept')

        indices = [header.index(name) for name in names]
        target = header.index(response)

        X, y = [], []
        for line, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise DatasetError('expected {} cells, got {}'.format(len(header), len(record)), row=line)

            values = []
            for index in indices + [target]:
                try:
                    value = float(record[index])
                except ValueError:
                    raise DatasetError('not a number: {!r}'.format(record[index]), row=line, column=header[index])
                if not np.isfinite(value):
                    raise DatasetError('not a finite number: {!r}'.format(record[index]),
                                       row=line, column=header[index])
                values.append(value)

            X.append(values[:-1])
            y.append(values[-1])

    if not y:
        raise DatasetError('file has no data rows')

    X = np.array(X, dtype=float).reshape(len(y), len(names))
    return RegressionDataset.from_arrays(X, y, columns=names, response=response,
                                         standardize=standardize and bool(names), intercept=intercept)
