"""
Output files and human readable summaries of a run.

Every file of a run goes through a `ReportWriter`, which remembers what it
wrote so a failed run can remove its partial outputs. Summaries printed on
stdout are rendered from the Jinja2 templates of this package.
"""
import csv
import io
import json
import os.path

import numpy as np
from jinja2 import Environment, PackageLoader

import fiducial
from fiducial.config import format_value
from fiducial.util import makefiledir


def format_float(value):
    """
    Shortest decimal that reads back as the same 64-bit float.
    """
    return repr(float(value))


def _number_filter(value, digits=6):
    return '{:.{}g}'.format(float(value), digits)


def to_json(value):
    """
    Converts numpy scalars/arrays and tuples into plain JSON values.
    """
    if isinstance(value, dict):
        return dict((str(k), to_json(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_json(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


class ReportWriter(object):
    TEMPLATES = 'fiducial.report'

    def __init__(self, path):
        self.path = os.path.abspath(path)
        self.written = list()

        self.environment = Environment(
            loader=PackageLoader(self.TEMPLATES, 'templates'),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            autoescape=False
        )

        self.environment.filters.update(
            number=_number_filter
        )

    def _open(self, name):
        output_path = os.path.join(self.path, name)
        makefiledir(output_path)
        self.written.append(output_path)
        return io.open(output_path, 'w', newline='', encoding='utf-8')

    def write_csv(self, name, header, rows):
        with self._open(name) as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])

    def write_samples(self, names, values, name='samples.csv'):
        values = np.asarray(values, dtype=float)
        rows = ([chain] + [format_float(v) for v in row] for chain, row in enumerate(values))
        self.write_csv(name, ['chain_id'] + list(names), rows)

    def write_json(self, name, data):
        with self._open(name) as f:
            f.write(json.dumps(to_json(data), sort_keys=True, indent=2))
            f.write('\n')

    def write_lines(self, name, lines):
        with self._open(name) as f:
            for line in lines:
                f.write(line)
                f.write('\n')

    def write_histogram(self, column, values, bins):
        rows = histogram_rows(values, bins)
        self.write_csv('hist_{}.csv'.format(column), ['bin_left', 'bin_right', 'count'], rows)
        return rows

    @property
    def files(self):
        return [os.path.relpath(path, self.path) for path in self.written]

    def render(self, template, **kwargs):
        return self.environment.get_template(template).render(**kwargs)

    def remove_written(self):
        for output_path in reversed(self.written):
            if os.path.exists(output_path):
                os.remove(output_path)
        self.written = list()


def histogram_rows(values, bins):
    """
    Equal-width bins over [min, max] of the values as
    (bin_left, bin_right, count) rows.
    """
    values = np.asarray(values, dtype=float)
    counts, edges = np.histogram(values, bins=bins)
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))]


def read_samples(path):
    """
    Reads a samples CSV (as written by `ReportWriter.write_samples`).
    Returns the column names, without chain_id, and a float matrix.
    """
    with io.open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError('{}: empty samples file'.format(path))

        keep = [i for i, name in enumerate(header) if name != 'chain_id']
        rows = []
        for line, record in enumerate(reader, start=2):
            if not record:
                continue
            try:
                rows.append([float(record[i]) for i in keep])
            except (ValueError, IndexError):
                raise ValueError('{}:{}: malformed samples row'.format(path, line))

    if not rows:
        raise ValueError('{}: no samples'.format(path))
    return [header[i] for i in keep], np.array(rows, dtype=float)


class RunInfo(object):
    def __init__(self, command, options, model=None, commandline=None):
        """
        Collection of information used to describe a single run.

        :param command: the subcommand
        :param options: dictionary of every effective option and its value
        :param model: the model family name, if any
        :param commandline: callable used to build commandline parameters (will be passed this instance)
        """
        self.command = command
        self.options = options
        self.model = model

        self._commandline = commandline or Commandline()

    @classmethod
    def create(cls, command, *configs, **kwargs):
        options = dict()
        for config in configs:
            options.update(config.to_dict())
        return cls(command, options, **kwargs)

    @property
    def version(self):
        return fiducial.__version__

    @property
    def commandline(self):
        return self._commandline.build(self)

    def config_lines(self):
        """
        The effective options as `key = value` lines for `--config`.
        """
        lines = []
        for name, value in sorted(self.options.items()):
            if value is None:
                continue
            lines.append('{} = {}'.format(name.lower().replace('_', '-'), format_value(value)))
        return lines

    def config_dict(self):
        return dict(
            (name.lower(), value) for name, value in self.options.items() if value is not None
        )


class ParameterBuilder(object):
    def build(self, run_info):
        raise NotImplementedError

    def __call__(self, run_info):
        return self.build(run_info)


class Commandline(ParameterBuilder):
    def __init__(self, program='fiducial'):
        """
        Parameter builder which serializes a RunInfo
        into commandline arguments.
        """
        self.program = program

    def format_argument(self, name, value):
        name = name.lower().replace('_', '-')

        if isinstance(value, bool):
            return '--{name}'.format(name=name) if value else None

        return '--{name}=\'{value}\''.format(name=name, value=format_value(value))

    def build(self, run_info):
        args = [self.program, run_info.command]

        for name, value in sorted(run_info.options.items()):
            if value is None:
                continue
            formatted = self.format_argument(name, value)
            if formatted is not None:
                args.append(formatted)

        return ' '.join(args)
