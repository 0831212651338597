"""
Options of the command line, of config files and of model hyperparameters.

A `Config` subclass declares its options as upper-case `ConfigOption`
attributes. The same declaration feeds argparse (`init_parser`), config
files (`parser_defaults`) and keyword construction of models
(`update_from_dict`).
"""
import io


class ConfigException(Exception):
    pass


class InvalidConfig(ConfigException):
    pass


class OptionRequired(InvalidConfig):
    def __init__(self, name, option):
        InvalidConfig.__init__(self, '--{} is required'.format(option_flag(name)))

        self.name = name
        self.option = option


class ConflictingOptions(InvalidConfig):
    def __init__(self, names):
        InvalidConfig.__init__(self, '{} can not be used together'.format(
            ' and '.join('--' + option_flag(name) for name in names)
        ))

        self.names = names


class InvalidHyperparameter(InvalidConfig):
    def __init__(self, name, value, expected):
        InvalidConfig.__init__(
            self, 'hyperparameter {} = {!r} out of domain, expected {}'.format(name, value, expected)
        )

        self.name = name
        self.value = value
        self.expected = expected


class InvalidOption(ConfigException):
    def __init__(self, name):
        ConfigException.__init__(self, 'unknown option {!r}'.format(option_flag(name)))

        self.name = name


class InvalidConfigFile(InvalidConfig):
    def __init__(self, path, line, message):
        InvalidConfig.__init__(self, '{}:{}: {}'.format(path, line, message))

        self.path = path
        self.line = line


def one_of(choices):
    def choice(x):
        if x not in choices:
            raise ValueError('invalid choice {!r}, expected one of {!r}'.format(x, choices))
        return x

    choice.__config_doc__ = 'One of: {}'.format(', '.join(choices))
    return choice


_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off', '')


def parse_bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError('not a boolean: {!r}'.format(value))


def option_key(name):
    """
    Normalizes a flag or config-file key (`--chains`, `warn_increment`,
    `Warn-Increment`) to the upper-case option name (`WARN_INCREMENT`).
    """
    return name.strip().lstrip('-').replace('-', '_').upper()


def format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ','.join(format_value(element) for element in value)
    return str(value)


def read_config_file(path):
    """
    Reads a line-oriented `key = value` file. Returns an ordered mapping of
    upper-case option names to raw string values.
    """
    values = dict()

    with io.open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue

            if '=' not in line:
                raise InvalidConfigFile(path, number, 'expected key = value, got {!r}'.format(line))

            key, value = line.split('=', 1)
            key = option_key(key)
            if not key:
                raise InvalidConfigFile(path, number, 'empty key')
            if key in values:
                raise InvalidConfigFile(path, number, 'duplicate key {!r}'.format(key.lower()))

            values[key] = value.strip()

    return values


def option_flag(name):
    return name.lower().replace('_', '-')


class ConfigOption(object):
    """
    One option. `converter` turns raw text (flag value or config file value)
    into the option's value; `bool` declares an on/off flag.
    """
    def __init__(self, description, converter=None, default=None, required=False):
        if default is not None and required:
            raise ValueError('a required option can not have a default')

        self.converter = converter or (lambda x: x)
        self.default = default
        self.required = required

        doc = getattr(self.converter, '__config_doc__', None)
        self.description = description if doc is None else '{}. {}'.format(description.rstrip('. '), doc)

    @property
    def is_flag(self):
        return self.converter is bool

    def convert(self, value):
        if value is None:
            return None
        if self.is_flag:
            return parse_bool(value)
        return self.converter(value)

    def to_parser_arguments(self, default):
        if self.is_flag:
            return dict(action='store_true', default=bool(default), help=self.description)
        return dict(type=self.converter, default=default, help=self.description)


class ExclusiveOptions(object):
    """
    At most one of the named options may be set.
    """
    def __init__(self, *names):
        if len(names) < 2:
            raise ValueError('need at least two options')
        self.names = names

    def validate(self, config):
        given = [name for name in self.names if config[name] not in (None, False)]
        if len(given) > 1:
            raise ConflictingOptions(given)


class Config(object):
    """
    Base for all option sets: subcommand options, global options and the
    hyperparameters of every model family.

        class NormalConfig(Config):
            SIGMA = ConfigOption(
                converter=float,
                default=1.0,
                description='Known standard deviation of the observations'
            )

        config = NormalConfig()
        config['SIGMA'] = '2.5'   # converted with float
        config.validate()

    Constraints listed in `__constraints__` are checked by `validate`.
    """

    def __init__(self):
        self._options = dict(
            (name, option) for name, option in self.declared_options()
        )
        self._values = dict(
            (name, option.default) for name, option in self._options.items()
        )

    @classmethod
    def declared_options(cls):
        for name in dir(cls):
            option = getattr(cls, name)
            if name.isupper() and isinstance(option, ConfigOption):
                yield name, option

    def set(self, name, value, convert=True):
        if name not in self._options:
            raise InvalidOption(name)
        self._values[name] = self._options[name].convert(value) if convert else value

    def __getitem__(self, item):
        return self._values[item]

    def __setitem__(self, key, value):
        self.set(key, value)

    def __contains__(self, item):
        return item in self._options

    def items(self):
        return sorted(self._options.items())

    @property
    def valid(self):
        try:
            self.validate()
        except InvalidConfig:
            return False
        return True

    def validate(self):
        """
        :raises OptionRequired: if a required option has no value
        :raises InvalidConfig: if a constraint is violated
        """
        for name, option in self.items():
            if option.required and self._values.get(name) is None:
                raise OptionRequired(name, option)

        for constraint in getattr(self, '__constraints__', ()):
            constraint.validate(self)

    def update_from_object(self, obj, convert=True, ignore_additional=False):
        self.update_from_dict(
            dict((name, getattr(obj, name)) for name in dir(obj) if not name.startswith('_')),
            convert=convert, ignore_additional=ignore_additional
        )

    def update_from_dict(self, values, convert=True, ignore_additional=False):
        for name, value in values.items():
            key = option_key(name)
            if key not in self._options and ignore_additional:
                continue
            self.set(key, value, convert=convert)

    def init_parser(self, parser, skip=(), defaults=None):
        """
        Adds one `--option-name` argument per option. `defaults` (converted
        values, e.g. from a config file) replace option defaults. Required
        options are not required by argparse: `validate` checks them once
        flags, file values and defaults are merged.
        """
        defaults = defaults or dict()

        for name, option in self.items():
            if name in skip:
                continue
            parser.add_argument(
                '--' + option_flag(name),
                dest=name,
                **option.to_parser_arguments(defaults.get(name, option.default))
            )

    def parser_defaults(self, values):
        """
        Converts raw config-file values for the options of this config into
        argparse defaults. Unknown names are left out.
        """
        defaults = dict()
        for name, value in values.items():
            if name in self._options:
                try:
                    defaults[name] = self._options[name].convert(value)
                except ValueError as e:
                    raise InvalidConfig('invalid value for {}: {}'.format(option_flag(name), e))
        return defaults

    def to_dict(self, transform=None):
        return dict(
            (transform(name) if transform else name, value) for name, value in self._values.items()
        )
