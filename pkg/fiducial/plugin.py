"""
Model family lookup by name.
"""
import inspect
import logging
from importlib.metadata import entry_points

import fiducial.models
from fiducial.model import ModelSpec


logger = logging.getLogger(__name__)


MODEL_ENTRY_POINT = 'fiducial.model'


DEFAULT_MODELS = dict(
    (cls.NAME, cls) for _, cls in inspect.getmembers(fiducial.models, inspect.isclass)
    if issubclass(cls, ModelSpec) and cls.NAME is not None
)


def registered(group):
    try:
        return entry_points(group=group)
    except TypeError:
        # Python < 3.10 returns a mapping of groups
        return entry_points().get(group, [])


def find_models(default=None, entry_point=MODEL_ENTRY_POINT):
    """
    Model families by name: the built-in ones plus every class registered
    under the `fiducial.model` entry point group. A registered family must
    subclass `fiducial.model.ModelSpec` and supply its own phi and g_m.
    """
    models = dict(DEFAULT_MODELS if default is None else default)

    for entry_point in registered(entry_point):
        cls = entry_point.load()
        if not (inspect.isclass(cls) and issubclass(cls, ModelSpec)):
            logger.warning('ignoring model entry point %s: %r is not a ModelSpec', entry_point.name, cls)
            continue
        models[entry_point.name] = cls
        logger.debug('loaded model %s: %s', entry_point.name, cls)

    return models
