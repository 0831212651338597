"""
Where samplers report what happened during a run.

Library calls never print or log directly: they hand run events to a sink.
The CLI passes a `LoggingSink`, tests pass a `CollectingSink` and inspect it.
"""
import collections
import logging


Message = collections.namedtuple('Message', ['type', 'content'])


class Sink(object):
    """
    Receives the events of a sampler run. Subclasses implement the three
    message levels; the run events are formatted into messages here.
    """
    def info(self, message):
        raise NotImplementedError

    def warning(self, message):
        raise NotImplementedError

    def error(self, message):
        raise NotImplementedError

    def chains_started(self, model, chains, n, horizon, blocks):
        self.info('running {} chain(s) of {} from m={} to N={} on {} block(s)'.format(
            chains, model, n, horizon, blocks
        ))

    def adjusted(self, count):
        """
        Steps that the model clamped or reset instead of flagging.
        """
        self.warning('{} step(s) were clamped or reset to stay in the model domain'.format(count))

    def increment_exceeded(self, window, largest, threshold):
        self.warning('largest state change over the last {} steps is {!r}, above {!r}; '
                     'consider a longer horizon'.format(window, largest, threshold))

    def flagged(self, event):
        """
        One call per chain that left its model domain.

        :param event: a `fiducial.model.FlaggedStep`
        """
        self.error(str(event))


class NullSink(Sink):
    def info(self, message):
        pass

    def warning(self, message):
        pass

    def error(self, message):
        pass


class LoggingSink(Sink):
    _DEFAULT_LOGGER = logging.getLogger('fiducial')

    def __init__(self, logger=None):
        self.logger = logger or self._DEFAULT_LOGGER

    def info(self, message):
        self.logger.info(message)

    def warning(self, message):
        self.logger.warning(message)

    def error(self, message):
        self.logger.error(message)

    def flagged(self, event):
        self.logger.error('chain %s flagged at m=%d: %s (state=%r, z=%r)',
                          event.chain, event.m, event.reason, event.state, event.z)


class CollectingSink(Sink):
    """
    Keeps every message and every flagged step for later inspection.
    """
    def __init__(self):
        self.messages = list()
        self.events = list()

    def info(self, message):
        self.messages.append(Message('info', message))

    def warning(self, message):
        self.messages.append(Message('warning', message))

    def error(self, message):
        self.messages.append(Message('error', message))

    def flagged(self, event):
        self.events.append(event)
        Sink.flagged(self, event)

    def by_type(self, type_):
        return [message for message in self.messages if message.type == type_]

    @property
    def warnings(self):
        return self.by_type('warning')

    @property
    def errors(self):
        return self.by_type('error')
