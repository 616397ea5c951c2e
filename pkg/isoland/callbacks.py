from __future__ import absolute_import
from __future__ import print_function

import sys

from .utils.generic_utils import Progbar


class CallbackList(object):
    '''Forwards the hooks of one estimator run to each callback in order.
    '''
    def __init__(self, callbacks=(), task=None, params=None):
        self.callbacks = list(callbacks)
        for callback in self.callbacks:
            callback._set_task(task)
            callback._set_params(params or {})

    def _fire(self, hook, *args):
        for callback in self.callbacks:
            getattr(callback, hook)(*args)

    def on_run_begin(self, logs={}):
        self._fire('on_run_begin', logs)

    def on_run_end(self, logs={}):
        self._fire('on_run_end', logs)

    def on_batch_begin(self, batch, logs={}):
        self._fire('on_batch_begin', batch, logs)

    def on_batch_end(self, batch, logs={}):
        self._fire('on_batch_end', batch, logs)


class Callback(object):
    '''Abstract base class used to build new callbacks.

    # Properties
        params: dict. Run parameters
            (eg. verbosity, total number of samples, metrics...).
        task: name of the running estimator
            (eg. 'expected_abs_det', 'kac_rice_integral').

    The `logs` dictionary that callback methods take as argument
    contains keys for quantities relevant to the current batch or run.
    The Monte Carlo estimators pass:

        on_batch_begin: logs include `size`,
            the number of draws in the current batch.
        on_batch_end: logs include `size` and the running metrics
            listed in `params['metrics']` (eg. `log_abs_det`).
        on_run_end: logs include the final estimate.
    '''
    def __init__(self):
        pass

    def _set_params(self, params):
        self.params = params

    def _set_task(self, task):
        self.task = task

    def on_run_begin(self, logs={}):
        pass

    def on_run_end(self, logs={}):
        pass

    def on_batch_begin(self, batch, logs={}):
        pass

    def on_batch_end(self, batch, logs={}):
        pass


class BaseLogger(Callback):
    '''Callback that prints sampling progress to standard error.

    Attached by every Monte Carlo estimator when `verbose` is set (it is
    the basis of the verbosity modes).
    '''
    def __init__(self, stream=None):
        super(BaseLogger, self).__init__()
        self.stream = stream

    def on_run_begin(self, logs={}):
        self.verbose = self.params['verbose']
        self.nb_sample = self.params['nb_sample']
        if self.verbose:
            stream = self.stream or sys.stderr
            stream.write('%s: %d draws\n' % (getattr(self, 'task', 'run'), self.nb_sample))
            self.progbar = Progbar(target=self.nb_sample, verbose=self.verbose,
                                   stream=stream)
        self.seen = 0
        self.totals = {}

    def on_batch_begin(self, batch, logs={}):
        if self.seen < self.nb_sample:
            self.log_values = []

    def on_batch_end(self, batch, logs={}):
        batch_size = logs.get('size', 0)
        self.seen += batch_size

        for k, v in logs.items():
            if k in self.totals:
                self.totals[k] += v * batch_size
            else:
                self.totals[k] = v * batch_size
        for k in self.params['metrics']:
            if k in logs:
                self.log_values.append((k, logs[k]))

        # the last batch is drawn by on_run_end
        if self.verbose and self.seen < self.nb_sample:
            self.progbar.update(self.seen, self.log_values)

    def on_run_end(self, logs={}):
        self.log_values = getattr(self, 'log_values', [])
        for k in self.params['metrics']:
            if k in logs:
                self.log_values.append((k, logs[k]))
        if self.verbose:
            self.progbar.update(self.seen, self.log_values)


class History(Callback):
    '''Callback that records the batch logs of a run into a `History` object.
    '''
    def on_run_begin(self, logs={}):
        self.batch = []
        self.history = {}
        self.seen = 0

    def on_batch_end(self, batch, logs={}):
        self.batch.append(batch)
        self.seen += logs.get('size', 0)
        for k, v in logs.items():
            self.history.setdefault(k, []).append(v)

    def on_run_end(self, logs={}):
        self.result = dict(logs)


def configure(callbacks, task, nb_sample, metrics, verbose=0):
    '''CallbackList for an estimator run, with a BaseLogger prepended
    when `verbose` is set.
    '''
    callbacks = list(callbacks or [])
    if verbose:
        callbacks = [BaseLogger()] + callbacks
    return CallbackList(callbacks, task, {'verbose': verbose,
                                          'nb_sample': nb_sample,
                                          'metrics': list(metrics)})
