from __future__ import absolute_import
import numpy as np
import time
import sys
import six
from concurrent.futures import ThreadPoolExecutor


def get_from_module(identifier, module_params, module_name,
                    instantiate=False, kwargs=None):
    '''Resolve `identifier` against the names exported by a module.

    Strings are looked up in `module_params` (usually `globals()` of the
    calling module); anything else is assumed to already be the object
    and is returned untouched.
    '''
    if isinstance(identifier, six.string_types):
        res = module_params.get(identifier)
        if res is None:
            raise Exception('Invalid ' + str(module_name) + ': ' +
                            str(identifier))
        if instantiate:
            return res(**(kwargs or {}))
        return res
    return identifier


def get_json_type(obj):
    '''`default=` hook for json.dumps: numpy scalars/arrays and types.
    '''
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if type(obj).__module__ == np.__name__:
        return obj.item()
    if type(obj).__name__ == type.__name__:
        return obj.__name__
    if hasattr(obj, 'get_config'):
        return obj.get_config()
    raise TypeError('Not JSON Serializable: ' + repr(obj))


class Progbar(object):
    def __init__(self, target, width=30, verbose=1, stream=None):
        '''
            @param target: total number of steps expected
        '''
        self.width = width
        self.target = max(1, int(target))
        self.verbose = verbose
        self.stream = stream or sys.stdout
        self.sums = {}
        self.order = []
        self.start = time.time()
        self.total_width = 0
        self.seen_so_far = 0

    def update(self, current, values=[]):
        '''
            @param current: index of current step
            @param values: list of tuples (name, value_for_last_step).
            Values are averaged over the steps seen so far.
        '''
        step = current - self.seen_so_far
        for k, v in values:
            if k not in self.sums:
                self.sums[k] = [0., 0]
                self.order.append(k)
            self.sums[k][0] += v * step
            self.sums[k][1] += step
        self.seen_so_far = current

        elapsed = time.time() - self.start
        info = ''
        for k in self.order:
            avg = self.sums[k][0] / max(1, self.sums[k][1])
            info += (' - %s: %.4f' if abs(avg) > 1e-3 else ' - %s: %.4e') % (k, avg)

        if self.verbose == 1:
            numdigits = int(np.floor(np.log10(self.target))) + 1
            bar = ('%%%dd/%%%dd [' % (numdigits, numdigits)) % (current, self.target)
            prog_width = int(self.width * float(current) / self.target)
            if prog_width > 0:
                bar += '=' * (prog_width - 1)
                bar += '>' if current < self.target else '='
            bar += '.' * (self.width - prog_width) + ']'
            if current < self.target:
                eta = elapsed / max(1, current) * (self.target - current)
                bar += ' - ETA: %ds' % eta
            else:
                bar += ' - %ds' % elapsed
            line = bar + info
            pad = max(0, self.total_width - len(line))
            self.stream.write('\r' + line + ' ' * pad)
            self.total_width = len(line)
            if current >= self.target:
                self.stream.write('\n')
            self.stream.flush()
        elif self.verbose == 2 and current >= self.target:
            self.stream.write('%ds' % elapsed + info + '\n')

    def add(self, n, values=[]):
        self.update(self.seen_so_far + n, values)


def run_streams(fn, nb_streams, workers=1):
    '''Yields fn(0), ..., fn(nb_streams - 1) in stream order.

    With workers > 1 the calls run on a thread pool (numpy releases the
    GIL in its linear algebra); the order of the results never depends on
    the number of workers.
    '''
    if workers <= 1 or nb_streams <= 1:
        for i in range(nb_streams):
            yield fn(i)
        return
    with ThreadPoolExecutor(max_workers=workers) as executor:
        for result in executor.map(fn, range(nb_streams)):
            yield result
