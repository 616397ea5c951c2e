from __future__ import absolute_import
from __future__ import print_function
import os
import json
import sys

# relative slack used when an inequality holds with equality
_EPSILON = 1e-9
# below this radius the geometry layer switches to its small-rho series
_RHO_SWITCH = 1e-3
_WORKERS = 1
_VERBOSE = 0


def epsilon():
    return _EPSILON


def set_epsilon(e):
    global _EPSILON
    _EPSILON = float(e)


def rho_switch():
    return _RHO_SWITCH


def set_rho_switch(rho):
    global _RHO_SWITCH
    if not rho > 0:
        raise Exception('rho_switch must be positive, got: ' + str(rho))
    _RHO_SWITCH = float(rho)


def workers():
    return _WORKERS


def set_workers(n):
    global _WORKERS
    n = int(n)
    if n < 1:
        raise Exception('Invalid number of workers: ' + str(n))
    _WORKERS = n


def verbose():
    return _VERBOSE


def set_verbose(v):
    global _VERBOSE
    if v not in {0, 1, 2}:
        raise Exception('Unknown verbosity level: ' + str(v))
    _VERBOSE = v


_isoland_base_dir = os.path.expanduser('~')
_config_path = os.path.join(_isoland_base_dir, '.isoland', 'isoland.json')
if os.path.exists(_config_path):
    with open(_config_path) as f:
        _config = json.load(f)
    _epsilon = _config.get('epsilon', epsilon())
    assert type(_epsilon) == float
    _rho_switch = _config.get('rho_switch', rho_switch())
    assert type(_rho_switch) == float
    _workers = _config.get('workers', workers())
    assert type(_workers) == int
    _verbose = _config.get('verbose', verbose())
    assert _verbose in {0, 1, 2}

    set_epsilon(_epsilon)
    set_rho_switch(_rho_switch)
    set_workers(_workers)
    set_verbose(_verbose)
    if _verbose:
        sys.stderr.write('Using isoland settings from %s.\n' % _config_path)

if 'ISOLAND_WORKERS' in os.environ:
    set_workers(os.environ['ISOLAND_WORKERS'])
