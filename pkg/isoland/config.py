from __future__ import absolute_import
import copy
import json
import os
import numbers
import six

from . import correlators
from . import optimizers
from .utils.generic_utils import get_json_type


class ConfigError(ValueError):
    '''Malformed run configuration.'''


# every key a run configuration may carry, with its default
DEFAULTS = {
    'correlator': {'name': 'Log', 'epsilon': 1.},
    'mu': 1.,
    'domain': {'R1': 0., 'R2': None, 'E': [None, None]},
    'complexity': {'method': 'both'},
    'optimizer': {'name': 'GridAscent'},
    'verify': {'n': 6, 'rho': 1., 'u': 0., 'samples': 10 ** 6, 'batch_size': 50000,
               'schur_draws': 10 ** 4, 'schur_n': [2, 4, 8], 'n_sweep': []},
    'kacrice': {'n': [2], 'goe_samples': 1000, 'quad_nodes': 24, 'hermite_nodes': 24,
                'window': 8., 'truncation': 8.},
    'census': {'n': 2, 'nb_fields': 400, 'm_features': 1024, 'grid_density': 32,
               'newton_tol': 1e-10},
    'seed': 0,
    'output': {'path': None, 'format': 'json'},
}

METHODS = ('total', 'constrained', 'closed_form', 'both')
FORMATS = ('json', 'csv')


def _number(value, key, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError('%s must be a number, got: %r' % (key, value))
    if integer and int(value) != value:
        raise ConfigError('%s must be an integer, got: %r' % (key, value))
    if positive and not value > 0:
        raise ConfigError('%s must be positive, got: %r' % (key, value))
    return int(value) if integer else float(value)


def _optional_number(value, key):
    return None if value is None else _number(value, key)


def _number_or_list(value, key, optional=False):
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError('%s sweep must not be empty' % key)
        return [_optional_number(v, key) if optional else _number(v, key) for v in value]
    return _optional_number(value, key) if optional else _number(value, key)


def _merge(defaults, given, path):
    '''Defaults overridden by `given`, rejecting keys the defaults lack.'''
    if not isinstance(given, dict):
        raise ConfigError('%s must be a mapping, got: %r' % (path or 'config', given))
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise ConfigError('Unknown key: %s' % (path + '.' + key if path else key))
        if isinstance(defaults[key], dict) and key not in ('correlator', 'optimizer'):
            out[key] = _merge(defaults[key], value, path + '.' + key if path else key)
        else:
            out[key] = copy.deepcopy(value)
    return out


class RunConfig(object):
    '''Validated, fully resolved configuration of one command-line run.

    # Arguments
        config: dict, possibly partial; missing keys take DEFAULTS.

    # Raises
        ConfigError: unknown keys, wrong types, or component parameters
            rejected by the component itself.
    '''
    def __init__(self, config=None):
        config = _merge(DEFAULTS, config or {}, '')
        config['mu'] = _number_or_list(config['mu'], 'mu')
        domain = config['domain']
        domain['R1'] = _number(domain['R1'], 'domain.R1')
        domain['R2'] = _number_or_list(domain['R2'], 'domain.R2', optional=True)
        E = domain['E']
        if not isinstance(E, (list, tuple)) or len(E) != 2:
            raise ConfigError('domain.E must be a pair [lo, hi], got: %r' % (E,))
        domain['E'] = [_optional_number(E[0], 'domain.E'), _optional_number(E[1], 'domain.E')]
        if config['complexity']['method'] not in METHODS:
            raise ConfigError('complexity.method must be one of %s' % (METHODS,))
        verify = config['verify']
        for key in ('n', 'samples', 'batch_size', 'schur_draws'):
            verify[key] = _number(verify[key], 'verify.' + key, positive=True, integer=True)
        verify['rho'] = _number(verify['rho'], 'verify.rho', positive=True)
        verify['u'] = _number(verify['u'], 'verify.u')
        for key in ('schur_n', 'n_sweep'):
            verify[key] = [_number(v, 'verify.' + key, positive=True, integer=True)
                           for v in verify[key]]
        kr = config['kacrice']
        kr['n'] = [_number(v, 'kacrice.n', positive=True, integer=True)
                   for v in (kr['n'] if isinstance(kr['n'], list) else [kr['n']])]
        for key in ('goe_samples', 'quad_nodes', 'hermite_nodes'):
            kr[key] = _number(kr[key], 'kacrice.' + key, positive=True, integer=True)
        for key in ('window', 'truncation'):
            kr[key] = _number(kr[key], 'kacrice.' + key, positive=True)
        census = config['census']
        for key in ('n', 'nb_fields', 'm_features', 'grid_density'):
            census[key] = _number(census[key], 'census.' + key, positive=True, integer=True)
        census['newton_tol'] = _number(census['newton_tol'], 'census.newton_tol',
                                       positive=True)
        seed = _number(config['seed'], 'seed', integer=True)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError('seed must be a 64-bit unsigned integer, got: %r' % seed)
        config['seed'] = seed
        output = config['output']
        if output['format'] not in FORMATS:
            raise ConfigError('output.format must be one of %s, got: %r' %
                              (FORMATS, output['format']))
        if output['path'] is not None and not isinstance(output['path'], six.string_types):
            raise ConfigError('output.path must be a string or null')
        self.config = config
        # materialize component defaults; bad parameters surface here
        config['correlator'] = self.correlator().get_config()
        config['optimizer'] = self.optimizer().get_config()

    def correlator(self):
        try:
            return correlators.from_config(self.config['correlator'])
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError('Invalid correlator %r: %s' % (self.config['correlator'], e))

    def optimizer(self):
        params = dict(self.config['optimizer'])
        name = params.pop('name', 'GridAscent')
        try:
            opt = optimizers.get(name, params)
        except Exception as e:
            raise ConfigError('Invalid optimizer %r: %s' % (self.config['optimizer'], e))
        unknown = set(params) - set(opt.get_config())
        if unknown:
            raise ConfigError('Unknown optimizer options: ' + ', '.join(sorted(unknown)))
        return opt

    @property
    def mus(self):
        mu = self.config['mu']
        return list(mu) if isinstance(mu, list) else [mu]

    @property
    def r2s(self):
        R2 = self.config['domain']['R2']
        return list(R2) if isinstance(R2, list) else [R2]

    @property
    def seed(self):
        return self.config['seed']

    def update(self, **overrides):
        '''New RunConfig with top-level or dotted keys replaced,
        eg. update(seed=3, **{'output.format': 'csv'}).'''
        config = copy.deepcopy(self.config)
        for key, value in overrides.items():
            node = config
            parts = key.split('.')
            for part in parts[:-1]:
                node = node[part]
            node[parts[-1]] = value
        return RunConfig(config)

    def get_config(self):
        return copy.deepcopy(self.config)

    def to_json(self, **kwargs):
        return json.dumps(self.get_config(), default=get_json_type, **kwargs)

    def to_yaml(self, **kwargs):
        import yaml
        return yaml.safe_dump(self.get_config(), **kwargs)


def from_config(config):
    return RunConfig(config)


def from_json(json_string):
    try:
        config = json.loads(json_string)
    except ValueError as e:
        raise ConfigError('Malformed JSON config: %s' % e)
    return from_config(config)


def from_yaml(yaml_string):
    import yaml
    try:
        config = yaml.safe_load(yaml_string)
    except yaml.YAMLError as e:
        raise ConfigError('Malformed YAML config: %s' % e)
    return from_config(config)


def load(path):
    '''RunConfig from a JSON file, or YAML when the extension says so.'''
    if not os.path.exists(path):
        raise ConfigError('Config file not found: ' + str(path))
    with open(path) as f:
        text = f.read()
    if os.path.splitext(path)[1].lower() in ('.yaml', '.yml'):
        return from_yaml(text)
    return from_json(text)
