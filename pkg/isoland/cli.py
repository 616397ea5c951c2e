from __future__ import absolute_import
from __future__ import print_function
import argparse
import sys
import numpy as np

from . import __version__
from . import common
from . import config as run_config
from . import complexity
from . import correlators
from . import hessian
from . import kacrice
from .correlators import DomainError, UnsupportedError
from .optimizers import NoConvergence
from .utils.io_utils import result_payload, write_result
from .utils.np_utils import split_seed

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _finite(x):
    return float(x) if x is not None and np.isfinite(x) else None


def _domain(cfg, R2):
    d = cfg.config['domain']
    return complexity.DomainSpec(R1=d['R1'], R2=R2, E=d['E'])


def _sweep(cfg):
    '''(R2, mu) pairs in sweep order: R2 outer, mu inner.'''
    return [(R2, mu) for R2 in cfg.r2s for mu in cfg.mus]


def cmd_validate(cfg):
    c = cfg.correlator()
    report = correlators.check_bernstein(c).extend(correlators.check_assumption_iv(c))
    rows = []
    for check in report.checks:
        row = check.get_config()
        del row['grid']
        rows.append(row)
    summary = {'overall': report.overall, 'correlator': c.get_config()}
    return rows, summary, EXIT_OK if report.overall else EXIT_FAILED


def _locus_columns(locus):
    if locus is None:
        return {'rho*': None, 'u*': None, 'y*': None, 'regime': None}
    return {'rho*': float(locus.rho_star), 'u*': float(locus.u_star),
            'y*': float(locus.y_star), 'regime': locus.regime}


def _complexity_row(c, mu, dom, method, opts):
    row = {'mu': mu, 'R1': dom.R1, 'R2': _finite(dom.R2),
           'E_lo': _finite(dom.E[0]), 'E_hi': _finite(dom.E[1])}
    result = None
    if method in ('constrained', 'both'):
        result = complexity.complexity_constrained(c, mu, dom, opts)
    elif method == 'closed_form':
        if np.isfinite(dom.E[0]) or np.isfinite(dom.E[1]):
            raise DomainError('closed_form needs E = R')
        result = complexity.complexity_closed_form(c, mu, dom.R1, dom.R2)
    if method in ('total', 'both'):
        growth = complexity.shell_growth(c, mu, dom.R1, dom.R2)
        total = complexity.total_complexity(c, mu, **growth).value
        row['total'] = float(total)
        if result is None:
            result = complexity.ComplexityResult(total, None, complexity.CLOSED_FORM)
    row['value'] = float(result.value)
    row.update(_locus_columns(result.locus))
    row['method'] = result.method
    return row


def cmd_complexity(cfg):
    c = cfg.correlator()
    method = cfg.config['complexity']['method']
    rows = []
    for R2, mu in _sweep(cfg):
        try:
            rows.append(_complexity_row(c, mu, _domain(cfg, R2), method, cfg.optimizer()))
        except (DomainError, NoConvergence) as e:
            rows.append({'mu': mu, 'R1': cfg.config['domain']['R1'], 'R2': R2,
                         'E_lo': cfg.config['domain']['E'][0],
                         'E_hi': cfg.config['domain']['E'][1], 'error': str(e)})
    return rows, {'method': method}, EXIT_OK


def cmd_optimize(cfg):
    c = cfg.correlator()
    rows = []
    for R2, mu in _sweep(cfg):
        try:
            dom = _domain(cfg, R2)
            locus = complexity.optimize_psi(c, mu, dom, cfg.optimizer())
            row = {'mu': mu, 'R1': dom.R1, 'R2': _finite(dom.R2)}
            row.update(locus.get_config())
            rows.append(row)
        except (DomainError, NoConvergence) as e:
            rows.append({'mu': mu, 'R2': R2, 'error': str(e)})
    return rows, {}, EXIT_OK


def _schur_models(c, cfg):
    v = cfg.config['verify']
    models = []
    for n in v['schur_n']:
        for mu in cfg.mus:
            for rho in (0.5 * v['rho'], v['rho'], 2. * v['rho']):
                models.append(hessian.ConditionalHessianModel.from_correlator(
                    c, mu, rho, v['u'], max(2, n)))
    return models


def _kac_rice_sweep(c, cfg, mu, ns, seed):
    '''(n, gap) with gap = |log(estimate)/n - constrained complexity|.'''
    kr = cfg.config['kacrice']
    dom = _domain(cfg, cfg.r2s[0])
    limit = complexity.complexity_constrained(c, mu, dom, cfg.optimizer()).value
    gaps = []
    for i, n in enumerate(ns):
        result = kacrice.kac_rice_integral(
            c, mu, dom.E, dom.R1, dom.R2, n, goe_samples=kr['goe_samples'],
            quad_nodes=kr['quad_nodes'], hermite_nodes=kr['hermite_nodes'],
            seed=split_seed(seed, i), window=kr['window'], truncation=kr['truncation'],
            verbose=common.verbose())
        gaps.append((n, abs(result.log_estimate / n - limit)))
    return gaps


def _gap_rows(gaps):
    '''Rows requiring the gaps of a sweep to shrink strictly with n and the
    last one to be below 0.1.
    '''
    first_n, first = gaps[0]
    rows = [hessian.verification_row('kac_rice_gap(n=%d)' % first_n, first, 0., first)]
    for (_, before), (n, gap) in zip(gaps, gaps[1:]):
        rows.append(hessian.verification_row('kac_rice_gap(n=%d)' % n, gap, 0.,
                                             np.nextafter(before, 0.)))
    rows.append(hessian.verification_row('kac_rice_gap_final', gaps[-1][1], 0., 0.1))
    return rows


def cmd_verify(cfg):
    c = cfg.correlator()
    v = cfg.config['verify']
    mu = cfg.mus[0]
    seed = cfg.seed
    model = hessian.ConditionalHessianModel.from_correlator(c, mu, v['rho'], v['u'], v['n'])
    report = hessian.verify_conditional_covariance(model, v['samples'], split_seed(seed, 0),
                                                   v['batch_size'], verbose=common.verbose())
    report.extend(hessian.check_schur_identity(_schur_models(c, cfg), v['schur_draws'],
                                               split_seed(seed, 1)))
    if v['n_sweep']:
        gaps = _kac_rice_sweep(c, cfg, mu, sorted(v['n_sweep']), split_seed(seed, 2))
        report.extend(_gap_rows(gaps))
    rows = [dict(r._asdict()) for r in report.rows]
    summary = {'overall': report.overall, 'max_ratio': float(report.max_ratio),
               'worst': report.worst.name}
    return rows, summary, EXIT_OK if report.overall else EXIT_FAILED


def cmd_kacrice(cfg):
    c = cfg.correlator()
    kr = cfg.config['kacrice']
    dom = _domain(cfg, cfg.r2s[0])
    rows = []
    index = 0
    for mu in cfg.mus:
        for n in kr['n']:
            row = {'mu': mu, 'n': n, 'R1': dom.R1, 'R2': _finite(dom.R2)}
            try:
                result = kacrice.kac_rice_integral(
                    c, mu, dom.E, dom.R1, dom.R2, n, goe_samples=kr['goe_samples'],
                    quad_nodes=kr['quad_nodes'], hermite_nodes=kr['hermite_nodes'],
                    seed=split_seed(cfg.seed, index), window=kr['window'],
                    truncation=kr['truncation'], verbose=common.verbose())
                row.update(dict(result._asdict()))
                row['log_estimate_per_n'] = result.log_estimate / n
            except DomainError as e:
                row['error'] = str(e)
            rows.append(row)
            index += 1
    return rows, {}, EXIT_OK


def cmd_census(cfg):
    c = cfg.correlator()
    cs = cfg.config['census']
    d = cfg.config['domain']
    rows = []
    for i, (R2, mu) in enumerate(_sweep(cfg)):
        row = {'mu': mu, 'n': cs['n'], 'R1': d['R1'], 'R2': R2, 'nb_fields': cs['nb_fields']}
        try:
            mean, stderr, counts = kacrice.census_mean(
                c, mu, cs['n'], d['E'], d['R1'], R2, cs['nb_fields'], cs['m_features'],
                cs['grid_density'], cs['newton_tol'], seed=split_seed(cfg.seed, i),
                verbose=common.verbose())
            row.update({'mean': mean, 'stderr': stderr,
                        'counts': [int(k) for k in counts]})
        except DomainError as e:
            row['error'] = str(e)
        rows.append(row)
    return rows, {}, EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'complexity': cmd_complexity,
    'optimize': cmd_optimize,
    'verify': cmd_verify,
    'kacrice': cmd_kacrice,
    'census': cmd_census,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='isoland',
        description='Complexity of random landscapes with isotropic increments.')
    parser.add_argument('--version', action='version', version='isoland ' + __version__)
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    for name in sorted(COMMANDS):
        p = sub.add_parser(name)
        p.add_argument('--config', help='JSON (or .yaml) run configuration')
        p.add_argument('--seed', type=int, help='64-bit run seed')
        p.add_argument('--out', help='output path (stdout when omitted)')
        p.add_argument('--format', choices=run_config.FORMATS, help='output format')
        p.add_argument('--workers', type=int, help='worker threads')
        p.add_argument('-v', '--verbose', type=int, choices=(0, 1, 2), default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = run_config.load(args.config) if args.config else run_config.RunConfig()
        overrides = {}
        if args.seed is not None:
            overrides['seed'] = args.seed
        if args.out is not None:
            overrides['output.path'] = args.out
        if args.format is not None:
            overrides['output.format'] = args.format
        if overrides:
            cfg = cfg.update(**overrides)
        if args.workers is not None:
            common.set_workers(args.workers)
        if args.verbose is not None:
            common.set_verbose(args.verbose)
    except run_config.ConfigError as e:
        sys.stderr.write('isoland: config error: %s\n' % e)
        return EXIT_CONFIG
    except Exception as e:
        sys.stderr.write('isoland: %s\n' % e)
        return EXIT_CONFIG
    if common.verbose():
        sys.stderr.write('isoland %s: %s with %d worker(s)\n' %
                         (__version__, args.command, common.workers()))
    try:
        rows, summary, code = COMMANDS[args.command](cfg)
    except UnsupportedError as e:
        sys.stderr.write('isoland: unsupported: %s\n' % e)
        return EXIT_CONFIG
    except DomainError as e:
        sys.stderr.write('isoland: domain error: %s\n' % e)
        return EXIT_CONFIG
    except NoConvergence as e:
        sys.stderr.write('isoland: no convergence: %s\n' % e)
        return EXIT_FAILED
    output = cfg.config['output']
    write_result(result_payload(args.command, cfg, rows, summary), output['path'],
                 output['format'])
    return code


if __name__ == '__main__':
    sys.exit(main())
