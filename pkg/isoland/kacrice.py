from __future__ import absolute_import
import warnings
import numpy as np
from collections import namedtuple
from scipy.special import gammaln, logsumexp
from scipy.stats import norm

from . import common
from . import callbacks as cbks
from .complexity import as_interval
from .correlators import DomainError
from .fields import sample_field
from .geometry import landscape_params
from .hessian import ConditionalHessianModel, rao_blackwell_log_abs_det
from .rmt import goe_eigenvalues
from .utils.generic_utils import run_streams
from .utils.np_utils import rng_for, split_seed, log_mean_and_stderr, gauss_legendre, \
    mean_and_stderr

# below this radius the integrand carries a negligible share of the mass
RHO_MIN = 1e-3


class CriticalPoint(namedtuple('CriticalPoint',
                               ['x', 'value', 'gradient_norm', 'hessian_sign', 'boundary'])):
    '''A root of the gradient: position, u = H/N, |grad H| after polishing,
    sign of det of the Hessian, and whether it lies on a shell edge.'''
    __slots__ = ()

    def get_config(self):
        return {'x': [float(t) for t in self.x],
                'value': float(self.value),
                'gradient_norm': float(self.gradient_norm),
                'hessian_sign': float(self.hessian_sign),
                'boundary': bool(self.boundary)}


class CriticalPointCensus(object):
    '''Distinct critical points of one field realization inside the closed
    shell R1 <= |x|/sqrt(N) <= R2 with u in E.

    Roots within newton_tol of a shell edge are kept and flagged.
    '''
    def __init__(self, points, E, R1, R2, nb_roots):
        self.points = list(points)
        self.E = E
        self.R1 = R1
        self.R2 = R2
        self.nb_roots = nb_roots

    @property
    def count_in(self):
        return len(self.points)

    def get_config(self):
        finite = lambda x: float(x) if np.isfinite(x) else None
        return {'count_in': self.count_in,
                'nb_roots': self.nb_roots,
                'E': [finite(self.E[0]), finite(self.E[1])],
                'R1': self.R1,
                'R2': self.R2,
                'points': [p.get_config() for p in self.points]}


KacRiceResult = namedtuple('KacRiceResult',
                           ['estimate', 'stderr', 'log_estimate', 'log_stderr',
                            'window_warning', 'boundary_mass'])


def _grid_seeds(n, R1, R2, grid_density):
    half = R2 * np.sqrt(n)
    edges = np.linspace(-half, half, grid_density + 1)
    centres = 0.5 * (edges[1:] + edges[:-1])
    seeds = np.stack(np.meshgrid(*([centres] * n), indexing='ij'), axis=-1).reshape(-1, n)
    radius = np.linalg.norm(seeds, axis=-1)
    return seeds[(radius >= R1 * np.sqrt(n)) & (radius <= half)]


def _newton_step(f, x, g):
    h = f.hessian(x)
    try:
        return np.linalg.solve(h, g[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum('sij,sj->si', np.linalg.pinv(h), g)


def _newton(f, seeds, tol, max_iters, escape):
    '''Damped Newton on grad H from every seed; returns (x, |grad|).'''
    x = np.array(seeds, dtype='float64')
    for _ in range(max_iters):
        g = f.gradient(x)
        gn = np.linalg.norm(g, axis=-1)
        active = (gn > tol) & np.isfinite(gn) & (np.linalg.norm(x, axis=-1) <= escape)
        if not np.any(active):
            break
        xa, ga, gna = x[active], g[active], gn[active]
        step = _newton_step(f, xa, ga)
        t = np.ones(len(xa))
        new = xa - step
        # halve the step until |grad| decreases
        for _ in range(30):
            worse = ~(np.linalg.norm(f.gradient(new), axis=-1) < gna)
            if not np.any(worse):
                break
            t[worse] *= 0.5
            new[worse] = xa[worse] - t[worse, None] * step[worse]
        x[active] = new
    gn = np.linalg.norm(f.gradient(x), axis=-1)
    return x, gn


def _dedup(x, radius):
    kept = []
    for p in x:
        if not any(np.linalg.norm(p - q) < radius for q in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, x.shape[-1])


def count_critical_points(f, E=None, R1=0., R2=None, grid_density=64, newton_tol=1e-10,
                          dedup_radius=None, max_iters=60):
    '''Census of the critical points of a FieldSample in a shell.

    Newton's method is seeded at the centres of a grid_density^N grid over
    the bounding box of the shell (cells inside the closed shell only);
    converged roots are deduplicated, then filtered to the shell and to
    H/N in E.

    # Arguments
        f: FieldSample.
        E: pair (lo, hi) of the open value interval, None for R.
        R1, R2: shell radii in units of sqrt(N); R2 must be finite.
        grid_density: seeds per axis.
        newton_tol: convergence tolerance on |grad H|.
        dedup_radius: roots closer than this are merged
            (default 1e-5 times the box diameter).

    # Returns
        CriticalPointCensus.
    '''
    if R2 is None or not np.isfinite(R2):
        raise DomainError('The census needs a finite R2, got: ' + str(R2))
    if not 0 <= R1 < R2:
        raise DomainError('Need 0 <= R1 < R2, got R1=%r, R2=%r' % (R1, R2))
    n = f.n
    lo, hi = as_interval(E)
    seeds = _grid_seeds(n, R1, R2, int(grid_density))
    if len(seeds) == 0:
        raise DomainError('No grid cell lies in the shell; increase grid_density.')
    outer = R2 * np.sqrt(n)
    if dedup_radius is None:
        dedup_radius = 1e-5 * 2. * outer
    x, gn = _newton(f, seeds, newton_tol, max_iters, escape=4. * outer)
    x = x[gn <= newton_tol]
    roots = _dedup(x, dedup_radius)

    points = []
    inner = R1 * np.sqrt(n)
    for p in roots:
        r = np.linalg.norm(p)
        boundary = abs(r - inner) <= newton_tol or abs(r - outer) <= newton_tol
        if not (inner < r < outer or boundary):
            continue
        u = float(f.value(p)) / n
        if not lo < u < hi:
            continue
        g = float(np.linalg.norm(f.gradient(p)))
        sign = float(np.sign(np.linalg.det(f.hessian(p))))
        points.append(CriticalPoint(p, u, g, sign, bool(boundary)))
    return CriticalPointCensus(points, (lo, hi), float(R1), float(R2), len(roots))


def census_mean(c, mu, n, E=None, R1=0., R2=None, nb_fields=400, m_features=1024,
                grid_density=32, newton_tol=1e-10, seed=0, workers=None,
                callbacks=None, verbose=0):
    '''Mean census count over nb_fields sampled fields; field i uses the
    stream split_seed(seed, i).

    # Returns
        (mean, stderr, counts)
    '''
    if workers is None:
        workers = common.workers()

    def one(i):
        f = sample_field(c, mu, n, m_features, split_seed(seed, i))
        return count_critical_points(f, E, R1, R2, grid_density, newton_tol).count_in

    callbacks = cbks.configure(callbacks, 'census', nb_fields, ['count_in'], verbose)
    callbacks.on_run_begin()
    counts = []
    for i, count in enumerate(run_streams(one, nb_fields, workers)):
        callbacks.on_batch_begin(i, {'size': 1})
        counts.append(count)
        callbacks.on_batch_end(i, {'size': 1, 'count_in': count})
    counts = np.array(counts, dtype='float64')
    mean, stderr = mean_and_stderr(counts)
    callbacks.on_run_end({'count_in': float(mean)})
    return float(mean), float(stderr), counts


def log_sphere_prefactor(n):
    '''log of S_{N-1} N^{N/2}: the sphere area times the Jacobian of
    r^{N-1} dr with r = sqrt(N) rho.'''
    return np.log(2.) + 0.5 * n * np.log(np.pi) - gammaln(0.5 * n) + 0.5 * n * np.log(n)


def _log_density(c, mu, n, rho, u):
    '''log of the (rho, u) integrand without E|det G|.'''
    p = landscape_params(c, mu, rho)
    var = p.n_sigmaY_sq / n
    return (log_sphere_prefactor(n) + norm.logpdf(u, p.m_Y, np.sqrt(var))
            - 0.5 * n * np.log(2. * np.pi * p.dp0)
            - n * mu ** 2 * rho ** 2 / (2. * p.dp0) + (n - 1) * np.log(rho))


def _rho_window(c, mu, n, R1, R2, truncation):
    lo = max(R1, RHO_MIN)
    if mu == 0:
        return lo, R2, lo > R1, False
    width = np.sqrt(float(c.derivative(0., 1))) / abs(mu)
    cap = width + truncation * width / np.sqrt(n)
    hi = min(R2, cap)
    return lo, hi, lo > R1, hi < R2


def _u_window(c, mu, n, rho, E, window):
    p = landscape_params(c, mu, rho)
    sd = np.sqrt(p.n_sigmaY_sq / n)
    return max(E[0], p.m_Y - window * sd), min(E[1], p.m_Y + window * sd)


def kac_rice_integral(c, mu, E=None, R1=0., R2=np.inf, n=2, goe_samples=1000,
                      quad_nodes=24, hermite_nodes=24, seed=0, window=8.,
                      truncation=8., workers=None, callbacks=None, verbose=0):
    '''Expected number of critical points in the shell with u in E at
    finite N, from the Kac-Rice formula in spherical coordinates.

    The (rho, u) double integral uses a tensor Gauss-Legendre rule on the
    truncated window (u within m_Y +- window conditional deviations,
    rho up to rho_peak + truncation rho_peak / sqrt(N)). E|det G| is
    integrated over z1', z3' exactly given the GOE spectrum and the
    rotated xi, which are drawn goe_samples times and shared by every
    node; the standard error is taken across these draws.

    # Returns
        KacRiceResult; window_warning is set (and a warning issued) when
        the integrand on an artificial window edge carries more than 1e-6
        of the mass.
    '''
    n = int(n)
    if n < 2:
        raise DomainError('Kac-Rice integral needs N >= 2, got: ' + str(n))
    E = as_interval(E)
    R2 = np.inf if R2 is None else float(R2)
    if mu == 0 and not np.isfinite(R2):
        raise DomainError('R2 required when mu=0')
    if workers is None:
        workers = common.workers()
    rng = rng_for(seed)
    eigenvalues = goe_eigenvalues(n - 1, goe_samples, rng)
    z_sq = rng.standard_normal((goe_samples, n - 1)) ** 2

    rho_lo, rho_hi, cut_lo, cut_hi = _rho_window(c, mu, n, R1, R2, truncation)
    rho_nodes, rho_weights = gauss_legendre(rho_lo, rho_hi, quad_nodes)

    def slice_at(rho, nodes):
        '''Per-draw log of the u-integral at one radius.'''
        u_lo, u_hi = _u_window(c, mu, n, rho, E, window)
        if not u_hi > u_lo:
            return np.full(goe_samples, -np.inf)
        u_nodes, u_weights = gauss_legendre(u_lo, u_hi, nodes)
        params = landscape_params(c, mu, rho)
        terms = []
        for u, w in zip(u_nodes, u_weights):
            m = ConditionalHessianModel(params, u, n)
            terms.append(np.log(w) + _log_density(c, mu, n, rho, u) +
                         rao_blackwell_log_abs_det(m, eigenvalues, z_sq, hermite_nodes))
        return logsumexp(np.array(terms), axis=0)

    callbacks = cbks.configure(callbacks, 'kac_rice_integral', quad_nodes, [], verbose)
    callbacks.on_run_begin()
    slices = []
    stream = lambda i: slice_at(rho_nodes[i], quad_nodes)
    for i, values in enumerate(run_streams(stream, quad_nodes, workers)):
        callbacks.on_batch_begin(i, {'size': 1})
        slices.append(np.log(rho_weights[i]) + values)
        callbacks.on_batch_end(i, {'size': 1})
    per_draw = logsumexp(np.array(slices), axis=0)
    log_estimate, log_stderr = log_mean_and_stderr(per_draw)

    # mass cut off beyond the artificial rho edges: below rho_lo the
    # integrand grows like rho^(N-1), above rho_hi it decays like
    # exp(-N mu^2 rho^2 / (2 D'(0)))
    boundary_mass = 0.
    dp0 = float(c.derivative(0., 1))
    for edge, cut, length in ((rho_lo, cut_lo, rho_lo / n),
                              (rho_hi, cut_hi, dp0 / (n * mu ** 2 * rho_hi) if mu else 0.)):
        if cut:
            edge_log = log_mean_and_stderr(slice_at(edge, quad_nodes))[0]
            boundary_mass = max(boundary_mass,
                                float(np.exp(edge_log - log_estimate) * length))
    window_warning = boundary_mass > 1e-6
    if window_warning:
        warnings.warn('kac_rice_integral: %.3g of the mass sits on a truncation edge; '
                      'widen the window.' % boundary_mass)
    with np.errstate(over='ignore'):
        result = KacRiceResult(estimate=float(np.exp(log_estimate)),
                               stderr=float(np.exp(log_stderr)),
                               log_estimate=float(log_estimate),
                               log_stderr=float(log_stderr),
                               window_warning=bool(window_warning),
                               boundary_mass=boundary_mass)
    callbacks.on_run_end({'log_estimate': result.log_estimate})
    return result
