from __future__ import absolute_import
import warnings
import numpy as np
from collections import namedtuple

from . import geometry
from .correlators import DomainError
from .optimizers import GridAscent, hybrid_grid
from .rmt import SQRT2, LOG2, semicircle_log_potential, rate_function_j1

SUBCRITICAL = 'SubcriticalMu'
SUPERCRITICAL = 'SupercriticalMu'
ZERO_MU = 'ZeroMu'

CLOSED_FORM = 'ClosedForm'
VARIATIONAL = 'Variational'

# smallest radius the optimizer looks at (psi* -> -inf as rho -> 0)
RHO_FLOOR = 1e-6


def as_interval(E):
    if E is None:
        return -np.inf, np.inf
    lo, hi = E
    lo = -np.inf if lo is None else float(lo)
    hi = np.inf if hi is None else float(hi)
    return lo, hi


class DomainSpec(object):
    '''Shell (R1, R2) in rho = |x|/sqrt(N) and open interval E of values u = H/N.

    # Arguments
        R1: float >= 0.
        R2: float > R1, or inf.
        E: pair (lo, hi); None or +-inf for unbounded ends.
        growth: optional dict, {'xi': float} or {'theta': float}.
    '''
    def __init__(self, R1=0., R2=np.inf, E=None, growth=None):
        R1 = 0. if R1 is None else float(R1)
        R2 = np.inf if R2 is None else float(R2)
        if not 0 <= R1 < R2:
            raise DomainError('Need 0 <= R1 < R2, got R1=%r, R2=%r' % (R1, R2))
        lo, hi = as_interval(E)
        if not lo < hi:
            raise DomainError('E must be a nonempty open interval, got: ' + str((lo, hi)))
        if growth is not None and set(growth) not in ({'xi'}, {'theta'}):
            raise DomainError("growth must be {'xi': value} or {'theta': value}")
        self.R1 = R1
        self.R2 = R2
        self.E = (lo, hi)
        self.growth = growth

    def get_config(self):
        finite = lambda x: float(x) if np.isfinite(x) else None
        return {'R1': self.R1,
                'R2': finite(self.R2),
                'E': [finite(self.E[0]), finite(self.E[1])],
                'growth': self.growth}


BoundaryHit = namedtuple('BoundaryHit', ['rho', 'u'])


class CriticalLocus(namedtuple('CriticalLocus',
                               ['rho_star', 'u_star', 'y_star', 'v_star', 'psi_value',
                                'regime', 'boundary_hit', 'near_optima'])):
    '''Maximizer (rho*, u*, y*) of psi* with v* the centered value coordinate.

    `near_optima` lists (rho, u, y, psi) of every polished candidate within
    the tie tolerance of the maximum.
    '''
    __slots__ = ()

    def get_config(self):
        config = dict((k, float(getattr(self, k))) for k in
                      ('rho_star', 'u_star', 'y_star', 'v_star', 'psi_value'))
        config['regime'] = self.regime
        config['boundary_hit'] = dict(self.boundary_hit._asdict())
        config['near_optima'] = [[float(x) for x in o] for o in self.near_optima]
        return config


class ComplexityResult(namedtuple('ComplexityResult', ['value', 'locus', 'method'])):
    __slots__ = ()

    def get_config(self):
        return {'value': float(self.value),
                'locus': None if self.locus is None else self.locus.get_config(),
                'method': self.method}


def critical_mu(c):
    '''J = sqrt(-2 D''(0)), the |mu| separating the two nonzero regimes.'''
    return np.sqrt(-2. * float(c.derivative(0., 2)))


def regime(c, mu):
    if mu == 0:
        return ZERO_MU
    return SUBCRITICAL if abs(mu) <= critical_mu(c) else SUPERCRITICAL


def total_complexity(c, mu, xi=None, theta=None):
    '''Closed-form total complexity of H = X + (mu/2)|x|^2 on a domain whose
    Gaussian-volume growth constant is xi (mu != 0) or theta (mu == 0).
    '''
    dpp0 = float(c.derivative(0., 2))
    J = critical_mu(c)
    if mu != 0:
        if xi is None:
            raise DomainError('total_complexity needs xi when mu != 0')
        if abs(mu) > J:
            value = -xi
        else:
            value = -np.log(abs(mu) / J) + mu ** 2 / (-4. * dpp0) - 0.5 - xi
    else:
        if theta is None:
            raise DomainError('total_complexity needs theta when mu == 0')
        dp0 = float(c.derivative(0., 1))
        value = np.log(J) - 0.5 - 0.5 * np.log(2. * np.pi) - 0.5 * np.log(dp0) + theta
    return ComplexityResult(float(value), None, CLOSED_FORM)


def sigma_fyodorov(c, mu):
    J = critical_mu(c)
    if not 0 < abs(mu) <= J:
        raise DomainError('sigma_fyodorov needs 0 < |mu| <= %.6g, got: %r' % (J, mu))
    return 0.5 * (mu ** 2 / J ** 2 - 1.) - np.log(abs(mu) / J)


def shell_growth(c, mu, R1=0., R2=np.inf):
    '''Growth constant of the shell R1 < |x|/sqrt(N) < R2.

    For mu != 0 returns {'xi': value}, the large-deviation cost of the
    rescaled Gaussian norm |mu| |z| / sqrt(N D'(0)) landing in the shell;
    for mu == 0 returns {'theta': value}.
    '''
    if mu == 0:
        if not np.isfinite(R2):
            raise DomainError('R2 required when mu=0')
        return {'theta': float(np.log(R2) + 0.5 * np.log(2. * np.pi) + 0.5)}
    scale = abs(mu) / np.sqrt(float(c.derivative(0., 1)))
    a1, a2 = scale * R1, scale * R2
    cost = lambda a: a ** 2 / 2. - 0.5 - np.log(a)
    if a2 < 1.:
        return {'xi': float(cost(a2))}
    if a1 > 1.:
        return {'xi': float(cost(a1))}
    return {'xi': 0.}


def _dpsi_semicircle(y):
    root = np.sqrt(np.clip(y ** 2 - 2., 0., None))
    return np.where(np.abs(y) > SQRT2, y - np.sign(y) * root, y)


def _argmax_y(b, coef):
    '''argmax over y of Psi*(y) - coef (y + b)^2, coef >= 1, elementwise.

    On [-sqrt2, sqrt2] the objective is a concave quadratic with a closed
    form maximizer; when that falls outside, the maximizer is in the tail on
    the same side, where the derivative is monotone and is bisected.
    '''
    b, coef = np.broadcast_arrays(np.asarray(b, dtype='float64'),
                                  np.asarray(coef, dtype='float64'))
    y = -2. * coef * b / (2. * coef - 1.)
    outer = np.abs(y) > SQRT2
    if np.any(outer):
        side = np.sign(y[outer])
        bo, co = b[outer], coef[outer]
        lo = np.where(side > 0, SQRT2, np.minimum(-SQRT2, -bo - 1.))
        hi = np.where(side > 0, np.maximum(SQRT2, -bo + 1.), -SQRT2)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            rising = _dpsi_semicircle(mid) - 2. * co * (mid + bo) > 0
            lo = np.where(rising, mid, lo)
            hi = np.where(rising, hi, mid)
        y = np.array(y, copy=True)
        y[outer] = 0.5 * (lo + hi)
    return y


def _y_quadratic(p):
    '''(coef, scale) with the y-penalty coef (y + m2 / scale)^2.'''
    J2 = -2. * p.dpp0
    return J2 / (J2 - p.frak_t ** 2), np.sqrt(-4. * p.dpp0)


def _psi_from_params(p, v, y):
    coef, scale = _y_quadratic(p)
    m2 = p.mu + v * p.frak_t
    return (semicircle_log_potential(y) - 0.5 * v ** 2
            - p.mu ** 2 * p.rho ** 2 / (2. * p.dp0) + np.log(p.rho)
            - coef * (y + m2 / scale) ** 2)


def _profile(p, v):
    '''max over y of psi* at fixed (rho, v); returns (value, y).'''
    coef, scale = _y_quadratic(p)
    y = _argmax_y((p.mu + v * p.frak_t) / scale, coef)
    return _psi_from_params(p, v, y), y


def psi_star(c, mu, rho, u, y):
    '''The rate function psi*(rho, u, y) whose supremum gives the constrained complexity.
    '''
    p = geometry.landscape_params(c, mu, rho)
    v = geometry.conditional_means(p, u).v
    out = _psi_from_params(p, v, np.asarray(y, dtype='float64'))
    return out if np.ndim(out) else float(out)


def psi_star_reduced(c, mu, rho, y):
    '''psi* with v eliminated through its stationarity condition (E = R only).'''
    if not rho > 0:
        raise DomainError('rho must be positive, got: ' + str(rho))
    dp0 = float(c.derivative(0., 1))
    J = critical_mu(c)
    y = np.asarray(y, dtype='float64')
    ay = np.abs(y)
    tail = np.where(ay > SQRT2, rate_function_j1(-ay), 0.)
    out = (-y ** 2 / 2. - 0.5 - LOG2 / 2. - tail - SQRT2 * mu * y / J
           - mu ** 2 / (2. * J ** 2) - mu ** 2 * rho ** 2 / (2. * dp0) + np.log(rho))
    return out if out.ndim else float(out)


def closed_form_optimum(c, mu, R1=0., R2=np.inf):
    '''Explicit maximizer of psi* for E = R on the shell (R1, R2).

    rho* maximizes -mu^2 rho^2 / (2 D'(0)) + log rho on the shell, so it is
    sqrt(D'(0))/|mu| clamped into [R1, R2]; y*, v* and u* follow from the
    stationarity equations of the regime.
    '''
    dp0 = float(c.derivative(0., 1))
    dpp0 = float(c.derivative(0., 2))
    J = critical_mu(c)
    if mu == 0:
        if not np.isfinite(R2):
            raise DomainError('R2 required when mu=0')
        rho = float(R2)
        geometry.landscape_params(c, 0., rho)
        psi = -0.5 - LOG2 / 2. + np.log(rho)
        return CriticalLocus(rho, 0., 0., 0., psi, ZERO_MU,
                             BoundaryHit(True, False), ())

    rho0 = np.sqrt(dp0) / abs(mu)
    if R1 >= rho0:
        rho, hit = float(R1), True
    elif R2 < rho0:
        rho, hit = float(R2), True
    else:
        rho, hit = rho0, False
    p = geometry.landscape_params(c, mu, rho)
    shift = p.frak_t * np.sqrt(p.n_sigmaY_sq)  # D'(rho^2) - D'(0)
    if abs(mu) <= J:
        y = -mu / np.sqrt(-dpp0)
        v = mu * p.frak_t / J ** 2
        u = mu * shift / (-2. * dpp0) + p.m_Y
        const = mu ** 2 / (-4. * dpp0) - 0.5 - LOG2 / 2.
        label = SUBCRITICAL
    else:
        y = -(mu / J + J / mu) / SQRT2
        v = p.frak_t / mu
        u = shift / mu + p.m_Y
        const = -LOG2 / 2. - np.log(J) + np.log(abs(mu))
        label = SUPERCRITICAL
    psi = const - mu ** 2 * rho ** 2 / (2. * dp0) + np.log(rho)
    return CriticalLocus(rho, u, y, v, psi, label, BoundaryHit(hit, False), ())


def _same_edge(a, b):
    return np.isfinite(b) and abs(a - b) <= 1e-9 * (1. + abs(b))


def _search(c, mu, dom, opts, window, truncation):
    E_lo, E_hi = dom.E
    rho_lo = max(dom.R1, RHO_FLOOR)
    if np.isfinite(dom.R2):
        rho_hi = dom.R2
    else:
        natural = np.sqrt(float(c.derivative(0., 1))) / abs(mu)
        rho_hi = max(truncation * natural, 2. * rho_lo)
    cache = {}

    def params(rho):
        if rho not in cache:
            cache[rho] = geometry.landscape_params(c, mu, rho)
        return cache[rho]

    def value_bounds(rho):
        p = params(rho)
        s = np.sqrt(p.n_sigmaY_sq)
        return (E_lo - p.m_Y) / s, (E_hi - p.m_Y) / s

    def bounds_fn(rho):
        v_lo, v_hi = value_bounds(rho)
        lo, hi = max(-window, v_lo), min(window, v_hi)
        if lo > hi:
            # E misses the window: psi* is concave in v, take the nearest edge
            lo = hi = v_hi if v_hi < -window else v_lo
        return lo, hi

    def objective(rho, v):
        return _profile(params(rho), np.asarray(v, dtype='float64'))[0]

    grid = hybrid_grid(rho_lo, rho_hi, opts.grid_size)
    best, candidates = opts.maximize(objective, grid, bounds_fn)

    artificial = ((not np.isfinite(dom.R2) and best.x >= rho_hi * (1. - 1e-9)) or
                  (dom.R1 < RHO_FLOOR and best.x <= rho_lo * (1. + 1e-9)))
    v_lo, v_hi = value_bounds(best.x)
    at_window = (abs(best.y) >= window * (1. - 1e-9) and
                 not (_same_edge(best.y, v_lo) or _same_edge(best.y, v_hi)))
    return best, candidates, params, value_bounds, artificial or at_window


def optimize_psi(c, mu, dom, opts=None):
    '''Numerical sup of psi* over (R1, R2) x E x R.

    The search runs in (rho, v) with v = (u - m_Y)/sqrt(N sigma_Y^2), y
    profiled out exactly. The v-window is +-opts.window around m_Y
    (intersected with E) and, for R2 = inf, rho is truncated at
    opts.truncation * sqrt(D'(0))/|mu|. When the optimum lands on one of
    these artificial edges both are doubled once and the search rerun.

    # Raises
        DomainError: mu == 0 with R2 = inf, or an empty domain.
        NoConvergence: no start converged within opts.max_iters.
    '''
    opts = opts or GridAscent()
    if mu == 0 and not np.isfinite(dom.R2):
        raise DomainError('R2 required when mu=0')
    window = opts.window
    truncation = opts.truncation
    best, candidates, params, value_bounds, artificial = _search(
        c, mu, dom, opts, window, truncation)
    if artificial:
        best, candidates, params, value_bounds, artificial = _search(
            c, mu, dom, opts, 2. * window, 2. * truncation)
        if artificial:
            warnings.warn('optimize_psi: optimum sits on a truncation edge after '
                          'doubling the windows (rho=%.6g, v=%.6g).' % (best.x, best.y))

    p = params(best.x)
    value, y = _profile(p, np.array([best.y]))
    v_lo, v_hi = value_bounds(best.x)
    hit = BoundaryHit(rho=_same_edge(best.x, dom.R1) or _same_edge(best.x, dom.R2),
                      u=_same_edge(best.y, v_lo) or _same_edge(best.y, v_hi))
    near = []
    for cand in candidates:
        if cand.value < best.value - opts.tie_tol:
            continue
        q = params(cand.x)
        _, y_c = _profile(q, np.array([cand.y]))
        entry = (cand.x, geometry.u_of_v(q, cand.y), float(y_c[0]), cand.value)
        if not any(abs(entry[0] - e[0]) < 1e-6 and abs(entry[1] - e[1]) < 1e-6 for e in near):
            near.append(entry)
    return CriticalLocus(rho_star=best.x,
                         u_star=float(geometry.u_of_v(p, best.y)),
                         y_star=float(y[0]),
                         v_star=float(best.y),
                         psi_value=float(value[0]),
                         regime=regime(c, mu),
                         boundary_hit=hit,
                         near_optima=tuple(near))


def complexity_constant(c):
    '''(1/2) log(-4 D''(0)) - (1/2) log D'(0) + 1/2.'''
    dp0 = float(c.derivative(0., 1))
    dpp0 = float(c.derivative(0., 2))
    return 0.5 * np.log(-4. * dpp0) - 0.5 * np.log(dp0) + 0.5


def complexity_constrained(c, mu, dom, opts=None):
    locus = optimize_psi(c, mu, dom, opts)
    return ComplexityResult(complexity_constant(c) + locus.psi_value, locus, VARIATIONAL)


def complexity_closed_form(c, mu, R1=0., R2=np.inf):
    '''Constrained complexity for E = R from closed_form_optimum.'''
    locus = closed_form_optimum(c, mu, R1, R2)
    return ComplexityResult(complexity_constant(c) + locus.psi_value, locus, CLOSED_FORM)
