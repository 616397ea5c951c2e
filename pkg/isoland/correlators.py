from __future__ import absolute_import
import numpy as np
from collections import namedtuple
from scipy.special import bernoulli, binom, factorial

from . import common
from .utils.generic_utils import get_from_module


class DomainError(ValueError):
    '''An argument lies outside the domain of the requested operation.'''


class UnsupportedError(Exception):
    '''The requested capability is not implemented for this correlator kind.'''


def standard_grid(nb_points=64):
    '''Default probe grid: log-spaced points in [1e-4, 1e4].
    '''
    return np.logspace(-4, 4, nb_points)


def _as_radius(r):
    r = np.asarray(r, dtype='float64')
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise DomainError('Correlators are only defined for r >= 0, got: ' + str(r))
    return r


def _falling_factorial(x, k):
    out = 1.
    for i in range(k):
        out *= (x - i)
    return out


class Correlator(object):
    '''Structure function D of a field with isotropic increments,

        E[(X(x) - X(y))^2] = N D(|x - y|^2 / N).

    Subclasses implement `_eval(r)` and `_derivative(r, order)` in closed
    form for orders 1 to 4 on arrays of nonnegative r; the value at r=0
    is the one-sided limit. Instances are immutable.

    # Properties
        thorin_bernstein: True when D is known to be a Thorin-Bernstein
            function, None when the classification is unknown.
        series_scale: r-scale of the Taylor series at 0, which converges
            fast for r <= series_scale / 4. None when `taylor_coefficients`
            is not implemented.
    '''
    thorin_bernstein = None
    series_scale = None

    def eval(self, r):
        r = _as_radius(r)
        return self._eval(r)

    def __call__(self, r):
        return self.eval(r)

    def derivative(self, r, order=1):
        if order not in (1, 2, 3, 4):
            raise DomainError('Derivative order must be in 1..4, got: ' + str(order))
        r = _as_radius(r)
        return self._derivative(r, order)

    def _eval(self, r):
        raise NotImplementedError

    def _derivative(self, r, order):
        raise NotImplementedError

    def taylor_coefficients(self, nb_terms):
        '''Coefficients c_n, n < nb_terms, of D(series_scale * z) = sum_n c_n z^n.
        '''
        raise UnsupportedError(self.__class__.__name__ + ' has no Taylor series at 0.')

    def get_config(self):
        return {'name': self.__class__.__name__}

    def __repr__(self):
        params = ', '.join('%s=%r' % (k, v) for k, v in sorted(self.get_config().items())
                           if k != 'name')
        return '%s(%s)' % (self.__class__.__name__, params)


class Log(Correlator):
    '''D(r) = log(1 + r / epsilon).

    # Arguments
        epsilon: float > 0. Short-distance cutoff.
    '''
    thorin_bernstein = True

    def __init__(self, epsilon=1.):
        if not epsilon > 0:
            raise DomainError('Log correlator needs epsilon > 0, got: ' + str(epsilon))
        self.epsilon = float(epsilon)

    def _eval(self, r):
        return np.log1p(r / self.epsilon)

    def _derivative(self, r, order):
        sign = (-1.) ** (order - 1)
        return sign * factorial(order - 1) / (r + self.epsilon) ** order

    @property
    def series_scale(self):
        return self.epsilon

    def taylor_coefficients(self, nb_terms):
        n = np.arange(1, nb_terms)
        return np.concatenate([[0.], (-1.) ** (n - 1) / n])

    def get_config(self):
        return {'name': self.__class__.__name__,
                'epsilon': self.epsilon}


class Power(Correlator):
    '''D(r) = (r + epsilon)^gamma - epsilon^gamma.

    # Arguments
        gamma: float in (0, 1]. gamma=1 is accepted but D is then linear,
            which fails the Assumption I check.
        epsilon: float > 0.
    '''
    thorin_bernstein = True

    def __init__(self, gamma=0.5, epsilon=1.):
        if not 0 < gamma <= 1:
            raise DomainError('Power correlator needs gamma in (0, 1], got: ' + str(gamma))
        if not epsilon > 0:
            raise DomainError('Power correlator needs epsilon > 0, got: ' + str(epsilon))
        self.gamma = float(gamma)
        self.epsilon = float(epsilon)

    def _eval(self, r):
        # eps^g * expm1(g * log1p(r / eps)) keeps full precision for small r
        eps, g = self.epsilon, self.gamma
        return eps ** g * np.expm1(g * np.log1p(r / eps))

    def _derivative(self, r, order):
        coef = _falling_factorial(self.gamma, order)
        return coef * (r + self.epsilon) ** (self.gamma - order)

    @property
    def series_scale(self):
        return self.epsilon

    def taylor_coefficients(self, nb_terms):
        n = np.arange(1, nb_terms)
        return np.concatenate([[0.], binom(self.gamma, n) * self.epsilon ** self.gamma])

    def get_config(self):
        return {'name': self.__class__.__name__,
                'gamma': self.gamma,
                'epsilon': self.epsilon}


class AtomicMixture(Correlator):
    '''D(r) = sum_k nu_k (1 - exp(-r t_k^2)) + A r.

    An empty atom list is allowed (with slope 0 it is the zero field).

    # Arguments
        atoms: list of (nu_k, t_k) pairs, both > 0.
        slope: float >= 0, the linear part A.
    '''
    def __init__(self, atoms=(), slope=0.):
        atoms = [(float(nu), float(t)) for nu, t in atoms]
        for nu, t in atoms:
            if not (nu > 0 and t > 0):
                raise DomainError('Atoms need positive weight and scale, got: ' +
                                  str((nu, t)))
        if not slope >= 0:
            raise DomainError('Atomic mixture slope must be >= 0, got: ' + str(slope))
        self.atoms = tuple(atoms)
        self.slope = float(slope)
        self.weights = np.array([nu for nu, _ in atoms], dtype='float64')
        self.scales = np.array([t for _, t in atoms], dtype='float64')

    def _decay(self, r):
        # shape r.shape + (nb_atoms,)
        return np.exp(-np.multiply.outer(r, self.scales ** 2))

    def _eval(self, r):
        out = -np.expm1(-np.multiply.outer(r, self.scales ** 2)).dot(self.weights)
        return out + self.slope * r

    def _derivative(self, r, order):
        sign = (-1.) ** (order - 1)
        out = sign * self._decay(r).dot(self.weights * self.scales ** (2 * order))
        if order == 1:
            out = out + self.slope
        return out

    @property
    def series_scale(self):
        # t^2 r <= 1 on the fast-converging range
        return 4. / np.max(self.scales ** 2) if self.atoms else 1.

    def taylor_coefficients(self, nb_terms):
        n = np.arange(1, nb_terms)
        x = self.scales ** 2 * self.series_scale
        sign = (-1.) ** (n - 1)
        coefs = sign * np.power.outer(x, n).T.dot(self.weights) / factorial(n)
        coefs[0] += self.slope * self.series_scale
        return np.concatenate([[0.], coefs])

    def get_config(self):
        return {'name': self.__class__.__name__,
                'atoms': [list(a) for a in self.atoms],
                'slope': self.slope}


class SinhExample(Correlator):
    '''D(x) = sqrt(x) sinh(sqrt(x))^2 / sinh(2 sqrt(x)) = (s/2) tanh(s), s = sqrt(x).

    A complete Bernstein function that is not Thorin-Bernstein. Near 0 the
    Taylor series in x is used (coefficients from Bernoulli numbers), so
    every order including the fourth is available at r=0.
    '''
    series_cutoff = 0.5
    nb_terms = 24
    series_scale = np.pi ** 2 / 4.

    def __init__(self):
        self._coefs = self._series_coefficients(self.nb_terms)
        self._powers = np.arange(1, self.nb_terms + 1)

    @staticmethod
    def _series_coefficients(nb_terms):
        # coefficients of x^1 .. x^nb_terms
        n = np.arange(1, nb_terms + 1)
        b2n = bernoulli(2 * nb_terms)[2 * n]
        return 4. ** n * (4. ** n - 1.) * b2n / (2. * factorial(2 * n))

    def taylor_coefficients(self, nb_terms):
        coefs = self._series_coefficients(nb_terms - 1)
        scaled = coefs * self.series_scale ** np.arange(1, nb_terms)
        return np.concatenate([[0.], scaled])

    def _series(self, x, order):
        n = self._powers
        keep = n >= order
        coefs = self._coefs[keep] * factorial(n[keep]) / factorial(n[keep] - order)
        return np.power.outer(x, n[keep] - order).dot(coefs)

    def _closed(self, x, order):
        s = np.sqrt(x)
        t = np.tanh(s)
        e = np.exp(-2. * s)
        sech2 = 4. * e / (1. + e) ** 2
        g1 = 0.5 * (t + s * sech2)
        if order == 0:
            return 0.5 * s * t
        if order == 1:
            return g1 / (2. * s)
        g2 = sech2 * (1. - s * t)
        if order == 2:
            return g2 / (4. * s ** 2) - g1 / (4. * s ** 3)
        g3 = sech2 * (-3. * t + 2. * s * t ** 2 - s * sech2)
        if order == 3:
            return g3 / (8. * s ** 3) - 3. * g2 / (8. * s ** 4) + 3. * g1 / (8. * s ** 5)
        g4 = sech2 * (8. * t ** 2 - 4. * s * t ** 3 + 8. * s * t * sech2 - 4. * sech2)
        return (g4 / (16. * s ** 4) - 6. * g3 / (16. * s ** 5) +
                15. * g2 / (16. * s ** 6) - 15. * g1 / (16. * s ** 7))

    def _piecewise(self, x, order):
        x = np.asarray(x, dtype='float64')
        small = x < self.series_cutoff
        out = np.empty_like(x)
        if np.any(small):
            out[small] = self._series(x[small], order)
        if np.any(~small):
            out[~small] = self._closed(x[~small], order)
        return out if out.ndim else out[()]

    def _eval(self, r):
        return self._piecewise(r, 0)

    def _derivative(self, r, order):
        return self._piecewise(r, order)


class ValidityCheck(namedtuple('ValidityCheck',
                               ['name', 'grid', 'passed', 'worst_margin', 'required'])):
    '''One row of a ValidityReport.

    `passed` is None when the outcome is unknown; `worst_margin` is the
    signed minimum slack of the inequality over `grid`.
    '''
    __slots__ = ()

    def get_config(self):
        return {'name': self.name,
                'grid': [float(g) for g in np.atleast_1d(self.grid)],
                'passed': self.passed,
                'worst_margin': None if self.worst_margin is None else float(self.worst_margin),
                'required': self.required}


class ValidityReport(object):
    def __init__(self, checks=()):
        self.checks = list(checks)

    @property
    def overall(self):
        return all(bool(c.passed) for c in self.checks if c.required)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.checks)

    def extend(self, other):
        return ValidityReport(self.checks + list(other.checks))

    def get_config(self):
        return {'overall': self.overall,
                'checks': [c.get_config() for c in self.checks]}


def _inequality(name, grid, lhs, rhs, required=True, strict=False):
    '''Row for lhs >= rhs (or lhs > rhs) checked pointwise over `grid`.'''
    lhs = np.broadcast_to(np.asarray(lhs, dtype='float64'), np.shape(grid))
    rhs = np.broadcast_to(np.asarray(rhs, dtype='float64'), np.shape(grid))
    slack = lhs - rhs
    if not np.all(np.isfinite(slack)):
        return ValidityCheck(name, grid, False, -np.inf, required)
    if strict:
        ok = np.all(slack > 0)
    else:
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        ok = np.all(slack >= -common.epsilon() * scale)
    return ValidityCheck(name, grid, bool(ok), float(np.min(slack)), required)


def check_bernstein(c, grid=None):
    '''Bernstein-type sanity checks of a correlator on a positive grid.

    Rows: pinning (D(0)=0), nondecreasing, concave, third_derivative
    (third derivative >= 0), linear_bound (D(r) <= D'(0) r) and assumption_i
    (0 < |D^(4)(0)| < inf). Failures are reported, never raised.
    '''
    grid = standard_grid() if grid is None else np.asarray(grid, dtype='float64')
    if grid.size == 0 or np.any(grid <= 0):
        raise DomainError('Probe grid must be nonempty and strictly positive.')
    d0 = float(c.eval(0.))
    dp0 = float(c.derivative(0., 1))
    d4 = float(c.derivative(0., 4))
    checks = [
        ValidityCheck('pinning', np.zeros(1), d0 == 0., -abs(d0), True),
        _inequality('nondecreasing', grid, c.derivative(grid, 1), 0.),
        _inequality('concave', grid, 0., c.derivative(grid, 2)),
        _inequality('third_derivative', grid, c.derivative(grid, 3), 0.),
        _inequality('linear_bound', grid, dp0 * grid, c.eval(grid)),
        ValidityCheck('assumption_i', np.zeros(1), bool(0. < abs(d4) < np.inf),
                      abs(d4), True),
    ]
    return ValidityReport(checks)


def check_assumption_iv(c, grid=None):
    '''Assumption IV rows on a grid of y = rho^2 values.

    Required rows are the direct inequalities asmp1 (-2D''(0) > (a rho^2 + t) t)
    and asmp2 (-4D''(0) > (a rho^2 + t) a rho^2). The sufficient conditions
    btbd, btinc, btbd2, btbd3, btbd4 and the Thorin-Bernstein
    classification are informational.

    When D''(0) >= 0 the direct inequalities fail outright and the
    informational rows that divide by it are reported as failed.
    '''
    from . import geometry

    y = standard_grid() if grid is None else np.asarray(grid, dtype='float64')
    if y.size == 0 or np.any(y <= 0):
        raise DomainError('Probe grid must be nonempty and strictly positive.')
    dp0 = np.float64(c.derivative(0., 1))
    dpp0 = np.float64(c.derivative(0., 2))
    rho = np.sqrt(y)
    ab = [geometry.alpha_frak_t(c, p) for p in rho]
    alpha = np.array([a for a, _ in ab])
    frak_t = np.array([t for _, t in ab])
    a_rho2 = alpha * y

    d = c.eval(y)
    d1 = c.derivative(y, 1)
    d2 = c.derivative(y, 2)
    d3 = c.derivative(y, 3)
    with np.errstate(divide='ignore', invalid='ignore'):
        checks = [
            _inequality('asmp1', y, -2. * dpp0, (a_rho2 + frak_t) * frak_t, strict=True),
            _inequality('asmp2', y, -4. * dpp0, (a_rho2 + frak_t) * a_rho2, strict=True),
            _inequality('btbd', y, -2. / 3. * dpp0, frak_t ** 2, required=False),
            _inequality('btinc', y, 2. * dp0 * d2 * (d - d1 * y), -d1 * (d1 - dp0) ** 2,
                        required=False),
            _inequality('btbd2', y, d1 * y / dp0, (d1 - dp0) / dpp0, required=False),
            _inequality('btbd3', y, -d1 / d2 + dp0 / dpp0, y, required=False),
            _inequality('btbd4', y, d3 * d1 / d2 ** 2, 2., required=False),
            ValidityCheck('thorin_bernstein', np.zeros(0), c.thorin_bernstein, None, False),
        ]
    if not dpp0 < 0:
        # the inequalities presuppose D''(0) < 0
        checks[:2] = [ValidityCheck(name, y, False, float(k * dpp0), True)
                      for name, k in (('asmp1', -2.), ('asmp2', -4.))]
    return ValidityReport(checks)


# aliases
log = Log
power = Power
atomic = AtomicMixture
sinh = SinhExample


def get(identifier, kwargs=None):
    return get_from_module(identifier, globals(), 'correlator',
                           instantiate=True, kwargs=kwargs)


def from_config(config):
    params = dict(config)
    name = params.pop('name')
    if name not in ('Log', 'Power', 'AtomicMixture', 'SinhExample'):
        raise DomainError('Unknown correlator kind: ' + str(name))
    return get(name, params)
