from __future__ import absolute_import
import numpy as np
from collections import namedtuple

from . import common
from .correlators import DomainError


class AssumptionError(DomainError):
    '''Assumption IV fails at a radius.

    # Properties
        inequality: name of the failed inequality ('asmp1', 'asmp2' or
            'n_sigmaY_sq').
        margin: the offending (nonpositive) N-free variance.
        rho: radius at which it was evaluated.
    '''
    def __init__(self, inequality, margin, rho):
        self.inequality = inequality
        self.margin = margin
        self.rho = rho
        super(AssumptionError, self).__init__(
            'Assumption IV violated (%s): margin %.6g <= 0 at rho=%.6g' %
            (inequality, margin, rho))


class LandscapeParams(namedtuple('LandscapeParams',
                                 ['rho', 'mu', 'alpha', 'frak_t', 'n_sigma1_sq',
                                  'n_sigma2_sq', 'm_Y', 'n_sigmaY_sq', 'dpp0', 'dp0'])):
    '''Scalars of the conditional law at radius rho, all variances N-free
    (multiplied by N).
    '''
    __slots__ = ()

    @property
    def a_rho2(self):
        return self.alpha * self.rho ** 2

    @property
    def critical_mu(self):
        return np.sqrt(-2. * self.dpp0)

    def get_config(self):
        return dict((k, float(v)) for k, v in self._asdict().items())


ConditionalMeans = namedtuple('ConditionalMeans', ['m1', 'm2', 'v'])


SERIES_TERMS = 40
# the first-order limits are used only where their O(r / series_scale)
# truncation error is below this
LIMIT_REACH = 1e-6

_polyval = np.polynomial.polynomial.polyval
_polyder = np.polynomial.polynomial.polyder


def _derivatives_at_zero(c):
    return [float(c.derivative(0., k)) for k in (1, 2, 3, 4)]


def _mul(a, b):
    return np.convolve(a, b)[:len(a)]


def _times_z(a):
    return np.concatenate([[0.], a[:-1]])


def _series_values(c, r):
    '''(N sigma_Y^2, D'(r) - D'(0), N sigma_1^2, N sigma_2^2) from the Taylor
    series of D, with the leading orders that cancel in the direct formulas
    removed term by term.

    Everything is computed for E(z) = D(s z), s = series_scale, where the
    variance keeps its form and the shift and numerators pick up powers of s.
    '''
    scale = float(c.series_scale)
    coefs = np.asarray(c.taylor_coefficients(SERIES_TERMS), dtype='float64')
    k = SERIES_TERMS - 2
    e1 = _polyder(coefs)[:k]
    e2 = _polyder(coefs, 2)[:k]
    dp0, dpp0 = e1[0], e2[0]

    shift = e1.copy()
    shift[0] = 0.
    rest = coefs[:k].copy()
    rest[:2] = 0.
    sigma = rest - _times_z(2. * shift + _mul(shift, shift) / dp0)
    sigma[:2] = 0.
    curv = 2. * _times_z(e2)
    lead = curv + shift
    num1 = -4. * dpp0 * sigma - _mul(lead, curv)
    num2 = -2. * dpp0 * sigma - _mul(lead, shift)
    # the z^2 terms cancel exactly
    num1[:3] = 0.
    num2[:3] = 0.

    z = r / scale
    sigma_z = _polyval(z, sigma)
    with np.errstate(divide='ignore', invalid='ignore'):
        n1 = _polyval(z, num1) / (scale ** 2 * sigma_z)
        n2 = _polyval(z, num2) / (scale ** 2 * sigma_z)
    return float(sigma_z), float(_polyval(z, shift) / scale), float(n1), float(n2)


def _closed_values(c, r):
    dp0 = float(c.derivative(0., 1))
    dpp0 = float(c.derivative(0., 2))
    d1 = float(c.derivative(r, 1))
    curv = 2. * float(c.derivative(r, 2)) * r
    sigma = float(c.eval(r)) - d1 ** 2 * r / dp0
    shift = d1 - dp0
    lead = curv + shift
    with np.errstate(divide='ignore', invalid='ignore'):
        n1 = np.float64(-4. * dpp0 * sigma - lead * curv) / sigma
        n2 = np.float64(-2. * dpp0 * sigma - lead * shift) / sigma
    return sigma, shift, float(n1), float(n2)


def _limit_values(c, r):
    '''First-order small-r limits of the same four quantities.'''
    dp0, dpp0, d3, d4 = _derivatives_at_zero(c)
    sigma = -1.5 * dpp0 * r ** 2 - (5. / 6. * d3 + dpp0 ** 2 / dp0) * r ** 3
    shift = dpp0 * r + 0.5 * d3 * r ** 2 + d4 * r ** 3 / 6.
    n1 = (46. / 9. * d3 - 8. / 3. * dpp0 ** 2 / dp0) * r
    n2 = (14. / 9. * d3 - 4. / 3. * dpp0 ** 2 / dp0) * r
    return sigma, shift, n1, n2


def _variances(c, rho):
    '''(N sigma_Y^2, D'(r) - D'(0), N sigma_1^2, N sigma_2^2) at r = rho^2.

    Inside the fast range of the Taylor series the exact values come from
    the series, elsewhere from the closed forms. Below rho_switch they are
    blended linearly in log10(rho) with the first-order limits over one
    decade, reaching the exact values at the switch.
    '''
    r = rho ** 2
    scale = c.series_scale
    if scale is not None and r <= 0.25 * scale:
        values = _series_values(c, r)
    else:
        values = _closed_values(c, r)
    switch = common.rho_switch()
    if rho < switch and (scale is None or r <= LIMIT_REACH * scale):
        w = np.clip(np.log10(rho / (0.1 * switch)), 0., 1.)
        limits = _limit_values(c, r)
        values = tuple(float(w * v + (1. - w) * l) for v, l in zip(values, limits))
    return values


def alpha_frak_t(c, rho):
    '''(alpha, frak_t) at radius rho without any validity check.

    Returns (nan, nan) where N sigma_Y^2 is not positive.
    '''
    sigma, shift, _, _ = _variances(c, rho)
    if not sigma > 0:
        return np.nan, np.nan
    root = np.sqrt(sigma)
    return 2. * float(c.derivative(rho ** 2, 2)) / root, shift / root


def landscape_params(c, mu, rho):
    '''All rho- and mu-dependent scalars of the conditional Hessian law.

    # Arguments
        c: Correlator.
        mu: float, confinement strength.
        rho: float > 0, radius |x| / sqrt(N).

    # Raises
        DomainError: rho <= 0 or D''(0) >= 0.
        AssumptionError: a conditional variance is not positive at rho.
    '''
    if not rho > 0:
        raise DomainError('rho must be positive, got: ' + str(rho))
    rho = float(rho)
    mu = float(mu)
    dp0 = float(c.derivative(0., 1))
    dpp0 = float(c.derivative(0., 2))
    if not dpp0 < 0:
        raise DomainError("The correlator needs D''(0) < 0, got: " + str(dpp0))
    r = rho ** 2
    sigma, shift, n1, n2 = _variances(c, rho)
    if not sigma > 0:
        raise AssumptionError('n_sigmaY_sq', sigma, rho)
    root = np.sqrt(sigma)
    alpha = 2. * float(c.derivative(r, 2)) / root
    frak_t = shift / root
    if not n1 > 0:
        raise AssumptionError('asmp2', n1, rho)
    if not n2 > 0:
        raise AssumptionError('asmp1', n2, rho)

    m_Y = mu * r / 2. - mu * float(c.derivative(r, 1)) * r / dp0
    return LandscapeParams(rho=rho, mu=mu, alpha=alpha, frak_t=frak_t,
                           n_sigma1_sq=n1, n_sigma2_sq=n2, m_Y=m_Y,
                           n_sigmaY_sq=sigma, dpp0=dpp0, dp0=dp0)


def conditional_means(p, u):
    v = (u - p.m_Y) / np.sqrt(p.n_sigmaY_sq)
    m1 = p.mu + v * (p.a_rho2 + p.frak_t)
    m2 = p.mu + v * p.frak_t
    return ConditionalMeans(m1=m1, m2=m2, v=v)


def u_of_v(p, v):
    '''Inverse of the centering map: u = m_Y + v sqrt(N sigma_Y^2).'''
    return p.m_Y + v * np.sqrt(p.n_sigmaY_sq)
