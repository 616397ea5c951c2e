from __future__ import absolute_import
import numpy as np
from scipy import integrate

from .utils.np_utils import rng_for

SQRT2 = np.sqrt(2.)
LOG2 = np.log(2.)


class EmpiricalSpectrum(object):
    '''Sorted eigenvalues of one matrix, queried like a probability measure.
    '''
    def __init__(self, eigenvalues):
        self.eigenvalues = np.sort(np.asarray(eigenvalues, dtype='float64').ravel())
        self.n = len(self.eigenvalues)
        if self.n == 0:
            raise Exception('An empirical spectrum needs at least one eigenvalue.')

    def __len__(self):
        return self.n

    def integrate(self, f):
        '''(1/n) sum_i f(lambda_i).'''
        return float(np.mean(f(self.eigenvalues)))

    def cdf(self, x):
        return np.searchsorted(self.eigenvalues, x, side='right') / float(self.n)

    def get_config(self):
        return {'n': self.n, 'eigenvalues': self.eigenvalues.tolist()}


def goe_matrices(n, size=None, seed=None):
    '''Dense GOE samples with E M_ij^2 = (1 + delta_ij) / (2n).

    Returns an (n, n) array, or (size, n, n) when `size` is given.
    '''
    rng = rng_for(seed if seed is not None else 0)
    shape = (n, n) if size is None else (size, n, n)
    a = rng.standard_normal(shape)
    return (a + np.swapaxes(a, -1, -2)) / (2. * np.sqrt(n))


def goe_eigenvalues(n, size, rng):
    '''Sorted eigenvalues of `size` independent n x n GOE matrices, shape (size, n).'''
    a = rng.standard_normal((size, n, n))
    return np.linalg.eigvalsh((a + np.swapaxes(a, -1, -2)) / (2. * np.sqrt(n)))


def sample_goe(n, seed):
    if n < 1:
        raise Exception('GOE size must be >= 1, got: ' + str(n))
    return EmpiricalSpectrum(np.linalg.eigvalsh(goe_matrices(n, seed=seed)))


def semicircle_density(x):
    x = np.asarray(x, dtype='float64')
    return np.sqrt(np.clip(2. - x ** 2, 0., None)) / np.pi


def semicircle_log_potential(x):
    '''Log-potential of the semicircle law on [-sqrt2, sqrt2],
    Psi*(x) = int log|x - t| sigma_sc(dt).
    '''
    x = np.asarray(x, dtype='float64')
    ax = np.abs(x)
    root = np.sqrt(np.clip(x ** 2 - 2., 0., None))
    inner = x ** 2 / 2. - 0.5 - LOG2 / 2.
    # x^2/2 - |x| root / 2 rewritten as |x| / (|x| + root), stable for large |x|
    outer = ax / (ax + root) - 0.5 - LOG2 + np.log(ax + root)
    out = np.where(ax <= SQRT2, inner, outer)
    return out if out.ndim else float(out)


def log_potential(s, x):
    '''(1/n) sum_i log|x - lambda_i|; -inf when x hits an eigenvalue to
    machine precision.'''
    x = np.asarray(x, dtype='float64')
    gaps = np.abs(np.subtract.outer(x, s.eigenvalues))
    atom = np.finfo('float64').eps * np.maximum(1., np.abs(s.eigenvalues))
    with np.errstate(divide='ignore'):
        out = np.mean(np.log(gaps), axis=-1)
    out = np.where(np.any(gaps <= atom, axis=-1), -np.inf, out)
    return out if out.ndim else float(out)


def rate_function_j1(x):
    '''Large-deviation rate of the GOE smallest eigenvalue at x (inf for x > -sqrt2).
    '''
    x = np.asarray(x, dtype='float64')
    root = np.sqrt(np.clip(x ** 2 - 2., 0., None))
    with np.errstate(invalid='ignore', divide='ignore'):
        inside = LOG2 / 2. - x * root / 2. - np.log(-x + root)
    out = np.where(x < -SQRT2, inside, np.inf)
    out = np.where(x == -SQRT2, 0., out)
    return out if out.ndim else float(out)


def rate_function_j1_integral(x):
    '''Integral form int_x^{-sqrt2} sqrt(z^2 - 2) dz, used as an oracle.'''
    if x > -SQRT2:
        return np.inf
    value, _ = integrate.quad(lambda z: np.sqrt(max(z * z - 2., 0.)), x, -SQRT2,
                              epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


def _ramp_dictionary(nb_functions):
    half = nb_functions // 2
    up = [(c, 1.) for c in np.linspace(-2.5, 1.5, half)]
    down = [(c, -1.) for c in np.linspace(-1.5, 2.5, nb_functions - half)]
    return up + down


def _ramp(t, c, direction):
    return np.clip(direction * (t - c), 0., 1.)


def bounded_lipschitz_distance(s, nb_functions=64):
    '''Distance between an empirical spectrum and the semicircle law, taken
    as the largest gap in mean over a fixed dictionary of clipped ramps
    (each bounded by 1 and 1-Lipschitz), so it lower-bounds the true
    bounded-Lipschitz distance.
    '''
    worst = 0.
    for c, direction in _ramp_dictionary(nb_functions):
        kinks = [k for k in (c, c + direction) if -SQRT2 < k < SQRT2] or None
        target, _ = integrate.quad(lambda t: _ramp(t, c, direction) * semicircle_density(t),
                                   -SQRT2, SQRT2, points=kinks, limit=200)
        empirical = s.integrate(lambda t: _ramp(t, c, direction))
        worst = max(worst, abs(empirical - target))
    return worst
