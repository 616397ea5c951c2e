import numpy as np


def probe_grid(kind='standard', nb_points=64):
    '''
        kind='standard': log-spaced points in [1e-4, 1e4] (the validity grid).
        kind='small': log-spaced radii in [1e-6, 1e-2] around rho_switch.
        kind='unit': linearly spaced points in [0.05, 3].
    '''
    if kind == 'standard':
        return np.logspace(-4, 4, nb_points)
    if kind == 'small':
        return np.logspace(-6, -2, nb_points)
    if kind == 'unit':
        return np.linspace(0.05, 3., nb_points)
    raise Exception('Unknown probe grid: ' + str(kind))


def central_difference(f, x, h=1e-5):
    '''Derivative of a scalar function by the 4th order central stencil.'''
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12. * h)


def numerical_gradient(f, x, h=1e-5):
    '''Gradient of f: R^n -> R at a point x of shape (n,).'''
    x = np.asarray(x, dtype='float64')
    grad = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2. * h)
    return grad


def numerical_jacobian(f, x, h=1e-5):
    '''Jacobian of f: R^n -> R^n at x, rows indexed by the output.'''
    x = np.asarray(x, dtype='float64')
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2. * h))
    return np.stack(cols, axis=-1)


def get_test_models(n=4, mus=(0.5, 1., 2.), rhos=(0.5, 1., 2.), u=0.):
    '''ConditionalHessianModels of the Log(epsilon=1) landscape over a small grid.'''
    from ..correlators import Log
    from ..hessian import ConditionalHessianModel
    c = Log(1.)
    return [ConditionalHessianModel.from_correlator(c, mu, rho, u, n)
            for mu in mus for rho in rhos]
