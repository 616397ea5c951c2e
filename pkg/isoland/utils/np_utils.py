from __future__ import absolute_import
import numpy as np
from scipy.special import logsumexp


def split_seed(seed, index):
    '''Counter-based child seed for stream `index` of a run seeded with `seed`.

    Stream i always receives the same 64-bit child seed, whatever the
    number of workers the streams are spread over.
    '''
    seq = np.random.SeedSequence([int(seed) % 2 ** 64, int(index)])
    return int(seq.generate_state(1, np.uint64)[0])


def rng_for(seed, index=None):
    if isinstance(seed, np.random.Generator):
        return seed
    if index is None:
        return np.random.default_rng(int(seed) % 2 ** 64)
    return np.random.default_rng(split_seed(seed, index))


def log_mean_and_stderr(log_values, axis=0):
    '''Sample mean and standard error of positive values given by their logs.

    Returns (log_mean, log_stderr); the standard error is the usual
    sample standard deviation over sqrt(n).
    '''
    log_values = np.asarray(log_values, dtype='float64')
    n = log_values.shape[axis]
    if n == 0:
        raise Exception('Cannot average an empty sample.')
    log_mean = logsumexp(log_values, axis=axis) - np.log(n)
    if n < 2:
        return log_mean, np.full_like(np.asarray(log_mean), -np.inf)
    shift = np.max(log_values, axis=axis, keepdims=True)
    scaled = np.exp(log_values - shift)
    std = np.std(scaled, axis=axis, ddof=1)
    with np.errstate(divide='ignore'):
        log_stderr = np.log(std) + np.squeeze(shift, axis=axis) - 0.5 * np.log(n)
    return log_mean, log_stderr


def mean_and_stderr(values, axis=0):
    values = np.asarray(values, dtype='float64')
    n = values.shape[axis]
    mean = np.mean(values, axis=axis)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, np.std(values, axis=axis, ddof=1) / np.sqrt(n)


def gauss_legendre(a, b, n):
    '''Nodes and weights of the n-point Gauss-Legendre rule on [a, b].
    '''
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def gauss_hermite_normal(n):
    '''Nodes and weights integrating against the standard normal density.
    '''
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / np.sqrt(2. * np.pi)
