from __future__ import absolute_import
import numpy as np

from .correlators import AtomicMixture, DomainError, UnsupportedError
from .utils.np_utils import rng_for


class FieldSample(object):
    '''One realization of H(x) = X(x) + mu/2 |x|^2 with X a random-feature
    field of an atomic structure function D(r) = sum_k nu_k (1 - exp(-r t_k^2)):

        X(x) = sum_k sqrt(n nu_k / m) sum_j [cos(<w_kj, x> + phi_kj) - cos(phi_kj)],

    w_kj ~ N(0, 2 t_k^2 / n I) and phi_kj uniform on [0, 2 pi).

    All evaluators accept a point of shape (n,) or a batch (S, n).
    '''
    def __init__(self, correlator, mu, n, frequencies, phases, amplitudes):
        self.correlator = correlator
        self.mu = float(mu)
        self.n = int(n)
        self.frequencies = np.asarray(frequencies, dtype='float64').reshape(-1, self.n)
        self.phases = np.asarray(phases, dtype='float64').ravel()
        self.amplitudes = np.asarray(amplitudes, dtype='float64').ravel()
        # pinning: X(0) = 0
        self.offset = self._features(np.zeros(self.n))

    @property
    def nb_features(self):
        return len(self.phases)

    def _angles(self, x):
        return np.dot(x, self.frequencies.T) + self.phases

    def _features(self, x):
        return np.dot(np.cos(self._angles(x)), self.amplitudes)

    def field(self, x):
        '''X(x) alone.'''
        return self._features(np.asarray(x, dtype='float64')) - self.offset

    def value(self, x):
        x = np.asarray(x, dtype='float64')
        return self.field(x) + 0.5 * self.mu * np.sum(x ** 2, axis=-1)

    def __call__(self, x):
        return self.value(x)

    def gradient(self, x):
        x = np.asarray(x, dtype='float64')
        s = np.sin(self._angles(x)) * self.amplitudes
        return -np.dot(s, self.frequencies) + self.mu * x

    def hessian(self, x):
        x = np.asarray(x, dtype='float64')
        c = np.cos(self._angles(x)) * self.amplitudes
        w = self.frequencies
        out = -np.einsum('...f,fi,fj->...ij', c, w, w)
        return out + self.mu * np.eye(self.n)

    def reflected(self):
        '''The field with (w, phi) -> (-w, -phi); it is the same function.'''
        return FieldSample(self.correlator, self.mu, self.n, -self.frequencies,
                           -self.phases, self.amplitudes)

    def get_config(self):
        return {'name': self.__class__.__name__,
                'correlator': self.correlator.get_config(),
                'mu': self.mu,
                'n': self.n,
                'nb_features': self.nb_features}


def sample_field(c, mu, n, m_features=4096, seed=0):
    '''Random-feature realization of an atomic field with linear part 0.

    # Arguments
        c: AtomicMixture with slope 0.
        mu: float, confinement strength.
        n: dimension, 2 or 3.
        m_features: features per atom (at least 256).
        seed: int or numpy Generator.

    # Raises
        UnsupportedError: c is not atomic or has a linear part.
        DomainError: n or m_features out of range.
    '''
    if not isinstance(c, AtomicMixture) or c.slope > 0:
        raise UnsupportedError('Only atomic correlators without a linear part '
                               'can be sampled, got: %r' % (c,))
    if n not in (2, 3):
        raise DomainError('Fields are sampled in dimension 2 or 3, got: ' + str(n))
    if m_features < 256:
        raise DomainError('Need at least 256 features per atom, got: ' + str(m_features))
    rng = rng_for(seed)
    frequencies, phases, amplitudes = [], [], []
    for nu, t in c.atoms:
        frequencies.append(rng.standard_normal((m_features, n)) * np.sqrt(2. * t ** 2 / n))
        phases.append(rng.uniform(0., 2. * np.pi, m_features))
        amplitudes.append(np.full(m_features, np.sqrt(n * nu / m_features)))
    if not c.atoms:
        frequencies, phases, amplitudes = [np.zeros((0, n))], [np.zeros(0)], [np.zeros(0)]
    return FieldSample(c, mu, n, np.concatenate(frequencies), np.concatenate(phases),
                       np.concatenate(amplitudes))
