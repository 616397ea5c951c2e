from __future__ import absolute_import
import numpy as np
from collections import namedtuple
from scipy.special import logsumexp, ndtr

from . import common
from . import callbacks as cbks
from .correlators import DomainError
from .geometry import landscape_params, conditional_means
from .rmt import EmpiricalSpectrum, goe_matrices, goe_eigenvalues
from .utils.generic_utils import run_streams
from .utils.np_utils import rng_for, log_mean_and_stderr, gauss_hermite_normal


class ConditionalHessianModel(object):
    '''Law of the Hessian at a point of radius rho, conditioned on H/N = u
    and a vanishing gradient, for matrix size n.

    In the frame where the first axis points along x the matrix is

        G = [[z1',  xi^T],
             [xi,   sqrt(-4D''(0)) (sqrt((n-1)/n) M - z3' I)]]

    with M ~ GOE(n-1) and

        z1' = sigma1 z1 - sigma2 z2 + m1,
        z3' = (sigma2 z2 + sqrt(alpha t rho^2 / n) z3 - m2) / sqrt(-4D''(0)),
        xi ~ N(0, -2D''(0)/n I).

    # Arguments
        params: LandscapeParams at the radius.
        u: float, landscape value H/N.
        n: int >= 2, matrix size.
    '''
    def __init__(self, params, u, n):
        n = int(n)
        if n < 2:
            raise DomainError('Matrix size must be >= 2, got: ' + str(n))
        if params.alpha > 0 or params.frak_t > 0:
            raise Exception('Internal error: alpha and t must both be nonpositive, got: %r, %r' %
                            (params.alpha, params.frak_t))
        self.params = params
        self.u = float(u)
        self.n = n
        means = conditional_means(params, u)
        self.m1 = float(means.m1)
        self.m2 = float(means.m2)
        self.v = float(means.v)
        self.sigma1_sq = params.n_sigma1_sq / n
        self.sigma2_sq = params.n_sigma2_sq / n
        self.cross = params.alpha * params.frak_t * params.rho ** 2 / n
        self.scale = np.sqrt(-4. * params.dpp0)
        self.xi_var = -2. * params.dpp0 / n

    @classmethod
    def from_correlator(cls, c, mu, rho, u, n):
        return cls(landscape_params(c, mu, rho), u, n)

    @property
    def b_sq(self):
        '''N-free conditional variance of z1' given z3'.'''
        p = self.params
        return (-4. * p.dpp0 +
                2. * p.dpp0 * p.alpha ** 2 * p.rho ** 4 / (-2. * p.dpp0 - p.frak_t ** 2))

    def z3_moments(self):
        '''Mean and variance of z3'.'''
        return -self.m2 / self.scale, (self.sigma2_sq + self.cross) / self.scale ** 2

    def mean_matrix(self):
        return np.diag([self.m1] + [self.m2] * (self.n - 1))

    def get_config(self):
        return {'name': self.__class__.__name__,
                'params': self.params.get_config(),
                'u': self.u,
                'n': self.n}


class HessianSample(namedtuple('HessianSample',
                               ['z1p', 'z3p', 'xi', 'goe_spectrum', 'log_abs_det',
                                'sign', 'goe_matrix'])):
    __slots__ = ()


AbsDetEstimate = namedtuple('AbsDetEstimate',
                            ['estimate', 'stderr', 'log_mean', 'log_estimate',
                             'log_stderr', 'positive_fraction'])

VerificationRow = namedtuple('VerificationRow',
                             ['name', 'measured', 'expected', 'deviation',
                              'threshold', 'passed'])


class VerificationReport(object):
    '''Pass/fail table of a numerical verification.

    A row passes when its deviation does not exceed its threshold; the
    report passes when every row does.
    '''
    def __init__(self, rows=()):
        self.rows = list(rows)

    def extend(self, rows):
        self.rows.extend(rows)

    @property
    def overall(self):
        return all(r.passed for r in self.rows)

    @property
    def worst(self):
        '''Row with the largest deviation-to-threshold ratio.'''
        return max(self.rows, key=_ratio)

    @property
    def max_deviation(self):
        return max(r.deviation for r in self.rows)

    @property
    def max_ratio(self):
        return _ratio(self.worst)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def get_config(self):
        return {'overall': self.overall,
                'max_deviation': float(self.max_deviation) if self.rows else 0.,
                'max_ratio': float(self.max_ratio) if self.rows else 0.,
                'rows': [dict(r._asdict()) for r in self.rows]}


def _ratio(row):
    if row.threshold > 0:
        return row.deviation / row.threshold
    return 0. if row.deviation == 0 else np.inf


def verification_row(name, measured, expected, threshold):
    deviation = abs(float(measured) - float(expected))
    return VerificationRow(name, float(measured), float(expected), deviation,
                           float(threshold), bool(deviation <= threshold))


def _draw(m, rng, size):
    z = rng.standard_normal((size, 3))
    s2 = np.sqrt(m.sigma2_sq)
    z1p = np.sqrt(m.sigma1_sq) * z[:, 0] - s2 * z[:, 1] + m.m1
    z3p = (s2 * z[:, 1] + np.sqrt(m.cross) * z[:, 2] - m.m2) / m.scale
    xi = np.sqrt(m.xi_var) * rng.standard_normal((size, m.n - 1))
    return z1p, z3p, xi


def _assemble(m, z1p, z3p, xi, goe):
    size = len(z1p)
    g = np.empty((size, m.n, m.n))
    g[:, 0, 0] = z1p
    g[:, 0, 1:] = xi
    g[:, 1:, 0] = xi
    block = np.sqrt((m.n - 1.) / m.n) * goe
    block[:, np.arange(m.n - 1), np.arange(m.n - 1)] -= z3p[:, None]
    g[:, 1:, 1:] = m.scale * block
    return g


def assemble_matrix(m, sample):
    '''Dense n x n matrix G of a HessianSample.'''
    return _assemble(m, np.array([sample.z1p]), np.array([sample.z3p]),
                     sample.xi[None], sample.goe_matrix[None])[0]


def _schur_log_det(m, z1p, z3p, eigenvalues, z_std):
    '''log|det G| and its sign from the GOE spectrum and the rotated,
    standardized xi (z_std = Q^T xi / sqrt(xi_var)).
    '''
    n = m.n
    d = np.sqrt((n - 1.) / n) * eigenvalues - z3p[:, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        bracket = z1p - m.scale / (2. * n) * np.sum(z_std ** 2 / d, axis=-1)
        log_abs = ((n - 1) * np.log(m.scale) + np.sum(np.log(np.abs(d)), axis=-1) +
                   np.log(np.abs(bracket)))
    sign = np.prod(np.sign(d), axis=-1) * np.sign(bracket)
    return log_abs, sign


def inner_block_eigenvalues(m, sample):
    '''Eigenvalues of the lower-right block, sqrt(-4D''(0)) (sqrt((n-1)/n) lambda - z3').'''
    lam = sample.goe_spectrum.eigenvalues
    return m.scale * (np.sqrt((m.n - 1.) / m.n) * lam - sample.z3p)


def sample_conditional_hessian(m, seed):
    '''One draw of G with its log-determinant from the Schur complement.

    # Arguments
        m: ConditionalHessianModel.
        seed: int or numpy Generator.
    '''
    rng = rng_for(seed)
    z1p, z3p, xi = _draw(m, rng, 1)
    goe = goe_matrices(m.n - 1, seed=rng)
    lam, q = np.linalg.eigh(goe)
    z_std = q.T.dot(xi[0]) / np.sqrt(m.xi_var)
    log_abs, sign = _schur_log_det(m, z1p, z3p, lam[None], z_std[None])
    return HessianSample(z1p=float(z1p[0]), z3p=float(z3p[0]), xi=xi[0],
                         goe_spectrum=EmpiricalSpectrum(lam),
                         log_abs_det=float(log_abs[0]), sign=float(sign[0]),
                         goe_matrix=goe)


def conditional_covariance_table(m, i, j, k, l):
    '''Cov(G_ij, G_kl) in closed form (1-based indices).

    Equal to

        (-2D''(0)/n) (d_ij d_kl + d_ik d_jl + d_il d_jk)
            - (a rho^2 d_i1 d_j1 + t d_ij)(a rho^2 d_k1 d_l1 + t d_kl) / n,

    which gives for instance (-6D''(0) - (a rho^2 + t)^2)/n on (1,1,1,1),
    -2D''(0)/n on (i,j,i,j) with i != j and 0 on (1,2,1,3).
    '''
    for idx in (i, j, k, l):
        if not 1 <= idx <= m.n:
            raise DomainError('Index out of range 1..%d: %r' % (m.n, idx))
    p = m.params
    delta = lambda a, b: 1. if a == b else 0.
    goe = -2. * p.dpp0 * (delta(i, j) * delta(k, l) + delta(i, k) * delta(j, l) +
                          delta(i, l) * delta(j, k))
    left = p.a_rho2 * delta(i, 1) * delta(j, 1) + p.frak_t * delta(i, j)
    right = p.a_rho2 * delta(k, 1) * delta(l, 1) + p.frak_t * delta(k, l)
    return (goe - left * right) / m.n


def verify_conditional_covariance(m, samples=10 ** 6, seed=0, batch_size=50000,
                                  callbacks=None, verbose=0):
    '''Monte Carlo check of the mean matrix and of every entry covariance.

    Draws `samples` dense matrices, then compares each upper-triangular
    entry mean and each pairwise covariance with the closed forms, using
    a 4 standard error threshold per row. One more row compares the
    diagonal to off-diagonal variance ratio of the GOE block with 2.

    # Returns
        VerificationReport.
    '''
    n = m.n
    rows_i, cols_i = np.triu_indices(n)
    nb = len(rows_i)
    rng = rng_for(seed)
    s1 = np.zeros(nb)
    s2 = np.zeros((nb, nb))
    goe_diag, goe_off = 0., 0.
    callbacks = cbks.configure(callbacks, 'verify_conditional_covariance', samples,
                               [], verbose)
    callbacks.on_run_begin()
    seen = 0
    batch = 0
    while seen < samples:
        size = min(batch_size, samples - seen)
        callbacks.on_batch_begin(batch, {'size': size})
        z1p, z3p, xi = _draw(m, rng, size)
        goe = goe_matrices(n - 1, size=size, seed=rng)
        entries = _assemble(m, z1p, z3p, xi, goe)[:, rows_i, cols_i]
        s1 += entries.sum(axis=0)
        s2 += entries.T.dot(entries)
        d = np.arange(n - 1)
        goe_diag += np.sum(goe[:, d, d] ** 2)
        iu = np.triu_indices(n - 1, 1)
        goe_off += np.sum(goe[:, iu[0], iu[1]] ** 2)
        seen += size
        callbacks.on_batch_end(batch, {'size': size})
        batch += 1

    mean = s1 / samples
    cov = s2 / samples - np.outer(mean, mean)
    expected_mean = m.mean_matrix()[rows_i, cols_i]
    expected_cov = np.array([[conditional_covariance_table(m, rows_i[a] + 1, cols_i[a] + 1,
                                                           rows_i[b] + 1, cols_i[b] + 1)
                              for b in range(nb)] for a in range(nb)])
    rows = []
    for a in range(nb):
        se = np.sqrt(expected_cov[a, a] / samples)
        name = 'mean(%d,%d)' % (rows_i[a] + 1, cols_i[a] + 1)
        rows.append(verification_row(name, mean[a], expected_mean[a], 4. * se))
    for a in range(nb):
        for b in range(a, nb):
            se = np.sqrt((expected_cov[a, a] * expected_cov[b, b] +
                          expected_cov[a, b] ** 2) / samples)
            name = 'cov(%d,%d;%d,%d)' % (rows_i[a] + 1, cols_i[a] + 1,
                                         rows_i[b] + 1, cols_i[b] + 1)
            rows.append(verification_row(name, cov[a, b], expected_cov[a, b], 4. * se))
    if n >= 3:
        nb_diag = samples * (n - 1.)
        nb_off = samples * (n - 1.) * (n - 2.) / 2.
        ratio = (goe_diag / nb_diag) / (goe_off / nb_off)
        rel_se = np.sqrt(2. / nb_diag + 2. / nb_off)
        rows.append(verification_row('goe_diag_offdiag_ratio', ratio, 2., 4. * 2. * rel_se))
    report = VerificationReport(rows)
    callbacks.on_run_end({'overall': report.overall})
    return report


def check_schur_identity(models, draws=10 ** 4, seed=0, rtol=1e-8):
    '''Dense log|det| against the Schur product form, and the inner block
    spectrum against the shifted GOE spectrum, over `draws` draws spread
    evenly across `models`.

    # Returns
        list of VerificationRow.
    '''
    models = list(models)
    per_model = max(1, draws // len(models))
    worst_det, worst_eig, sign_mismatch = 0., 0., 0
    for index, m in enumerate(models):
        rng = rng_for(seed, index)
        z1p, z3p, xi = _draw(m, rng, per_model)
        goe = goe_matrices(m.n - 1, size=per_model, seed=rng)
        lam, q = np.linalg.eigh(goe)
        z_std = np.einsum('bji,bj->bi', q, xi) / np.sqrt(m.xi_var)
        log_abs, sign = _schur_log_det(m, z1p, z3p, lam, z_std)
        g = _assemble(m, z1p, z3p, xi, goe)
        dense_sign, dense_log = np.linalg.slogdet(g)
        err = np.abs(log_abs - dense_log) / np.maximum(1., np.abs(dense_log))
        worst_det = max(worst_det, float(np.max(err)))
        sign_mismatch += int(np.sum(sign != dense_sign))
        shifted = m.scale * (np.sqrt((m.n - 1.) / m.n) * lam - z3p[:, None])
        direct = np.linalg.eigvalsh(g[:, 1:, 1:])
        err = np.abs(direct - shifted) / np.maximum(1., np.abs(shifted))
        worst_eig = max(worst_eig, float(np.max(err)))
    return [verification_row('schur_identity', worst_det, 0., rtol),
            verification_row('schur_sign', sign_mismatch, 0., 0.),
            verification_row('inner_block_eigenvalues', worst_eig, 0., rtol)]


def expected_abs_det_mc(m, samples=10 ** 4, seed=0, batch_size=10000, workers=None,
                        callbacks=None, verbose=0):
    '''Monte Carlo estimate of E|det G| in the log domain.

    Batch b draws from the stream `rng_for(seed, b)`, so the estimate does
    not depend on `workers`.

    # Returns
        AbsDetEstimate: estimate and stderr (exp of their logs, may be inf
        for large n), log_mean (mean of log|det G|), log_estimate,
        log_stderr and the fraction of draws with det G > 0.
    '''
    if workers is None:
        workers = common.workers()
    nb_batches = int(np.ceil(samples / float(batch_size)))
    sizes = [min(batch_size, samples - b * batch_size) for b in range(nb_batches)]

    def stream(b):
        rng = rng_for(seed, b)
        z1p, z3p, _ = _draw(m, rng, sizes[b])
        lam = goe_eigenvalues(m.n - 1, sizes[b], rng)
        z_std = rng.standard_normal((sizes[b], m.n - 1))
        return _schur_log_det(m, z1p, z3p, lam, z_std)

    callbacks = cbks.configure(callbacks, 'expected_abs_det', samples,
                               ['log_abs_det'], verbose)
    callbacks.on_run_begin()
    logs, signs = [], []
    for b, (log_abs, sign) in enumerate(run_streams(stream, nb_batches, workers)):
        callbacks.on_batch_begin(b, {'size': sizes[b]})
        logs.append(log_abs)
        signs.append(sign)
        callbacks.on_batch_end(b, {'size': sizes[b], 'log_abs_det': float(np.mean(log_abs))})
    logs = np.concatenate(logs)
    signs = np.concatenate(signs)
    log_estimate, log_stderr = log_mean_and_stderr(logs)
    with np.errstate(over='ignore'):
        result = AbsDetEstimate(estimate=float(np.exp(log_estimate)),
                                stderr=float(np.exp(log_stderr)),
                                log_mean=float(np.mean(logs)),
                                log_estimate=float(log_estimate),
                                log_stderr=float(log_stderr),
                                positive_fraction=float(np.mean(signs > 0)))
    callbacks.on_run_end({'log_abs_det': result.log_mean})
    return result


def conditional_z1_given_z3(m, y):
    '''Conditional law of z1' given z3' = y.

    # Returns
        (abar, bsq_over_n): the mean m1 - sigma2^2 (sqrt(-4D''(0)) y + m2) /
        (sigma2^2 + alpha t rho^2 / n) and the variance b^2 / n.
    '''
    y = np.asarray(y, dtype='float64')
    denom = m.sigma2_sq + m.cross
    abar = m.m1 - m.sigma2_sq * (m.scale * y + m.m2) / denom
    bsq_over_n = m.sigma1_sq + m.sigma2_sq - m.sigma2_sq ** 2 / denom
    return (abar if abar.ndim else float(abar)), bsq_over_n


def _folded_normal_mean(mean, sd):
    z = mean / sd
    return sd * np.sqrt(2. / np.pi) * np.exp(-0.5 * z ** 2) + mean * (1. - 2. * ndtr(-z))


def rao_blackwell_log_abs_det(m, eigenvalues, z_std_sq, nodes=24):
    '''Per-draw log of E[|det G| | GOE spectrum, rotated xi].

    z3' is integrated with `nodes` Gauss-Hermite nodes and z1' given z3'
    in closed form (mean of a folded normal); only the GOE spectrum and
    the squared rotated xi (standardized) are random.

    # Arguments
        eigenvalues: array (S, n-1) of GOE(n-1) eigenvalues.
        z_std_sq: array (S, n-1) of squared standard normals.

    # Returns
        array (S,).
    '''
    n = m.n
    x, w = gauss_hermite_normal(nodes)
    z3_mean, z3_var = m.z3_moments()
    y = z3_mean + np.sqrt(z3_var) * x
    abar, bsq_over_n = conditional_z1_given_z3(m, y)
    d = np.sqrt((n - 1.) / n) * eigenvalues[None] - y[:, None, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        pull = m.scale / (2. * n) * np.sum(z_std_sq[None] / d, axis=-1)
        folded = _folded_normal_mean(np.asarray(abar)[:, None] - pull, np.sqrt(bsq_over_n))
        log_nodes = ((n - 1) * np.log(m.scale) + np.sum(np.log(np.abs(d)), axis=-1) +
                     np.log(folded))
    return logsumexp(log_nodes + np.log(w)[:, None], axis=0)


def expected_abs_det_rb(m, samples=2000, seed=0, nodes=24):
    '''E|det G| with z1' and z3' integrated out (see rao_blackwell_log_abs_det).'''
    rng = rng_for(seed)
    lam = goe_eigenvalues(m.n - 1, samples, rng)
    z_sq = rng.standard_normal((samples, m.n - 1)) ** 2
    logs = rao_blackwell_log_abs_det(m, lam, z_sq, nodes)
    log_estimate, log_stderr = log_mean_and_stderr(logs)
    with np.errstate(over='ignore'):
        return AbsDetEstimate(estimate=float(np.exp(log_estimate)),
                              stderr=float(np.exp(log_stderr)),
                              log_mean=float(np.mean(logs)),
                              log_estimate=float(log_estimate),
                              log_stderr=float(log_stderr),
                              positive_fraction=np.nan)


def expected_abs_det_quadrature(m, nodes=20):
    '''E|det G| for n = 2 by a 5-axis Gauss-Hermite tensor rule over
    (z1, z2, z3, xi, M).
    '''
    if m.n != 2:
        raise DomainError('The quadrature oracle is only available for n=2, got: ' + str(m.n))
    x, w = gauss_hermite_normal(nodes)
    axes = []
    for k in range(5):
        shape = [1] * 5
        shape[k] = nodes
        axes.append((x.reshape(shape), w.reshape(shape)))
    (z1, w1), (z2, w2), (z3, w3), (xi, w4), (goe, w5) = axes
    s2 = np.sqrt(m.sigma2_sq)
    z1p = np.sqrt(m.sigma1_sq) * z1 - s2 * z2 + m.m1
    z3p = (s2 * z2 + np.sqrt(m.cross) * z3 - m.m2) / m.scale
    corner = m.scale * (np.sqrt(0.5) * goe - z3p)
    det = z1p * corner - m.xi_var * xi ** 2
    weights = w1 * w2 * w3 * w4 * w5
    return float(np.sum(weights * np.abs(det)))
