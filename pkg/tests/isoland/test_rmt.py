import pytest
import numpy as np
from numpy.testing import assert_allclose
from scipy import integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from isoland import rmt
from isoland.rmt import SQRT2


def _log_potential_by_quadrature(x):
    kinks = [x] if -SQRT2 < x < SQRT2 else None
    value, _ = integrate.quad(lambda t: np.log(abs(x - t)) * rmt.semicircle_density(t),
                              -SQRT2, SQRT2, points=kinks, limit=400,
                              epsabs=1e-12, epsrel=1e-12)
    return value


def test_semicircle_density_normalized():
    mass, _ = integrate.quad(rmt.semicircle_density, -SQRT2, SQRT2)
    assert_allclose(mass, 1., rtol=1e-10)
    second, _ = integrate.quad(lambda t: t ** 2 * rmt.semicircle_density(t), -SQRT2, SQRT2)
    assert_allclose(second, 0.5, rtol=1e-10)
    assert rmt.semicircle_density(2.) == 0.


def test_log_potential_golden_values():
    assert_allclose(rmt.semicircle_log_potential(0.), -0.846574, atol=1e-6)
    assert_allclose(rmt.semicircle_log_potential(2.), 0.620586, atol=1e-6)


@pytest.mark.parametrize('x', [0., 0.3, -1., 1.4, SQRT2, 1.5, 2., -3., 10.])
def test_log_potential_matches_quadrature(x):
    assert_allclose(rmt.semicircle_log_potential(x), _log_potential_by_quadrature(x),
                    atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(-50., 50.))
def test_log_potential_even(x):
    assert_allclose(rmt.semicircle_log_potential(x), rmt.semicircle_log_potential(-x),
                    atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.5, 1e4))
def test_log_potential_tail_bound(x):
    value = rmt.semicircle_log_potential(x)
    assert value < np.log(x)
    assert value > np.log(x - SQRT2)


def test_log_potential_vectorized():
    x = np.array([-2., 0., 2.])
    out = rmt.semicircle_log_potential(x)
    assert out.shape == (3,)
    assert_allclose(out[0], out[2])


def test_rate_function_golden_values():
    assert rmt.rate_function_j1(-SQRT2) == 0.
    assert_allclose(rmt.rate_function_j1(-2.), 0.532840, atol=1e-6)
    assert rmt.rate_function_j1(0.) == np.inf
    assert rmt.rate_function_j1_integral(0.) == np.inf


@pytest.mark.parametrize('x', [-1.5, -2., -3., -10.])
def test_rate_function_matches_integral(x):
    assert_allclose(rmt.rate_function_j1(x), rmt.rate_function_j1_integral(x),
                    rtol=1e-9, atol=1e-12)


def test_goe_entry_variances():
    n = 4
    m = rmt.goe_matrices(n, size=40000, seed=3)
    assert m.shape == (40000, n, n)
    assert_allclose(m, np.swapaxes(m, -1, -2))
    diag = np.mean(m[:, 0, 0] ** 2)
    off = np.mean(m[:, 0, 1] ** 2)
    assert_allclose(diag, 1. / n, rtol=0.05)
    assert_allclose(off, 1. / (2. * n), rtol=0.05)


def test_sample_goe_seeded():
    s1 = rmt.sample_goe(50, seed=7)
    s2 = rmt.sample_goe(50, seed=7)
    s3 = rmt.sample_goe(50, seed=8)
    assert len(s1) == 50
    assert_allclose(s1.eigenvalues, s2.eigenvalues)
    assert not np.allclose(s1.eigenvalues, s3.eigenvalues)
    assert np.all(np.diff(s1.eigenvalues) >= 0)
    with pytest.raises(Exception):
        rmt.sample_goe(0, seed=0)


def test_empirical_spectrum():
    s = rmt.EmpiricalSpectrum([3., 1., 2.])
    assert_allclose(s.eigenvalues, [1., 2., 3.])
    assert_allclose(s.cdf(2.), 2. / 3.)
    assert_allclose(s.integrate(lambda t: t ** 2), 14. / 3.)
    assert rmt.log_potential(s, 2.) == -np.inf
    assert_allclose(rmt.log_potential(s, 0.), np.log(6.) / 3.)
    assert s.get_config()['n'] == 3
    with pytest.raises(Exception):
        rmt.EmpiricalSpectrum([])


def test_large_goe_approaches_semicircle():
    s = rmt.sample_goe(400, seed=0)
    assert s.eigenvalues[0] > -1.7 and s.eigenvalues[-1] < 1.7
    x = np.array([-3., 2.5, 4.])
    assert_allclose(rmt.log_potential(s, x), rmt.semicircle_log_potential(x), atol=0.02)
    close = rmt.bounded_lipschitz_distance(s)
    far = rmt.bounded_lipschitz_distance(rmt.EmpiricalSpectrum(np.zeros(10)))
    assert close < 0.05
    assert far > 0.1


def test_goe_500_spectrum_statistics():
    spectra = [rmt.sample_goe(500, seed=seed).eigenvalues for seed in range(40)]
    pooled = np.concatenate(spectra)
    assert np.mean(np.abs(pooled) <= 1.6) >= 0.999
    means = np.array([np.mean(lam) for lam in spectra])
    assert np.mean(np.abs(means) <= 4. / np.sqrt(2. * 500 * 500)) >= 0.95
    # (1/n) tr M^2 = 1/2 + O(1/n)
    assert_allclose(np.mean(pooled ** 2), 0.5, atol=0.01)


def test_goe_eigenvalues_shape():
    rng = np.random.default_rng(0)
    lam = rmt.goe_eigenvalues(3, 10, rng)
    assert lam.shape == (10, 3)
    assert np.all(np.diff(lam, axis=-1) >= 0)


if __name__ == '__main__':
    pytest.main([__file__])
