from __future__ import print_function
import pytest
import time
import numpy as np

from isoland import complexity
from isoland import correlators
from isoland import hessian
from isoland import kacrice
from isoland.complexity import DomainSpec
from isoland.correlators import Log, Power, AtomicMixture, SinhExample

atom = AtomicMixture([(1., 1.)])


def test_variational_equals_closed_form_on_the_whole_space():
    '''
    For D(r) = log(1 + r) and E = R the numerical sup of psi* over the
    whole space reproduces the total complexity with no domain cost.
    '''
    start = time.time()
    c = Log(1.)
    for mu, expected in ((0.5, 0.602221), (1., 0.096574), (2., 0.)):
        value = complexity.complexity_constrained(c, mu, DomainSpec()).value
        total = complexity.total_complexity(c, mu, xi=0.).value
        assert abs(value - total) <= 1e-6
        assert abs(value - expected) <= 1e-6
    assert time.time() - start < 10.


def test_zero_mu_shell():
    value = complexity.complexity_constrained(Log(1.), 0., DomainSpec(R2=2.)).value
    assert abs(value - 1.039721) <= 1e-6


def test_assumption_classifier():
    for c in (Log(1.), Power(0.5, 1.)):
        assert correlators.check_assumption_iv(c)['btbd3'].passed
    report = correlators.check_assumption_iv(SinhExample())
    assert not report['btbd3'].passed
    assert report['btbd'].passed


def test_conditional_hessian_law():
    '''
    10^6 draws at N=6: every entry mean and covariance within 4 standard
    errors, and the Schur form of the determinant on 10^4 draws.
    '''
    start = time.time()
    m = hessian.ConditionalHessianModel.from_correlator(Log(1.), 1., 1., 0., 6)
    report = hessian.verify_conditional_covariance(m, samples=10 ** 6, seed=0)
    assert report.overall, report.worst
    models = [hessian.ConditionalHessianModel.from_correlator(Log(1.), 1., rho, 0., n)
              for n in (2, 4, 8) for rho in (0.5, 1., 2.)]
    rows = hessian.check_schur_identity(models, draws=10 ** 4, seed=1)
    assert all(r.passed for r in rows), rows
    assert time.time() - start < 120.


def test_kac_rice_matches_the_census():
    '''
    At N=2 the Kac-Rice count of D(r) = 1 - exp(-r), mu = 1 on the shell
    (0, 3) agrees with the brute-force census of sampled fields.
    '''
    result = kacrice.kac_rice_integral(atom, 1., R1=0., R2=3., n=2, goe_samples=1000,
                                       seed=0)
    mean, stderr, counts = kacrice.census_mean(atom, 1., 2, R1=0., R2=3., nb_fields=400,
                                               m_features=1024, grid_density=32, seed=1)
    combined = np.sqrt(result.stderr ** 2 + stderr ** 2)
    print('Kac-Rice %.4f +- %.4f, census %.4f +- %.4f' %
          (result.estimate, result.stderr, mean, stderr))
    assert abs(result.estimate - mean) <= 3. * combined


def test_finite_size_approach_to_the_complexity():
    '''
    (1/N) log E Crt_N approaches the constrained complexity as N grows.
    '''
    limit = complexity.complexity_constrained(atom, 1., DomainSpec(R1=0., R2=4.)).value
    gaps = []
    for i, n in enumerate((8, 16, 32, 64)):
        result = kacrice.kac_rice_integral(atom, 1., R1=0., R2=4., n=n, goe_samples=1000,
                                           seed=i)
        gaps.append(abs(result.log_estimate / n - limit))
    print('gaps', gaps)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] <= 0.1


if __name__ == '__main__':
    pytest.main([__file__])
