import pytest
import numpy as np
from numpy.testing import assert_allclose

from isoland import hessian
from isoland.callbacks import History
from isoland.correlators import Log, DomainError
from isoland.hessian import ConditionalHessianModel
from isoland.utils.test_utils import get_test_models

c = Log(1.)


def test_model_scalars():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 8)
    assert_allclose(m.b_sq, 3.214199, atol=1e-6)
    assert_allclose(m.scale, 2.)
    assert_allclose(m.xi_var, 2. / 8.)
    assert_allclose(m.m1, 1.)
    assert_allclose(m.m2, 1.)
    assert_allclose(np.diag(m.mean_matrix()), [1.] * 8)
    mean, var = m.z3_moments()
    assert_allclose(mean, -0.5)
    assert var > 0
    assert m.get_config()['n'] == 8
    with pytest.raises(DomainError):
        ConditionalHessianModel.from_correlator(c, 1., 1., 0., 1)


def test_covariance_table():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 8)
    p = m.params
    assert_allclose(hessian.conditional_covariance_table(m, 1, 1, 1, 1), 0.467926, atol=1e-6)
    assert_allclose(hessian.conditional_covariance_table(m, 1, 2, 1, 2), 0.25)
    assert_allclose(hessian.conditional_covariance_table(m, 1, 2, 2, 1), 0.25)
    assert hessian.conditional_covariance_table(m, 1, 2, 1, 3) == 0.
    assert hessian.conditional_covariance_table(m, 2, 3, 2, 4) == 0.
    assert_allclose(hessian.conditional_covariance_table(m, 2, 2, 2, 2),
                    (6. - p.frak_t ** 2) / 8.)
    assert_allclose(hessian.conditional_covariance_table(m, 2, 2, 3, 3),
                    (2. - p.frak_t ** 2) / 8.)
    assert_allclose(hessian.conditional_covariance_table(m, 1, 1, 2, 2),
                    (2. - (p.a_rho2 + p.frak_t) * p.frak_t) / 8.)
    with pytest.raises(DomainError):
        hessian.conditional_covariance_table(m, 0, 1, 1, 1)
    with pytest.raises(DomainError):
        hessian.conditional_covariance_table(m, 1, 1, 1, 9)


def test_conditional_law_of_z1():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0.3, 5)
    mean, _ = m.z3_moments()
    abar, bsq_over_n = hessian.conditional_z1_given_z3(m, mean)
    assert_allclose(abar, m.m1)
    assert_allclose(bsq_over_n * m.n, m.b_sq, rtol=1e-10)
    abar = hessian.conditional_z1_given_z3(m, np.array([mean, mean + 1.]))[0]
    assert abar.shape == (2,)


def test_monte_carlo_covariance_check():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 3)
    history = History()
    report = hessian.verify_conditional_covariance(m, samples=200000, seed=1,
                                                   batch_size=50000, callbacks=[history])
    # 6 means, 21 covariances, 1 GOE ratio
    assert len(report) == 28
    assert report.overall, report.worst
    assert report['goe_diag_offdiag_ratio'].passed
    assert history.batch == [0, 1, 2, 3]
    assert history.seen == 200000
    assert history.result == {'overall': True}


def test_schur_identity():
    models = get_test_models(n=2) + get_test_models(n=5)
    rows = hessian.check_schur_identity(models, draws=900, seed=0)
    assert [r.name for r in rows] == ['schur_identity', 'schur_sign', 'inner_block_eigenvalues']
    assert all(r.passed for r in rows), rows


def test_single_sample():
    m = ConditionalHessianModel.from_correlator(c, 0.5, 2., -0.1, 4)
    sample = hessian.sample_conditional_hessian(m, seed=11)
    g = hessian.assemble_matrix(m, sample)
    assert_allclose(g, g.T)
    sign, log_abs = np.linalg.slogdet(g)
    assert_allclose(sample.log_abs_det, log_abs, rtol=1e-8)
    assert sample.sign == sign
    assert_allclose(hessian.inner_block_eigenvalues(m, sample),
                    np.linalg.eigvalsh(g[1:, 1:]), rtol=1e-8, atol=1e-12)
    again = hessian.sample_conditional_hessian(m, seed=11)
    assert again.log_abs_det == sample.log_abs_det


def test_abs_det_estimators_agree_with_quadrature():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 2)
    exact = hessian.expected_abs_det_quadrature(m, nodes=20)
    mc = hessian.expected_abs_det_mc(m, samples=200000, seed=2, batch_size=50000)
    rb = hessian.expected_abs_det_rb(m, samples=4000, seed=3)
    assert 0. <= mc.positive_fraction <= 1.
    assert abs(mc.estimate - exact) <= 4. * mc.stderr + 1e-2 * exact
    assert abs(rb.estimate - exact) <= 4. * rb.stderr + 1e-2 * exact
    with pytest.raises(DomainError):
        hessian.expected_abs_det_quadrature(
            ConditionalHessianModel.from_correlator(c, 1., 1., 0., 3))


def test_rao_blackwell_lowers_variance():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 6)
    mc = hessian.expected_abs_det_mc(m, samples=4000, seed=4, batch_size=4000)
    rb = hessian.expected_abs_det_rb(m, samples=4000, seed=4)
    assert rb.log_stderr < mc.log_stderr
    assert abs(rb.estimate - mc.estimate) <= 4. * (rb.stderr + mc.stderr)


def test_mc_estimate_independent_of_workers():
    m = ConditionalHessianModel.from_correlator(c, 1., 1., 0., 4)
    one = hessian.expected_abs_det_mc(m, samples=5000, seed=9, batch_size=1000, workers=1)
    three = hessian.expected_abs_det_mc(m, samples=5000, seed=9, batch_size=1000, workers=3)
    assert one == three


def test_verification_report():
    rows = [hessian.verification_row('a', 1.0, 1.1, 0.2),
            hessian.verification_row('b', 2.0, 1.0, 0.5)]
    report = hessian.VerificationReport(rows)
    assert report['a'].passed
    assert not report['b'].passed
    assert not report.overall
    assert report.worst.name == 'b'
    assert_allclose(report.max_ratio, 2.)
    assert_allclose(report.max_deviation, 1.)
    with pytest.raises(KeyError):
        report['c']
    config = report.get_config()
    assert config['overall'] is False
    assert len(config['rows']) == 2
    report.extend([hessian.verification_row('exact', 0., 0., 0.)])
    assert report['exact'].passed


if __name__ == '__main__':
    pytest.main([__file__])
