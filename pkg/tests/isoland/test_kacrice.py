import pytest
import numpy as np
from numpy.testing import assert_allclose
from scipy.special import gamma

from isoland import kacrice
from isoland.callbacks import History
from isoland.correlators import AtomicMixture, Log, DomainError
from isoland.fields import sample_field

atom = AtomicMixture([(1., 1.)])


def test_quadratic_bowl_has_one_critical_point():
    f = sample_field(AtomicMixture([]), 1., 2)
    census = kacrice.count_critical_points(f, R2=2., grid_density=8)
    assert census.count_in == 1
    assert census.nb_roots == 1
    point = census.points[0]
    assert_allclose(point.x, [0., 0.])
    assert point.value == 0.
    assert point.hessian_sign == 1.
    # the origin sits on the inner edge of a shell with R1 = 0
    assert point.boundary


def test_value_interval_filters_points():
    f = sample_field(AtomicMixture([]), 1., 2)
    assert kacrice.count_critical_points(f, E=(0.1, 1.), R2=2., grid_density=8).count_in == 0
    assert kacrice.count_critical_points(f, E=(-1., 1.), R2=2., grid_density=8).count_in == 1


def test_inverted_bowl_in_three_dimensions():
    f = sample_field(AtomicMixture([]), -1., 3)
    census = kacrice.count_critical_points(f, R2=1., grid_density=4)
    assert census.count_in == 1
    assert census.points[0].hessian_sign == -1.


def test_census_of_a_sampled_field():
    f = sample_field(atom, 1., 2, m_features=512, seed=0)
    census = kacrice.count_critical_points(f, R1=0., R2=2., grid_density=24)
    assert census.count_in >= 1
    radius = 2. * np.sqrt(2.)
    for p in census.points:
        assert p.gradient_norm <= 1e-10
        assert np.linalg.norm(p.x) <= radius + 1e-10
        assert_allclose(p.value, f.value(p.x) / 2.)
    xs = np.array([p.x for p in census.points])
    if len(xs) > 1:
        gaps = np.linalg.norm(xs[:, None] - xs[None], axis=-1) + np.eye(len(xs))
        assert np.min(gaps) > 1e-6
    config = census.get_config()
    assert config['count_in'] == census.count_in
    assert config['E'] == [None, None]


def test_census_errors():
    f = sample_field(atom, 1., 2, m_features=256)
    with pytest.raises(DomainError):
        kacrice.count_critical_points(f, R2=None)
    with pytest.raises(DomainError):
        kacrice.count_critical_points(f, R2=np.inf)
    with pytest.raises(DomainError):
        kacrice.count_critical_points(f, R1=2., R2=1.)


def test_census_mean_is_seeded_and_worker_independent():
    args = dict(E=None, R1=0., R2=1.5, nb_fields=6, m_features=256, grid_density=12, seed=4)
    history = History()
    mean, stderr, counts = kacrice.census_mean(atom, 1., 2, workers=1, callbacks=[history],
                                               **args)
    again = kacrice.census_mean(atom, 1., 2, workers=3, **args)
    assert mean == again[0]
    assert_allclose(counts, again[2])
    assert len(counts) == 6
    assert_allclose(mean, np.mean(counts))
    assert stderr >= 0.
    assert history.history['count_in'] == list(counts)


def test_sphere_prefactor():
    for n in (2, 3, 7):
        area = 2. * np.pi ** (n / 2.) / gamma(n / 2.)
        assert_allclose(kacrice.log_sphere_prefactor(n), np.log(area) + 0.5 * n * np.log(n))
    assert_allclose(kacrice.log_sphere_prefactor(2), np.log(4. * np.pi))


def test_strong_confinement_gives_one_critical_point():
    result = kacrice.kac_rice_integral(Log(1.), 10., n=2, goe_samples=400, quad_nodes=32,
                                       hermite_nodes=16, seed=0)
    assert abs(result.estimate - 1.) < 0.05
    assert result.stderr < 0.05
    assert_allclose(result.log_estimate, np.log(result.estimate))


def test_kac_rice_is_seeded_and_worker_independent():
    kwargs = dict(E=(-1., 1.), R1=0., R2=3., n=3, goe_samples=60, quad_nodes=8,
                  hermite_nodes=8, seed=12)
    one = kacrice.kac_rice_integral(atom, 1., workers=1, **kwargs)
    two = kacrice.kac_rice_integral(atom, 1., workers=2, **kwargs)
    assert one == two
    other = kacrice.kac_rice_integral(atom, 1., workers=1, **dict(kwargs, seed=13))
    assert other.estimate != one.estimate


def test_restricting_the_domain_lowers_the_count():
    kwargs = dict(n=2, goe_samples=200, quad_nodes=16, hermite_nodes=12, seed=1)
    full = kacrice.kac_rice_integral(atom, 1., R2=3., **kwargs)
    inner = kacrice.kac_rice_integral(atom, 1., R2=1., **kwargs)
    low = kacrice.kac_rice_integral(atom, 1., E=(None, 0.), R2=3., **kwargs)
    assert inner.estimate < full.estimate
    assert low.estimate < full.estimate


def test_kac_rice_errors():
    with pytest.raises(DomainError):
        kacrice.kac_rice_integral(Log(1.), 0., n=2)
    with pytest.raises(DomainError):
        kacrice.kac_rice_integral(Log(1.), 1., n=1)


if __name__ == '__main__':
    pytest.main([__file__])
