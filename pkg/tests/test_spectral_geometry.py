import math

import numpy as np
import pytest

from _oracles import rectangle_dirichlet_levels, richardson_first_derivative
from _reference import ROBNIK_AREA, ROBNIK_PERIMETER
from ringspec.analytic import counting_estimate, weyl_energy
from ringspec.conformal import RingGeometry
from ringspec.errors import AccuracyError, DomainError
from ringspec.exact import annulus_spectrum
from ringspec.spectral_geometry import (HeatSumSeries, approximant_curves, area_approximant,
                                        area_approximant_derivative, estimate_geometry,
                                        heat_sum, optimal_t, perimeter_constant_estimates,
                                        staircase)
from ringspec.spectral_geometry import _objective


@pytest.fixture(scope="module")
def unit_square():
    """Dirichlet levels of the unit square below 1e6 (A = 1, L = 4, C = 1/4)."""
    return HeatSumSeries(rectangle_dirichlet_levels(1.0, 1.0, 1e6))


def _synthetic(area, perimeter, constant, n=2000):
    """Levels placed where the smooth counting function crosses n - 1/2."""
    g = RingGeometry(area, perimeter, 0.0, constant)
    return weyl_energy(np.arange(1, n + 1) - 0.5, g)


def test_single_level_a0_maximum():
    s = HeatSumSeries([1.0])
    t = np.linspace(0.5, 1.5, 1001)
    a0 = area_approximant(s, 0, t)
    assert t[np.argmax(a0)] == pytest.approx(1.0, abs=1e-3)
    assert area_approximant(s, 0, 1.0) == pytest.approx(4 * math.pi / math.e, rel=1e-15)


def test_approximant_formulas_single_level():
    s = HeatSumSeries([2.0])
    t = 0.3
    u = 0.6
    pref = 4 * math.pi * t * math.exp(-u)
    assert area_approximant(s, 1, t) == pytest.approx(pref * (2 * u - 1), rel=1e-14)
    assert area_approximant(s, 2, t) == pytest.approx(pref * u * (2 * u - 3), rel=1e-14)
    assert area_approximant(s, 3, t) == pytest.approx(
        pref * u * (4 * u * u - 12 * u + 3) / 3, rel=1e-14)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_scaling_invariance(m, rng):
    e = np.sort(rng.uniform(1, 100, 50))
    lam = 3.7
    for t in (0.01, 0.05, 0.2):
        assert lam * area_approximant(lam * e, m, t / lam) == pytest.approx(
            area_approximant(e, m, t), rel=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_derivative_against_finite_differences(m, rng):
    e = np.sort(rng.uniform(1, 200, 80))
    for t in (0.003, 0.02, 0.1):
        fd = richardson_first_derivative(lambda x: area_approximant(e, m, x), t, h=t / 20)
        assert area_approximant_derivative(e, m, t) == pytest.approx(fd, rel=1e-7, abs=1e-10)


def test_heat_sum_and_vectorization():
    e = [1.0, 2.0, 5.0]
    t = np.array([0.1, 0.7])
    np.testing.assert_allclose(heat_sum(e, t), [sum(math.exp(-x * s) for x in e) for s in t])
    np.testing.assert_allclose(area_approximant(e, 2, t),
                               [area_approximant(e, 2, float(s)) for s in t], rtol=1e-15)


def test_error_order_on_unit_square(unit_square):
    # A0 - A = -L sqrt(pi t)/2 + pi t and A1 - A = -pi t; A2, A3 exact
    t = np.array([1e-3, 2.5e-4])
    err0 = area_approximant(unit_square, 0, t) - 1.0
    err1 = area_approximant(unit_square, 1, t) - 1.0
    np.testing.assert_allclose(err0, -2 * np.sqrt(math.pi * t) + math.pi * t, rtol=1e-8)
    np.testing.assert_allclose(err1, -math.pi * t, rtol=1e-8)
    assert err0[0] / err0[1] == pytest.approx(2.0, rel=0.05)
    assert err1[0] / err1[1] == pytest.approx(4.0, rel=1e-8)
    for m in (2, 3):
        err = np.abs(area_approximant(unit_square, m, t) - 1.0)
        assert np.all(err <= 1e-9)
        assert np.all(err < np.abs(err1) * 1e-5)


def test_optimal_t_minimal_on_scan(rng):
    e = _synthetic(1.0, 4.0, 0.0, 600)
    t_star = optimal_t(e)
    ts = np.geomspace(0.1 / e[-1], 10 / e[0], 400)
    probe = rng.choice(ts, 100, replace=False)
    f_star = _objective(HeatSumSeries(e), t_star)
    assert np.all(f_star <= _objective(HeatSumSeries(e), probe))


def test_optimal_t_scaling_covariance():
    e = _synthetic(1.0, 4.0, 0.0, 600)
    lam = 7.3
    assert optimal_t(lam * e) == pytest.approx(optimal_t(e) / lam, rel=1e-8)


def test_optimal_t_objectives():
    e = _synthetic(1.0, 4.0, 0.0, 600)
    s = HeatSumSeries(e)
    t_plain = optimal_t(s, objective="plain")
    assert _objective(s, t_plain, "plain") <= _objective(s, optimal_t(s), "plain")
    with pytest.raises(ValueError):
        optimal_t(s, objective="cubic")


def test_synthetic_perimeter_recovery():
    for area, per, c in ((1.0, 4.0, 0.0), (1.0, 4.0, 0.25), (2.0, 5.0, 1 / 6)):
        est = estimate_geometry(_synthetic(area, per, c))
        assert est.area == pytest.approx(area, rel=1e-3)
        assert est.perimeter == pytest.approx(per, rel=1e-3)


def test_synthetic_constant_recovery():
    for area, per, c in ((1.0, 4.0, 0.25), (2.0, 5.0, 1 / 6)):
        est = estimate_geometry(_synthetic(area, per, c))
        assert est.constant == pytest.approx(c, rel=1e-3)


def test_perimeter_fit_exact_on_smooth_heat_kernel():
    # fit K(t) = A/(4 pi t) - L/(8 sqrt(pi t)) + C on the unit square, where
    # this form is exact up to exponentially small terms
    s = rectangle_dirichlet_levels(1.0, 1.0, 1e6)
    l_est, c_est = perimeter_constant_estimates(s, 1.0, t_star=5e-4)
    assert l_est == pytest.approx(4.0, rel=1e-8)
    assert c_est == pytest.approx(0.25, rel=1e-6)


def test_annulus_perimeter(annulus09_exact_2000):
    est = estimate_geometry(annulus09_exact_2000.energies)
    assert est.perimeter == pytest.approx(2 * math.pi * 1.9, rel=0.01)
    assert est.area == pytest.approx(math.pi * 0.19, rel=0.005)


def test_annulus_plateau(annulus09_exact_2000):
    est = estimate_geometry(annulus09_exact_2000.energies)
    assert est.area_spread < 0.02 * math.pi * 0.19


def test_robnik_geometry(robnik_ccm_2000):
    est = estimate_geometry(robnik_ccm_2000)
    assert est.area == pytest.approx(ROBNIK_AREA, rel=0.005)
    assert est.perimeter == pytest.approx(ROBNIK_PERIMETER, rel=0.01)
    assert abs(est.constant) <= 0.05


def test_robnik_plateau(robnik_ccm_2000):
    est = estimate_geometry(robnik_ccm_2000)
    a1, a2, a3 = est.approximants[1:]
    assert max(a1, a2, a3) - min(a1, a2, a3) <= 0.01 * est.area
    assert est.area_spread < 0.02 * est.area


def test_staircase_examples():
    e = [1.0, 2.0, 2.0, 3.0, 5.0]
    assert staircase(e, 0.5) == 0
    assert staircase(e, 1.0) == 1
    assert staircase(e, 2.0) == 3
    assert staircase(e, 5.0) == 5
    np.testing.assert_array_equal(staircase(e, [0.0, 2.5, 9.0]), [0, 3, 5])
    distinct = [1.0, 4.0, 9.0]
    for k, x in enumerate(distinct):
        assert staircase(distinct, x) == k + 1


@pytest.fixture(scope="module")
def annulus09_staircase():
    a = 0.9
    s = annulus_spectrum(a, 1.0, 2400)
    assert s.energies[-1] > 50000
    g = RingGeometry(math.pi * (1 - a * a), 2 * math.pi, 2 * math.pi * a)
    es = np.linspace(2000, 50000, 4801)
    return staircase(s.energies, es) - counting_estimate(es, g)


def test_staircase_oscillates_around_zero(annulus09_staircase):
    assert abs(np.mean(annulus09_staircase)) < 2


def test_staircase_mean_absolute_deviation(annulus09_staircase):
    assert np.mean(np.abs(annulus09_staircase)) < 2


def test_curves():
    e = _synthetic(1.0, 4.0, 0.0, 200)
    c = approximant_curves(e, [1e-3, 1e-2])
    assert set(c) == {"t", "A0", "A1", "A2", "A3"}
    assert c["A2"][1] == pytest.approx(area_approximant(e, 2, 1e-2))


def test_validation():
    with pytest.raises(DomainError):
        HeatSumSeries([])
    with pytest.raises(DomainError):
        HeatSumSeries([1.0, -2.0])
    with pytest.raises(DomainError):
        HeatSumSeries([1.0, math.nan])
    with pytest.raises(DomainError):
        area_approximant([1.0], 4, 0.1)
    with pytest.raises(DomainError):
        area_approximant([1.0], 1, 0.0)
    with pytest.raises(DomainError):
        perimeter_constant_estimates([1.0, 2.0], 0.0)
    with pytest.raises(AccuracyError):
        perimeter_constant_estimates([1.0, 2.0, 3.0], 1.0, t_star=0.1, n_points=1)
    assert HeatSumSeries([3.0, 1.0]).energies.tolist() == [1.0, 3.0]
