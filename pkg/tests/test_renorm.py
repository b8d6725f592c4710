import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from src.kernels import cutoff
from src.models import Bump
from src.models.testfns import FunctionTest
from src.renorm import (
    C1_constant,
    C2_constant,
    C2_log_coefficient,
    PairingDiagram,
    capped_renormalization_check,
    chaos_integral,
    chaos_isometry_check,
    contraction_profile,
    create_mollifier,
    divergence_report,
    enumerate_wick,
    fit_divergence,
    grid_kernel,
    hermite_wick,
    inverse_distance_kernel,
    kernel_mass,
    pi2_experiment,
    pi2_sweep,
    plain_pairing,
    renormalized_distribution,
    surrogate_C1,
    surrogate_covariance,
    telephone_number,
    wick_expand,
)
from src.renorm.constants import HEAT_LEADING

DYADIC_EPS = [2.0**-n for n in range(3, 9)]


def test_telephone_numbers():
    assert [telephone_number(k) for k in range(7)] == [1, 1, 2, 4, 10, 26, 76]


@given(st.integers(min_value=0, max_value=6))
@settings(max_examples=20, deadline=None)
def test_pairing_count_matches_recurrence(k):
    diagrams = enumerate_wick(k)
    assert len(diagrams) == telephone_number(k)
    assert len({d.pairs for d, _ in diagrams}) == len(diagrams)
    for d, _ in diagrams:
        used = [i for p in d.pairs for i in p]
        assert len(used) == len(set(used))


def test_two_legs_split_into_wick_product_and_contraction():
    diagrams = [d for d, _ in enumerate_wick(2)]
    assert {d.contractions for d in diagrams} == {0, 1}
    assert PairingDiagram(2, ((0, 1),)).free == ()


def test_identical_legs_merge_single_contractions():
    merged = {d.contractions: m for d, m in enumerate_wick(3, ["K"] * 3)}
    assert merged == {0: 1, 1: 3}


def test_empty_diagram():
    assert enumerate_wick(0) == [(PairingDiagram(0, ()), 1)]
    with pytest.raises(ValueError):
        enumerate_wick(3, ["a", "b"])


def test_contraction_profile():
    assert contraction_profile(4) == {0: 1, 1: 6, 2: 3}


def test_wick_expansion_reproduces_hermite():
    z = np.linspace(-2.0, 2.0, 9)
    samples = np.repeat(z[:, None], 3, axis=1)
    assert np.allclose(wick_expand(samples, np.ones((3, 3))), z**3 - 3 * z)
    assert np.allclose(hermite_wick(z, 3), z**3 - 3 * z)
    independent = np.column_stack([z, z + 1.0])
    assert np.allclose(wick_expand(independent, np.eye(2)), z * (z + 1.0))


def test_first_chaos_is_linear_in_noise():
    z = np.random.default_rng(1).standard_normal((5, 4))
    f = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(chaos_integral(f, z, 0.25), 0.5 * z @ f)


def test_chaos_isometry_first_order():
    f = grid_kernel(lambda x: 1 + x, 8, 1)
    g = grid_kernel(lambda x: 2 - x, 8, 1)
    report = chaos_isometry_check(f, g, samples=100_000, seed=11)
    assert report.relative_error < 0.05
    assert report.within_stderr


def test_chaos_isometry_second_order():
    f = grid_kernel(lambda x, y: 1 + x + y, 6, 2)
    g = grid_kernel(lambda x, y: 2 + x * y, 6, 2)
    report = chaos_isometry_check(f, g, samples=100_000, seed=5)
    assert report.exact > 0
    assert report.relative_error < 0.05


def test_distinct_chaoses_are_orthogonal():
    f = grid_kernel(lambda x: 1 + x, 6, 1)
    g = grid_kernel(lambda x, y: 2 + x * y, 6, 2)
    report = chaos_isometry_check(f, g, samples=50_000, seed=2)
    assert report.exact == 0.0
    assert report.within_stderr


def test_zero_kernel_gives_zero():
    g = grid_kernel(lambda x: 1 + x, 8, 1)
    report = chaos_isometry_check(np.zeros(8), g, samples=1000, seed=0)
    assert report.estimate == 0.0
    assert report.relative_error == 0.0


def test_mollifier_mass():
    assert create_mollifier("heat").mass() == pytest.approx(1.0, abs=1e-8)
    assert create_mollifier("heat-bump").mass() == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(ValueError, match="Available"):
        create_mollifier("box")


def test_time_mollification_lowers_leading_coefficient():
    bump = create_mollifier("heat-bump")
    assert 0 < bump.leading_coefficient < HEAT_LEADING
    assert bump.effective_eps(0.1) > 0.1


def test_C1_halves_when_eps_doubles():
    assert C1_constant(2.0**-7) / C1_constant(2.0**-8) == pytest.approx(0.5, abs=0.01)


def test_C1_horizon_tail_is_negligible():
    difference = C1_constant(0.1, horizon=1e8) - C1_constant(0.1, horizon=1e6)
    # int_{1e6}^{1e8} (8 pi t)^{-3/2} dt, up to the O(eps^2) shift
    tail = 2.0 * (8.0 * np.pi) ** -1.5 * (1e-3 - 1e-4)
    assert difference == pytest.approx(tail, rel=1e-3)
    assert difference < 1e-3 * C1_constant(0.1)


def test_constants_reject_eps_outside_unit_interval():
    with pytest.raises(ValueError):
        C1_constant(0.0)
    with pytest.raises(ValueError):
        C2_constant(1.5)


def test_divergence_laws():
    report = divergence_report(DYADIC_EPS)
    assert report.c1_slope == pytest.approx(1.0, abs=0.15)
    assert report.c2_log_r_squared > 0.98
    assert report.passed


def test_C2_increments_approach_log_law():
    report = divergence_report(DYADIC_EPS)
    step = C2_log_coefficient() * math.log(2.0)
    assert report.c2_increments[-1] == pytest.approx(step, rel=0.05)


def test_linear_C2_vanishes_at_horizon_scale():
    assert C2_constant(1.0, method="linear") == pytest.approx(0.0, abs=1e-15)
    assert C2_constant(0.1, method="linear") > 0


def test_time_mollified_constants_keep_rates():
    assert divergence_report(DYADIC_EPS, create_mollifier("heat-bump")).passed


def test_fit_divergence_recovers_coefficients():
    eps = np.array(DYADIC_EPS)
    fit = fit_divergence(eps, 2.0 / eps + 0.3 * np.log(eps) + 1.0)
    assert fit.c1 == pytest.approx(2.0, abs=1e-8)
    assert fit.c_log == pytest.approx(0.3, abs=1e-8)
    assert fit.c3 == pytest.approx(1.0, abs=1e-8)
    assert fit.r_squared == pytest.approx(1.0)


def test_renormalization_is_plain_integration_away_from_origin():
    W = inverse_distance_kernel()
    phi = Bump((0.5,), 0.25)
    expected, _ = integrate.quad(lambda x: W(np.array([x]))[0] * phi(np.array([x]))[0], 0.25, 0.75)
    assert renormalized_distribution(W).pair(phi) == pytest.approx(expected, rel=1e-6)


def test_even_kernel_annihilates_odd_test():
    odd = FunctionTest(lambda x: x, ((-1.0, 1.0),))
    assert abs(renormalized_distribution(inverse_distance_kernel()).pair(odd)) < 1e-10


def test_renormalization_is_linear():
    RW = renormalized_distribution(inverse_distance_kernel())
    a, b = Bump((0.1,), 0.5), Bump((-0.2,), 0.3)
    both = FunctionTest(lambda x: 2.0 * a(x) - 3.0 * b(x), ((-0.5, 0.6),))
    assert RW.pair(both) == pytest.approx(2.0 * RW.pair(a) - 3.0 * RW.pair(b), rel=1e-6, abs=1e-10)


def test_bounded_kernel_matches_subtracted_integral():
    W = lambda x: cutoff(np.abs(np.atleast_1d(x))) * (1.0 + np.atleast_1d(x))
    phi = Bump((0.1,), 0.5)
    phi0 = phi(np.array([0.0]))[0]
    expected = plain_pairing(W, phi, 1.0, (-0.4, 0.6)) - phi0 * kernel_mass(W, 1.0)
    assert renormalized_distribution(W).pair(phi) == pytest.approx(expected, rel=1e-6)


def test_capped_kernels_converge():
    report = capped_renormalization_check([2.0**-n for n in range(2, 9)])
    assert max(report.identity_residuals) < 1e-6
    assert report.rate.at_least(1.5, 0.2)
    assert report.passed
    increments = np.diff(report.masses)
    assert np.allclose(increments, 2.0 * math.log(2.0), atol=1e-8)


def test_surrogate_variance():
    assert surrogate_covariance(0.0, 0.0, 0.1) == pytest.approx(surrogate_C1(0.1))
    assert surrogate_C1(0.05) == pytest.approx(2.0 * surrogate_C1(0.1))


def test_pi2_renormalized_mean_vanishes():
    for i, eps in enumerate((0.25, 0.125)):
        result = pi2_experiment(eps, samples=4000, seed=7 + i)
        assert abs(result.mean_renorm) <= 3.0 * result.stderr
        assert result.ratio == pytest.approx(1.0, abs=0.1)


def test_pi2_zero_test_function():
    zero = FunctionTest(lambda p: np.zeros(len(p)), ((0.25, 0.75), (-0.5, 0.5)))
    result = pi2_experiment(0.25, zero, samples=100, seed=0)
    assert (result.mean_raw, result.mean_renorm, result.variance) == (0.0, 0.0, 0.0)
    assert result.ratio is None
    assert result.passed


def test_pi2_does_not_depend_on_worker_count():
    one = pi2_experiment(0.25, samples=3000, seed=3, batch=1000, workers=1)
    three = pi2_experiment(0.25, samples=3000, seed=3, batch=1000, workers=3)
    assert one.mean_raw == three.mean_raw


def test_pi2_rejects_bad_eps():
    with pytest.raises(ValueError):
        pi2_experiment(0.0)


@pytest.mark.slow
def test_pi2_sweep():
    sweep = pi2_sweep([2.0**-n for n in range(2, 5)], samples=20_000, seed=1)
    assert sweep.passed
