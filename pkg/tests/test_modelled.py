import numpy as np
import pytest

from src.errors import PairingError, ProductTableError, ReconstructionError, SectorError
from src.modelled import (
    ModelledDistribution,
    ProductTable,
    compose,
    constant_distribution,
    covariance_residual,
    dgamma_seminorm,
    integrate_by_reconstruction,
    multiply,
    pairing_product,
    polynomial_jet,
    polynomial_product_table,
    reconstruct,
    reconstruct_pointwise,
    reconstruction_increments,
    reconstruction_rate,
    remainder_fit,
    rough_integral_levels,
    rough_integrate,
    toy_modelled,
    toy_product_experiment,
    toy_product_table,
    zero_distribution,
)
from src.models import (
    AnalyticFn,
    Bump,
    ControlledPath,
    mollified_noise_model,
    polynomial_model,
    rough_path_model,
    sample_rough_path,
    toy_pair,
    white_noise,
)

SIN = [np.sin, np.cos, lambda x: -np.sin(x)]
COS = [np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)]
CENTERS = np.linspace(0.3, 0.7, 20)


@pytest.fixture(scope="module")
def poly():
    return polynomial_model(1, 2)


@pytest.fixture(scope="module")
def sin_jet(poly):
    return polynomial_jet(poly, 2.5, SIN)


def _smooth_xi():
    return AnalyticFn(lambda y: np.cos(2 * np.pi * np.asarray(y, dtype=float)) + 0.5)


def test_constant_with_trivial_group_has_zero_seminorm():
    limit, _ = toy_pair(1.0, 4)
    f = constant_distribution(limit, 1, "Ξ", 2.0)
    report = dgamma_seminorm(f)
    assert report.passed
    assert all(c == 0.0 for c in report.constants.values())


def test_taylor_jet_seminorm(sin_jet):
    report = dgamma_seminorm(sin_jet)
    assert report.passed
    for degree, fit in report.fits.items():
        assert fit.at_least(report.expected[degree], 0.1)
    assert report.constants["0"] < 1.0


def test_corrupted_jet_seminorm_blows_up(poly):
    corrupted = polynomial_jet(poly, 2.5, [np.sin, lambda x: np.cos(x) + 0.1, SIN[2]])
    coarse = dgamma_seminorm(corrupted, distances=[2.0**-p for p in range(2, 5)])
    fine = dgamma_seminorm(corrupted, distances=[2.0**-p for p in range(2, 9)])
    assert fine.constants["0"] > 10 * coarse.constants["0"]


def test_reconstruction_of_jet_converges(sin_jet):
    x = np.linspace(0.3, 0.7, 15)
    errors = [np.max(np.abs(reconstruct(sin_jet, n).evaluate(x) - np.sin(x))) for n in (6, 9)]
    assert errors[1] < errors[0]
    assert errors[1] < 1e-5


def test_pointwise_reconstruction_for_continuous_models(sin_jet):
    x = np.linspace(0.0, 1.0, 7)
    assert np.allclose(reconstruct_pointwise(sin_jet).evaluate(x), np.sin(x), atol=1e-14)


def test_pointwise_reconstruction_under_parabolic_scaling():
    base = polynomial_model(2, 2, scaling=(2, 1))

    def g(z):
        return np.exp(-z[:, 0]) * np.cos(z[:, 1])

    f = polynomial_jet(base, 1.5, {(0, 0): g, (0, 1): lambda z: -np.exp(-z[:, 0]) * np.sin(z[:, 1])})
    points = np.array([[0.2, 0.3], [0.5, -0.1], [0.9, 0.75]])
    assert f.component((0.5, -0.1), (0, 1)) == pytest.approx(-np.exp(-0.5) * np.sin(-0.1))
    assert np.allclose(reconstruct_pointwise(f).evaluate(points), g(points), atol=1e-14)


def test_zero_reconstructs_to_zero(poly):
    R = reconstruct(zero_distribution(poly, 2), 6)
    assert not R.coeffs.any()
    assert not R.evaluate(np.linspace(0, 1, 9)).any()


def test_reconstruction_is_linear(poly, sin_jet):
    cos_jet = polynomial_jet(poly, 2.5, COS)
    combo = 2.0 * sin_jet + 3.0 * cos_jet
    lhs = reconstruct(combo, 7).coeffs
    rhs = 2.0 * reconstruct(sin_jet, 7).coeffs + 3.0 * reconstruct(cos_jet, 7).coeffs
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_reconstruction_independent_of_wavelet(sin_jet):
    test = Bump((0.5,), 0.1)
    a = reconstruct(sin_jet, 11, "db2").pair(test)
    b = reconstruct(sin_jet, 11, "db3").pair(test)
    assert a == pytest.approx(b, abs=1e-5)


def test_reconstruction_rejects_bad_input(poly):
    with pytest.raises(ReconstructionError):
        reconstruct(zero_distribution(poly, 0), 5)
    rough = mollified_noise_model(_smooth_xi(), 1, 1.5)
    f = ModelledDistribution(rough, 0.5, lambda x: np.zeros(4))
    with pytest.raises(ReconstructionError):
        reconstruct(f, 5, "haar")


def test_jet_reconstruction_rate(sin_jet):
    lambdas = [2.0**-p for p in range(1, 5)]
    rate = reconstruction_rate(sin_jet, CENTERS, lambdas, 11, "db3", window=(-1.0, 2.0))
    assert rate.fit.exponent >= 2.4
    assert rate.passed


def test_reconstruction_increments_decay(sin_jet):
    fit = reconstruction_increments(sin_jet, range(4, 9))
    assert fit.exponent >= 2.5 + 0.5 - 0.1


@pytest.mark.parametrize("family", ["haar", "db2", "db3"])
def test_reconstruction_increments_at_coarse_levels(sin_jet, family):
    # the refinement stencil spans more than the window margin at these levels
    fit = reconstruction_increments(sin_jet, [1, 2, 3], family=family)
    assert len(fit.values) == 3
    assert all(np.isfinite(v) for v in fit.values)


def test_rough_path_reconstruction_rate():
    rp = sample_rough_path("brownian", 1, 14, seed=7, alpha=0.4)
    model = rough_path_model(rp)
    path = ControlledPath.from_function(rp, lambda X: np.sin(X[:, 0]), lambda X: np.cos(X[:, 0])[:, None])
    table = model.controlled_coefficients(path.Y, path.Yprime)
    f = ModelledDistribution.from_table(model, 0.8, rp.times, table, sector=("1", "W1"))
    centers = np.round(CENTERS * 2**14) / 2**14
    rate = reconstruction_rate(f, centers, [2.0**-p for p in range(2, 8)], 11)
    assert rate.fit.exponent >= 2 * 0.4 - 0.1


def test_toy_product_coefficients():
    limit, _ = toy_pair(0.5, 4)
    table = toy_product_table(limit.structure)
    F1, F2 = toy_modelled(limit, "1 + y**2"), toy_modelled(limit, "y**3 - y")
    product = multiply(F1, F2, table)
    assert str(product.gamma) == "1-κ"
    assert str(product.alpha) == "-2κ"
    y = 0.7
    f1, d1 = 1 + y**2, 2 * y
    f2, d2 = y**3 - y, 3 * y**2 - 1
    expected = {"1": f1 * f2, "Ξ": d1 * f2 + f1 * d2, "Ξ2": d1 * d2}
    for label, value in expected.items():
        assert product.component(y, label) == pytest.approx(value)
    unit = constant_distribution(limit, 5, "1")
    assert np.allclose(multiply(unit, F1, table)(y), F1(y))


def test_polynomial_jet_product_is_leibniz(poly):
    table = polynomial_product_table(poly.structure)
    product = multiply(polynomial_jet(poly, 2, SIN), polynomial_jet(poly, 2, COS), table)
    x = 0.4
    assert product.component(x, (0,)) == pytest.approx(np.sin(x) * np.cos(x))
    assert product.component(x, (1,)) == pytest.approx(np.cos(x) ** 2 - np.sin(x) ** 2)
    assert product.component(x, (2,)) == 0.0


def test_product_table_errors():
    limit, _ = toy_pair(0.5, 4)
    with pytest.raises(ProductTableError):
        ProductTable(limit.structure, {("Ξ", "Ξ"): {"Ξ": 1.0}})
    empty = ProductTable(limit.structure, {})
    F = toy_modelled(limit, "y")
    with pytest.raises(ProductTableError):
        multiply(F, F, empty)(0.2)


def test_polynomial_table_is_covariant(poly):
    table = polynomial_product_table(poly.structure)
    assert covariance_residual(table, poly, 0.2, 0.7) < 1e-12


def test_compose(poly, sin_jet):
    table = polynomial_product_table(poly.structure)
    x = 0.35
    assert np.allclose(compose("u", sin_jet, table)(x), sin_jet(x))
    const = compose("3", sin_jet, table)(x)
    assert const[0] == pytest.approx(3.0) and not const[1:].any()
    squared = compose("u**2", sin_jet, table)(x)
    assert np.allclose(squared, multiply(sin_jet, sin_jet, table)(x), atol=1e-14)


def test_compose_rejects_singular_sector():
    limit, _ = toy_pair(0.5, 4)
    with pytest.raises(SectorError):
        compose("u**2", toy_modelled(limit, "y"), toy_product_table(limit.structure))


def test_toy_product_experiment():
    report = toy_product_experiment(0.5)
    assert report.limit_residual < 1e-8
    assert report.fit.exponent > 0
    assert report.pointwise_gap > 0.1
    assert report.passed


def test_rough_integral_of_one_is_the_path():
    rp = sample_rough_path("brownian", 2, 10, seed=11, alpha=0.4)
    ones = ControlledPath(np.ones(len(rp.times)), np.zeros((len(rp.times), 2)))
    Z = rough_integrate(ones, rp, 1)
    assert Z.Z[0] == 0.0
    assert np.allclose(Z.Z, rp.X[:, 1] - rp.X[0, 1], atol=1e-12)


def _trig_integrand(rp):
    return ControlledPath.from_function(
        rp,
        lambda X: np.sin(X[:, 0]) + X[:, 1] ** 2,
        lambda X: np.stack([np.cos(X[:, 0]), 2 * X[:, 1]], axis=1),
    )


def _riemann_reference(times):
    nodes, weights = np.polynomial.legendre.leggauss(8)
    out = np.zeros(len(times))
    for k in range(len(times) - 1):
        s, t = times[k], times[k + 1]
        r = 0.5 * (s + t) + 0.5 * (t - s) * nodes
        integrand = (np.sin(np.cos(r)) + np.sin(r) ** 2) * (-np.sin(r))
        out[k + 1] = out[k] + 0.5 * (t - s) * np.dot(weights, integrand)
    return out


def test_rough_integral_matches_riemann_for_smooth_path():
    rp = sample_rough_path("trig", 2, 12, alpha=0.4)
    Z = rough_integrate(_trig_integrand(rp), rp, 0)
    reference = _riemann_reference(rp.times)
    assert np.max(np.abs(Z.Z - reference)) / np.max(np.abs(reference)) < 1e-6


def test_rough_integral_levels_converge():
    rp = sample_rough_path("trig", 2, 10, alpha=0.4)
    comparison = rough_integral_levels(_trig_integrand(rp), rp, 0)
    assert comparison.levels == [8, 9, 10]
    assert comparison.differences[1] < comparison.differences[0]


def test_brownian_remainder_exponent():
    rp = sample_rough_path("brownian", 2, 12, seed=2, alpha=0.4)
    path = ControlledPath.from_function(
        rp, lambda X: np.cos(X[:, 1]), lambda X: np.stack([np.zeros(len(X)), -np.sin(X[:, 1])], axis=1)
    )
    fit = remainder_fit(rough_integrate(path, rp, 0), path, rp)
    assert fit.exponent >= 3 * 0.4 - 0.15


def test_rough_integration_needs_alpha_above_one_third():
    rp = sample_rough_path("trig", 1, 6, alpha=0.3)
    ones = ControlledPath(np.ones(len(rp.times)), np.zeros((len(rp.times), 1)))
    with pytest.raises(PairingError):
        rough_integrate(ones, rp, 0)


def test_integration_by_reconstruction_agrees():
    rp = sample_rough_path("trig", 2, 12, alpha=0.4)
    model = rough_path_model(rp)
    path = _trig_integrand(rp)
    Z = rough_integrate(path, rp, 0)
    intervals = [(0.25, 0.5), (0.3, 0.8)]
    values = integrate_by_reconstruction(model, path, 0, intervals, 9, 2.0**-5)
    for (s, t), v in zip(intervals, values):
        exact = Z.Z[rp.index(t)] - Z.Z[rp.index(s)]
        assert v == pytest.approx(exact, abs=1e-2)


def test_pairing_product_rejects_rough_pairs():
    with pytest.raises(PairingError):
        pairing_product([np.cos], _smooth_xi(), 0.6, 0.5)


def test_pairing_product_with_smooth_noise():
    xi = _smooth_xi()
    f = [lambda y: 1 + y**2, lambda y: 2 * y]
    R = pairing_product(f, xi, 0.5, 1.5, n_max=9)
    test = Bump((0.5,), 0.1)
    direct = AnalyticFn(lambda y: (1 + y**2) * (np.cos(2 * np.pi * y) + 0.5)).pair(test)
    assert R.pair(test) == pytest.approx(direct, abs=1e-4)
    ones = pairing_product([lambda y: 1.0 + 0 * y, lambda y: 0.0 * y], xi, 0.5, 1.5, n_max=10)
    assert ones.pair(test) == pytest.approx(xi.pair(test), abs=1e-5)


def test_pairing_product_with_white_noise():
    # mean square over centres and realisations scales like lambda^-1 for white noise
    lambdas = [2.0**-p for p in range(3, 7)]
    centres = np.linspace(0.2, 0.8, 32)
    squares = np.zeros(len(lambdas))
    for seed in range(4):
        R = pairing_product([lambda y: 1 + y**2], white_noise(12, seed=seed), 0.6, 1.0, n_max=10)
        for i, lam in enumerate(lambdas):
            squares[i] += np.mean([R.pair(Bump((x,), lam)) ** 2 for x in centres])
    slope = np.polyfit(np.log(lambdas), 0.5 * np.log(squares), 1)[0]
    assert slope >= -0.6 - 0.1
    assert slope <= -0.3
