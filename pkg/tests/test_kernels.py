import numpy as np
import pytest
import sympy as sp

from src.algebra import Homogeneity
from src.errors import KernelError
from src.kernels import (
    AdmissibleModel,
    KernelProfile,
    KernelTest,
    J_operator,
    K_operator,
    N_operator,
    convolve_direct,
    create_profile,
    decompose_kernel,
    heaviside_profile,
    integrated_label,
    jet_convolution_check,
    moment_exponents,
    moment_order,
    riesz_profile,
    schauder_identity_check,
    split_heat_kernel,
    taylor_indices,
)
from src.modelled import noise_jet, polynomial_jet, zero_distribution
from src.models import AnalyticFn, constant, mollified_noise_model, polynomial_model
from src.models.noise import NOISE, POLY

XI = AnalyticFn(lambda y: np.cos(2 * np.pi * np.asarray(y, dtype=float)) + 0.5)
F = [lambda y: 1 + y**2, lambda y: 2 * y]


def _direct(y):
    return (1 + y**2) * (np.cos(2 * np.pi * y) + 0.5)


@pytest.fixture(scope="module")
def riesz():
    return decompose_kernel(riesz_profile(0.5), moment_order(1.1, 0.5), 6)


@pytest.fixture(scope="module")
def heat():
    return split_heat_kernel(order=4, n_levels=5)


@pytest.fixture(scope="module")
def admissible(riesz):
    return AdmissibleModel(mollified_noise_model(XI, 1, 0.4), riesz)


def test_moment_order_and_exponents():
    assert moment_order(1.1, 0.5) == 3
    assert moment_exponents((1,), 2) == [(0,), (1,), (2,)]
    assert sorted(moment_exponents((2, 1), 2)) == [(0, 0), (0, 1), (0, 2), (1, 0)]


def test_riesz_pieces_annihilate_moments(riesz):
    assert max(riesz.moment_residuals()) < 1e-8


def test_riesz_scaling_bounds(riesz):
    checks = {b.derivative: b for b in riesz.bound_checks()}
    assert checks["value"].exponent == pytest.approx(0.5, abs=0.1)
    assert checks["d/dx"].exponent == pytest.approx(1.5, abs=0.1)
    assert all(b.passed for b in checks.values())


def test_piece_support(riesz):
    piece = riesz.pieces[3]
    outside = np.array([-0.2, 0.13, 0.5])
    assert not piece(outside).any()


def test_piece_derivative_matches_finite_difference(riesz):
    piece = riesz.pieces[2]
    z = np.linspace(-0.24, 0.24, 31)
    h = 1e-6
    fd = (piece(z + h) - piece(z - h)) / (2 * h)
    assert np.allclose(piece.derivative(z), fd, atol=1e-4 * np.max(np.abs(fd)))


def test_piece_second_derivative_matches_finite_difference(riesz):
    piece = riesz.pieces[2]
    z = np.linspace(-0.24, 0.24, 31)
    h = 1e-6
    fd = (piece.derivative(z + h) - piece.derivative(z - h)) / (2 * h)
    assert np.allclose(piece.derivative(z, order=2), fd, atol=1e-4 * np.max(np.abs(fd)))


@pytest.mark.parametrize("axis", [0, 1])
def test_heat_piece_second_derivative_matches_finite_difference(heat, axis):
    piece = heat.kernel.pieces[1]
    (t_lo, t_hi), (x_lo, x_hi) = piece.bounds()
    tt, xx = np.meshgrid(
        np.linspace(t_lo, t_hi, 9)[1:-1], np.linspace(x_lo, x_hi, 9)[1:-1], indexing="ij"
    )
    z = np.stack([tt.ravel(), xx.ravel()], axis=1)
    h = 1e-6 * (t_hi if axis == 0 else x_hi)
    step = np.zeros(2)
    step[axis] = h
    fd = (piece.derivative(z + step, axis) - piece.derivative(z - step, axis)) / (2 * h)
    assert np.allclose(piece.derivative(z, axis, order=2), fd, atol=1e-4 * np.max(np.abs(fd)))


def test_third_kernel_derivative_is_rejected(riesz):
    with pytest.raises(KernelError):
        riesz.pieces[1].derivative(np.array([0.3]), order=3)


def test_heaviside_profile_bounds():
    kernel = decompose_kernel(heaviside_profile(1.0), 2, 5)
    assert max(kernel.moment_residuals()) < 1e-8
    assert not kernel(np.array([-0.3, -0.01])).any()
    assert kernel.report()["passed"]


def test_wrong_singularity_order_is_rejected():
    x = sp.Symbol("x", real=True)
    mislabeled = KernelProfile("bad", sp.Abs(x) ** sp.Rational(-1, 2), (x,), 0.9, (1,))
    with pytest.raises(KernelError):
        decompose_kernel(mislabeled, 2, 5, check=True)


def test_unknown_profile():
    with pytest.raises(ValueError, match="Available"):
        create_profile("gauss")


def test_heat_split_partition(heat):
    t = np.linspace(0.01, 0.6, 9)
    x = np.linspace(-1.0, 1.0, 9)
    tt, xx = np.meshgrid(t, x, indexing="ij")
    points = np.stack([tt.ravel(), xx.ravel()], axis=1)
    assert heat.partition_residual(points) < 1e-10


def test_heat_split_is_causal(heat):
    points = np.array([[-0.1, 0.0], [-0.01, 0.05], [-0.3, -0.2]])
    assert not heat.kernel(points).any()


def test_heat_bounds_under_parabolic_scaling(heat):
    checks = {b.derivative: b for b in heat.kernel.bound_checks()}
    assert checks["value"].exponent == pytest.approx(1.0, abs=0.1)
    assert checks["d/dx"].exponent == pytest.approx(2.0, abs=0.1)
    assert checks["d/dt"].exponent == pytest.approx(3.0, abs=0.1)
    assert max(heat.kernel.moment_residuals()) < 1e-8


def test_pieces_annihilate_polynomials_under_pairing(riesz):
    x = 0.37
    for piece in riesz.pieces:
        for j in range(riesz.order + 1):
            value = AnalyticFn(lambda y, j=j: (y - x) ** j).pair(KernelTest(piece, x))
            assert abs(value) < 1e-9


def test_J_vanishes_on_polynomials(admissible, riesz):
    coeffs = J_operator(0.4, (POLY, 1), admissible.base, riesz)
    assert not coeffs.values.any()


def test_J_of_noise_matches_convolution(admissible, riesz):
    x = 0.45
    coeffs = J_operator(x, (NOISE, 0), admissible.base, riesz)
    assert len(coeffs.values) == 1
    expected = convolve_direct(riesz, lambda y: np.cos(2 * np.pi * y) + 0.5, x)
    assert coeffs.values[0] == pytest.approx(expected, rel=1e-5)


def test_J_on_vanishing_model(riesz):
    model = mollified_noise_model(constant(0.0), 1, 0.4)
    assert not J_operator(0.5, (NOISE, 1), model, riesz).values.any()


def test_N_vanishes_for_exact_polynomial_jets(riesz):
    poly = polynomial_model(1, 2)
    f = polynomial_jet(poly, 1.2, [lambda y: 1 + 2 * y, lambda y: 2.0 + 0 * y, lambda y: 0 * y])
    coeffs = N_operator(f, riesz, 0.5)
    assert np.max(np.abs(coeffs.values)) < 1e-10


def test_N_tail_decays(riesz):
    poly = polynomial_model(1, 2)
    f = polynomial_jet(poly, 1.2, [np.sin, np.cos, lambda y: -np.sin(y)])
    coeffs = N_operator(f, riesz, 0.5)
    assert coeffs.tails[0].at_least(1.2 + 0.5, 0.2)
    assert not N_operator(zero_distribution(poly, 1.2), riesz, 0.5).values.any()


def test_N_requires_positive_gamma(riesz):
    poly = polynomial_model(1, 2)
    with pytest.raises(KernelError):
        N_operator(zero_distribution(poly, 0), riesz, 0.5)


def test_admissible_structure(admissible):
    structure = admissible.structure
    assert str(structure.degree(integrated_label((NOISE, 0)))) == "1/10"
    assert str(structure.degree(integrated_label((NOISE, 1)))) == "11/10"
    assert integrated_label((POLY, 0)) not in structure


def test_integer_degree_collision(riesz):
    with pytest.raises(KernelError):
        AdmissibleModel(mollified_noise_model(XI, 1, 0.5), riesz)


def test_admissible_model_is_coherent(admissible):
    x, y = 0.4, 0.55
    g = admissible.gamma(x, y)
    z = np.linspace(0.35, 0.65, 5)
    for tau in ((NOISE, 0), (NOISE, 1)):
        label = integrated_label(tau)
        column = g.matrix[:, admissible.structure.index(label)]
        lhs = admissible.pi_vector(x, column).evaluate(z)
        rhs = admissible.pi(y, label).evaluate(z)
        assert np.allclose(lhs, rhs, atol=1e-9)


def test_integrated_symbol_vanishes_at_base_point(admissible):
    x = 0.5
    value = admissible.pi(x, integrated_label((NOISE, 1))).evaluate(np.array([x]))
    assert abs(value[0]) < 1e-12


def test_K_operator_degrees_and_linearity(admissible):
    f = noise_jet(admissible.base, 1.1, F)
    Kf = K_operator(f, admissible, AnalyticFn(_direct))
    assert str(Kf.gamma) == "8/5"
    assert str(Kf.alpha) == "0"
    K2f = K_operator(2.0 * f, admissible, AnalyticFn(lambda y: 2.0 * _direct(y)))
    assert np.allclose(K2f(0.4), 2.0 * Kf(0.4), atol=1e-12)
    zero = K_operator(zero_distribution(admissible.base, 1.1), admissible)
    assert not zero(0.4).any()


def test_K_operator_needs_matching_model(admissible):
    other = mollified_noise_model(XI, 1, 0.4)
    with pytest.raises(KernelError):
        K_operator(noise_jet(other, 1.1, F), admissible)


def test_schauder_identity(admissible):
    f = noise_jet(admissible.base, 1.1, F)
    report = schauder_identity_check(f, admissible, _direct, level=5)
    assert report.nodes == 17
    assert report.pointwise_residual < 1e-5
    assert report.passed


def test_schauder_identity_at_default_resolution(admissible):
    f = noise_jet(admissible.base, 1.1, F)
    report = schauder_identity_check(f, admissible, _direct)
    assert report.nodes == 33
    assert report.passed


def test_taylor_indices():
    assert taylor_indices(Homogeneity.from_number(2.5), (2, 1), "K f") == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert taylor_indices(Homogeneity.from_number(1.3), (1,), "K f") == [(0,), (1,)]
    assert taylor_indices(Homogeneity.from_number(-0.3), (1,), "K f") == []
    with pytest.raises(KernelError, match="mixed"):
        taylor_indices(Homogeneity.from_number(2.5), (1, 1), "K f")
    with pytest.raises(KernelError, match="order 3"):
        taylor_indices(Homogeneity.from_number(3.2), (1,), "K f")
    with pytest.raises(KernelError):
        taylor_indices(Homogeneity.from_number(2), (1,), "K f")


def test_jet_convolution_up_to_second_order(riesz):
    poly = polynomial_model(1, 2)
    f = polynomial_jet(poly, 1.8, [np.sin, np.cos, lambda y: -np.sin(y)])
    derivatives = {(0,): np.sin, (1,): np.cos, (2,): lambda y: -np.sin(y)}
    report = jet_convolution_check(f, AdmissibleModel(poly, riesz), derivatives, [0.35, 0.5, 0.62])
    assert report.indices == [(0,), (1,), (2,)]
    assert report.passed


def _heat_g(z):
    return np.exp(-z[:, 0]) * np.cos(2 * np.pi * z[:, 1])


HEAT_DERIVATIVES = {
    (0, 0): _heat_g,
    (1, 0): lambda z: -_heat_g(z),
    (0, 1): lambda z: -2 * np.pi * np.exp(-z[:, 0]) * np.sin(2 * np.pi * z[:, 1]),
    (0, 2): lambda z: -4 * np.pi**2 * _heat_g(z),
}


def test_heat_jet_convolution(heat):
    base = polynomial_model(2, 2, scaling=(2, 1))
    model = AdmissibleModel(base, heat.kernel)
    f = polynomial_jet(base, 0.5, {(0, 0): _heat_g})
    report = jet_convolution_check(f, model, HEAT_DERIVATIVES, [(0.5, 0.3), (0.8, 0.65)])
    assert report.indices == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert report.passed
    with pytest.raises(KernelError, match="missing"):
        jet_convolution_check(f, model, {(0, 0): _heat_g}, [(0.5, 0.3)])


def test_admissible_model_needs_matching_scaling(heat):
    with pytest.raises(KernelError, match="scaling"):
        AdmissibleModel(polynomial_model(2, 2), heat.kernel)
