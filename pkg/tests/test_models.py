import numpy as np
import pytest

from src.errors import ModelError
from src.models import (
    Bump,
    ControlledPath,
    ModelFactory,
    RoughPath,
    VerifySpec,
    area_label,
    chen_residual,
    controlled_remainder_residual,
    corrupt_gamma,
    export_csv,
    holder_report,
    import_csv,
    mollified_noise_model,
    noise_label,
    path_label,
    polynomial_area_closed_form,
    polynomial_model,
    rough_path_model,
    sample_rough_path,
    scaled_distance,
    taylor_reexpansion_residual,
    toy_pair,
    verify_model,
    white_noise,
)
from src.models.proxies import AnalyticFn, CellMeasure, GridFn


@pytest.fixture(scope="module")
def brownian():
    return sample_rough_path("brownian", 2, 10, seed=3, alpha=0.4)


@pytest.fixture(scope="module")
def trig_model():
    return rough_path_model(sample_rough_path("trig", 2, 10, alpha=0.4))


def test_polynomial_model_values():
    m = polynomial_model(1, 2)
    assert np.allclose(m.pi(0.3, (0,)).evaluate(np.linspace(-2, 2, 5)), 1.0)
    assert m.pi(1.0, (2,)).evaluate(np.array([3.0]))[0] == pytest.approx(4.0)


def test_taylor_reexpansion_at_random_points():
    rng = np.random.default_rng(0)
    for x0, x1, x in rng.uniform(-2, 2, size=(20, 3)):
        assert taylor_reexpansion_residual(2, x0, x1, x) < 1e-12
        assert taylor_reexpansion_residual(5, x0, x1, x) < 1e-10


def test_polynomial_model_passes_verification():
    report = verify_model(polynomial_model(1, 2))
    assert report.passed
    square = next(b for b in report.pi_bounds if b.label == "(2,)")
    assert square.fit.exponent >= 2 - 0.1
    assert report.algebraic["gamma_composition"] < 1e-12


def test_parabolic_polynomial_model():
    report = verify_model(polynomial_model(2, 2, scaling=(2, 1)), VerifySpec(points=4, pi_points=8, triples=3))
    assert report.passed


def test_corrupted_gamma_is_flagged():
    report = verify_model(corrupt_gamma(polynomial_model(1, 2)))
    assert not report.algebraic_passed
    assert "pi_gamma" in report.flagged


def test_scaled_distance():
    assert scaled_distance((0.0, 0.0), (4.0, 1.0), (2, 1)) == pytest.approx(3.0)
    assert scaled_distance(0.2, 0.5, (1,)) == pytest.approx(0.3)


def test_proxy_pairings_are_linear():
    test = Bump((0.5,), 0.1)
    h = 2.0**-10
    masses = np.full(2**10, h)
    measure = CellMeasure(masses, 0.0, h)
    grid = GridFn(np.ones(2**10 + 1), 0.0, h)
    smooth = AnalyticFn(lambda y: np.ones_like(y))
    for proxy in (measure, grid, smooth):
        assert proxy.pair(test) == pytest.approx(1.0, abs=1e-6)
    combined = 2.0 * smooth + measure
    assert combined.pair(test) == pytest.approx(3.0, abs=1e-6)


def test_polynomial_path_area_closed_form():
    rp = sample_rough_path("polynomial", 2, 8)
    for s, t in [(0, 256), (13, 200), (64, 65), (100, 180)]:
        expected = polynomial_area_closed_form(rp.times[s], rp.times[t])
        assert rp.iterated(s, t)[0, 1] == pytest.approx(expected, rel=1e-10)


def test_brownian_chen_is_exact(brownian):
    assert chen_residual(brownian) < 1e-12
    assert chen_residual(brownian, direct=False) < 1e-12
    i, j = 17, 801
    assert np.allclose(brownian.iterated(i, j), brownian.iterated_direct(i, j), atol=1e-12)


def test_brownian_requires_seed():
    with pytest.raises(ModelError):
        sample_rough_path("brownian", 1, 6)
    with pytest.raises(ModelError):
        sample_rough_path("levy", 1, 6, seed=1)


def test_zero_path():
    rp = sample_rough_path("zero", 3, 5)
    assert not rp.X.any()
    assert not rp.iterated(0, rp.cells).any()


def test_holder_constants_are_finite(brownian):
    report = holder_report(brownian)
    assert report.passed
    assert report.chen < 1e-12


def test_csv_round_trip(tmp_path, brownian):
    path = export_csv(brownian, tmp_path / "path.csv")
    header = path.read_text().splitlines()[0]
    assert header == "t,X1,X2,XX1_1,XX1_2,XX2_1,XX2_2"
    loaded = import_csv(path, alpha=0.4)
    assert np.allclose(loaded.X, brownian.X, atol=1e-14)
    assert np.allclose(loaded.area, brownian.area, atol=1e-10)


def test_csv_rejects_bad_columns(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,Y\n0,1\n1,2\n")
    with pytest.raises(ModelError):
        import_csv(bad)


def test_rough_path_model_basics(trig_model):
    rp = trig_model.rp
    s = rp.times[300]
    w = trig_model.pi(s, path_label(0))
    assert w.evaluate(np.array([s]))[0] == 0.0
    degrees = [str(d) for d in trig_model.structure.label_degrees]
    assert degrees[0] == "-3/5" and degrees[-1] == "2/5"


def test_rough_path_model_reexpansion_of_area(brownian):
    model = rough_path_model(brownian)
    s, u = brownian.times[200], brownian.times[700]
    test = Bump((u,), 0.1)
    for a in range(2):
        for b in range(2):
            label = area_label(a, b)
            column = model.gamma(s, u).matrix[:, model.structure.index(label)]
            lhs = model.pi_vector(s, column).pair(test)
            assert lhs == pytest.approx(model.pi(u, label).pair(test), abs=1e-10)


def test_rough_path_model_rejects_non_finite(brownian):
    area = brownian.area.copy()
    area[5, 0, 1] = np.nan
    with pytest.raises(ModelError):
        rough_path_model(RoughPath(brownian.times, brownian.X, area, 0.4))


def test_controlled_remainder_identity(brownian):
    model = rough_path_model(brownian)
    path = ControlledPath.from_function(
        brownian,
        lambda X: np.sin(X[:, 0]),
        lambda X: np.stack([np.cos(X[:, 0]), np.zeros(len(X))], axis=1),
    )
    assert controlled_remainder_residual(model, path) < 1e-12


def test_trig_rough_path_model_passes(trig_model):
    report = verify_model(trig_model)
    assert report.passed, report.flagged


def test_brownian_model_algebra_and_noise_exponent(brownian):
    report = verify_model(rough_path_model(brownian))
    assert report.algebraic_passed
    xi = next(b for b in report.pi_bounds if b.label == noise_label(0))
    assert xi.fit.exponent < -0.2


def test_toy_limit_model_passes():
    limit, _ = toy_pair(1.0, 8)
    report = verify_model(limit)
    assert report.passed
    assert limit.pi(0.5, "Ξ").pair(Bump((0.5,), 0.25)) == 0.0
    assert limit.pi(0.5, "Ξ2").pair(Bump((0.5,), 0.25)) == pytest.approx(1.0, abs=1e-8)


def test_sine_model_approaches_limit():
    c = 0.7
    test = Bump((0.5,), 0.25)
    errors = []
    for n in (4, 128):
        _, sine = toy_pair(c, n)
        errors.append(abs(sine.pi(0.5, "Ξ2").pair(test) - c))
    assert errors[1] < 1e-3
    assert errors[1] < errors[0]


def test_sine_and_limit_coincide_for_zero_c():
    limit, sine = toy_pair(0.0, 16)
    test = Bump((0.3,), 0.2)
    for label in ("1", "Ξ", "Ξ2"):
        assert sine.pi(0.3, label).pair(test) == pytest.approx(limit.pi(0.3, label).pair(test), abs=1e-12)


def test_mollified_noise_with_smooth_xi():
    xi = AnalyticFn(lambda y: np.cos(2 * np.pi * y) + 0.5)
    model = mollified_noise_model(xi, 2, 0.6)
    test = Bump((0.4,), 0.1)
    assert model.pi(0.4, ("ΞX", 0)).pair(test) == pytest.approx(xi.pair(test), rel=1e-12)
    report = verify_model(model, VerifySpec(points=4))
    assert report.algebraic_passed


def test_white_noise_model_scaling():
    with pytest.raises(ModelError):
        white_noise(8, None)
    model = mollified_noise_model(white_noise(10, seed=5), 1, 0.6)
    report = verify_model(model)
    assert report.algebraic_passed
    xi = next(b for b in report.pi_bounds if b.label == str(("ΞX", 0)))
    assert xi.passed


@pytest.mark.parametrize(
    "name, kwargs",
    [
        ("rough-path", {"kind": "brownian", "level": 10, "alpha": 0.4}),
        ("mollified-noise", {"noise": "white", "level": 10}),
    ],
)
def test_stochastic_model_bounds_hold_across_seeds(name, kwargs):
    for seed in range(1, 6):
        report = verify_model(ModelFactory.create_model(name, seed=seed, **kwargs))
        failed = [(b.label, b.fit.exponent) for b in report.pi_bounds if not b.passed]
        assert not failed, (seed, failed)


@pytest.mark.parametrize("n", [4, 16, 128])
def test_sine_model_bounds_hold(n):
    report = verify_model(ModelFactory.create_model("toy-sine", c=0.5, n=n))
    assert all(b.passed for b in report.pi_bounds), report.flagged


def test_bounded_pairings_are_floored_at_one():
    _, sine = toy_pair(0.5, 16)
    report = verify_model(sine)
    xi = next(b for b in report.pi_bounds if b.label == "Ξ")
    assert xi.fit.values == [1.0] * 4
    assert xi.fit.exponent == pytest.approx(0.0, abs=1e-12)


def test_model_factory():
    names = ModelFactory.list_available_models()
    for name in ("polynomial", "rough-path", "toy-limit", "toy-sine", "mollified-noise"):
        assert name in names
    assert ModelFactory.create_model("toy-sine", c=0.5, n=8).n == 8
    with pytest.raises(ValueError, match="Available"):
        ModelFactory.create_model("canonical")
