from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from src.algebra import (
    GradedIndexSet,
    GradedMap,
    Homogeneity,
    check_lower_triangular,
    hom_add,
    hom_compare,
    polynomial_gamma,
    polynomial_space,
)
from src.errors import GradingError

homs = st.builds(
    Homogeneity,
    st.fractions(min_value=-5, max_value=5, max_denominator=12),
    st.integers(min_value=-8, max_value=8),
)


def H(text):
    return Homogeneity.parse(text)


def test_hom_add_examples():
    assert hom_add(H("-5/2-k"), Homogeneity(2)) == H("-1/2-k")
    assert hom_add(H("-1-2k"), H("1-2k")) == H("-4k")
    assert hom_add(H("3/4+k"), Homogeneity()) == H("3/4+k")


def test_hom_compare_examples():
    assert hom_compare(H("-1/2-5k"), H("-1/2-k")) == -1
    assert hom_compare(H("-5/2-k"), H("-3/2-3k")) == -1
    assert hom_compare(H("-1-2k"), H("-1-2k")) == 0


def test_parse_and_str():
    h = H("-5/2-k")
    assert h.rational_part == Fraction(-5, 2)
    assert h.kappa_mult == -1
    assert str(h) == "-5/2-κ"
    assert str(H("-4κ")) == "-4κ"
    assert str(Homogeneity()) == "0"
    assert H(str(H("1/2-3k"))) == H("1/2-3k")
    with pytest.raises(ValueError):
        H("abc")


@given(homs, homs, homs)
@settings(max_examples=200)
def test_order_is_total_and_transitive(a, b, c):
    assert (hom_compare(a, b) == 0) == (a == b)
    assert hom_compare(a, b) == -hom_compare(b, a)
    if a <= b and b <= c:
        assert a <= c


@given(homs, homs, homs)
@settings(max_examples=200)
def test_addition_commutative_associative(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    if a < b:
        assert a + c < b + c


def test_graded_index_set_rejects_unsorted():
    with pytest.raises(GradingError):
        GradedIndexSet(("a", "b"), (Homogeneity(1), Homogeneity(0)))


def test_identity_passes():
    space = polynomial_space(1, 3)
    assert check_lower_triangular(GradedMap.identity(space)).passed
    assert check_lower_triangular(GradedMap.identity(space, exact=True)).passed


def test_polynomial_gamma_binomial_expansion():
    h = sp.Symbol("h")
    space = polynomial_space(1, 2)
    gamma = polynomial_gamma(space, (h,), exact=True)
    image = gamma.image((2,))
    assert sp.expand(image[(0,)] - h**2) == 0
    assert sp.expand(image[(1,)] + 2 * h) == 0
    assert image[(2,)] == 1
    assert check_lower_triangular(gamma).passed


def test_degree_raising_entry_fails():
    space = polynomial_space(1, 1)
    bad = GradedMap.from_images(space, {(0,): {(0,): 1, (1,): 1}, (1,): {(1,): 1}})
    report = check_lower_triangular(bad)
    assert not report.passed
    assert ((1,), (0,)) in report.offending
    assert check_lower_triangular(bad, direction="raising").passed


def test_grading_mismatch_raises():
    a = polynomial_space(1, 1)
    b = polynomial_space(1, 2)
    m = GradedMap(a, b, np.zeros((len(b), len(a))))
    with pytest.raises(GradingError):
        check_lower_triangular(m)


@given(
    st.floats(min_value=-2, max_value=2),
    st.floats(min_value=-2, max_value=2),
)
@settings(max_examples=50)
def test_composition_of_passing_maps_passes(h1, h2):
    space = polynomial_space(2, 3)
    g1 = polynomial_gamma(space, (h1, -h2))
    g2 = polynomial_gamma(space, (h2, h1))
    composed = g1 @ g2
    assert check_lower_triangular(composed, tol=1e-9).passed
    direct = polynomial_gamma(space, (h1 + h2, h1 - h2))
    assert np.allclose(composed.matrix, direct.matrix, atol=1e-9)


def test_inverse_unipotent():
    space = polynomial_space(1, 3)
    g = polynomial_gamma(space, (0.7,))
    inv = g.inverse_unipotent()
    assert np.allclose((g @ inv).matrix, np.eye(len(space)))
    assert np.allclose(inv.matrix, polynomial_gamma(space, (-0.7,)).matrix)
