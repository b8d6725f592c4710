import pytest
import sympy as sp

from src.algebra import Homogeneity, check_lower_triangular
from src.algebra.graded import GradedMap
from src.errors import RegularityError, SymbolGenerationError
from src.trees import expansion
from src.trees import (
    C1,
    C2,
    DPHI,
    IXI,
    ONE,
    PHI,
    XI,
    FormalSum,
    L_matrices,
    apply_L1,
    apply_L2,
    apply_M,
    bracket,
    counterterm_table,
    degree_counts,
    generate_symbols,
    homogeneity,
    integrate,
    noise_power,
    picard_expand,
    picard_step,
    poly,
    product,
    renorm_map,
    renormalized_rhs,
    rhs_expand,
    substitution_identities,
    unit_vector,
)

H = Homogeneity.parse


def fs(*pairs):
    out = FormalSum()
    for sym, c in pairs:
        out = out + FormalSum.of(sym, c)
    return out


def test_homogeneity_rules():
    assert homogeneity(XI) == H("-5/2-k")
    assert homogeneity(IXI) == H("-1/2-k")
    assert homogeneity(ONE) == Homogeneity()
    assert homogeneity(noise_power(2)) == H("-1-2k")
    assert homogeneity(poly((1, 0, 0, 0))) == Homogeneity(2)


def test_canonical_forms():
    assert integrate(unit_vector(1)) is None
    assert integrate(ONE) is None
    assert product(IXI) == IXI
    assert product(ONE, IXI, ONE) == IXI
    assert product(IXI, product(IXI, IXI)) == noise_power(3)
    assert product(unit_vector(1), unit_vector(1)) == poly((0, 2, 0, 0))
    assert product(IXI, None) is None


def test_symbols_below_zero_match_regression_list():
    entries = generate_symbols(Homogeneity())
    assert [e.name for e in entries] == [
        "Ξ",
        "<3>",
        "<2>",
        "<32>",
        "<1>",
        "<31>",
        "<22>",
        "X_i<2>",
    ]
    assert [str(e.homogeneity) for e in entries] == [
        "-5/2-κ",
        "-3/2-3κ",
        "-1-2κ",
        "-1/2-5κ",
        "-1/2-κ",
        "-4κ",
        "-4κ",
        "-2κ",
    ]
    assert entries[-1].multiplicity == 3
    homs = [e.homogeneity for e in entries]
    assert all(a <= b for a, b in zip(homs, homs[1:]))


def test_threshold_at_noise_is_empty():
    assert generate_symbols(H("-5/2-k")) == []


def test_threshold_one_half_adds_positive_symbols():
    names = {e.name: e for e in generate_symbols(H("1/2"))}
    assert "1" in names
    assert names["<30>"].homogeneity == H("1/2-3k")
    assert names["<21>"].homogeneity == H("1/2-3k")
    order = [e.name for e in generate_symbols(H("1/2"))]
    assert order.index("<30>") < order.index("<21>")


def test_degree_counts_regression():
    counts = degree_counts(Homogeneity())
    assert counts["-2κ"] == 3
    assert counts["-4κ"] == 2
    assert sum(counts.values()) == 10


def test_contraction_examples():
    assert apply_L1(fs((noise_power(3), 1))) == fs((IXI, 3))
    assert apply_L1(fs((bracket(1, 2), 1))) == fs((bracket(1, 0), 1))
    assert apply_L2(fs((bracket(3, 2), 1))) == fs((IXI, 3))
    assert apply_L1(fs((XI, 1))).is_zero()
    assert apply_L2(fs((bracket(2, 2), 1))) == FormalSum.scalar(1)
    assert apply_L2(fs((bracket(3, 1), 1))).is_zero()
    assert apply_L1(fs((bracket(3, 2), 1))) == fs((bracket(3, 0), 1), (bracket(1, 2), 3))
    assert all(substitution_identities().values())


def test_renorm_map_examples():
    two = fs((noise_power(2), 1))
    assert apply_M(two) == fs((noise_power(2), 1), (ONE, -C1))
    assert apply_M(fs((XI, 1))) == fs((XI, 1))
    three = fs((noise_power(3), 1))
    assert apply_M(three) == fs((noise_power(3), 1), (IXI, -3 * C1))


def test_renorm_matrix_is_degree_raising_and_invertible():
    m = renorm_map()
    assert check_lower_triangular(m, direction="raising").passed
    inverse = renorm_map(-C1, -C2)
    product_map = m @ inverse
    ident = GradedMap.identity(m.domain, exact=True)
    assert all(sp.expand(c) == 0 for c in (product_map - ident).matrix.ravel())
    col = m.image(noise_power(2))
    assert sp.expand(col[ONE] + C1) == 0


def test_l1_l2_commute():
    l1, l2 = L_matrices()
    diff = (l1 @ l2 - l2 @ l1).matrix
    assert all(sp.expand(c) == 0 for c in diff.ravel())


def test_counterterm_table():
    table = counterterm_table()
    assert table["<2>"] == FormalSum.scalar(-C1)
    assert table["<3>"] == fs((IXI, -3 * C1))
    assert table["<22>"] == FormalSum.scalar(-C2)
    assert table["<32>"] == fs((IXI, -3 * C2))


def test_picard_expansion_matches_closed_form():
    phi = picard_expand(1)
    expected = fs(
        (IXI, 1),
        (ONE, PHI),
        (bracket(3, 0), -1),
        (bracket(2, 0), -3 * PHI),
        *[(unit_vector(i), DPHI[i - 1]) for i in (1, 2, 3)],
    )
    assert phi == expected
    assert picard_step(phi, 1) == phi
    assert picard_expand(H("-1/2")) == fs((IXI, 1))


def test_rhs_expansion():
    phi = picard_expand(1)
    rhs = rhs_expand(phi)
    expected = fs(
        (XI, 1),
        (noise_power(3), -1),
        (noise_power(2), -3 * PHI),
        (bracket(3, 2), 3),
        (IXI, -3 * PHI**2),
        (bracket(3, 1), 6 * PHI),
        (bracket(2, 2), 9 * PHI),
        (ONE, -(PHI**3)),
        *[
            (product(unit_vector(i), noise_power(2)), -3 * DPHI[i - 1])
            for i in (1, 2, 3)
        ],
    )
    assert rhs == expected
    assert rhs_expand(fs((IXI, 1))) == fs((XI, 1), (noise_power(3), -1))
    assert rhs_expand(FormalSum()) == fs((XI, 1))


def test_renormalized_equation_symbolic():
    report = renormalized_rhs()
    assert report.passed
    assert str(report.counterterm) == "3*C1 - 9*C2"


@pytest.mark.parametrize("c1,c2,expected", [(0, 0, 0), (1, 0, 3)])
def test_renormalized_equation_numeric(c1, c2, expected):
    report = renormalized_rhs(c1, c2)
    assert report.passed
    assert report.counterterm == expected


def test_picard_expand_reports_non_termination(monkeypatch):
    monkeypatch.setattr(expansion, "MAX_PICARD_STEPS", 0)
    with pytest.raises(SymbolGenerationError, match="did not stabilise"):
        expansion.picard_expand()
    assert issubclass(SymbolGenerationError, RegularityError)
