from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import res
from hypothesis import given, settings, strategies as st

from oracles import from_sympy, sympy_poly
from p1dirichlet import InputError, Poly, format_poly, parse_poly
from p1dirichlet.polynomials import (
    determinant, gcd_free_basis, integer_roots, interpolate, is_squarefree, poly_gcd,
    rational_roots, squarefree_decompose, squarefree_part, sylvester_resultant,
)

coeff = st.builds(Fraction, st.integers(-5, 5), st.sampled_from((1, 2, 3)))
polys = st.dictionaries(st.integers(0, 6), coeff, max_size=5).map(Poly)
nonzero = polys.filter(bool)


def test_parse_and_format_round_trip():
    for text in ["z^2 - 1", "1/2*z", "-z^3 + 2*z - 7/3", "5", "z"]:
        assert format_poly(parse_poly(text)) == text


def test_parse_accepts_spacing_and_stars():
    assert parse_poly("3*z**2+z") == Poly({2: 3, 1: 1})
    assert parse_poly(" - z ") == Poly({1: -1})


@pytest.mark.parametrize("bad,col", [("z^2 + ", None), ("z^2 $ 1", 5), ("", 1), ("z z", 3)])
def test_parse_errors_carry_a_column(bad, col):
    with pytest.raises(InputError) as exc:
        parse_poly(bad)
    if col is not None:
        assert exc.value.col == col


def test_sparse_division_of_huge_degree():
    p = Poly({2048: 1, 0: 1})
    q, r = p.divmod(Poly({1024: 1, 0: 1}))
    assert r == Poly.const(2)
    assert q * Poly({1024: 1, 0: 1}) + r == p


@given(polys, nonzero)
def test_divmod_matches_sympy(a, b):
    q, r = a.divmod(b)
    sq, sr = sympy.div(sympy_poly(a), sympy_poly(b))
    assert q == from_sympy(sq) and r == from_sympy(sr)
    assert r.degree < b.degree


@given(polys, polys)
def test_gcd_matches_sympy(a, b):
    g = poly_gcd(a, b)
    s = sympy.gcd(sympy_poly(a), sympy_poly(b))
    if s.is_zero:
        assert g.is_zero()
    else:
        assert g == from_sympy(s).monic()


@given(nonzero)
def test_squarefree_decomposition_matches_sympy(p):
    dec = squarefree_decompose(p)
    prod = Poly.const(p.lc)
    for r, j in dec:
        assert r.lc == 1 and is_squarefree(r) and r.degree > 0
        prod = prod * r ** j
    assert prod == p
    _, factors = sympy.sqf_list(sympy_poly(p))
    expect = sorted((j, from_sympy(f).monic().sort_key()) for f, j in factors)
    assert sorted((j, r.sort_key()) for r, j in dec) == expect


@given(nonzero)
def test_squarefree_part(p):
    s = squarefree_part(p)
    assert s.divides(p)
    if p.degree > 0:
        assert is_squarefree(s)
        assert squarefree_part(p ** 2) == s
    else:
        assert s.is_one()


@given(st.lists(nonzero, max_size=4))
def test_gcd_free_basis(ps):
    ps = [squarefree_part(p) for p in ps if p.degree > 0]
    basis = gcd_free_basis(ps)
    for i, a in enumerate(basis):
        for b in basis[i + 1:]:
            assert poly_gcd(a, b).is_one()
    for p in ps:
        rest = p.monic()
        for b in basis:
            if b.divides(rest):
                rest = rest.exact_div(b)
        assert rest.degree == 0


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4))
def test_integer_roots(rs):
    p = Poly.from_roots(rs) * Poly({2: 1, 0: 1})
    assert integer_roots(p) == sorted(set(rs))


@given(st.lists(coeff, min_size=1, max_size=4))
def test_rational_roots(rs):
    p = Poly.from_roots(rs) * Poly({2: 1, 0: 3})
    assert rational_roots(p) == sorted(set(rs))


@given(polys, polys)
def test_resultant_matches_sympy(a, b):
    if a.degree < 1 or b.degree < 1:
        return
    # sympy's Sylvester-determinant resultant; its default routine uses another sign convention
    z = sympy.Symbol("z")
    expect = sympy.Rational(res(sympy_poly(a).as_expr(), sympy_poly(b).as_expr(), z))
    assert sylvester_resultant(a, b) == Fraction(int(expect.p), int(expect.q))
    assert abs(sylvester_resultant(a, b)) == abs(sylvester_resultant(b, a))


def test_determinant_small():
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0


def test_interpolate_recovers_polynomial():
    p = parse_poly("z^3 - 2*z + 1/2")
    xs = [0, 1, 2, 3]
    assert interpolate(xs, [p(x) for x in xs]) == p


@given(polys, polys, polys)
@settings(max_examples=50)
def test_composition_and_evaluation(a, b, c):
    assert a(b)(Fraction(1, 3)) == a(b(Fraction(1, 3)))
    assert (a * b)(2) == a(2) * b(2)
    assert (a + b) * c == a * c + b * c
