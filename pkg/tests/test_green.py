from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, strategies as st

from strategies import adelic_divisors, functions, small_rationals
from p1dirichlet import (
    INF, AdelicDivisor, BranchProfile, GeometricTail, GreenFunction, InputError, PointCluster,
    PreconditionError, RDivisor, TreePoint, add_adelic, add_principal, dipping_tail, eval_green,
    format_profile, height, is_effective, logmax_divisor, parse_function, parse_profile,
    parse_tree_point, principal_adelic, projective_line_divisor, validate, with_tails,
)
from p1dirichlet.green import _tails_overlap

Z = PointCluster.root(0)


def test_profile_canonical_form_drops_collinear_points():
    p = BranchProfile([(0, 0), (1, 1), (2, 2)], 1)
    assert p.breakpoints() == [(0, 0)]
    assert format_profile(p) == "(0,0) slope=1"


def test_profile_evaluation():
    p = BranchProfile([(0, 0), (1, -1)], 0)
    assert p(Fraction(1, 2)) == Fraction(-1, 2)
    assert p(5) == -1 and p(inf) == -1
    assert BranchProfile.linear(0, 1)(inf) == inf
    assert p.minimum() == -1 and p.maximum() == 0 and p.sup_abs() == 1
    assert not p.is_concave() or p.segments() == [-1, 0]


def test_profile_leaf_limit_and_concavity():
    p = BranchProfile.envelope([(2, 0), (0, 1)])
    assert p.breakpoints() == [(0, 2), (2, 2)] and p.final_slope == 1
    assert p.leaf_limit() == 0
    assert not p.is_concave()
    assert BranchProfile.envelope([(2, 0), (0, 1)], upper=False).is_concave()


@pytest.mark.parametrize("text", ["(0,0);(1,1) slope=0", "(0,1/2);(3/2,-1) slope=0", "(0,0) slope=-2"])
def test_profile_text_round_trip(text):
    assert format_profile(parse_profile(text)) == text


@pytest.mark.parametrize("bad", ["", "(1,0)", "(0,0);(0,1)", "(0,x)", "0,0", "(0,0) slope=q"])
def test_profile_parse_errors(bad):
    with pytest.raises(InputError):
        parse_profile(bad)


@given(st.lists(small_rationals(-3, 3), min_size=1, max_size=5), small_rationals(-2, 2),
       small_rationals(0, 5), st.sampled_from([Fraction(1, 2), Fraction(2), Fraction(3)]))
def test_profile_arithmetic_is_pointwise(vs, slope, t, e):
    p = BranchProfile([(i, v) for i, v in enumerate(vs)], slope)
    q = BranchProfile([(0, 1), (Fraction(3, 2), -1)], -slope)
    assert (p + q)(t) == p(t) + q(t)
    assert (p - q)(t) == p(t) - q(t)
    assert p.scale(3)(t) == 3 * p(t)
    assert p.add_linear(2)(t) == p(t) + 2 * t
    assert p.reparametrize(e)(t) == p(e * t)


def test_tree_point_parsing():
    assert parse_tree_point("eta0").is_root
    p = parse_tree_point("z^2 + 1:1/2")
    assert p.branch == PointCluster("z^2 + 1") and p.t == Fraction(1, 2)
    assert parse_tree_point("z:inf").t == inf
    for bad in ("z", "z:-1", "z:x", "z^2:1"):
        with pytest.raises(InputError):
            parse_tree_point(bad)


def test_tail_points_and_indices():
    tl = dipping_tail()
    assert tl.point(3) == 3 and tl.cluster(3) == PointCluster.root(3)
    assert tl.index_of(PointCluster.root(4)) == 4
    assert tl.index_of(PointCluster.root(0)) is None
    assert tl.indices_in(PointCluster("z^2 - 3*z + 2")) == [1, 2]
    assert tl.profile(0, 2) == BranchProfile([(0, 0), (1, Fraction(-1, 4))], 0)


def test_tails_overlap():
    a = GeometricTail(0, 2, 0, Fraction(1, 2), BranchProfile.constant(0))
    b = GeometricTail(1, 2, 0, Fraction(1, 2), BranchProfile.constant(0))
    c = GeometricTail(0, 3, 0, Fraction(1, 2), BranchProfile.constant(0))
    d = GeometricTail(0, 3, 5, Fraction(1, 2), BranchProfile.constant(0))
    assert not _tails_overlap(a, b)
    assert _tails_overlap(a, c)
    assert _tails_overlap(b, d)  # 1 + 2n = 3m at n = 7, m = 5


def test_green_profile_at_tail_and_default():
    A = with_tails(logmax_divisor(), [dipping_tail()])
    assert A.g.profile_at(PointCluster.root(1)) == BranchProfile([(0, 0), (1, Fraction(-1, 2))], 0)
    assert A.g.profile_at(PointCluster.root(-1)) == BranchProfile.constant(0)
    with pytest.raises(PreconditionError):
        A.g.profile_at(PointCluster("z^2 - 1"))
    assert eval_green(A, TreePoint(PointCluster.root(2), 2)) == Fraction(-1, 4)


def test_validate_reports_each_problem():
    g = GreenFunction(0, {INF: BranchProfile.linear(1, 2), Z: BranchProfile.constant(1)},
                      (GeometricTail(-2, 1, 0, 2, BranchProfile([(0, 1)], 1)),))
    A = AdelicDivisor(RDivisor({INF: 1, PointCluster.root(5): 1}), g)
    v = validate(A)
    text = "\n".join(v)
    assert "branch inf: profile(0) = 1 differs from v0 = 0" in text
    assert "branch inf: slope 2 differs from ord = 1" in text
    assert "not in the exceptional set" in text
    assert "ratio must lie in (0,1)" in text
    assert "point 0 overlaps branch z" in text
    assert "lies in Supp(D)" in text
    assert validate(logmax_divisor()) == []


def test_add_principal_shifts_slopes():
    A = logmax_divisor()
    s = parse_function("z")
    B = add_principal(A, s)
    assert B.D == RDivisor({Z: 1})
    assert B.g.profile_at(INF) == BranchProfile.constant(0)
    assert B.g.profile_at(Z) == BranchProfile.linear(0, 1)
    assert validate(B) == []


def test_add_principal_rejects_tail_collisions():
    A = with_tails(logmax_divisor(), [dipping_tail()])
    with pytest.raises(PreconditionError):
        add_principal(A, parse_function("z - 3"))


@given(adelic_divisors(), functions())
def test_add_principal_keeps_validity_and_heights(A, s):
    if validate(A):
        return
    B = add_principal(A, s)
    assert validate(B) == []
    assert B.D.degree == A.D.degree
    for c in list(A.g.exceptional) + list(s.support()) + [PointCluster.root(7)]:
        for t in (Fraction(1, 2), Fraction(3)):
            p = TreePoint(c, t)
            try:
                h = height(A, p)
            except PreconditionError:
                continue
            assert height(B, p) == h


def test_add_adelic_merges_tails():
    A = with_tails(logmax_divisor(), [dipping_tail()])
    B = add_adelic(A, A)
    assert len(B.g.tails) == 1
    assert B.g.tails[0].psi == dipping_tail().psi.scale(2)
    assert B.D == RDivisor({INF: 2})


def test_is_effective():
    assert is_effective(logmax_divisor())
    assert not is_effective(with_tails(logmax_divisor(), [dipping_tail()]))
    assert is_effective(with_tails(logmax_divisor().shift(Fraction(1, 2)), [dipping_tail()]))
    assert not is_effective(logmax_divisor().shift(-1))


def test_height_and_leaf_limits():
    A = projective_line_divisor(1, 0)
    assert height(A, TreePoint.root()) == 1
    assert height(A, TreePoint(INF, 5)) == 0
    assert height(A, TreePoint(INF, inf)) == 0
    assert height(A, TreePoint(Z, inf)) == 1


@given(functions())
def test_principal_adelic_heights_vanish(s):
    P = principal_adelic(s)
    assert P.D.degree == 0
    for c in list(s.support()) + [INF, PointCluster.root(9)]:
        assert height(P, TreePoint(c, Fraction(2))) == 0
        assert height(P, TreePoint(c, inf)) == 0
