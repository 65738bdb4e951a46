from fractions import Fraction

import pytest

from p1dirichlet import (
    INF, EigenData, Endomorphism, PointCluster, RDivisor, finiteness_probe, parse_function,
    phi_sequence, principal_divisor,
)
from p1dirichlet.dynamics import pullback_function
from p1dirichlet.finiteness import exponent_vectors, rank, recursion_holds

ONE = parse_function("1")


def quadratic(c):
    return EigenData(Endomorphism(f"z^2 + {c}"), RDivisor({INF: 1}), 2, ONE)


def twisted_square():
    return EigenData(Endomorphism("z^2"), RDivisor({PointCluster.root(1): 1}), 2,
                     parse_function("(z + 1)/(z - 1)"))


def test_trivial_phi_gives_trivial_sequence():
    assert all(p.is_one() for p in phi_sequence(quadratic(3), 5))


def test_phi_sequence_first_terms():
    seq = phi_sequence(twisted_square(), 2)
    assert seq[0] == parse_function("(z + 1)^(1/2) / (z - 1)^(1/2)")
    # phi_2^2 = f^* phi_1 * phi = (z^2 + 1)^(1/2) (z + 1)^(1/2) (z - 1)^(-3/2)
    assert seq[1] == parse_function("(z^2 + 1)^(1/4) * (z + 1)^(1/4) / (z - 1)^(3/4)")
    assert len(phi_sequence(twisted_square(), 1)) == 1


def test_recursion_and_degree_identities():
    E = twisted_square()
    seq = phi_sequence(E, 6)
    for prev, cur in zip(seq, seq[1:]):
        assert recursion_holds(E, prev, cur)
        lhs = principal_divisor(cur).scale(2)
        assert lhs == principal_divisor(pullback_function(E.f, prev)) + principal_divisor(E.phi)
    assert all(principal_divisor(p).degree == 0 for p in seq)


def test_rank():
    F = Fraction
    assert rank([]) == 0
    assert rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert rank([[F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]) == 2


def test_exponent_vectors_share_one_basis():
    basis, vecs = exponent_vectors([parse_function("(z^2 - 1)"), parse_function("(z - 1)^2")])
    assert [str(b) for b in basis] == ["inf", "z - 1", "z + 1"]
    assert vecs == [[-2, 1, 1], [-2, 2, 0]]


def test_probe_stabilizes_for_trivial_phi():
    rep = finiteness_probe(quadratic(1), 10, 3)
    assert rep.verdict() == "Stabilized(1)"
    assert rep.recursion_ok
    assert "D is effective" in rep.note


def test_probe_sees_growing_support():
    rep = finiteness_probe(twisted_square(), 12, 3)
    assert rep.verdict() == "NotStabilized(12)"
    assert all(b > a for a, b in zip(rep.support_growth, rep.support_growth[1:]))
    assert rep.ranks == sorted(rep.ranks)
    assert rep.lines()[0] == "n, basis_size, rank"
    assert rep.lines()[-2] == "verdict: NotStabilized(12)"


def test_probe_with_invariant_support_stabilizes():
    # z -> z^2 fixes [0] and [inf]; f^*([0] - [inf]) = 3([0] - [inf]) + (z^-1)
    E = EigenData(Endomorphism("z^2"), RDivisor({PointCluster.root(0): 1, INF: -1}), 3,
                  parse_function("z^-1"))
    rep = finiteness_probe(E, 8, 3)
    assert rep.verdict() == "Stabilized(1)"
    assert "D is effective" not in rep.note


def test_stabilized_verdict_survives_larger_n_max():
    E = quadratic(Fraction(1, 2))
    assert finiteness_probe(E, 6, 3).stabilized_at == finiteness_probe(E, 12, 3).stabilized_at


def test_probe_arguments():
    with pytest.raises(ValueError):
        finiteness_probe(quadratic(0), 2, 3)
