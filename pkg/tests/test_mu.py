from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, settings

from strategies import adelic_divisors
from p1dirichlet import (
    INF, AdelicDivisor, BranchProfile, FailureReason, GreenFunction, PointCluster,
    PreconditionError, RDivisor, ValidationError, decide_dirichlet, decide_pseudoeffective,
    dipping_tail, epsilon_dirichlet, logmax_divisor, mu_report, mu_tot, mu_x, parse_function,
    principal_divisor, profile_mu, validate, verify_witness, with_tails,
)
from p1dirichlet.mu import promote_tail_prefix, tail_mu_values

Z = PointCluster.root(0)
E1 = logmax_divisor()
E1_TAIL = with_tails(E1, [dipping_tail()])
TWO_POINT = AdelicDivisor(RDivisor({Z: 1, INF: 1}),
                          GreenFunction(0, {Z: BranchProfile.linear(0, 1), INF: BranchProfile.linear(0, 1)}))


def test_profile_mu_cases():
    assert profile_mu(BranchProfile.linear(0, 1)) == 1
    assert profile_mu(BranchProfile([(0, 0), (1, -1)], 0)) == -1
    assert profile_mu(BranchProfile([(0, 1), (2, 0)], 0)) == 0
    assert profile_mu(BranchProfile([(0, 1), (2, -1)], 0)) == Fraction(-1, 2)
    assert profile_mu(BranchProfile.constant(-1)) == -inf


def test_mu_on_logmax():
    assert mu_x(E1, INF) == 1
    assert mu_x(E1, Z) == 0
    assert mu_tot(E1) == 1
    assert mu_report(E1) == ["inf: 1", "default: 0"]


def test_mu_on_tail_branches():
    for n in range(1, 6):
        assert mu_x(E1_TAIL, PointCluster.root(n)) == -Fraction(1, 2 ** n)
    assert mu_tot(E1_TAIL) == 0


def test_mu_tot_is_minus_infinity_for_negative_root():
    assert mu_tot(E1.shift(-1)) == -inf


def test_mu_tot_with_positive_root_and_tail():
    A = with_tails(E1.shift(Fraction(1, 8)), [dipping_tail()])
    # tail points n = 1, 2 dip below zero: mu = 1/8 - 1/2 and 1/8 - 1/4
    vals = dict(tail_mu_values(A, A.g.tails[0]))
    assert vals[1] == Fraction(-3, 8) and vals[2] == Fraction(-1, 8) and vals[3] == 0
    assert mu_tot(A) == 1 - Fraction(3, 8) - Fraction(1, 8)


def test_decide_dirichlet_examples():
    cert = decide_dirichlet(E1)
    assert cert.decision and cert.witness.is_one()
    assert str(cert) == "yes: witness = 1"
    cert = decide_dirichlet(E1_TAIL)
    assert not cert.decision and cert.failure_reason == FailureReason.InfinitelyManyNegativeMu
    assert str(cert) == "no: InfinitelyManyNegativeMu"
    cert = decide_dirichlet(TWO_POINT)
    assert cert.decision
    assert principal_divisor(cert.witness) == RDivisor({INF: 1, Z: -1})
    assert verify_witness(TWO_POINT, cert.witness)


def test_negative_mu_tot():
    A = AdelicDivisor(RDivisor({INF: -1}), GreenFunction(0, {INF: BranchProfile.linear(0, -1)}))
    cert = decide_dirichlet(A)
    assert cert.failure_reason == FailureReason.NegativeMuTot
    assert decide_dirichlet(E1.shift(-1)).failure_reason == FailureReason.MuTotMinusInfinity


def test_verify_witness_examples():
    assert verify_witness(E1, parse_function("1"))
    for s in ("1", "z", "(z - 1)^(1/2)"):
        assert not verify_witness(E1.shift(Fraction(-1, 2)), parse_function(s))


def test_verify_witness_moves_tail_points_first():
    A = with_tails(E1.shift(1), [dipping_tail()])
    assert verify_witness(A, parse_function("1"))
    assert verify_witness(A, parse_function("z - 2"))
    assert not verify_witness(A, parse_function("(z - 2)^-1"))


def test_decide_dirichlet_rejects_invalid_input():
    bad = AdelicDivisor(RDivisor({INF: 1}), GreenFunction(0))
    with pytest.raises(ValidationError):
        decide_dirichlet(bad)


def test_pseudoeffective_examples():
    assert decide_pseudoeffective(E1_TAIL)
    assert decide_pseudoeffective(E1)
    assert not decide_pseudoeffective(E1.shift(-1))
    with pytest.raises(PreconditionError, match="criterion requires D big"):
        decide_pseudoeffective(TWO_POINT.__class__(RDivisor(), GreenFunction(0)))


def test_epsilon_dirichlet_examples():
    assert epsilon_dirichlet(E1_TAIL, Fraction(1, 8)).decision
    assert epsilon_dirichlet(E1.shift(Fraction(-1, 2)), 1).decision
    cert = epsilon_dirichlet(E1.shift(Fraction(-1, 2)), Fraction(1, 4))
    assert cert.failure_reason == FailureReason.MuTotMinusInfinity
    with pytest.raises(PreconditionError):
        epsilon_dirichlet(E1, 0)


def test_promote_tail_prefix_is_an_exact_rewrite():
    A = with_tails(E1.shift(Fraction(1, 3)), [dipping_tail()])
    B = promote_tail_prefix(A, 0, 4)
    assert B.g.tails[0].n0 == 4
    for n in range(1, 8):
        c = PointCluster.root(n)
        assert A.g.profile_at(c) == B.g.profile_at(c)


@settings(max_examples=300)
@given(adelic_divisors(allow_tails=True))
def test_decision_matches_mu_tot_and_witness_verifies(A):
    if validate(A):
        return
    cert = decide_dirichlet(A)
    total = mu_tot(A)
    if cert.decision:
        assert total >= 0
        assert verify_witness(A, cert.witness)
    elif cert.failure_reason == FailureReason.NegativeMuTot:
        assert total < 0
