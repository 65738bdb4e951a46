"""The slopes ``mu_x``, their total, and the Dirichlet / pseudo-effectivity decisions.

``mu_x(g)`` is the infimum of ``g/t`` along the open branch toward ``x``.  A
Green function is Dirichlet (linearly equivalent to an effective one) exactly
when ``v0 >= 0``, only finitely many ``mu_x`` are negative, and the
degree-weighted total is nonnegative.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import inf

from .divisors import RDivisor, solve_principal
from .errors import PreconditionError, ValidationError
from .green import (
    AdelicDivisor, GeometricTail, GreenFunction, add_principal, is_effective,
    validate,
)
from .polynomials import as_fraction


def profile_mu(prof):
    """Exact ``inf_{t>0} prof(t)/t`` for a single PL profile."""
    v0 = prof.v0
    if v0 < 0:
        return -inf
    cands = [v / t for t, v in zip(prof.ts, prof.vs) if t > 0]
    cands.append(prof.final_slope)
    if v0 == 0:
        cands.append(prof.segments()[0])
    return min(cands)


def mu_x(A, x):
    """``mu_x`` on the branch toward cluster ``x`` (``-inf`` when ``v0 < 0``)."""
    return profile_mu(A.g.profile_at(x))


def _tail_cutoff(tl, v0):
    """Least ``n >= n0`` with ``r^n max|psi| < v0`` (``v0 > 0``)."""
    m = tl.psi.sup_abs()
    n = tl.n0
    rn = tl.ratio ** n
    while rn * m >= v0:
        n += 1
        rn *= tl.ratio
    return n


def tail_mu_values(A, tl):
    """Explicit ``(n, mu)`` pairs for indices with possibly negative ``mu``.

    Only meaningful for ``v0 > 0``; every index past the list has ``mu = 0``.
    """
    v0 = A.g.v0
    out = []
    for n in range(tl.n0, _tail_cutoff(tl, v0)):
        out.append((n, profile_mu(tl.profile(v0, n))))
    return out


def tail_mu_sum(A, tl):
    """Contribution of one tail to ``mu_tot`` (``v0 >= 0``)."""
    v0 = A.g.v0
    if v0 == 0:
        # profile r^n psi, so mu scales by r^n; geometric series from n0
        return profile_mu(tl.psi) * tl.ratio ** tl.n0 / (1 - tl.ratio)
    return sum((mu for _, mu in tail_mu_values(A, tl)), Fraction(0))


def mu_tot(A):
    g = A.g
    if g.v0 < 0:
        return -inf
    total = Fraction(0)
    for c, p in g.exceptional.items():
        total += profile_mu(p) * c.degree
    for tl in g.tails:
        total += tail_mu_sum(A, tl)
    return total


def mu_report(A):
    """Human-readable lines ``branch: mu``; deterministic order."""
    from .polynomials import format_rational as fr
    g = A.g

    def show(v):
        return "-inf" if v == -inf else fr(v)

    lines = [f"{c}: {show(mu_x(A, c))}" for c in g.clusters()]
    lines.append(f"default: {show(-inf if g.v0 < 0 else Fraction(0))}")
    for i, tl in enumerate(g.tails):
        rule = f"z - ({fr(tl.c0)} + {fr(tl.c1)}*n), n >= {tl.n0}"
        if g.v0 < 0:
            lines.append(f"tail {i} [{rule}]: -inf")
        elif g.v0 == 0:
            lines.append(f"tail {i} [{rule}]: ({fr(tl.ratio)})^n * {fr(profile_mu(tl.psi))}")
        else:
            vals = tail_mu_values(A, tl)
            for n, v in vals:
                lines.append(f"tail {i} n={n}: {show(v)}")
            lines.append(f"tail {i} n>={tl.n0 + len(vals)}: 0")
    return lines


class FailureReason(str, Enum):
    NegativeMuTot = "NegativeMuTot"
    InfinitelyManyNegativeMu = "InfinitelyManyNegativeMu"
    MuTotMinusInfinity = "MuTotMinusInfinity"


@dataclass
class DirichletCertificate:
    decision: bool
    witness: object = None
    failure_reason: FailureReason = None
    mu_total: object = None
    coefficients: dict = field(default_factory=dict)

    def __str__(self):
        if self.decision:
            return f"yes: witness = {self.witness}"
        return f"no: {self.failure_reason.value}"


def promote_tail_prefix(A, index, stop):
    """Move tail points ``n0 <= n < stop`` of tail ``index`` into the exceptional set.

    This is an exact rewrite: the Green function is unchanged as a function.
    """
    g = A.g
    tl = g.tails[index]
    if stop <= tl.n0:
        return A
    exc = dict(g.exceptional)
    for n in range(tl.n0, stop):
        exc[tl.cluster(n)] = tl.profile(g.v0, n)
    tails = list(g.tails)
    tails[index] = GeometricTail(tl.c0, tl.c1, stop, tl.ratio, tl.psi)
    return AdelicDivisor(A.D, GreenFunction(g.v0, exc, tuple(tails)))


def _promote_negative(A):
    """Promote every tail point with negative ``mu`` (finitely many when ``v0 > 0``)."""
    if A.g.v0 <= 0:
        return A
    for i, tl in enumerate(A.g.tails):
        vals = tail_mu_values(A, tl)
        neg = [n for n, mu in vals if mu < 0]
        if neg:
            A = promote_tail_prefix(A, i, max(neg) + 1)
    return A


def _promote_for(A, s):
    """Promote tail points met by the support of ``s`` so that ``add_principal`` applies."""
    for i, tl in enumerate(A.g.tails):
        hits = [n for x in s.support() for n in tl.indices_in(x)]
        if hits:
            A = promote_tail_prefix(A, i, max(hits) + 1)
    return A


def _check(A):
    v = validate(A)
    if v:
        raise ValidationError(v)


def verify_witness(A, s):
    """Exact check that ``(D + (s), g - log|s|)`` is effective.

    Tail points met by ``s`` are first moved to the exceptional set, which
    does not change ``(D, g)``.
    """
    return is_effective(add_principal(_promote_for(A, s), s))


def decide_dirichlet(A):
    _check(A)
    g = A.g
    if g.v0 < 0:
        return DirichletCertificate(False, failure_reason=FailureReason.MuTotMinusInfinity,
                                    mu_total=-inf)
    if g.v0 == 0:
        if any(profile_mu(tl.psi) < 0 for tl in g.tails):
            return DirichletCertificate(False, failure_reason=FailureReason.InfinitelyManyNegativeMu,
                                        mu_total=mu_tot(A))
    total = mu_tot(A)
    if total < 0:
        return DirichletCertificate(False, failure_reason=FailureReason.NegativeMuTot,
                                    mu_total=total)
    B = _promote_negative(A)
    clusters = B.g.clusters()
    mus = {c: profile_mu(B.g.exceptional[c]) for c in clusters}
    surplus = sum((mus[c] * c.degree for c in clusters), Fraction(0))
    if surplus != total:
        raise RuntimeError("internal error: surplus does not match mu_tot")
    a = dict(mus)
    if clusters:
        first = clusters[0]
        a[first] = mus[first] - surplus / first.degree
    D_prime = RDivisor({c: v for c, v in a.items() if v})
    s = solve_principal(-D_prime)
    if not is_effective(add_principal(B, s)):
        raise RuntimeError("internal error: Dirichlet witness failed verification")
    return DirichletCertificate(True, witness=s, mu_total=total, coefficients=a)


def decide_pseudoeffective(A):
    _check(A)
    if A.D.degree <= 0:
        raise PreconditionError("criterion requires D big (deg D > 0)")
    return mu_tot(A) >= 0


def epsilon_dirichlet(A, eps):
    eps = as_fraction(eps)
    if eps <= 0:
        raise PreconditionError("epsilon must be positive")
    return decide_dirichlet(A.shift(eps))
