"""Independent brute-force oracles.

The filtration oracle never looks at the library's allocation model.  For a
target level ``t`` it finds the least order of vanishing each branch needs by
scanning integers, writes every candidate section as ``P(z) / prod (z - a)^k``
and counts the dimension of the space of numerators ``P`` that satisfy the
vanishing conditions with a sympy matrix rank.
"""

from fractions import Fraction
from math import factorial

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from p1dirichlet import INF

# orders of vanishing outside this window never matter for n <= 4, slopes in
# [-2, 2] and at most three clusters: below it the slope condition fails, above
# it the section space is already zero
LOW, HIGH = -12, 30


def _least_order(prof, n, t):
    """Least integer ``m`` with ``m s + n g(s) >= t`` for all ``s >= 0``, or None."""
    for m in range(LOW, HIGH + 1):
        if m + n * prof.final_slope < 0:
            continue
        if all(m * s + n * v >= t for s, v in zip(prof.ts, prof.vs)):
            return m
    return None


def rank_at(A, n, t):
    """``dim {s in H0(nD) : -log ||s||_{ng} >= t}`` for rational clusters, no tails."""
    g = A.g
    assert not g.tails
    if t > n * g.v0:
        return 0
    orders = {}
    for c, prof in g.exceptional.items():
        m = _least_order(prof, n, t)
        if m is None:
            return 0
        orders[c] = m
    return _dimension(tuple(sorted(((c.sort_key(), c), m) for c, m in orders.items())))


_dim_cache = {}


def _dimension(key):
    if key in _dim_cache:
        return _dim_cache[key]
    orders = {c: m for (_, c), m in key}
    m_inf = orders.pop(INF, 0)
    finite = {}
    for c, m in orders.items():
        assert c.degree == 1, "oracle handles rational clusters only"
        finite[-c.poly.coeff(0)] = m
    _dim_cache[key] = _numerator_dimension(finite, m_inf)
    return _dim_cache[key]


def _numerator_dimension(finite, m_inf):
    # numerator P of degree <= N over the denominator prod (z - a)^{max(0, -m)}
    N = sum(max(0, -m) for m in finite.values()) - m_inf
    if N < 0:
        return 0
    rows = []
    for a, m in finite.items():
        for j in range(max(0, m)):
            # j-th derivative of P at a
            rows.append([sympy.Rational(factorial(k), factorial(k - j)) * sympy.Rational(a) ** (k - j)
                         if k >= j else 0 for k in range(N + 1)])
    if not rows:
        return N + 1
    M = DomainMatrix([[QQ.convert(sympy.Rational(x)) for x in r] for r in rows],
                     (len(rows), N + 1), QQ)
    return N + 1 - M.rank()


def critical_levels(A, n):
    out = {n * A.g.v0}
    for prof in A.g.exceptional.values():
        for s, v in zip(prof.ts, prof.vs):
            for m in range(LOW, HIGH + 1):
                out.add(m * s + n * v)
    return sorted(out)


def filtration_oracle(A, n):
    """``(levels, ranks, deg_plus)`` by brute force."""
    levels = [c for c in critical_levels(A, n) if c <= n * A.g.v0]
    ranks = {c: rank_at(A, n, c) for c in levels}
    pts = sorted({Fraction(0)} | {c for c in levels if c > 0})
    total = Fraction(0)
    for lo, hi in zip(pts, pts[1:]):
        # the rank is constant on (lo, hi]
        total += ranks.get(hi, rank_at(A, n, hi)) * (hi - lo)
    return levels, ranks, total


def sympy_poly(p):
    z = sympy.Symbol("z")
    return sympy.Poly(sum(sympy.Rational(v.numerator, v.denominator) * z ** k
                          for k, v in p.terms()) if p else 0, z, domain="QQ")


def from_sympy(P):
    from p1dirichlet import Poly
    coeffs = P.all_coeffs()[::-1]
    return Poly({k: Fraction(int(c.p), int(c.q)) for k, c in enumerate(coeffs)})
