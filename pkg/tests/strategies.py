"""Hypothesis strategies for random adelic divisors."""

from fractions import Fraction

from hypothesis import strategies as st

from p1dirichlet import (
    INF, AdelicDivisor, BranchProfile, GeometricTail, GreenFunction, PointCluster, RDivisor,
)
from p1dirichlet.polynomials import parse_poly

RATIONAL_POOL = [INF] + [PointCluster.root(a) for a in range(-3, 4)]
IRREDUCIBLE_POOL = [PointCluster(parse_poly(s)) for s in ("z^2 + 1", "z^2 - 2", "z^2 + z + 1")]
CLUSTER_POOL = RATIONAL_POOL + IRREDUCIBLE_POOL


def small_rationals(lo=-3, hi=3, dens=(1, 2, 3, 4)):
    return st.builds(lambda k, q: Fraction(k, q), st.integers(lo * 4, hi * 4),
                     st.sampled_from(dens)).map(lambda x: max(min(x, Fraction(hi)), Fraction(lo)))


@st.composite
def profiles(draw, v0, slope, max_breaks=6):
    k = draw(st.integers(0, max_breaks - 1))
    steps = draw(st.lists(st.builds(Fraction, st.integers(1, 6), st.sampled_from((1, 2, 3))),
                          min_size=k, max_size=k))
    pts = [(Fraction(0), v0)]
    t = Fraction(0)
    for dt in steps:
        t += dt
        pts.append((t, draw(small_rationals(-3, 4))))
    return BranchProfile(pts, slope)


@st.composite
def concave_profiles(draw, v0, slope, max_breaks=5):
    """Concave PL profile: slopes decrease and end at ``slope``."""
    k = draw(st.integers(0, max_breaks - 1))
    extra = sorted(draw(st.lists(small_rationals(0, 3), min_size=k, max_size=k)), reverse=True)
    pts = [(Fraction(0), v0)]
    t, v = Fraction(0), v0
    for s in extra:
        dt = draw(st.builds(Fraction, st.integers(1, 4), st.sampled_from((1, 2))))
        t += dt
        v += (slope + s) * dt
        pts.append((t, v))
    return BranchProfile(pts, slope)


@st.composite
def adelic_divisors(draw, pool=CLUSTER_POOL, max_clusters=5, max_breaks=6, v0=None,
                    allow_tails=False, concave=False):
    clusters = draw(st.lists(st.sampled_from(pool), min_size=0, max_size=max_clusters,
                             unique=True))
    if v0 is None:
        v0 = draw(st.one_of(small_rationals(0, 2), small_rationals(-1, 2)))
    coeffs = {c: draw(small_rationals(-2, 2)) for c in clusters}
    exc = {}
    for c in clusters:
        if concave:
            exc[c] = draw(concave_profiles(v0, coeffs[c], max_breaks))
        else:
            exc[c] = draw(profiles(v0, coeffs[c], max_breaks))
    tails = ()
    if allow_tails and draw(st.booleans()):
        # start the progression beyond the pool so that it never meets a cluster
        psi = draw(profiles(Fraction(0), Fraction(0), 4))
        tails = (GeometricTail(draw(st.sampled_from((10, 11))), draw(st.sampled_from((1, 2))),
                               draw(st.integers(0, 3)),
                               draw(st.sampled_from((Fraction(1, 2), Fraction(1, 3),
                                                     Fraction(2, 3)))), psi),)
    return AdelicDivisor(RDivisor(coeffs), GreenFunction(v0, exc, tails))


@st.composite
def functions(draw, pool=CLUSTER_POOL, integral=False, max_factors=3):
    from p1dirichlet import FormalRationalFunction
    finite = [c for c in pool if not c.is_infinity]
    cs = draw(st.lists(st.sampled_from(finite), max_size=max_factors, unique=True))
    if integral:
        exps = {c: Fraction(draw(st.integers(-3, 3))) for c in cs}
    else:
        exps = {c: draw(small_rationals(-3, 3)) for c in cs}
    return FormalRationalFunction({c: e for c, e in exps.items() if e})
