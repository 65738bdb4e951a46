"""Piecewise-linear Green functions on the Berkovich tree of P^1.

Over a trivially valued field the analytification of P^1 is a tree: a root
``eta0`` and one branch ``[eta0, x]`` per closed point, parametrised by
``t`` in ``[0, inf]``.  Along the branch toward ``x`` a rational function has
``-log|s| = t * ord_x(s)``.

A :class:`GreenFunction` stores its value ``v0`` at the root, a finite set of
*exceptional* branches carrying :class:`BranchProfile` data, and optional
:class:`GeometricTail` families.  Every other branch is constant ``v0``.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd as igcd, inf

from .divisors import (
    INF, FormalRationalFunction, PointCluster, RDivisor, parse_cluster,
    principal_divisor, refine_supports,
)
from .errors import InputError, PreconditionError, ValidationError
from .polynomials import Poly, as_fraction, integer_roots, poly_gcd


def _num(x):
    if x == inf or x == -inf:
        return x
    return as_fraction(x)


class BranchProfile:
    """Continuous PL function on ``[0, inf)`` given by breakpoints and a final slope.

    Breakpoints are stored in canonical form: the first one sits at ``t = 0``
    and no interior breakpoint is collinear with its neighbours.
    """

    __slots__ = ("ts", "vs", "final_slope")

    def __init__(self, breakpoints, final_slope=0):
        pts = [(as_fraction(t), as_fraction(v)) for t, v in breakpoints]
        if not pts or pts[0][0] != 0:
            raise PreconditionError("profile breakpoints must start at t = 0")
        for (t1, _), (t2, _) in zip(pts, pts[1:]):
            if not t2 > t1:
                raise PreconditionError("profile breakpoints must be strictly increasing")
        s = as_fraction(final_slope)
        ts = [p[0] for p in pts]
        vs = [p[1] for p in pts]
        # drop collinear interior points
        i = 1
        while i < len(ts):
            left = (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1])
            right = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]) if i + 1 < len(ts) else s
            if left == right:
                del ts[i]
                del vs[i]
                i = max(i - 1, 1)
            else:
                i += 1
        self.ts = tuple(ts)
        self.vs = tuple(vs)
        self.final_slope = s

    @classmethod
    def constant(cls, c):
        return cls([(0, c)], 0)

    @classmethod
    def linear(cls, c, slope):
        return cls([(0, c)], slope)

    @classmethod
    def envelope(cls, lines, upper=True):
        """``max`` (or ``min``) of affine functions ``a + b t`` on ``[0, inf)``."""
        lines = [(as_fraction(a), as_fraction(b)) for a, b in lines]
        pick = max if upper else min
        crit = {Fraction(0)}
        for i, (a1, b1) in enumerate(lines):
            for a2, b2 in lines[i + 1:]:
                if b1 != b2:
                    t = (a2 - a1) / (b1 - b2)
                    if t > 0:
                        crit.add(t)
        ts = sorted(crit)
        pts = [(t, pick(a + b * t for a, b in lines)) for t in ts]
        t_last = ts[-1] + 1
        v_last = pick(a + b * t_last for a, b in lines)
        slope = v_last - pts[-1][1]
        return cls(pts, slope)

    # evaluation

    @property
    def v0(self):
        return self.vs[0]

    def breakpoints(self):
        return list(zip(self.ts, self.vs))

    def segments(self):
        """Slopes of the bounded segments followed by the final slope."""
        out = [(self.vs[i + 1] - self.vs[i]) / (self.ts[i + 1] - self.ts[i])
               for i in range(len(self.ts) - 1)]
        out.append(self.final_slope)
        return out

    def __call__(self, t):
        if t == inf:
            if self.final_slope > 0:
                return inf
            if self.final_slope < 0:
                return -inf
            return self.vs[-1]
        t = as_fraction(t)
        if t < 0:
            raise PreconditionError("negative tree parameter")
        i = bisect_right(self.ts, t) - 1
        if i == len(self.ts) - 1:
            return self.vs[-1] + self.final_slope * (t - self.ts[-1])
        t0, t1 = self.ts[i], self.ts[i + 1]
        v0, v1 = self.vs[i], self.vs[i + 1]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def minimum(self):
        if self.final_slope < 0:
            return -inf
        return min(self.vs)

    def maximum(self):
        if self.final_slope > 0:
            return inf
        return max(self.vs)

    def sup_abs(self):
        if self.final_slope != 0:
            return inf
        return max(abs(v) for v in self.vs)

    def leaf_limit(self):
        """``lim_{t->inf} g(t) - t * final_slope``."""
        return self.vs[-1] - self.final_slope * self.ts[-1]

    def is_concave(self):
        s = self.segments()
        return all(a >= b for a, b in zip(s, s[1:]))

    # arithmetic

    def _merged(self, other, op):
        ts = sorted(set(self.ts) | set(other.ts))
        return BranchProfile([(t, op(self(t), other(t))) for t in ts],
                             op(self.final_slope, other.final_slope))

    def __add__(self, other):
        return self._merged(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._merged(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k):
        k = as_fraction(k)
        return BranchProfile([(t, k * v) for t, v in zip(self.ts, self.vs)], k * self.final_slope)

    def shift(self, c):
        c = as_fraction(c)
        return BranchProfile([(t, v + c) for t, v in zip(self.ts, self.vs)], self.final_slope)

    def add_linear(self, m):
        """``g(t) + m t``."""
        m = as_fraction(m)
        return BranchProfile([(t, v + m * t) for t, v in zip(self.ts, self.vs)], self.final_slope + m)

    def reparametrize(self, e):
        """``g(e t)`` for a positive rational ``e``."""
        e = as_fraction(e)
        if e <= 0:
            raise PreconditionError("reparametrisation factor must be positive")
        return BranchProfile([(t / e, v) for t, v in zip(self.ts, self.vs)], self.final_slope * e)

    def __eq__(self, other):
        return (isinstance(other, BranchProfile) and self.ts == other.ts
                and self.vs == other.vs and self.final_slope == other.final_slope)

    def __hash__(self):
        return hash((self.ts, self.vs, self.final_slope))

    def __str__(self):
        return format_profile(self)

    def __repr__(self):
        return f"BranchProfile({format_profile(self)!r})"


def format_profile(p):
    from .polynomials import format_rational as fr
    pts = ";".join(f"({fr(t)},{fr(v)})" for t, v in zip(p.ts, p.vs))
    return f"{pts} slope={fr(p.final_slope)}"


def parse_profile(text):
    """Parse ``"(0,0);(1,1) slope=1"``."""
    body = text.strip()
    slope = Fraction(0)
    if "slope=" in body:
        body, _, s = body.rpartition("slope=")
        try:
            slope = Fraction(s.strip())
        except ValueError:
            raise InputError(f"bad slope {s.strip()!r}")
    pts = []
    for chunk in body.replace(" ", "").split(";"):
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise InputError(f"bad breakpoint {chunk!r}")
        parts = chunk[1:-1].split(",")
        if len(parts) != 2:
            raise InputError(f"bad breakpoint {chunk!r}")
        try:
            pts.append((Fraction(parts[0]), Fraction(parts[1])))
        except ValueError:
            raise InputError(f"bad number in breakpoint {chunk!r}")
    if not pts:
        raise InputError("profile has no breakpoints")
    try:
        return BranchProfile(pts, slope)
    except PreconditionError as exc:
        raise InputError(str(exc))


@dataclass(frozen=True)
class GeometricTail:
    """Clusters ``x_n = z - (c0 + c1 n)`` for ``n >= n0`` with profiles ``v0 + r^n psi``."""

    c0: Fraction
    c1: Fraction
    n0: int
    ratio: Fraction
    psi: BranchProfile

    def __post_init__(self):
        object.__setattr__(self, "c0", as_fraction(self.c0))
        object.__setattr__(self, "c1", as_fraction(self.c1))
        object.__setattr__(self, "ratio", as_fraction(self.ratio))
        object.__setattr__(self, "n0", int(self.n0))

    def point(self, n):
        return self.c0 + self.c1 * n

    def cluster(self, n):
        return PointCluster.root(self.point(n))

    def index_of(self, x):
        """Tail index of a degree-one cluster, or None."""
        if x.is_infinity or x.degree != 1 or self.c1 == 0:
            return None
        a = -x.poly.coeff(0)
        n = (a - self.c0) / self.c1
        if n.denominator == 1 and n >= self.n0:
            return int(n)
        return None

    def indices_in(self, x):
        """Tail indices of all points of cluster ``x``."""
        if x.is_infinity or self.c1 == 0:
            return []
        sub = x.poly.compose(Poly({0: self.c0, 1: self.c1}))
        return [n for n in integer_roots(sub) if n >= self.n0]

    def profile(self, v0, n):
        return self.psi.scale(self.ratio ** n).shift(v0)

    def same_rule(self, other):
        return (self.c0, self.c1, self.n0, self.ratio) == (other.c0, other.c1, other.n0, other.ratio)

    def violations(self):
        out = []
        if self.c1 == 0:
            out.append("tail: step c1 must be nonzero")
        if not (0 < self.ratio < 1):
            out.append("tail: ratio must lie in (0,1)")
        if self.psi.v0 != 0:
            out.append("tail: psi(0) must be 0")
        if self.psi.final_slope != 0:
            out.append("tail: psi must have final slope 0")
        return out


def _tails_overlap(a, b):
    """Do two arithmetic-progression tails share a point?"""
    # a.c0 + a.c1 n = b.c0 + b.c1 m, n >= a.n0, m >= b.n0
    den = 1
    for q in (a.c0, a.c1, b.c0, b.c1):
        den = den * q.denominator // igcd(den, q.denominator)
    A = int(a.c1 * den)
    B = int(b.c1 * den)
    C = int((b.c0 - a.c0) * den)
    # A n - B m = C
    g = igcd(A, B)
    if C % g:
        return False
    # particular solution by extended Euclid
    def egcd(x, y):
        if y == 0:
            return (1 if x >= 0 else -1, 0)
        q, r = divmod(x, y)
        s, t = egcd(y, r)
        return t, s - q * t
    u, w = egcd(A, -B)
    gg = A * u - B * w
    if gg < 0:
        u, w, gg = -u, -w, -gg
    n_star, m_star = u * (C // gg), w * (C // gg)
    dn, dm = B // g, A // g
    lo, hi = -inf, inf
    for base, step, bound in ((n_star, dn, a.n0), (m_star, dm, b.n0)):
        if step > 0:
            lo = max(lo, ceil(Fraction(bound - base, step)))
        elif step < 0:
            hi = min(hi, floor(Fraction(bound - base, step)))
        elif base < bound:
            return False
    return lo <= hi


@dataclass(frozen=True)
class TreePoint:
    """A point of the tree: branch cluster (None for the root) and parameter ``t``."""

    branch: PointCluster = None
    t: object = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "t", _num(self.t))
        if self.branch is None and self.t != 0:
            raise PreconditionError("the root has t = 0")
        if self.t != inf and self.t < 0:
            raise PreconditionError("tree parameter must be >= 0")

    @classmethod
    def root(cls):
        return cls(None, Fraction(0))

    @property
    def is_root(self):
        return self.branch is None or self.t == 0

    @property
    def reduction(self):
        return None if self.is_root else self.branch

    def __str__(self):
        if self.branch is None:
            return "eta0"
        t = "inf" if self.t == inf else str(self.t)
        return f"{self.branch}:{t}"


def parse_tree_point(text):
    """``"inf:3"``, ``"z^2+1:1/2"``, ``"z:inf"`` or ``"eta0"``."""
    s = text.strip()
    if s in ("eta0", "root", "η₀"):
        return TreePoint.root()
    head, sep, tail = s.rpartition(":")
    if not sep:
        raise InputError(f"expected <cluster>:<t>, got {text!r}")
    try:
        t = inf if tail.strip() in ("inf", "oo") else Fraction(tail.strip())
        return TreePoint(parse_cluster(head), t)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad parameter {tail!r}")
    except PreconditionError as exc:
        raise InputError(str(exc))


class GreenFunction:
    """PL Green function: root value, exceptional profiles, and geometric tails."""

    __slots__ = ("v0", "exceptional", "tails")

    def __init__(self, v0, exceptional=None, tails=()):
        self.v0 = as_fraction(v0)
        exc = {}
        for c, p in (exceptional or {}).items():
            if isinstance(c, str):
                c = parse_cluster(c)
            if c in exc:
                raise PreconditionError(f"duplicate branch {c}")
            exc[c] = p
        self.exceptional = exc
        self.tails = tuple(tails)

    @classmethod
    def constant(cls, c):
        return cls(c)

    def clusters(self):
        return sorted(self.exceptional, key=PointCluster.sort_key)

    def default_profile(self):
        return BranchProfile.constant(self.v0)

    def tail_hit(self, x):
        """``(tail, n)`` when ``x`` is exactly a tail point, else None."""
        for tl in self.tails:
            n = tl.index_of(x)
            if n is not None:
                return tl, n
        return None

    def profile_at(self, x):
        """Profile on the branch toward every point of cluster ``x``.

        Raises when ``x`` straddles branches with different profiles.
        """
        if x.is_infinity:
            return self.exceptional.get(INF, self.default_profile())
        found = []
        covered = Poly.const(1)
        for c, p in self.exceptional.items():
            if c.is_infinity:
                continue
            g = poly_gcd(x.poly, c.poly)
            if g.degree > 0:
                found.append(p)
                covered = covered * g
        rest = x.poly.exact_div(covered) if covered.degree > 0 else x.poly
        if rest.degree > 0:
            rest_c = PointCluster(rest, check=False)
            hits = 0
            for tl in self.tails:
                for n in tl.indices_in(rest_c):
                    found.append(tl.profile(self.v0, n))
                    hits += 1
            if hits < rest.degree:
                found.append(self.default_profile())
        first = found[0]
        if any(p != first for p in found[1:]):
            raise PreconditionError(f"cluster {x} straddles branches with different profiles")
        return first

    def __call__(self, p):
        return eval_green_fn(self, p)

    def shift(self, c):
        c = as_fraction(c)
        return GreenFunction(self.v0 + c, {x: p.shift(c) for x, p in self.exceptional.items()},
                             self.tails)

    def scale(self, k):
        k = as_fraction(k)
        if k == 0:
            return GreenFunction(0)
        return GreenFunction(self.v0 * k, {x: p.scale(k) for x, p in self.exceptional.items()},
                             tuple(GeometricTail(t.c0, t.c1, t.n0, t.ratio, t.psi.scale(k))
                                   for t in self.tails))

    def refined_against(self, clusters):
        """Exceptional data re-expressed on a refinement that also splits ``clusters``."""
        basis, _ = refine_supports(list(self.exceptional), list(clusters))
        return {b: self.profile_at(b) for b in basis}

    def semantic_equal(self, other):
        if self.v0 != other.v0:
            return False
        if len(self.tails) != len(other.tails) or any(
                not (a.same_rule(b) and a.psi == b.psi) for a, b in zip(self.tails, other.tails)):
            return False
        basis, _ = refine_supports(list(self.exceptional), list(other.exceptional))
        return all(self.profile_at(b) == other.profile_at(b) for b in basis)

    def __eq__(self, other):
        return isinstance(other, GreenFunction) and self.semantic_equal(other)

    def __hash__(self):
        return hash(self.v0)

    def __repr__(self):
        body = ", ".join(f"{c}: {p}" for c, p in sorted(self.exceptional.items(),
                                                          key=lambda kv: kv[0].sort_key()))
        return f"GreenFunction(v0={self.v0}, {{{body}}}, tails={len(self.tails)})"


def _canonical_exceptional(v0, exc):
    """Drop branches whose profile is the default constant."""
    default = BranchProfile.constant(v0)
    return {c: p for c, p in exc.items() if p != default}


@dataclass(frozen=True)
class AdelicDivisor:
    """A pair ``(D, g)``."""

    D: RDivisor
    g: GreenFunction

    def __eq__(self, other):
        return isinstance(other, AdelicDivisor) and self.D == other.D and self.g == other.g

    def __hash__(self):
        return hash((self.D, self.g))

    def shift(self, c):
        return AdelicDivisor(self.D, self.g.shift(c))

    def scale(self, k):
        return AdelicDivisor(self.D.scale(k), self.g.scale(k))

    def __add__(self, other):
        return add_adelic(self, other)


def validate(A):
    """List of violations (empty when ``A`` is a valid adelic divisor)."""
    out = []
    g, D = A.g, A.D
    clusters = g.clusters()
    for i, a in enumerate(clusters):
        for b in clusters[i + 1:]:
            if not a.coprime_to(b):
                out.append(f"branches {a} and {b} are not coprime")
    for c in clusters:
        p = g.exceptional[c]
        if p.v0 != g.v0:
            out.append(f"branch {c}: profile(0) = {p.v0} differs from v0 = {g.v0}")
        try:
            o = D.ord(c)
        except PreconditionError:
            out.append(f"branch {c}: straddles divisor clusters with different coefficients")
            continue
        if p.final_slope != o:
            out.append(f"branch {c}: slope {p.final_slope} differs from ord = {o}")
    for x, a in D.items():
        try:
            covered = any(x.divides(c) for c in clusters)
            if not covered and a != 0:
                out.append(f"divisor cluster {x}: not in the exceptional set (slope 0 differs from ord = {a})")
        except PreconditionError as exc:
            out.append(f"divisor cluster {x}: {exc}")
    for i, tl in enumerate(g.tails):
        out.extend(f"tail {i}: {v[6:]}" for v in tl.violations())
        if tl.c1 == 0:
            continue
        for c in clusters:
            hit = tl.indices_in(c)
            if hit:
                out.append(f"tail {i}: point {tl.point(hit[0])} overlaps branch {c}")
        for x in D.support():
            hit = tl.indices_in(x)
            if hit:
                out.append(f"tail {i}: point {tl.point(hit[0])} lies in Supp(D)")
        for j in range(i):
            if g.tails[j].c1 != 0 and _tails_overlap(g.tails[j], tl):
                out.append(f"tails {j} and {i} share points")
    return out


def check_valid(A):
    v = validate(A)
    if v:
        raise ValidationError(v)
    return A


def eval_green_fn(g, p):
    if p.is_root:
        return g.v0
    return g.profile_at(p.branch)(p.t)


def eval_green(A, p):
    return eval_green_fn(A.g, p)


def _all_tail_hits(g, s_support):
    for x in s_support:
        for tl in g.tails:
            if tl.indices_in(x):
                return x
    return None


def add_principal(A, s):
    """``(D + (s), g - log|s|)``: the branch toward ``x`` gains slope ``ord_x(s)``."""
    if s.is_one():
        return A
    supp = s.support()
    bad = _all_tail_hits(A.g, supp)
    if bad is not None:
        raise PreconditionError(f"function support {bad} collides with a geometric tail")
    g = A.g
    pieces = g.refined_against(supp)
    for b in list(pieces):
        pieces[b] = pieces[b].add_linear(s.ord(b))
    D = A.D + principal_divisor(s)
    return AdelicDivisor(D, GreenFunction(g.v0, _canonical_exceptional(g.v0, pieces), g.tails))


def principal_adelic(s):
    """The principal adelic divisor of ``s``."""
    return add_principal(AdelicDivisor(RDivisor(), GreenFunction(0)), s)


def add_adelic(A, B):
    """Sum of two adelic divisors; tails must be compatible."""
    ga, gb = A.g, B.g
    v0 = ga.v0 + gb.v0
    tails = []
    used_b = set()
    for ta in ga.tails:
        match = next((j for j, tb in enumerate(gb.tails) if j not in used_b and ta.same_rule(tb)), None)
        if match is not None:
            used_b.add(match)
            tails.append(GeometricTail(ta.c0, ta.c1, ta.n0, ta.ratio, ta.psi + gb.tails[match].psi))
        else:
            tails.append(ta)
    tails.extend(tb for j, tb in enumerate(gb.tails) if j not in used_b)
    for i, t1 in enumerate(tails):
        for t2 in tails[:i]:
            if _tails_overlap(t1, t2):
                raise PreconditionError("cannot add Green functions with incompatible tails")
    for own, other in ((ga, gb), (gb, ga)):
        for tl in own.tails:
            if any(tl.indices_in(c) for c in other.exceptional):
                raise PreconditionError("a tail of one summand meets an exceptional branch of the other")
    basis, _ = refine_supports(list(ga.exceptional), list(gb.exceptional))
    exc = {b: ga.profile_at(b) + gb.profile_at(b) for b in basis}
    return AdelicDivisor(A.D + B.D, GreenFunction(v0, _canonical_exceptional(v0, exc), tuple(tails)))


def is_effective(A):
    """``D >= 0`` and ``g >= 0`` everywhere (as an extended-real function)."""
    if not A.D.is_effective():
        return False
    g = A.g
    if g.v0 < 0:
        return False
    if any(p.minimum() < 0 for p in g.exceptional.values()):
        return False
    # r^n decreases, so the deepest dip of a tail is at its first index
    return all(g.v0 + tl.ratio ** tl.n0 * tl.psi.minimum() >= 0 for tl in g.tails)


def height(A, p):
    """``h(x, t) = g_x(t) - t ord_x(D)``, finite also at leaves."""
    g = A.g
    if p.is_root:
        return g.v0
    prof = g.profile_at(p.branch)
    o = A.D.ord(p.branch)
    if p.t == inf:
        if prof.final_slope != o:
            raise PreconditionError("profile slope differs from ord; invalid adelic divisor")
        return prof.leaf_limit()
    return prof(p.t) - p.t * o


def essential_minimum(A):
    return A.g.v0


# builders used in tests, examples and the command line

def logmax_divisor():
    """``([inf], log max{1, |z|})``."""
    prof = BranchProfile.linear(0, 1)
    return AdelicDivisor(RDivisor({INF: 1}), GreenFunction(0, {INF: prof}))


def projective_line_divisor(q0, q1):
    """``([inf], log max{e^q0, e^q1 |z|})`` in log-parameters."""
    q0, q1 = as_fraction(q0), as_fraction(q1)
    v0 = max(q0, q1)
    exc = {INF: BranchProfile.envelope([(q0, 0), (q1, 1)]),
           PointCluster.root(0): BranchProfile.envelope([(q0, 0), (q1, -1)])}
    return AdelicDivisor(RDivisor({INF: 1}), GreenFunction(v0, _canonical_exceptional(v0, exc)))


def dipping_tail():
    """Tail ``x_n = z - n`` (n >= 1) with ratio 1/2 and ``psi(t) = -min(t, 1)``."""
    return GeometricTail(0, 1, 1, Fraction(1, 2), BranchProfile([(0, 0), (1, -1)], 0))


def with_tails(A, tails):
    g = A.g
    return AdelicDivisor(A.D, GreenFunction(g.v0, g.exceptional, tuple(g.tails) + tuple(tails)))
