"""Endomorphisms of P^1, pullbacks on the tree, and canonical Green functions.

An endomorphism is given in affine form ``z -> p(z)/q(z)`` with coprime
``p, q`` and ``d = max(deg p, deg q) >= 2``.  On the tree, the branch toward
``x`` at parameter ``t`` maps to the branch toward ``f(x)`` at ``e_x t``,
where ``e_x`` is the local degree.  Local degrees are read off squarefree
decompositions of ``u(p/q)`` numerators, never from derivatives.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import inf

from .divisors import (
    INF, FormalRationalFunction, PointCluster, RDivisor, principal_divisor,
    refine_supports,
)
from .errors import PreconditionError
from .green import (
    AdelicDivisor, BranchProfile, GreenFunction, TreePoint, add_adelic,
    add_principal, height, principal_adelic, validate, _canonical_exceptional,
)
from .mu import decide_dirichlet, mu_tot, profile_mu
from .polynomials import (
    Poly, as_fraction, format_rational, interpolate, parse_poly, poly_gcd,
    squarefree_decompose, squarefree_part, sylvester_resultant,
)


class Endomorphism:
    """``z -> p(z)/q(z)`` of degree ``d >= 2``."""

    __slots__ = ("p", "q", "d", "_hash")

    def __init__(self, p, q=None):
        if isinstance(p, str):
            p = parse_poly(p)
        if q is None:
            q = Poly.const(1)
        elif isinstance(q, str):
            q = parse_poly(q)
        if p.is_zero() or q.is_zero():
            raise PreconditionError("numerator and denominator must be nonzero")
        g = poly_gcd(p, q)
        if g.degree > 0:
            raise PreconditionError(f"p and q share the factor {g}")
        d = max(p.degree, q.degree)
        if d < 2:
            raise PreconditionError("endomorphism degree must be at least 2")
        # normalise so that q is monic
        lc = q.lc
        self.p = p * (1 / lc)
        self.q = q * (1 / lc)
        self.d = d
        self._hash = hash((self.p, self.q))

    @classmethod
    def polynomial(cls, p):
        return cls(p, Poly.const(1))

    def __eq__(self, other):
        return isinstance(other, Endomorphism) and self.p == other.p and self.q == other.q

    def __hash__(self):
        return self._hash

    def __call__(self, a):
        """Image of a rational number or of ``inf`` (returned as ``None``)."""
        if a is None:
            if self.p.degree > self.q.degree:
                return None
            if self.p.degree == self.q.degree:
                return self.p.lc / self.q.lc
            return Fraction(0)
        den = self.q(a)
        if den == 0:
            return None
        return self.p(a) / den

    def resultant(self):
        return sylvester_resultant(self.p, self.q, self.d, self.d)

    def __repr__(self):
        return f"Endomorphism(({self.p}) / ({self.q}))"


def _numerator(f, u):
    """``sum u_k p^k q^{e-k}`` for a finite cluster polynomial ``u`` of degree ``e``."""
    e = u.degree
    if f.q.is_one():
        return u.compose(f.p)
    acc = Poly()
    for k, c in u.terms():
        acc = acc + (f.p ** k) * (f.q ** (e - k)) * c
    return acc


@lru_cache(maxsize=4096)
def preimage_pieces(f, y):
    """``f^*[y]`` as ``[(cluster, multiplicity), ...]`` with pairwise coprime clusters."""
    if y.is_infinity:
        pieces = [(PointCluster(r, check=False), j) for r, j in squarefree_decompose(f.q)]
        at_inf = f.d - f.q.degree
    else:
        N = _numerator(f, y.poly)
        pieces = [(PointCluster(r, check=False), j) for r, j in squarefree_decompose(N)]
        at_inf = f.d * y.degree - N.degree
    if at_inf > 0:
        pieces.insert(0, (INF, at_inf))
    return tuple(pieces)


def pullback_divisor(f, D):
    pairs = []
    for y, a in D.items():
        for r, j in preimage_pieces(f, y):
            pairs.append((r, a * j))
    return RDivisor(pairs)


def pullback_function(f, s):
    """``s o f`` as a formal function (constants dropped)."""
    out = FormalRationalFunction.one()
    pairs = []
    for u, e in s.items():
        for r, j in squarefree_decompose(_numerator(f, u.poly)):
            pairs.append((PointCluster(r, check=False), e * j))
        if f.q.degree > 0:
            for r, j in squarefree_decompose(f.q):
                pairs.append((PointCluster(r, check=False), -e * u.degree * j))
    if pairs:
        out = FormalRationalFunction(pairs)
    return out


def _image_poly(f, u):
    """Squarefree polynomial whose roots are ``f(a)`` for the roots ``a`` of ``u`` (no poles)."""
    e = u.degree
    nodes = list(range(e + 1))
    vals = []
    for z0 in nodes:
        h = f.q * z0 - f.p
        vals.append(sylvester_resultant(u, h, e, f.d))
    R = interpolate([Fraction(x) for x in nodes], vals)
    if R.degree <= 0:
        raise RuntimeError("internal error: empty image")
    return squarefree_part(R)


@lru_cache(maxsize=4096)
def pushforward_cluster(f, x):
    """Split ``x`` into pieces with a single image cluster and local degree.

    Returns ``[(piece, image, e), ...]``; the branch toward a point of ``piece``
    at parameter ``t`` maps to the branch toward its image at ``e t``.
    """
    out = []
    if x.is_infinity:
        a = f(None)
        image = INF if a is None else PointCluster.root(a)
        e = dict(preimage_pieces(f, image)).get(INF)
        out.append((INF, image, e))
        return tuple(out)
    u = x.poly
    u_pole = poly_gcd(u, f.q) if f.q.degree > 0 else Poly.const(1)
    if u_pole.degree > 0:
        for r, j in preimage_pieces(f, INF):
            if r.is_infinity:
                continue
            g = poly_gcd(u_pole, r.poly)
            if g.degree > 0:
                out.append((PointCluster(g, check=False), INF, j))
    u_fin = u.exact_div(u_pole) if u_pole.degree > 0 else u
    if u_fin.degree > 0:
        y = _image_poly(f, u_fin)
        for r, j in preimage_pieces(f, PointCluster(y, check=False)):
            if r.is_infinity:
                continue
            g = poly_gcd(u_fin, r.poly)
            if g.degree > 0:
                img = PointCluster(_image_poly(f, g), check=False)
                out.append((PointCluster(g, check=False), img, j))
    return tuple(out)


def pullback_green(f, g):
    """``(f^an)^* g``: profile at a preimage piece of ``y`` with multiplicity ``j`` is ``g_y(j t)``."""
    if g.tails:
        raise PreconditionError("pullback of geometric tails is not supported")
    exc = {}
    for y in g.clusters():
        prof = g.exceptional[y]
        for r, j in preimage_pieces(f, y):
            exc[r] = prof.reparametrize(j)
    return GreenFunction(g.v0, _canonical_exceptional(g.v0, exc))


def pullback_adelic(f, A):
    return AdelicDivisor(pullback_divisor(f, A.D), pullback_green(f, A.g))


def check_eigen(f, D, d, phi):
    """Exact check of ``f^* D = d D + (phi)``."""
    d = as_fraction(d)
    return pullback_divisor(f, D) == D.scale(d) + principal_divisor(phi)


@dataclass(frozen=True)
class EigenData:
    f: Endomorphism
    D: RDivisor
    d: Fraction
    phi: FormalRationalFunction

    def __post_init__(self):
        object.__setattr__(self, "d", as_fraction(self.d))
        if not self.d > 1:
            raise PreconditionError("eigenvalue d must exceed 1")
        if not check_eigen(self.f, self.D, self.d, self.phi):
            raise PreconditionError("f^*(D) differs from d D + (phi)")


def _sup_norm(g):
    vals = [abs(g.v0)]
    for p in g.exceptional.values():
        if p.final_slope != 0:
            return inf
        vals.extend(abs(v) for v in p.vs)
    return max(vals)


def _sup_diff(g1, g2):
    """Exact ``sup |g1 - g2|`` (both without tails, same divisor)."""
    basis, _ = refine_supports(list(g1.exceptional), list(g2.exceptional))
    best = abs(g1.v0 - g2.v0)
    for b in basis:
        diff = g1.profile_at(b) - g2.profile_at(b)
        best = max(best, diff.sup_abs())
    return best


def error_bound(lam_norm, d, m):
    return lam_norm / (d ** m * (d - 1))


@dataclass
class CanonicalGreenResult:
    g_m: GreenFunction
    error_bound: Fraction
    exact_branches: set
    steps: int
    lam: GreenFunction
    lam_norm: Fraction
    gaps: list = field(default_factory=list)


def defect(E, g0):
    """``lambda = f^* g0 - d g0 + log|phi|`` as a Green function of the zero divisor."""
    A0 = AdelicDivisor(E.D, g0)
    pulled = pullback_adelic(E.f, A0)
    rest = add_adelic(A0.scale(-E.d), principal_adelic(E.phi).scale(-1))
    L = add_adelic(pulled, rest)
    if not L.D.is_zero():
        raise RuntimeError("internal error: eigen relation failed in defect computation")
    for c, p in L.g.exceptional.items():
        if p.final_slope != 0:
            raise RuntimeError(f"internal error: unbounded defect on branch {c}")
    return L.g


def _orbit_profile(E, lam, g0, x, horizon):
    """Exact canonical profile on the branch toward ``x`` when its orbit is detected
    eventually periodic with a summable cycle; otherwise None."""
    d = E.d
    seq = []
    seen = {}
    c = x
    scale = Fraction(1)
    for _ in range(horizon + 1):
        if c in seen:
            break
        try:
            lp = lam.profile_at(c)
        except PreconditionError:
            return None
        seen[c] = len(seq)
        seq.append((c, scale, lp))
        pieces = pushforward_cluster(E.f, c)
        if len(pieces) != 1:
            return None
        _, img, e = pieces[0]
        c = img
        scale = scale * e
    else:
        return None
    start = seen[c]
    period = len(seq) - start
    cycle_scale = scale / seq[start][1]
    zero = BranchProfile.constant(0)
    cycle_zero = all(lp == zero for _, _, lp in seq[start:])
    if not cycle_zero and cycle_scale != 1:
        return None
    prof = g0.profile_at(x)
    for i, (_, s, lp) in enumerate(seq[:start]):
        prof = prof + lp.reparametrize(s).scale(d ** -(i + 1))
    if not cycle_zero:
        block = BranchProfile.constant(0)
        for i in range(start, len(seq)):
            _, s, lp = seq[i]
            block = block + lp.reparametrize(s).scale(d ** -(i + 1))
        prof = prof + block.scale(1 / (1 - d ** -period))
    return prof


def canonical_green(E, g0, steps=None, tol=None, horizon=32, max_degree=2048):
    """Iterates ``g_m = g0 + sum_{i<m} d^{-(i+1)} (f^i)^* lambda`` with a certified bound.

    ``g0`` is first shifted so that ``g0(eta0) = 0``; then ``lambda`` vanishes at
    the root and so does every iterate.
    """
    if g0.tails:
        raise PreconditionError("canonical Green functions need a Green function without tails")
    v = validate(AdelicDivisor(E.D, g0))
    if v:
        raise PreconditionError("initial Green function is invalid: " + "; ".join(v))
    d = E.d
    g0 = g0.shift(-g0.v0)
    lam = defect(E, g0)
    lam_norm = _sup_norm(lam)
    if steps is None and tol is None:
        steps = 8
    if steps is None:
        tol = as_fraction(tol)
        if tol <= 0:
            raise PreconditionError("tolerance must be positive")
        steps = 0
        while error_bound(lam_norm, d, steps) > tol:
            steps += 1
    g = g0
    term = lam
    gaps = []
    for i in range(steps):
        if sum(c.degree for c in term.exceptional) > max_degree:
            raise PreconditionError(
                f"iterate {i} needs more than {max_degree} points of exceptional support; "
                "lower the step count or raise max_degree")
        inc = term.scale(d ** -(i + 1))
        gaps.append(_sup_norm(inc))
        if inc.exceptional:
            g = add_adelic(AdelicDivisor(RDivisor(), g), AdelicDivisor(RDivisor(), inc)).g
        if i + 1 < steps:
            term = pullback_green(E.f, term)
    exact = set()
    if lam_norm == 0:
        exact = set(g.exceptional)
        bound = Fraction(0)
    else:
        bound = error_bound(lam_norm, d, steps)
        exc = dict(g.exceptional)
        for c in list(exc):
            prof = _orbit_profile(E, lam, g0, c, horizon)
            if prof is not None:
                exc[c] = prof
                exact.add(c)
        g = GreenFunction(g.v0, _canonical_exceptional(g.v0, exc))
    return CanonicalGreenResult(g, bound, exact, steps, lam, lam_norm, gaps)


@dataclass
class HeightCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class HeightReport:
    checks: list

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        return [f"{c.name}: {'ok' if c.passed else 'FAIL'}{' (' + c.detail + ')' if c.detail else ''}"
                for c in self.checks]


def _sample_points(g, extra=3):
    pts = []
    clusters = list(g.clusters())
    k = 0
    added = 0
    while added < extra:
        c = PointCluster.root(k)
        k += 1
        if any(not c.coprime_to(x) for x in clusters):
            continue
        clusters.append(c)
        added += 1
    for c in clusters:
        prof = g.profile_at(c)
        ts = set(prof.ts) | {Fraction(1, 2), Fraction(1), Fraction(2), prof.ts[-1] + 1}
        for t in sorted(ts):
            if t > 0:
                pts.append(TreePoint(c, t))
        pts.append(TreePoint(c, inf))
    return pts


def canonical_height_checks(E, result):
    g = result.g_m
    A = AdelicDivisor(E.D, g)
    err = result.error_bound
    d = E.d
    tol_f = (d + 1) * err
    checks = []
    root = g.v0
    checks.append(HeightCheck("g(eta0) = 0", abs(root) <= err, f"g(eta0) = {format_rational(root)}"))
    worst = Fraction(0)
    skipped = 0
    for p in _sample_points(g):
        for piece, img, e in pushforward_cluster(E.f, p.branch):
            try:
                h_img = height(A, TreePoint(img, p.t * e if p.t != inf else inf))
                h_here = height(A, TreePoint(piece, p.t))
            except PreconditionError:
                skipped += 1
                continue
            worst = max(worst, abs(h_img - d * h_here))
    checks.append(HeightCheck("h(f(x)) = d h(x)", worst <= tol_f,
                              f"max defect {format_rational(worst)}, allowed {format_rational(tol_f)}"
                              + (f", {skipped} straddling samples skipped" if skipped else "")))
    if E.D.degree >= 0:
        low = min(height(A, p) for p in _sample_points(g))
        checks.append(HeightCheck("h >= 0", low >= -err, f"min {format_rational(low)}"))
    leaves = []
    for c in list(g.clusters()) + [INF]:
        if _is_preperiodic(E.f, c):
            leaves.append(c)
    worst_leaf = Fraction(0)
    for c in leaves:
        worst_leaf = max(worst_leaf, abs(height(A, TreePoint(c, inf))))
    checks.append(HeightCheck("h = 0 at preperiodic leaves", worst_leaf <= err,
                              f"{len(leaves)} leaves, max |h| {format_rational(worst_leaf)}"))
    return HeightReport(checks)


def _is_preperiodic(f, x, horizon=32):
    seen = set()
    c = x
    for _ in range(horizon + 1):
        if c in seen:
            return True
        seen.add(c)
        pieces = pushforward_cluster(f, c)
        if len(pieces) != 1:
            return False
        c = pieces[0][1]
    return False


def is_branch_concave(g):
    """Concavity of every exceptional profile and every tail base profile."""
    out = {c: g.exceptional[c].is_concave() for c in g.clusters()}
    for i, tl in enumerate(g.tails):
        out[f"tail {i}"] = tl.psi.is_concave()
    return out


@dataclass
class ConcaveReport:
    mu_equals_ord: bool
    degree: Fraction
    pseudo_effective: bool
    dirichlet: bool
    certificate: object = None

    def lines(self):
        out = [f"mu = ord on every branch: {'yes' if self.mu_equals_ord else 'no'}",
               f"deg D: {format_rational(self.degree)}",
               f"pseudo-effective: {'yes' if self.pseudo_effective else 'no'}",
               f"dirichlet: {'yes' if self.dirichlet else 'no'}"]
        if self.certificate is not None and self.certificate.decision:
            out.append(f"witness: {self.certificate.witness}")
        return out


def concave_criteria(A):
    """For branchwise concave ``g``: Dirichlet iff pseudo-effective iff ``deg D >= 0``."""
    conc = is_branch_concave(A.g)
    if not all(conc.values()):
        bad = ", ".join(str(k) for k, v in conc.items() if not v)
        raise PreconditionError(f"not concave on {bad}; use decide_dirichlet instead")
    g = A.g
    deg = A.D.degree
    if g.v0 < 0:
        return ConcaveReport(False, deg, False, False)
    ok = all(profile_mu(g.exceptional[c]) == A.D.ord(c) for c in g.clusters())
    if not ok:
        raise RuntimeError("internal error: mu differs from ord on a concave branch")
    if mu_tot(A) != deg:
        raise RuntimeError("internal error: mu_tot differs from deg D for concave g")
    if deg >= 0:
        cert = decide_dirichlet(A)
        if not cert.decision:
            raise RuntimeError("internal error: concave criterion and decision disagree")
        return ConcaveReport(True, deg, True, True, cert)
    return ConcaveReport(True, deg, False, False)
