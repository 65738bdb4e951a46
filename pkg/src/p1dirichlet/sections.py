"""Global sections, sup norms, the norm filtration and its asymptotic invariants.

Over a trivially valued field the sup norm of a section only depends on its
order vector: on the branch toward ``x`` one has ``-log|s|_{ng} = t m + n g(t)``
with ``m = ord_x(s)``, so

    -log ||s|| = min(n v0, min_x B_x(m_x)),   B_x(m) = min_i (tau_i m + n g_i).

Each ``B_x`` is nondecreasing in ``m``.  Consequently the filtration step
``F^t`` is the Riemann-Roch space of an explicit divisor ``E_t`` whose
coefficient at ``x`` is ``-L_x(t)``, where ``L_x(t)`` is the least admissible
order with ``B_x >= t``.  Ranks follow from ``h0`` on P^1.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, inf

from .divisors import INF, FormalRationalFunction, PointCluster, refine_supports
from .errors import PreconditionError
from .green import AdelicDivisor, GreenFunction, BranchProfile
from .mu import promote_tail_prefix, profile_mu
from .polynomials import as_fraction


def _ceil(q):
    return -((-q.numerator) // q.denominator)


def _floor(q):
    return q.numerator // q.denominator


def h0_dimension(D, n=1):
    """``max(0, 1 + sum floor(n a_x) deg x)``."""
    n = int(n)
    total = 1 + sum(_floor(n * a) * c.degree for c, a in D.items())
    return max(0, total)


@dataclass
class _Branch:
    cluster: PointCluster
    deg: int
    low: int            # ceil(-n a_x)
    pts: list           # (tau, n * g(tau)) for tau > 0

    def L(self, t):
        """Least admissible order with ``B >= t`` (ignoring the root cap)."""
        m = self.low
        for tau, nv in self.pts:
            k = _ceil((t - nv) / tau)
            if k > m:
                m = k
        return m

    def L_after(self, t):
        """``L`` just to the right of ``t``."""
        m = self.low
        for tau, nv in self.pts:
            k = _floor((t - nv) / tau) + 1
            if k > m:
                m = k
        return m

    def next_event(self, m):
        """Largest ``t`` with ``L(t) <= m``."""
        if not self.pts:
            return inf
        return min(nv + tau * m for tau, nv in self.pts)


def _tail_dip_start(g, tl):
    """``v0 + r^{n0} min psi``: the lowest value of a tail branch."""
    return g.v0 + tl.ratio ** tl.n0 * tl.psi.minimum()


@dataclass
class _Model:
    n: int
    dim: int
    cap: object
    branches: list
    A: AdelicDivisor

    def sigma(self, t):
        return sum(b.L(t) * b.deg for b in self.branches)

    def rank(self, t):
        if t > self.cap:
            return 0
        return max(0, 1 - self.sigma(t))

    def feasible(self, t):
        return t <= self.cap and self.sigma(t) <= 0


def _prepare(A, n):
    """Branch data for ``nA`` with dipping tails expanded far enough to be exact."""
    n = int(n)
    if n < 1:
        raise PreconditionError("n must be >= 1")
    dim = h0_dimension(A.D, n)
    g = A.g
    for i, tl in enumerate(g.tails):
        if tl.psi.minimum() < 0:
            A = promote_tail_prefix(A, i, tl.n0 + dim + 1)
            g = A.g
    cap = n * g.v0
    for tl in g.tails:
        # past the promoted prefix these branches have L = 0 up to their dip;
        # above it at least dim + 2 points need a zero, which kills every section
        if tl.psi.minimum() < 0:
            cap = min(cap, n * _tail_dip_start(g, tl))
    branches = []
    for c in g.clusters():
        prof = g.exceptional[c]
        a = A.D.ord(c)
        pts = [(t, n * v) for t, v in zip(prof.ts, prof.vs) if t > 0]
        branches.append(_Branch(c, c.degree, _ceil(-n * a), pts))
    return _Model(n, dim, cap, branches, A)


@dataclass
class FiltrationTable:
    """Step function ``t -> rank F^t``.

    ``jumps`` lists ``(t_j, r_j)`` with increasing ``t_j`` and strictly
    decreasing ``r_j``: the rank is ``r_j`` on ``(t_{j-1}, t_j]`` (``r_1`` for
    every ``t <= t_1``) and 0 above ``lambda_max = t_last``.
    """

    n: int
    dimension: int
    jumps: list = field(default_factory=list)
    lambda_max: object = -inf

    def rank(self, t):
        for tj, rj in self.jumps:
            if t <= tj:
                return rj
        return 0

    def csv_rows(self):
        from .polynomials import format_rational as fr
        return ["t,rank"] + [f"{fr(t)},{r}" for t, r in self.jumps]


def _sweep(model):
    if model.dim == 0:
        return []
    Ls = [b.low for b in model.branches]
    rank = model.dim
    jumps = []
    while True:
        c = min([model.cap] + [b.next_event(m) for b, m in zip(model.branches, Ls)])
        if c >= model.cap:
            jumps.append((model.cap, rank))
            return jumps
        Ls = [max(m, b.L_after(c)) for b, m in zip(model.branches, Ls)]
        new_rank = max(0, 1 - sum(m * b.deg for b, m in zip(model.branches, Ls)))
        if new_rank < rank:
            jumps.append((c, rank))
            rank = new_rank
        if rank == 0:
            return jumps


def filtration(A, n):
    model = _prepare(A, n)
    jumps = _sweep(model)
    lam = jumps[-1][0] if jumps else -inf
    return FiltrationTable(model.n, model.dim, jumps, lam)


def _largest_critical_below(model, hi):
    best = None
    for b in model.branches:
        for tau, nv in b.pts:
            k = _ceil((hi - nv) / tau) - 1
            if k < b.low:
                continue
            v = nv + tau * k
            if best is None or v > best:
                best = v
    return best


def lambda_max_n(A, n):
    """``sup{t : F^t != 0}`` for ``nA``, by bisection on the target value."""
    model = _prepare(A, n)
    if model.dim == 0:
        return -inf
    if model.feasible(model.cap):
        return model.cap
    lo = min([model.cap] + [nv + tau * b.low for b in model.branches for tau, nv in b.pts])
    if not model.feasible(lo):
        raise RuntimeError("internal error: lowest critical value infeasible")
    hi = model.cap
    while True:
        c = _largest_critical_below(model, hi)
        if c is None or c < lo:
            return lo
        if model.feasible(c):
            return c
        hi = c
        mid = (lo + hi) / 2
        if model.feasible(mid):
            lo = mid
        else:
            hi = mid


def deg_plus(A, n):
    """``int_0^inf rank F^t dt`` for ``nA``."""
    table = filtration(A, n)
    return deg_plus_from_table(table)


def deg_plus_from_table(table):
    total = Fraction(0)
    prev = -inf
    for tj, rj in table.jumps:
        left = max(prev, Fraction(0))
        if tj > left:
            total += rj * (tj - left)
        prev = tj
    return total


def _promote_for_function(A, s):
    for i, tl in enumerate(A.g.tails):
        hits = [k for x in s.support() for k in tl.indices_in(x)]
        if hits:
            A = promote_tail_prefix(A, i, max(hits) + 1)
    return A


def in_h0(A, s, n=1):
    basis, _ = refine_supports(list(A.g.exceptional), s.support(), A.D.support())
    return all(s.ord(b) >= -n * A.D.ord(b) for b in basis)


def section_norm(A, s, n=1):
    """``-log ||s||_{ng}`` for ``s`` in ``H0(nD)`` with integer exponents."""
    n = int(n)
    if not s.is_integral():
        raise PreconditionError("sections need integer exponents")
    if not in_h0(A, s, n):
        raise PreconditionError("function is not a section of H0(nD)")
    A = _promote_for_function(A, s)
    g = A.g
    best = n * g.v0
    basis, _ = refine_supports(list(g.exceptional), s.support())
    for b in basis:
        prof = g.profile_at(b)
        m = s.ord(b)
        if m + n * prof.final_slope < 0:
            return -inf
        val = min(tau * m + n * v for tau, v in zip(prof.ts, prof.vs))
        best = min(best, val)
    for tl in g.tails:
        best = min(best, n * _tail_dip_start(g, tl))
    return best


# continuous relaxation

def _lines_for(prof, a):
    """Affine pieces of ``t -> min(a, min_i (g_i - t)/tau_i)``."""
    lines = [(Fraction(0), as_fraction(a))]
    for t, v in zip(prof.ts, prof.vs):
        if t > 0:
            lines.append((-1 / t, v / t))
    return lines


class _ConcaveSum:
    """``S(t) = sum_b deg_b * min_{(s, c) in lines_b} (s t + c)``."""

    def __init__(self, parts):
        self.parts = parts
        bps = set()
        for _, lines in parts:
            for i, (s1, c1) in enumerate(lines):
                for s2, c2 in lines[i + 1:]:
                    if s1 != s2:
                        bps.add((c2 - c1) / (s1 - s2))
        self.bps = sorted(bps)

    def __call__(self, t):
        return sum((d * min(s * t + c for s, c in lines) for d, lines in self.parts),
                   Fraction(0))

    def last_nonneg(self, upper):
        """``sup{t <= upper : S(t) >= 0}`` (``-inf`` when empty)."""
        if self(upper) >= 0:
            return upper
        pts = [b for b in self.bps if b < upper]
        prev = upper
        for p in reversed(pts):
            sp = self(p)
            if sp >= 0:
                sq = self(prev)
                return p + sp * (prev - p) / (sp - sq)
            prev = p
        # left of every breakpoint S is constant (= sum deg * a)
        return -inf

    def integral(self, lo, hi):
        if hi <= lo:
            return Fraction(0)
        pts = [lo] + [b for b in self.bps if lo < b < hi] + [hi]
        total = Fraction(0)
        for p, q in zip(pts, pts[1:]):
            total += (self(p) + self(q)) * (q - p) / 2
        return total


def _exceptional_parts(A):
    g = A.g
    return [(c.degree, _lines_for(g.exceptional[c], A.D.ord(c))) for c in g.clusters()]


def _tail_parts(g, tl, k):
    return (1, _lines_for(tl.profile(g.v0, k), 0))


def _dipping(g):
    return [tl for tl in g.tails if tl.psi.minimum() < 0]


def _relaxation(A):
    """``(lambda_star, S)`` where ``S`` is exact on ``(-inf, lambda_star]``."""
    g = A.g
    parts = _exceptional_parts(A)
    tails = _dipping(g)
    S = _ConcaveSum(parts)
    if not tails:
        return S.last_nonneg(g.v0), S
    s_v0 = S(g.v0) + sum(profile_mu(tl.psi) * tl.ratio ** tl.n0 / (1 - tl.ratio) for tl in tails)
    if s_v0 >= 0:
        return g.v0, None
    # tail k is active only above T_k = v0 + r^k min psi, increasing to v0
    K = 0
    while True:
        extra = []
        bound = g.v0
        for tl in tails:
            for k in range(tl.n0, tl.n0 + K):
                extra.append(_tail_parts(g, tl, k))
            bound = min(bound, g.v0 + tl.ratio ** (tl.n0 + K) * tl.psi.minimum())
        SK = _ConcaveSum(parts + extra)
        if SK(bound) < 0:
            return SK.last_nonneg(bound), SK
        K += 1


def lambda_star(A):
    return _relaxation(A)[0]


def _chi_integral(psi):
    """``int_{min psi}^0 min(0, min_i (psi_i - w)/tau_i) dw``."""
    S = _ConcaveSum([(1, _lines_for(psi, 0))])
    return S.integral(psi.minimum(), Fraction(0))


def volume_exact(A):
    lam, S = _relaxation(A)
    if lam == -inf or lam <= 0:
        return Fraction(0)
    if S is not None:
        return 2 * S.integral(Fraction(0), lam)
    g = A.g
    total = _ConcaveSum(_exceptional_parts(A)).integral(Fraction(0), g.v0)
    for tl in _dipping(g):
        k = tl.n0
        while g.v0 + tl.ratio ** k * tl.psi.minimum() < 0:
            total += _ConcaveSum([_tail_parts(g, tl, k)]).integral(Fraction(0), g.v0)
            k += 1
        r2 = tl.ratio ** 2
        total += _chi_integral(tl.psi) * r2 ** k / (1 - r2)
    return 2 * total


def _map(fn, args, jobs):
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, *zip(*args)))
    return [fn(*a) for a in args]


@dataclass
class AsymptoticMax:
    exact: object
    lower_bounds: list


def lambda_max_asy(A, n_sweep=8, jobs=None):
    """Exact ``lambda_max^asy`` with the certified lower bounds ``lambda_max(n)/n``."""
    lam = lambda_star(A)
    vals = _map(lambda_max_n, [(A, n) for n in range(1, n_sweep + 1)], jobs)
    lows = [(n, v / n if v != -inf else -inf) for n, v in zip(range(1, n_sweep + 1), vals)]
    for _, lb in lows:
        if not lb <= lam:
            raise RuntimeError("internal error: lambda_max(n)/n exceeds the asymptotic value")
    if not lam <= A.g.v0:
        raise RuntimeError("internal error: asymptotic maximum exceeds v0")
    return AsymptoticMax(lam, lows)


@dataclass
class VolumeReport:
    exact: object
    sequence: list

    def csv_rows(self):
        from .polynomials import format_rational as fr
        return (["n,estimate"] + [f"{n},{fr(v)}" for n, v in self.sequence]
                + [f"exact: {fr(self.exact)}"])


def volume(A, n_sweep=8, jobs=None):
    exact = volume_exact(A)
    dps = _map(deg_plus, [(A, n) for n in range(1, n_sweep + 1)], jobs)
    seq = [(n, 2 * d / (n * n)) for n, d in zip(range(1, n_sweep + 1), dps)]
    return VolumeReport(exact, seq)


@dataclass
class BigReport:
    big: bool
    n: int = None
    section: FormalRationalFunction = None
    value: object = None


def is_big(A, max_n=64):
    """Bigness with a witness section of positive ``-log`` norm."""
    if A.D.degree <= 0:
        return BigReport(False)
    lam = lambda_star(A)
    if not lam > 0:
        return BigReport(False)
    for n in range(1, max_n + 1):
        model = _prepare(A, n)
        lmax = lambda_max_n(A, n)
        if lmax != -inf and lmax > 0:
            exps = {}
            for b in model.branches:
                m = b.L(lmax)
                if m and not b.cluster.is_infinity:
                    exps[b.cluster] = m
            s = FormalRationalFunction(exps)
            val = section_norm(A, s, n)
            if not val >= lmax:
                raise RuntimeError("internal error: bigness witness too small")
            return BigReport(True, n, s, val)
    raise RuntimeError("no bigness witness found within max_n tensor powers")


def is_pseudoeffective_by_lambda(A):
    """``lambda_max^asy >= 0`` for ``deg D > 0``."""
    if A.D.degree <= 0:
        raise PreconditionError("criterion requires D big (deg D > 0)")
    return lambda_star(A) >= 0
