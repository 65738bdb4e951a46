"""Point clusters, R-divisors and formal R-rational functions on P^1.

A closed point is never factored into irreducibles.  Instead a *cluster* is a
monic squarefree polynomial standing for all of its roots at once, plus the
special cluster at infinity.  Supports are kept pairwise coprime by gcd
refinement, which is all the splitting the invariants need.
"""

from fractions import Fraction
import re

from .errors import InputError, PreconditionError
from .polynomials import (
    Poly, as_fraction, format_rational, gcd_free_basis, is_squarefree,
    parse_poly, poly_gcd, squarefree_decompose,
)

__all__ = [
    "PointCluster", "INF", "RDivisor", "FormalRationalFunction",
    "principal_divisor", "solve_principal", "refine_supports",
    "squarefree_decompose", "divisor_degree", "parse_cluster",
    "parse_function", "format_function",
]


class PointCluster:
    """A Galois-stable packet of closed points: squarefree monic polynomial or infinity."""

    __slots__ = ("poly",)

    def __init__(self, poly=None, *, check=True):
        if poly is not None:
            if isinstance(poly, str):
                poly = parse_poly(poly)
            if check:
                if poly.degree < 1:
                    raise PreconditionError(f"cluster polynomial {poly} has degree < 1")
                if poly.lc != 1:
                    raise PreconditionError(f"cluster polynomial {poly} is not monic")
                if not is_squarefree(poly):
                    raise PreconditionError(f"cluster polynomial {poly} is not squarefree")
        self.poly = poly

    @classmethod
    def infinity(cls):
        return INF

    @classmethod
    def root(cls, a):
        """The degree-one cluster ``z - a``."""
        return cls(Poly({1: 1, 0: -as_fraction(a)}), check=False)

    @property
    def is_infinity(self):
        return self.poly is None

    @property
    def degree(self):
        return 1 if self.poly is None else self.poly.degree

    def sort_key(self):
        if self.poly is None:
            return (0,)
        return (1,) + self.poly.sort_key()

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __eq__(self, other):
        return isinstance(other, PointCluster) and self.poly == other.poly

    def __hash__(self):
        return hash(("cluster", self.poly))

    def coprime_to(self, other):
        if self.poly is None or other.poly is None:
            return self.poly is not other.poly
        return poly_gcd(self.poly, other.poly).degree == 0

    def divides(self, other):
        """Every point of ``self`` lies in ``other``."""
        if self.poly is None or other.poly is None:
            return self.poly is None and other.poly is None
        return self.poly.divides(other.poly)

    def __str__(self):
        return "inf" if self.poly is None else str(self.poly)

    def __repr__(self):
        return f"PointCluster({str(self)!r})"


INF = PointCluster.__new__(PointCluster)
INF.poly = None


def parse_cluster(text):
    t = text.strip()
    if t in ("inf", "oo", "∞", "infinity"):
        return INF
    return PointCluster(parse_poly(t))


def refine_supports(*cluster_sets):
    """Common pairwise-coprime refinement of several sets of clusters.

    Returns ``(basis, expressions)``; ``expressions[i][c]`` is the list of
    basis clusters whose product is the input cluster ``c`` of set ``i``.
    """
    finite = [c.poly for s in cluster_sets for c in s if not c.is_infinity]
    basis_polys = gcd_free_basis(finite)
    basis = [PointCluster(p, check=False) for p in basis_polys]
    if any(c.is_infinity for s in cluster_sets for c in s):
        basis.insert(0, INF)
    members = set(basis)
    expressions = []
    for s in cluster_sets:
        expr = {}
        for c in s:
            if c.is_infinity:
                expr[c] = [INF]
            elif c in members:
                expr[c] = [c]
            else:
                expr[c] = [b for b in basis if not b.is_infinity and b.poly.divides(c.poly)]
        expressions.append(expr)
    return basis, expressions


def _combine(pairs, allow_inf=True):
    """Sum (cluster, coefficient) pairs over a common refined support."""
    pairs = [(c, as_fraction(a)) for c, a in pairs]
    basis, (expr,) = refine_supports([c for c, _ in pairs])
    out = {}
    for c, a in pairs:
        if c.is_infinity and not allow_inf:
            raise PreconditionError("infinity is not allowed here")
        for b in expr[c]:
            out[b] = out.get(b, 0) + a
    return {b: v for b, v in out.items() if v}


def _ord_in(coeffs, x):
    """Coefficient seen by every point of cluster ``x`` in a refined support."""
    if x.is_infinity or x in coeffs:
        return coeffs.get(x, Fraction(0))
    seen = set()
    covered = Poly.const(1)
    for c, a in coeffs.items():
        if c.is_infinity:
            continue
        g = poly_gcd(x.poly, c.poly)
        if g.degree > 0:
            seen.add(a)
            covered = covered * g
    if covered.degree < x.degree:
        seen.add(Fraction(0))
    if len(seen) > 1:
        raise PreconditionError(
            f"cluster {x} straddles support clusters with different coefficients")
    return seen.pop() if seen else Fraction(0)


class RDivisor:
    """Finite formal sum of clusters with rational coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs=None):
        items = coeffs.items() if isinstance(coeffs, dict) else (coeffs or [])
        self._coeffs = _combine(list(items))

    @classmethod
    def _trusted(cls, coeffs):
        d = cls.__new__(cls)
        d._coeffs = {c: a for c, a in coeffs.items() if a}
        return d

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: kv[0].sort_key())

    def support(self):
        return [c for c, _ in self.items()]

    def coeffs(self):
        return dict(self._coeffs)

    def ord(self, x):
        return _ord_in(self._coeffs, x)

    @property
    def degree(self):
        return sum((a * c.degree for c, a in self._coeffs.items()), Fraction(0))

    def is_effective(self):
        return all(a >= 0 for a in self._coeffs.values())

    def is_zero(self):
        return not self._coeffs

    def __add__(self, other):
        return RDivisor(list(self._coeffs.items()) + list(other._coeffs.items()))

    def __neg__(self):
        return RDivisor._trusted({c: -a for c, a in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        k = as_fraction(k)
        return RDivisor._trusted({c: a * k for c, a in self._coeffs.items()})

    def __mul__(self, k):
        return self.scale(k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RDivisor):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.degree)

    def __str__(self):
        if not self._coeffs:
            return "0"
        return " + ".join(f"{format_rational(a)}*[{c}]" for c, a in self.items())

    def __repr__(self):
        return f"RDivisor({str(self)!r})"


def divisor_degree(D):
    return D.degree


class FormalRationalFunction:
    """An element of Rat(P^1)^x tensor Q modulo constants.

    Stored as exponents on pairwise coprime finite clusters; the order at
    infinity is implied by degree balance.
    """

    __slots__ = ("_exps",)

    def __init__(self, exponents=None):
        items = exponents.items() if isinstance(exponents, dict) else (exponents or [])
        self._exps = _combine(list(items), allow_inf=False)

    @classmethod
    def _trusted(cls, exps):
        s = cls.__new__(cls)
        s._exps = {c: a for c, a in exps.items() if a}
        return s

    @classmethod
    def one(cls):
        return cls._trusted({})

    @classmethod
    def from_poly(cls, p, exponent=1):
        """``p^exponent`` for any nonzero polynomial (constants dropped)."""
        e = as_fraction(exponent)
        pairs = [(PointCluster(r, check=False), j * e) for r, j in squarefree_decompose(p)]
        return cls(pairs)

    def items(self):
        return sorted(self._exps.items(), key=lambda kv: kv[0].sort_key())

    def exponents(self):
        return dict(self._exps)

    def ord(self, x):
        if x.is_infinity:
            return -sum((a * c.degree for c, a in self._exps.items()), Fraction(0))
        return _ord_in(self._exps, x)

    def support(self):
        """Support of the principal divisor, infinity included when nonzero."""
        out = [c for c, _ in self.items()]
        if self.ord(INF):
            out.insert(0, INF)
        return out

    def is_one(self):
        return not self._exps

    def is_integral(self):
        return all(a.denominator == 1 for a in self._exps.values())

    def __mul__(self, other):
        return FormalRationalFunction(list(self._exps.items()) + list(other._exps.items()))

    def __pow__(self, k):
        k = as_fraction(k)
        return FormalRationalFunction._trusted({c: a * k for c, a in self._exps.items()})

    def inverse(self):
        return self ** -1

    def __truediv__(self, other):
        return self * other.inverse()

    def __eq__(self, other):
        if not isinstance(other, FormalRationalFunction):
            return NotImplemented
        return (self / other).is_one()

    def __hash__(self):
        return hash(len(self._exps) > 0)

    def __str__(self):
        return format_function(self)

    def __repr__(self):
        return f"FormalRationalFunction({format_function(self)!r})"


def principal_divisor(s):
    """The divisor ``(s) = sum e_q ([q] - deg(q) [inf])``."""
    coeffs = dict(s.exponents())
    inf = s.ord(INF)
    if inf:
        coeffs[INF] = inf
    return RDivisor._trusted(coeffs)


def solve_principal(D):
    """A formal function with ``(s) = D``; ``D`` must have degree 0."""
    if D.degree != 0:
        raise PreconditionError(f"divisor of degree {D.degree} is not principal")
    return FormalRationalFunction._trusted(
        {c: a for c, a in D.coeffs().items() if not c.is_infinity})


def format_function(s):
    if s.is_one():
        return "1"
    parts = []
    for c, e in s.items():
        base = f"({c})"
        if e == 1:
            parts.append(base)
        elif e.denominator == 1:
            parts.append(f"{base}^{e.numerator}")
        else:
            parts.append(f"{base}^({format_rational(e)})")
    return " * ".join(parts)


def parse_function(text):
    """Parse a product of powers such as ``(z^2 + 1)^(1/2) * (z - 1)^-1 / z``.

    A bare polynomial such as ``z^2 - 1`` is accepted too.
    """
    try:
        return _parse_product(text)
    except InputError as exc:
        try:
            p = parse_poly(text)
        except InputError:
            raise exc
        if p.is_zero():
            raise InputError("zero function", col=1)
        return FormalRationalFunction.from_poly(p) if p.degree > 0 else FormalRationalFunction.one()


def _parse_product(text):
    pos = 0
    n = len(text)
    result = FormalRationalFunction.one()
    expect_factor = True
    divide = False
    if not text.strip():
        raise InputError("empty function", col=1)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        if expect_factor:
            start = pos
            if text[pos] == "(":
                depth, j = 0, pos
                while j < n:
                    if text[j] == "(":
                        depth += 1
                    elif text[j] == ")":
                        depth -= 1
                        if depth == 0:
                            break
                    j += 1
                if j >= n:
                    raise InputError("unbalanced parenthesis", col=pos + 1)
                inner = text[pos + 1:j]
                try:
                    base = parse_poly(inner)
                except InputError as exc:
                    raise InputError(str(exc).split(": ", 1)[-1], col=pos + 2 + (exc.col or 1) - 1)
                pos = j + 1
            elif text[pos] == "z":
                base = Poly.z()
                pos += 1
            else:
                m = re.compile(r"\d+(?:/\d+)?").match(text, pos)
                if not m:
                    raise InputError(f"unexpected character {text[pos]!r}", col=pos + 1)
                base = Poly.const(Fraction(m.group()))
                pos = m.end()
            if base.is_zero():
                raise InputError("zero factor", col=start + 1)
            exp = Fraction(1)
            k = pos
            while k < n and text[k].isspace():
                k += 1
            if k < n and text[k] == "^":
                k += 1
                while k < n and text[k].isspace():
                    k += 1
                m = re.compile(r"\(\s*(-?\d+(?:/\d+)?)\s*\)|(-?\d+)").match(text, k)
                if not m:
                    raise InputError("bad exponent", col=k + 1)
                exp = Fraction(m.group(1) or m.group(2))
                pos = m.end()
            if divide:
                exp = -exp
            if base.degree > 0:
                result = result * FormalRationalFunction.from_poly(base, exp)
            expect_factor = False
        else:
            if text[pos] == "*":
                divide = False
            elif text[pos] == "/":
                divide = True
            else:
                raise InputError(f"expected '*' or '/', got {text[pos]!r}", col=pos + 1)
            pos += 1
            expect_factor = True
    if expect_factor:
        raise InputError("expected a factor", col=n + 1)
    return result
