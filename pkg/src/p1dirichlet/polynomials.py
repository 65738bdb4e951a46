"""Sparse univariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`.  The representation is a dict
from exponent to nonzero coefficient, which keeps very sparse polynomials such
as ``z^2048 + 1`` cheap to divide by polynomials with few terms.
"""

from fractions import Fraction
from math import gcd as igcd
import re

from .errors import InputError, PreconditionError


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


class Poly:
    """Immutable sparse polynomial in ``z``."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in dict(coeffs).items():
                if k < 0:
                    raise ValueError("negative exponent")
                v = as_fraction(v)
                if v:
                    c[int(k)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c):
        p = cls.__new__(cls)
        p._c = c
        p._hash = None
        return p

    @classmethod
    def const(cls, a):
        return cls({0: a})

    @classmethod
    def z(cls):
        return cls._raw({1: Fraction(1)})

    @classmethod
    def from_coeffs(cls, coeffs):
        """Build from a dense list, lowest degree first."""
        return cls({i: a for i, a in enumerate(coeffs)})

    @classmethod
    def from_roots(cls, roots):
        p = cls.const(1)
        for r in roots:
            p = p * cls({1: 1, 0: -as_fraction(r)})
        return p

    # basic queries

    @property
    def degree(self):
        return max(self._c) if self._c else -1

    @property
    def lc(self):
        return self._c[max(self._c)] if self._c else Fraction(0)

    def coeff(self, k):
        return self._c.get(k, Fraction(0))

    def terms(self):
        """(exponent, coefficient) pairs, highest exponent first."""
        return sorted(self._c.items(), reverse=True)

    def is_zero(self):
        return not self._c

    def is_one(self):
        return self._c == {0: 1}

    def is_constant(self):
        return self.degree <= 0

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def sort_key(self):
        d = self.degree
        return (d, tuple(self.coeff(k) for k in range(d, -1, -1)))

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return Poly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw({})
            return Poly._raw({k: v * other for k, v in self._c.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        c = {}
        for i, a in self._c.items():
            for j, b in other._c.items():
                c[i + j] = c.get(i + j, 0) + a * b
        return Poly._raw({k: v for k, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k):
        """Multiply by ``z^k``."""
        return Poly._raw({e + k: v for e, v in self._c.items()})

    def divmod(self, other):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        dq = other.degree
        lc = other.lc
        oterms = list(other._c.items())
        r = dict(self._c)
        q = {}
        while r:
            dr = max(r)
            if dr < dq:
                break
            f = r[dr] / lc
            k = dr - dq
            q[k] = f
            for e, v in oterms:
                s = r.get(e + k, 0) - f * v
                if s:
                    r[e + k] = s
                else:
                    r.pop(e + k, None)
        return Poly._raw(q), Poly._raw(r)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other):
        """True when ``self`` divides ``other``."""
        return not (other % self)

    def monic(self):
        if not self._c:
            return self
        lc = self.lc
        if lc == 1:
            return self
        return Poly._raw({k: v / lc for k, v in self._c.items()})

    def derivative(self):
        return Poly._raw({k - 1: v * k for k, v in self._c.items() if k})

    def __call__(self, x):
        """Evaluate at a rational or compose with a polynomial (Horner)."""
        if isinstance(x, Poly):
            return self.compose(x)
        x = as_fraction(x)
        acc = Fraction(0)
        prev = None
        for e, v in self.terms():
            if prev is not None:
                acc *= x ** (prev - e)
            acc += v
            prev = e
        if prev:
            acc *= x ** prev
        return acc

    def compose(self, other):
        acc = Poly._raw({})
        prev = None
        for e, v in self.terms():
            if prev is not None:
                acc = acc * other ** (prev - e)
            acc = acc + v
            prev = e
        if prev:
            acc = acc * other ** prev
        return acc

    def content_integer(self):
        """Return an integer polynomial (as dict) proportional to self, with positive lead."""
        den = 1
        for v in self._c.values():
            den = den * v.denominator // igcd(den, v.denominator)
        ints = {k: int(v * den) for k, v in self._c.items()}
        g = 0
        for v in ints.values():
            g = igcd(g, v)
        if g == 0:
            return {}
        sign = 1 if ints[max(ints)] > 0 else -1
        return {k: sign * v // g for k, v in ints.items()}

    # formatting

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def format_rational(q):
    q = as_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_poly(p, var="z"):
    if p.is_zero():
        return "0"
    out = []
    for e, v in p.terms():
        neg = v < 0
        a = -v if neg else v
        if e == 0:
            body = format_rational(a)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if a == 1 else f"{format_rational(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<coef>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?"
    r"(?:(?P<var>z)\s*(?:(?:\^|\*\*)\s*(?P<exp>\d+))?)?\s*"
)


def parse_poly(text):
    """Parse ``"3/2*z^3 + z - 1/2"``.  Raises :class:`InputError` with a column."""
    pos = 0
    n = len(text)
    coeffs = {}
    first = True
    if not text.strip():
        raise InputError("empty polynomial", col=1)
    while pos < n:
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"unexpected character {text[pos]!r}", col=pos + 1)
        if m.group("coef") is None and m.group("var") is None:
            if text[m.end():].strip() == "" and m.group("sign") is None:
                break
            raise InputError("expected a term", col=m.end() + 1)
        if m.group("sign") is None and not first:
            raise InputError("expected '+' or '-'", col=m.start() + 1)
        if m.group("star") and m.group("var") is None:
            raise InputError("expected 'z' after '*'", col=m.end() + 1)
        sign = -1 if m.group("sign") == "-" else 1
        c = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("var"):
            e = int(m.group("exp")) if m.group("exp") else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, 0) + sign * c
        first = False
        pos = m.end()
    return Poly(coeffs)


def poly_gcd(a, b):
    """Monic gcd; ``gcd(0, 0) = 0``."""
    while b:
        a, b = b, a % b
    return a.monic()


def squarefree_decompose(p):
    """Yun's algorithm.

    Returns ``[(r_j, j), ...]`` with monic, squarefree, pairwise coprime
    ``r_j`` of positive degree such that ``p = lc(p) * prod r_j^j``.
    The list is sorted by multiplicity.
    """
    if p.is_zero():
        raise PreconditionError("squarefree decomposition of the zero polynomial")
    out = []
    if p.degree == 0:
        return out
    a = p.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a.exact_div(c)
    y = b.exact_div(c)
    zz = y - w.derivative()
    i = 1
    while w.degree > 0:
        g = poly_gcd(w, zz)
        if g.degree > 0:
            out.append((g, i))
        w = w.exact_div(g)
        y = zz.exact_div(g)
        zz = y - w.derivative()
        i += 1
    return out


def squarefree_part(p):
    r = Poly.const(1)
    for q, _ in squarefree_decompose(p):
        r = r * q
    return r


def is_squarefree(p):
    return p.degree >= 1 and poly_gcd(p, p.derivative()).degree == 0


def gcd_free_basis(polys):
    """Refine monic squarefree polynomials into a pairwise coprime basis.

    Every input is a product of distinct basis elements.  The result is
    sorted by :meth:`Poly.sort_key`.
    """
    basis = []
    seen = set()
    for p in polys:
        p = p.monic()
        if p.degree <= 0 or p in seen:
            continue
        seen.add(p)
        if p in basis:
            continue
        pending = [p]
        while pending:
            q = pending.pop()
            if q.degree <= 0:
                continue
            for i, b in enumerate(basis):
                g = poly_gcd(q, b)
                if g.degree <= 0:
                    continue
                rest_b = b.exact_div(g)
                rest_q = q.exact_div(g)
                basis.pop(i)
                basis.append(g)
                if rest_b.degree > 0:
                    pending.append(rest_b)
                if rest_q.degree > 0:
                    pending.append(rest_q)
                break
            else:
                basis.append(q)
    basis = list(set(basis))
    basis.sort(key=Poly.sort_key)
    return basis


def _divisors(n):
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def integer_roots(p):
    """Sorted integer roots of a nonzero polynomial with rational coefficients."""
    if p.is_zero():
        raise PreconditionError("roots of the zero polynomial")
    c = p.content_integer()
    roots = []
    low = min(c)
    if low > 0:
        roots.append(0)
        c = {k - low: v for k, v in c.items()}
    if max(c) == 0:
        return roots
    q = Poly(c)
    for d in _divisors(c[0]):
        for r in (d, -d):
            if q(r) == 0:
                roots.append(r)
    return sorted(roots)


def rational_roots(p):
    """Sorted rational roots of a nonzero polynomial."""
    if p.is_zero():
        raise PreconditionError("roots of the zero polynomial")
    c = p.content_integer()
    roots = []
    low = min(c)
    if low > 0:
        roots.append(Fraction(0))
        c = {k - low: v for k, v in c.items()}
    if max(c) == 0:
        return roots
    q = Poly(c)
    lead = c[max(c)]
    found = set()
    for a in _divisors(c[0]):
        for b in _divisors(lead):
            for r in (Fraction(a, b), Fraction(-a, b)):
                if r not in found and q(r) == 0:
                    found.add(r)
    return sorted(roots + list(found))


def determinant(rows):
    """Exact determinant of a square matrix of Fractions (Gaussian elimination)."""
    m = [list(map(as_fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det *= pv
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f = f / pv
                row_c = m[col]
                row_r = m[r]
                for k in range(col, n):
                    row_r[k] -= f * row_c[k]
    return det


def sylvester_resultant(a, b, deg_a=None, deg_b=None):
    """Resultant via the Sylvester determinant, with optional formal degrees."""
    m = a.degree if deg_a is None else deg_a
    n = b.degree if deg_b is None else deg_b
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0 and n == 0:
        return Fraction(1)
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for k in range(m + 1):
            row[i + k] = a.coeff(m - k)
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for k in range(n + 1):
            row[i + k] = b.coeff(n - k)
        rows.append(row)
    return determinant(rows)


def interpolate(xs, ys):
    """Lagrange interpolation through distinct rational nodes."""
    result = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        num = Poly.const(1)
        den = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                num = num * Poly({1: 1, 0: -xj})
                den *= xi - xj
        result = result + num * (yi / den)
    return result
