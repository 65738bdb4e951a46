"""Plain-text problem files.

Grammar (version 1)::

    format = 1

    [divisor]
    <cluster> = <rational>          # e.g. "inf = 1", "z^2 + 1 = -1/2"

    [green]
    v0 = <rational>
    branch <cluster> = <profile>    # "(0,0);(1,1) slope=1"
    tail = c0=<q> c1=<q> n0=<int> ratio=<q> psi=<profile>

    [dynamics]                      # optional
    p = <polynomial>
    q = <polynomial>                # default 1
    d = <rational>                  # default deg f
    phi = <function>                # default 1

    [options]                       # optional
    jobs = <int>
    resolution = <int>

Blank lines and ``#`` comments are ignored.  Every number is an exact
rational, so a file written by :func:`serialize` parses back to the same data.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import re

from .divisors import (
    FormalRationalFunction, RDivisor, format_function, parse_cluster, parse_function,
)
from .dynamics import EigenData, Endomorphism
from .errors import InputError, P1Error
from .green import (
    AdelicDivisor, GeometricTail, GreenFunction, format_profile, parse_profile,
)
from .polynomials import format_poly, format_rational, parse_poly

FORMAT_VERSION = 1
_SECTIONS = ("divisor", "green", "dynamics", "options")
_OPTIONS = {"jobs": int, "resolution": int}
_TAIL_KEYS = ("c0", "c1", "n0", "ratio", "psi")


@dataclass
class Dynamics:
    f: Endomorphism
    d: Fraction
    phi: FormalRationalFunction


@dataclass
class Problem:
    divisor: AdelicDivisor
    dynamics: Dynamics = None
    options: dict = field(default_factory=dict)

    def eigen(self, D=None):
        """The eigen-data; raises a precondition error when the relation fails."""
        if self.dynamics is None:
            from .errors import PreconditionError
            raise PreconditionError("problem file has no [dynamics] section")
        dyn = self.dynamics
        return EigenData(dyn.f, self.divisor.D if D is None else D, dyn.d, dyn.phi)


def _fraction(text, line, col):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected a rational, got {text.strip()!r}", line, col)


def _wrap(fn, text, line, col):
    try:
        return fn(text)
    except InputError as exc:
        inner = exc.col or 1
        raise InputError(exc.message, line, col + inner - 1)
    except P1Error as exc:
        raise InputError(str(exc), line, col)


def _parse_tail(text, line, col):
    # psi comes last and may contain spaces, so split on the key names
    fields = {}
    pos = [(m.start(), m.group(1)) for m in re.finditer(r"\b(c0|c1|n0|ratio|psi)\s*=", text)]
    if not pos:
        raise InputError("tail needs c0, c1, n0, ratio and psi", line, col)
    if text[:pos[0][0]].strip():
        raise InputError(f"unexpected text {text[:pos[0][0]].strip()!r} in tail", line, col)
    for k, (start, key) in enumerate(pos):
        end = pos[k + 1][0] if k + 1 < len(pos) else len(text)
        if key in fields:
            raise InputError(f"duplicate tail key {key!r}", line, col + start)
        value = text[start:end].split("=", 1)[1]
        fields[key] = (value, col + start)
    missing = [k for k in _TAIL_KEYS if k not in fields]
    if missing:
        raise InputError(f"tail is missing {', '.join(missing)}", line, col)
    v = {k: fields[k] for k in _TAIL_KEYS}
    n0 = v["n0"][0].strip()
    if not re.fullmatch(r"-?\d+", n0):
        raise InputError(f"n0 must be an integer, got {n0!r}", line, v["n0"][1])
    tl = GeometricTail(_fraction(v["c0"][0], line, v["c0"][1]),
                       _fraction(v["c1"][0], line, v["c1"][1]),
                       int(n0),
                       _fraction(v["ratio"][0], line, v["ratio"][1]),
                       _wrap(parse_profile, v["psi"][0], line, v["psi"][1]))
    bad = tl.violations()
    if bad:
        raise InputError(bad[0], line, col)
    return tl


def parse_problem(text):
    section = None
    seen_format = False
    seen_sections = set()
    divisor = {}
    v0 = None
    branches = {}
    tails = []
    dyn = {}
    options = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0]
        if not stripped.strip():
            continue
        col0 = len(stripped) - len(stripped.lstrip()) + 1
        body = stripped.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise InputError("unterminated section header", lineno, col0)
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                raise InputError(f"unknown section [{name}]", lineno, col0)
            if name in seen_sections:
                raise InputError(f"duplicate section [{name}]", lineno, col0)
            if not seen_format:
                raise InputError("file must start with 'format = 1'", lineno, col0)
            seen_sections.add(name)
            section = name
            continue
        if "=" not in body:
            raise InputError("expected 'key = value'", lineno, col0)
        key, _, value = body.partition("=")
        key = key.strip()
        vcol = col0 + body.index("=") + 1 + (len(value) - len(value.lstrip()))
        value = value.strip()
        if section is None:
            if key != "format":
                raise InputError(f"unknown key {key!r} before any section", lineno, col0)
            if seen_format:
                raise InputError("duplicate format header", lineno, col0)
            if value != str(FORMAT_VERSION):
                raise InputError(f"unsupported format {value!r}", lineno, vcol)
            seen_format = True
        elif section == "divisor":
            c = _wrap(parse_cluster, key, lineno, col0)
            if c in divisor:
                raise InputError(f"duplicate divisor entry {key!r}", lineno, col0)
            divisor[c] = _fraction(value, lineno, vcol)
        elif section == "green":
            if key == "v0":
                if v0 is not None:
                    raise InputError("duplicate v0", lineno, col0)
                v0 = _fraction(value, lineno, vcol)
            elif key.startswith("branch "):
                c = _wrap(parse_cluster, key[len("branch "):], lineno, col0 + len("branch "))
                if c in branches:
                    raise InputError(f"duplicate branch {c}", lineno, col0)
                branches[c] = _wrap(parse_profile, value, lineno, vcol)
            elif key == "tail":
                tails.append(_parse_tail(value, lineno, vcol))
            else:
                raise InputError(f"unknown key {key!r} in [green]", lineno, col0)
        elif section == "dynamics":
            if key not in ("p", "q", "d", "phi"):
                raise InputError(f"unknown key {key!r} in [dynamics]", lineno, col0)
            if key in dyn:
                raise InputError(f"duplicate key {key!r}", lineno, col0)
            dyn[key] = (value, lineno, vcol)
        else:
            if key not in _OPTIONS:
                raise InputError(f"unknown option {key!r}", lineno, col0)
            if key in options:
                raise InputError(f"duplicate option {key!r}", lineno, col0)
            if not re.fullmatch(r"\d+", value):
                raise InputError(f"option {key} must be a nonnegative integer", lineno, vcol)
            options[key] = _OPTIONS[key](value)
    if not seen_format:
        raise InputError("file must start with 'format = 1'", 1, 1)
    if "green" not in seen_sections:
        raise InputError("missing [green] section", 1, 1)
    if v0 is None:
        raise InputError("[green] needs v0", 1, 1)
    try:
        g = GreenFunction(v0, branches, tuple(tails))
        A = AdelicDivisor(RDivisor(divisor), g)
    except P1Error as exc:
        raise InputError(str(exc), 1, 1)
    dynamics = None
    if dyn:
        if "p" not in dyn:
            raise InputError("[dynamics] needs p", 1, 1)
        p = _wrap(parse_poly, *dyn["p"])
        q = _wrap(parse_poly, *dyn["q"]) if "q" in dyn else None
        try:
            f = Endomorphism(p, q)
        except P1Error as exc:
            raise InputError(str(exc), dyn["p"][1], dyn["p"][2])
        d = _fraction(*dyn["d"]) if "d" in dyn else Fraction(f.d)
        phi = _wrap(parse_function, *dyn["phi"]) if "phi" in dyn else FormalRationalFunction.one()
        dynamics = Dynamics(f, d, phi)
    return Problem(A, dynamics, options)


def read_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def serialize(problem):
    """Canonical text; ``parse_problem(serialize(p))`` reproduces ``p``."""
    if isinstance(problem, AdelicDivisor):
        problem = Problem(problem)
    A = problem.divisor
    out = [f"format = {FORMAT_VERSION}", "", "[divisor]"]
    for c, a in A.D.items():
        out.append(f"{c} = {format_rational(a)}")
    out += ["", "[green]", f"v0 = {format_rational(A.g.v0)}"]
    for c in A.g.clusters():
        out.append(f"branch {c} = {format_profile(A.g.exceptional[c])}")
    for tl in A.g.tails:
        out.append(f"tail = c0={format_rational(tl.c0)} c1={format_rational(tl.c1)} "
                   f"n0={tl.n0} ratio={format_rational(tl.ratio)} psi={format_profile(tl.psi)}")
    if problem.dynamics is not None:
        dyn = problem.dynamics
        out += ["", "[dynamics]", f"p = {format_poly(dyn.f.p)}", f"q = {format_poly(dyn.f.q)}",
                f"d = {format_rational(dyn.d)}", f"phi = {format_function(dyn.phi)}"]
    if problem.options:
        out += ["", "[options]"]
        out += [f"{k} = {problem.options[k]}" for k in sorted(problem.options)]
    return "\n".join(out) + "\n"
