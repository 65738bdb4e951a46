"""Command-line front end: ``p1dirichlet <command> <problem-file> [flags]``.

Exit status is 0 on success, 2 for malformed input and 3 when a computation
is asked for outside its domain.  Every number is printed as an exact rational.
"""

import argparse
import csv
import io
from fractions import Fraction
from math import inf
import sys

from .divisors import parse_function
from .dynamics import canonical_green, canonical_height_checks, check_eigen, concave_criteria
from .errors import InputError, PreconditionError, ValidationError
from .finiteness import finiteness_probe
from .green import (
    AdelicDivisor, TreePoint, essential_minimum, format_profile, height, parse_tree_point,
    validate,
)
from .mu import decide_dirichlet, decide_pseudoeffective, mu_report, mu_tot
from .polynomials import format_rational
from .problem import read_problem
from .sections import (
    deg_plus, filtration, is_big, lambda_max_asy, lambda_max_n, section_norm, volume,
)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION = 0, 2, 3


def fmt(x):
    if x == inf:
        return "inf"
    if x == -inf:
        return "-inf"
    return format_rational(x)


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _checked(A):
    v = validate(A)
    if v:
        raise ValidationError(v)
    return A


# commands; each returns a list of output lines

def cmd_validate(prob, args):
    v = validate(prob.divisor)
    if v:
        raise ValidationError(v)
    return ["valid"]


def cmd_mu(prob, args):
    return mu_report(_checked(prob.divisor))


def cmd_mutot(prob, args):
    return [fmt(mu_tot(_checked(prob.divisor)))]


def cmd_dirichlet(prob, args):
    return [str(decide_dirichlet(prob.divisor))]


def cmd_pseff(prob, args):
    return ["yes" if decide_pseudoeffective(prob.divisor) else "no"]


def cmd_essmin(prob, args):
    return [fmt(essential_minimum(_checked(prob.divisor)))]


def cmd_height(prob, args):
    p = parse_tree_point(args.at)
    return [fmt(height(_checked(prob.divisor), p))]


def cmd_norm(prob, args):
    s = parse_function(args.s)
    return [fmt(section_norm(_checked(prob.divisor), s, args.n))]


def cmd_filtration(prob, args):
    table = filtration(_checked(prob.divisor), args.n)
    return table.csv_rows() + [f"lambda_max: {fmt(table.lambda_max)}"]


def cmd_lambda_max(prob, args):
    A = _checked(prob.divisor)
    if args.asy:
        res = lambda_max_asy(A, args.nsweep, args.jobs)
        return ([f"{n}: {fmt(v)}" for n, v in res.lower_bounds]
                + [f"asymptotic: {fmt(res.exact)}"])
    return [fmt(lambda_max_n(A, args.n))]


def cmd_degplus(prob, args):
    return [fmt(deg_plus(_checked(prob.divisor), args.n))]


def cmd_volume(prob, args):
    return volume(_checked(prob.divisor), args.nmax, args.jobs).csv_rows()


def cmd_big(prob, args):
    rep = is_big(_checked(prob.divisor))
    if not rep.big:
        return ["no"]
    return [f"yes: n = {rep.n}, section = {rep.section}, -log norm = {fmt(rep.value)}"]


def cmd_canonical_green(prob, args):
    E = prob.eigen()
    res = canonical_green(E, prob.divisor.g, steps=args.steps, tol=args.tol)
    g = res.g_m
    out = [f"steps: {res.steps}",
           f"lambda sup-norm: {fmt(res.lam_norm)}",
           f"error bound: {fmt(res.error_bound)}",
           "exact branches: " + (", ".join(str(c) for c in sorted(
               res.exact_branches, key=lambda c: c.sort_key())) or "none"),
           "gaps: " + (", ".join(fmt(x) for x in res.gaps) or "none"),
           f"v0 = {fmt(g.v0)}"]
    out += [f"branch {c} = {format_profile(g.exceptional[c])}" for c in g.clusters()]
    out += canonical_height_checks(E, res).lines()
    try:
        out += ["concave criteria:"] + ["  " + ln for ln in concave_criteria(
            AdelicDivisor(E.D, g)).lines()]
    except PreconditionError:
        out.append("concave criteria: not applicable (some branch is not concave)")
    return out


def cmd_check_eigen(prob, args):
    if prob.dynamics is None:
        raise PreconditionError("problem file has no [dynamics] section")
    dyn = prob.dynamics
    return ["yes" if check_eigen(dyn.f, prob.divisor.D, dyn.d, dyn.phi) else "no"]


def cmd_finiteness(prob, args):
    return finiteness_probe(prob.eigen(), args.nmax, args.window).lines()


def profile_rows(A, resolution=4):
    """CSV rows ``branch,t,g,h`` at breakpoints plus ``resolution`` samples per segment."""
    g = A.g
    rows = [("branch", "t", "g", "h")]
    branches = [(str(c), c, g.exceptional[c]) for c in g.clusters()]
    for i, tl in enumerate(g.tails):
        for n in range(tl.n0, tl.n0 + 3):
            c = tl.cluster(n)
            branches.append((str(c), c, tl.profile(g.v0, n)))
    if not branches:
        rows.append(("eta0", "0", fmt(g.v0), fmt(height(A, TreePoint.root()))))
        return rows
    for name, c, prof in branches:
        ts = list(prof.ts) + [prof.ts[-1] + 1]
        pts = []
        for a, b in zip(ts, ts[1:]):
            pts += [a + (b - a) * Fraction(k, resolution + 1) for k in range(resolution + 1)]
        pts.append(ts[-1])
        o = A.D.ord(c)
        for t in pts:
            v = prof(t)
            rows.append((name, fmt(t), fmt(v), fmt(v - t * o)))
    return rows


def cmd_profiles(prob, args):
    A = prob.divisor
    res = args.resolution if args.resolution is not None else prob.options.get("resolution", 4)
    rows = profile_rows(A, res)
    if args.csv == "-":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue().splitlines()
    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    return [f"wrote {len(rows) - 1} rows to {args.csv}"]


COMMANDS = {
    "validate": cmd_validate, "mu": cmd_mu, "mutot": cmd_mutot, "dirichlet": cmd_dirichlet,
    "pseff": cmd_pseff, "essmin": cmd_essmin, "height": cmd_height, "norm": cmd_norm,
    "filtration": cmd_filtration, "lambda-max": cmd_lambda_max, "degplus": cmd_degplus,
    "volume": cmd_volume, "big": cmd_big, "canonical-green": cmd_canonical_green,
    "check-eigen": cmd_check_eigen, "finiteness": cmd_finiteness, "profiles": cmd_profiles,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="p1dirichlet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="problem file")
        p.add_argument("--jobs", type=_positive_int, default=None,
                       help="worker processes for n-sweeps")
        return p

    add("validate", "check the problem file and the adelic divisor")
    add("mu", "mu on every branch")
    add("mutot", "degree-weighted total of mu")
    add("dirichlet", "decide the Dirichlet property with a witness")
    add("pseff", "decide pseudo-effectivity (needs deg D > 0)")
    add("essmin", "essential minimum")
    add("height", "height at a tree point").add_argument(
        "--at", required=True, help="<cluster>:<t>, e.g. inf:2 or z-1:1/2")
    p = add("norm", "-log of the sup norm of a section of nD")
    p.add_argument("-n", type=_positive_int, default=1)
    p.add_argument("-s", required=True, help="function, e.g. '(z-1)^2/z'")
    add("filtration", "jumps of the norm filtration").add_argument(
        "-n", type=_positive_int, default=1)
    p = add("lambda-max", "top jump of the filtration")
    g = p.add_mutually_exclusive_group()
    g.add_argument("-n", type=_positive_int, default=1)
    g.add_argument("--asy", action="store_true", help="asymptotic value with lower bounds")
    p.add_argument("--nsweep", type=_positive_int, default=8)
    add("degplus", "integral of the filtration rank").add_argument(
        "-n", type=_positive_int, default=1)
    add("volume", "exact volume and the sweep 2 deg+(n)/n^2").add_argument(
        "--nmax", type=_positive_int, default=8)
    add("big", "bigness with a witness section")
    p = add("canonical-green", "iterate toward the canonical Green function")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--steps", type=int, default=None)
    g.add_argument("--tol", type=_rational, default=None)
    add("check-eigen", "check f^*D = dD + (phi)")
    p = add("finiteness", "divisor-level finiteness probe")
    p.add_argument("--nmax", type=_positive_int, default=20)
    p.add_argument("--window", type=_positive_int, default=3)
    p = add("profiles", "CSV of the Green function and height along each branch")
    p.add_argument("--csv", required=True, help="output path, or - for standard output")
    p.add_argument("--resolution", type=int, default=None)
    return ap


def run(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        prob = read_problem(args.file)
        if args.jobs is None:
            args.jobs = prob.options.get("jobs")
        lines = COMMANDS[args.command](prob, args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as exc:
        for v in exc.violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_PRECONDITION
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    for ln in lines:
        print(ln, file=out)
    return EXIT_OK


def main():
    try:
        code = run()
    except SystemExit as exc:
        # argparse usage errors are input errors
        code = EXIT_INPUT if exc.code not in (0, None) else 0
    sys.exit(code)


if __name__ == "__main__":
    main()
