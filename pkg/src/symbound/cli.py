"""Command-line front end.

Every subcommand reads JSON (a file path, ``-`` for stdin, or inline JSON
text) and writes one JSON document to stdout, or DOT with ``--dot``.  Exit
status is 0 on success, 2 on invalid input and 3 when a computation on valid
input fails; failures also print ``{"error": code, "detail": message}``.
"""

import argparse
import json
import sys

import numpy as np

from . import serialize as ser
from .errors import ComputationError, InputError, SymboundError
from .growth import parse_growth
from .laurent import LaurentSeries
from .pencils import (finite_pencil_data, null_pencil_data, same_finite_pencil, same_null_pencil,
                      same_solvable_pencil, solvable_pencil_data, pencil_stratum_dim)
from .polytopes import (enumerate_leveled, enumerate_tree_partitions, full_face_lattice, stratum_karp,
                        stratum_pass, weyl_face_lattice)
from .satake import (geodesic_satake_limit, satake_stratum_dim, sequence_limit_inductive,
                     sequence_limit_packets)
from .spd import complex_distance, geodesic_eval, geodesic_through
from .urchin import (curve_from_json, factor_with_retry, limit_from_factorization, reparametrize,
                     urchin_limits_equal)
from .xi import geodesic_boundary_point, karp_limit, pass_limit, sequence_boundary_point, xi_limit

DEFAULT_TOL = 1e-8
# Sampled geodesics stop where the eigenvalue spread reaches e^25, well inside
# the range the positivity check accepts.
SAMPLE_SPREAD = 25.0
KIND_NAMES = {"pass": "Pass", "karp": "Karp", "ass": "Ass", "martin": "Martin"}


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_json(arg):
    """JSON from inline text, ``-`` (stdin) or a file path."""
    text = arg
    if arg == "-":
        text = sys.stdin.read()
    elif not arg.lstrip().startswith(("{", "[")):
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at position {exc.pos}") from None


def _kind(name, allowed):
    kind = KIND_NAMES.get(name.lower())
    if kind not in allowed:
        raise UsageError(f"--kind must be one of {', '.join(k.lower() for k in allowed)}")
    return kind


def _geodesic_arg(args):
    if args.geodesic:
        return ser.geodesic_from_json(load_json(args.geodesic))
    if args.x and args.y:
        x = ser.spd_from_json(load_json(args.x), args.model)
        y = ser.spd_from_json(load_json(args.y), args.model)
        return geodesic_through(x, y)
    raise UsageError("give --geodesic, or both --x and --y")


# subcommands

def cmd_dist(args):
    x = ser.spd_from_json(load_json(args.x), args.model)
    y = ser.spd_from_json(load_json(args.y), args.model)
    return ser.distance_to_json(complex_distance(x, y))


def cmd_geodesic(args):
    gamma = _geodesic_arg(args)
    out = {"geodesic": ser.geodesic_to_json(gamma)}
    if args.t:
        out["points"] = [{"t": t, "matrix": ser.matrix_to_json(geodesic_eval(gamma, t).entries)} for t in args.t]
    return out


def cmd_satake_limit(args):
    if args.seq:
        samples = ser.spd_matrix_list(load_json(args.seq))
    else:
        gamma = _geodesic_arg(args)
        if args.method in (None, "geodesic"):
            return ser.satake_to_json(geodesic_satake_limit(gamma))
        values = gamma.velocity.values
        t_max = args.t_max or SAMPLE_SPREAD / (max(values) - min(values))
        ts = np.linspace(t_max / args.samples, t_max, args.samples)
        samples = [geodesic_eval(gamma, float(t)).entries for t in ts]
    if args.method == "packets":
        return ser.satake_to_json(sequence_limit_packets(samples, tol=args.tol))
    if args.method == "geodesic":
        raise UsageError("--method geodesic needs --geodesic or --x/--y")
    return ser.satake_to_json(sequence_limit_inductive(samples, tol=args.tol))


def cmd_pencil(args):
    a = ser.geodesic_from_json(load_json(args.a))
    b = ser.geodesic_from_json(load_json(args.b))
    out = {"finite": bool(same_finite_pencil(a, b, tol=args.tol)),
           "solvable": bool(same_solvable_pencil(a, b, tol=args.tol)),
           "null": None}
    data = {"finite": ser.pencil_to_json(finite_pencil_data(a)),
            "solvable": ser.pencil_to_json(solvable_pencil_data(a))}
    if a.model == "E":
        out["null"] = bool(same_null_pencil(a, b))
        data["null"] = ser.pencil_to_json(null_pencil_data(a))
    out["data"] = data
    return out


def _codim_subsets(n):
    for mask in range(1 << (n - 1)):
        yield tuple(i for i in range(1, n) if mask >> (i - 1) & 1)


def cmd_strata(args):
    n = args.n
    if args.kind == "pass":
        items = [ser.stratum_to_json(stratum_pass(a)) for a in enumerate_tree_partitions(n)]
    elif args.kind == "karp":
        items = [ser.stratum_to_json(stratum_karp(a)) for a in enumerate_leveled(n)]
    elif args.kind == "satake":
        items = [{"kind": "Satake", "codims": list(c), "dim": satake_stratum_dim(n, c)} for c in _codim_subsets(n)]
    else:
        items = [{"kind": "Pencil", "codims": list(c), "dim": pencil_stratum_dim(n, c)} for c in _codim_subsets(n)]
    return {"n": n, "kind": args.kind, "strata": items}


def cmd_faces(args):
    kind = _kind(args.kind, ("Pass", "Karp", "Ass"))
    lattice = full_face_lattice(args.n, kind) if args.full else weyl_face_lattice(args.n, kind)
    if args.dot:
        return lattice.to_dot()
    return lattice.to_json()


def cmd_xi_limit(args):
    v = parse_growth(args.seq)
    if args.kind == "pass":
        return ser.pass_limit_to_json(pass_limit(v))
    if args.kind == "karp":
        return ser.karp_limit_to_json(karp_limit(v))
    return ser.xi_to_json(xi_limit(v))


def cmd_boundary_point(args):
    kind = _kind(args.kind, ("Ass", "Karp", "Martin"))
    if args.eigen:
        if not args.frame:
            raise UsageError("--eigen needs --frame (a Satake point JSON)")
        frame = ser.satake_from_json(load_json(args.frame))
        return ser.boundary_to_json(sequence_boundary_point(parse_growth(args.eigen), frame, kind))
    return ser.boundary_to_json(geodesic_boundary_point(_geodesic_arg(args), kind))


def _series_arg(text):
    coeffs = [ser.parse_rat(c.strip()) for c in text.split(",")]
    return LaurentSeries(0, tuple(coeffs))


def cmd_urchin(args):
    curve = curve_from_json(load_json(args.curve))
    if args.reparam:
        curve = reparametrize(curve, _series_arg(args.reparam), args.terms)
    fac = factor_with_retry(curve, args.seed, args.terms)
    lim = limit_from_factorization(fac)
    out = {"factorization": ser.factorization_to_json(fac), "limit": ser.urchin_to_json(lim)}
    if args.check_seeds:
        rng = np.random.default_rng(args.seed)
        seeds = [int(s) for s in rng.integers(0, 2**31, size=args.check_seeds)]
        others = (limit_from_factorization(factor_with_retry(curve, s, args.terms)) for s in seeds)
        out["seedCheck"] = all(urchin_limits_equal(lim, other) for other in others)
    return out


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numeric tolerance (default 1e-8)")
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")

    p = _Parser(prog="symbound", description="Boundary geometry of spaces of positive definite matrices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        q = sub.add_parser(name, parents=[common], help=help_text)
        q.set_defaults(func=func)
        return q

    def geo_inputs(q):
        q.add_argument("--geodesic", help="geodesic JSON {frame, velocity}")
        q.add_argument("--x", help="start matrix JSON")
        q.add_argument("--y", help="end matrix JSON")
        q.add_argument("--model", choices=("E", "PE"), default=None)

    q = add("dist", cmd_dist, "complex distance between two positive matrices")
    q.add_argument("--x", required=True)
    q.add_argument("--y", required=True)
    q.add_argument("--model", choices=("E", "PE"), default=None)

    q = add("geodesic", cmd_geodesic, "geodesic through two matrices, optionally evaluated")
    geo_inputs(q)
    q.add_argument("--t", type=float, action="append", help="parameter to evaluate at (repeatable)")

    q = add("satake-limit", cmd_satake_limit, "Satake limit of a sequence or geodesic")
    geo_inputs(q)
    q.add_argument("--seq", help="JSON list of matrices")
    q.add_argument("--method", choices=("inductive", "packets", "geodesic"), default=None,
                   help="default: geodesic for geodesic input, inductive for --seq")
    q.add_argument("--samples", type=int, default=32, help="geodesic samples (default 32)")
    q.add_argument("--t-max", type=float, default=None,
                   help="last geodesic sample time (default: eigenvalue spread e^25)")

    q = add("pencil", cmd_pencil, "pencil relations between two geodesics")
    q.add_argument("--a", required=True, help="first geodesic JSON")
    q.add_argument("--b", required=True, help="second geodesic JSON")

    q = add("strata", cmd_strata, "list strata with dimensions and component counts")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--kind", choices=("pass", "karp", "satake", "pencil"), required=True)

    q = add("faces", cmd_faces, "face lattice of a chamber polyhedron")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--kind", required=True, help="pass, karp or ass")
    q.add_argument("--full", action="store_true", help="all strata instead of one chamber")
    q.add_argument("--dot", action="store_true", help="emit the Hasse diagram as DOT")

    q = add("xi-limit", cmd_xi_limit, "exact limit of a polynomial growth vector")
    q.add_argument("--seq", required=True, help='comma-separated polynomials in n, e.g. "n^2, 2n, 1"')
    q.add_argument("--kind", choices=("pass", "karp", "xi"), default="pass")

    q = add("boundary-point", cmd_boundary_point, "hybrid boundary point of a geodesic or sequence")
    geo_inputs(q)
    q.add_argument("--kind", required=True, help="ass, karp or martin")
    q.add_argument("--eigen", help="log-eigenvalue growth, comma-separated polynomials")
    q.add_argument("--frame", help="Satake point JSON of the frame limit")

    q = add("urchin", cmd_urchin, "sea-urchin limit of a meromorphic curve")
    q.add_argument("--curve", required=True, help="curve JSON {n, T, entries}")
    q.add_argument("--seed", type=int, default=None, help="pivot tie-breaking seed")
    q.add_argument("--terms", type=int, default=16, help="initial truncation (default 16)")
    q.add_argument("--reparam", help="u as comma-separated rational coefficients; substitutes z = w u(w)")
    q.add_argument("--check-seeds", type=int, default=0, help="also refactor with this many seeds")
    return p


def _fail(code, detail, status, out, err):
    print(f"symbound: {code}: {detail}", file=err)
    out.write(ser.dumps({"error": code, "detail": detail}) + "\n")
    return status


def main(argv=None, out=None, err=None):
    """Run one subcommand; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except InputError as exc:
        return _fail(exc.code, str(exc), 2, out, err)
    except ComputationError as exc:
        return _fail(exc.code, str(exc), 3, out, err)
    except SymboundError as exc:
        return _fail(exc.code, str(exc), 3, out, err)
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("InputError", f"malformed input: {exc}", 2, out, err)
    if isinstance(result, str):
        out.write(result)
    else:
        out.write(ser.dumps(result, pretty=args.pretty) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
