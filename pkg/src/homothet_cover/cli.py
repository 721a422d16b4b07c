"""Command-line interface.

Exit codes: 0 success, 1 malformed input, 2 precondition violation
(e.g. no shrinking certificate), 3 verification failures present.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import __version__
from .combinatorics import enumerate_M1, enumerate_M2
from .covering import (
    CoveringCertificate,
    InconsistentCertificate,
    PolytopeV,
    bound_report,
    format_real,
    make_certificate,
    theorem_table,
    verify_certificate,
)
from .geometry import PreconditionError, decompose_ball, decompose_orthant
from .scalars import TwoPowerRational, eval_f, eval_g, k_of, l_of, p_bracket, p_of, p_residual, solve_a, solve_b

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_PRECONDITION = 2
EXIT_VERIFY_FAILED = 3

MAX_SEED = 2**64 - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _point(text: str) -> list[Fraction | float]:
    """Comma-separated coordinates; entries written as fractions ("3/2") stay exact."""
    coords = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise argparse.ArgumentTypeError(f"empty coordinate in {text!r}")
        try:
            coords.append(Fraction(part) if "/" in part else float(part))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad coordinate {part!r}") from exc
    return coords


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homothet-cover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=["json", "csv", "text"], default="text", dest="output_format")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[fmt], help="a(t), b(t), f(1), g(1) and p(n)")
    p.add_argument("--t", help="exponent 'u/v' meaning t = 2^(u/v), or a decimal t")
    p.add_argument("--n", type=int, help="with an exact --t, also report k(n, t) and l(n, t)")
    p.add_argument("--pn", type=int, help="report p(n) with its closed-form bracket")

    p = sub.add_parser("bounds", parents=[fmt], help="covering-functional bounds from a vertex count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--symmetric", action="store_true")

    p = sub.add_parser("table", parents=[fmt], help="theorem bounds for M = r*n + 1 over a range of n")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--ratio", type=int, default=2)

    p = sub.add_parser("enumerate", parents=[fmt], help="stream the lattice set M1 or M2")
    p.add_argument("--set", choices=["M1", "M2"], required=True, dest="lattice_set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("decompose", parents=[fmt], help="lattice + remainder split of a point")
    p.add_argument("--space", choices=["orthant", "ball"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--point", type=_point, required=True)

    p = sub.add_parser("certify", parents=[fmt], help="write a covering certificate for a polytope")
    p.add_argument("--in", dest="poly_in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int)

    p = sub.add_parser("verify", parents=[fmt], help="Monte Carlo verification of a certificate")
    p.add_argument("--poly", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    return parser


# -- output -----------------------------------------------------------------


def _emit_record(record: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(record, indent=2) + "\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        flat = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in record.items()}
        writer.writerow(flat.keys())
        writer.writerow(flat.values())
    else:
        for key, value in record.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
            out.write(f"{key}: {value}\n")


def _emit_rows(header: Sequence[str], rows: Iterable[Sequence], fmt: str, out) -> None:
    """Stream tabular rows without materializing them."""
    if fmt == "json":
        out.write("[")
        first = True
        for row in rows:
            out.write(("\n  " if first else ",\n  ") + json.dumps(dict(zip(header, row))))
            first = False
        out.write("\n]\n" if not first else "]\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    else:
        out.write(" ".join(header) + "\n")
        for row in rows:
            out.write(" ".join(str(v) for v in row) + "\n")


# -- subcommands --------------------------------------------------------------


def _cmd_constants(args, out) -> int:
    if args.t is None and args.pn is None:
        raise UsageError("constants needs --t and/or --pn")
    record: dict = {"f(1)": format_real(eval_f(1.0)), "g(1)": format_real(eval_g(1.0))}
    if args.t is not None:
        exact = None
        if "/" in args.t:
            exact = TwoPowerRational.parse(args.t)
            t = float(exact)
            record["t"] = str(exact)
        else:
            t = float(args.t)
            record["t"] = format_real(t)
        record["t_decimal"] = format_real(t)
        record["a"] = format_real(solve_a(t)) if 1 < t <= 4 else None
        record["b"] = format_real(solve_b(t)) if 1 < t <= 8 else None
        if args.n is not None:
            if exact is None:
                raise UsageError("k(n, t) and l(n, t) need t given exactly as 'u/v'")
            record["n"] = args.n
            record["k"] = k_of(args.n, exact)
            record["l"] = l_of(args.n, exact)
    if args.pn is not None:
        if args.pn < 3:
            raise PreconditionError("p(n) is defined for n >= 3")
        p = p_of(args.pn)
        lo, hi = p_bracket(args.pn)
        record.update({"pn_n": args.pn, "p": format_real(p), "p_bracket_low": format_real(lo),
                       "p_bracket_high": format_real(hi), "p_residual": format_real(p_residual(args.pn, p))})
    _emit_record(record, args.output_format, out)
    return EXIT_OK


def _cmd_bounds(args, out) -> int:
    report = bound_report(args.n, args.vertices, args.symmetric)
    _emit_record(report.to_dict(), args.output_format, out)
    return EXIT_OK


def _cmd_table(args, out) -> int:
    if args.n_from < 3 or args.n_to < args.n_from or args.ratio < 1:
        raise PreconditionError("table needs 3 <= n-from <= n-to and ratio >= 1")
    header = ["n", "vertices", "t", "k", "theorem_bound", "theorem_bound_decimal", "floor_bound", "general_bound"]

    def rows():
        for rep in theorem_table(args.n_from, args.n_to, args.ratio):
            yield [rep.n, rep.vertex_count, str(rep.t), rep.threshold, str(rep.theorem_bound),
                   format_real(rep.theorem_bound), str(rep.floor_bound), str(rep.general_bound)]

    _emit_rows(header, rows(), args.output_format, out)
    return EXIT_OK


def _cmd_enumerate(args, out) -> int:
    if args.n < 1 or args.k < 0:
        raise PreconditionError("enumerate needs n >= 1 and k >= 0")
    stream = enumerate_M1(args.n, args.k) if args.lattice_set == "M1" else enumerate_M2(args.n, args.k)
    header = [f"x{i + 1}" for i in range(args.n)]
    if args.output_format == "json":
        out.write("[")
        first = True
        for v in stream:
            out.write(("\n  " if first else ",\n  ") + json.dumps(list(v)))
            first = False
        out.write("\n]\n" if not first else "]\n")
    else:
        _emit_rows(header, stream, args.output_format, out)
    return EXIT_OK


def _cmd_decompose(args, out) -> int:
    decompose = decompose_orthant if args.space == "orthant" else decompose_ball
    result = decompose(args.point, args.n, args.k, args.p)
    record = {"space": args.space, "n": args.n, "k": args.k, "p": format_real(args.p)}
    record.update(result.to_dict())
    _emit_record(record, args.output_format, out)
    return EXIT_OK


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _cmd_certify(args, out) -> int:
    poly = PolytopeV.from_dict(_load_json(args.poly_in))
    cert = make_certificate(poly, args.n)
    with open(args.out, "w") as fh:
        fh.write(cert.to_json() + "\n")
    summary = {"out": args.out, "lift_kind": cert.lift_kind, "m": cert.m, "k": cert.k,
               "gamma": {"num": cert.gamma.numerator, "den": cert.gamma.denominator},
               "centers": len(cert.centers), "limit": 2**poly.n}
    _emit_record(summary, args.output_format, out)
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    poly = PolytopeV.from_dict(_load_json(args.poly))
    cert = CoveringCertificate.from_dict(_load_json(args.cert))
    report = verify_certificate(poly, cert, args.samples, args.seed, workers=max(1, args.workers))
    _emit_record(report.to_dict(), args.output_format, out)
    return EXIT_OK if report.ok else EXIT_VERIFY_FAILED


COMMANDS = {
    "constants": _cmd_constants,
    "bounds": _cmd_bounds,
    "table": _cmd_table,
    "enumerate": _cmd_enumerate,
    "decompose": _cmd_decompose,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except PreconditionError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PRECONDITION
    except (UsageError, InconsistentCertificate, ValueError, TypeError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_MALFORMED


def main() -> None:
    sys.exit(run())
