"""Command-line surface: stable text output for scripting and goldens.

Machine-readable lines are prefixed RESULT.  Exit codes: 0 success or
representable, 1 usage or parse error, 2 not representable / not
submodular / verification failed, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys


from . import lpsolver
from .maxflow import minimize_quadratic
from .mbf import MbfTable, enumerate_mbfs, prune_mbf_set
from .oracle import format_report, verify_reduction
from .pbf import (
    MultilinearPoly,
    NotSubmodularQuadratic,
    PolyParseError,
    QuadraticPoly,
    format_polynomial,
    format_rational,
    indices_of,
    is_submodular,
    parse_polynomial,
)
from .reduce_general import ReductionProblem, nearest_quadratic, overestimate
from .reduce_quartic import (
    NotRepresentable,
    QuarticFunction,
    generator_catalog,
    nearest_quartic,
    reduce_quartic,
)

USAGE_ERROR, FAILURE, INTERNAL_ERROR = 1, 2, 3


def _read_poly(path: str, n_vars: int | None = None) -> MultilinearPoly:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_polynomial(fh.read(), n_vars)


def _label(mask: int) -> str:
    return ",".join(map(str, indices_of(mask))) or "-"


def _mbf_choice(spec: str, k: int) -> tuple[tuple[MbfTable, ...], bool]:
    """Returns (tables, allow_degenerate)."""
    if spec == "all":
        return tuple(enumerate_mbfs(k)), True
    if spec == "pruned":
        return tuple(prune_mbf_set(enumerate_mbfs(k))), False
    if spec == "generators":
        rs = range(2, k) if k >= 3 else (2,)
        return tuple(MbfTable.threshold(k, r) for r in rs), False
    with open(spec, "r", encoding="utf-8") as fh:
        tables = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if len(line) != 1 << k or set(line) - {"0", "1"}:
                raise ValueError(f"table line must be a {1 << k}-character bit-string")
            bits = 0
            for mask, ch in enumerate(line):
                if ch == "1":
                    bits |= 1 << mask
            tables.append(MbfTable(k, bits))
    return tuple(tables), True


def _default_mbfs(k: int) -> str:
    return "pruned" if k <= 3 else "generators"


def _print_reduction(result, k):
    print(f"QUADRATIC vars={k} avs={result.quadratic.n_z}")
    sys.stdout.write(format_polynomial(result.quadratic.poly))
    print("GAPS")
    for x in sorted(result.per_labeling_gap):
        print(f"{_label(x)} {format_rational(result.per_labeling_gap[x])}")
    print(f"RESULT distance={format_rational(result.l1_distance)}")
    print(f"RESULT avs={result.quadratic.n_z}")


def _cmd_check(args) -> int:
    f = _read_poly(args.file)
    ok = is_submodular(f)
    print(f"RESULT submodular={'true' if ok else 'false'}")
    return 0 if ok else FAILURE


def _cmd_minimize(args) -> int:
    poly = _read_poly(args.file)
    h = QuadraticPoly(poly, poly.n_vars, 0)
    value, argmin = minimize_quadratic(h)
    print(f"RESULT min={format_rational(value)}")
    print(f"RESULT argmin={_label(argmin)}")
    return 0


def _problem_from_args(args) -> ReductionProblem:
    target = _read_poly(args.file, args.k)
    spec = args.mbfs or _default_mbfs(args.k)
    tables, allow = _mbf_choice(spec, args.k)
    return ReductionProblem(target, tables, allow_degenerate=allow)


def _cmd_reduce(args) -> int:
    problem = _problem_from_args(args)
    result = nearest_quadratic(problem)
    _print_reduction(result, args.k)
    return 0 if result.l1_distance == 0 else FAILURE


def _cmd_nearest(args) -> int:
    problem = _problem_from_args(args)
    result = nearest_quadratic(problem)
    _print_reduction(result, args.k)
    return 0


def _cmd_overestimate(args) -> int:
    problem = _problem_from_args(args)
    anchor = 0
    for tok in args.anchor.split(","):
        tok = tok.strip()
        if tok:
            anchor |= 1 << (int(tok) - 1)
    result = overestimate(problem, anchor)
    _print_reduction(result, args.k)
    return 0


def _cmd_reduce4(args) -> int:
    poly = _read_poly(args.file, 4)
    f = QuarticFunction(poly)
    if args.nearest:
        joint, distance = nearest_quartic(f)
        representable = distance == 0
        print(f"RESULT representable={'true' if representable else 'false'}")
        print(f"RESULT distance={format_rational(distance)}")
    else:
        try:
            joint = reduce_quartic(f)
        except NotRepresentable:
            print("RESULT representable=false")
            return FAILURE
        print("RESULT representable=true")
    h = joint.to_quadratic()
    print(f"QUADRATIC vars=4 avs={h.n_z}")
    sys.stdout.write(format_polynomial(h.poly))
    sys.stdout.write(format_report(verify_reduction(poly, h)))
    return 0


def _cmd_verify(args) -> int:
    f = _read_poly(args.f_file)
    h_poly = _read_poly(args.h_file, f.n_vars + args.avs)
    h = QuadraticPoly(h_poly, f.n_vars, args.avs)
    report = verify_reduction(f, h)
    sys.stdout.write(format_report(report))
    print(f"RESULT pass={'true' if report.passed else 'false'}")
    return 0 if report.passed else FAILURE


def _cmd_mbf_count(args) -> int:
    print(f"RESULT count={len(enumerate_mbfs(args.k))}")
    return 0


def _cmd_mbf_dump(args) -> int:
    for t in enumerate_mbfs(args.k):
        print(t.as_bitstring())
    return 0


def _cmd_gen_table(args) -> int:
    f, h = generator_catalog(args.group, tuple(args.pattern))
    print(f"GROUP {args.group} PATTERN {' '.join(map(str, args.pattern))}")
    print("QUARTIC")
    sys.stdout.write(format_polynomial(f.poly))
    if h is None:
        print("QUADRATIC none")
    else:
        print(f"QUADRATIC avs={h.n_z}")
        sys.stdout.write(format_polynomial(h.poly))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subquad",
        description="exact quadratization and max-flow minimization of submodular functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="test a polynomial for submodularity")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("minimize", help="minimize a submodular quadratic by max-flow")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_minimize)

    for name, fn in (("reduce", _cmd_reduce), ("nearest", _cmd_nearest)):
        p = sub.add_parser(name, help=f"{name} a function against a monotone-table set")
        p.add_argument("file")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--mbfs", default=None, help="all|pruned|generators|<table file>")
        p.set_defaults(fn=fn)

    p = sub.add_parser("overestimate", help="tightest dominating quadratic, exact at the anchor")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mbfs", default=None)
    p.add_argument("--anchor", required=True, help="comma-separated 1-based indices, empty for the all-zeros labeling")
    p.set_defaults(fn=_cmd_overestimate)

    p = sub.add_parser("reduce4", help="two-auxiliary reduction of a quartic")
    p.add_argument("file")
    p.add_argument("--nearest", action="store_true")
    p.set_defaults(fn=_cmd_reduce4)

    p = sub.add_parser("verify", help="brute-force check of a reduction")
    p.add_argument("f_file")
    p.add_argument("h_file")
    p.add_argument("--avs", type=int, required=True)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("mbf-count", help="number of monotone tables")
    p.add_argument("k", type=int)
    p.set_defaults(fn=_cmd_mbf_count)

    p = sub.add_parser("mbf-dump", help="list monotone tables as bit-strings")
    p.add_argument("k", type=int)
    p.set_defaults(fn=_cmd_mbf_dump)

    p = sub.add_parser("gen-table", help="print one generator catalog row")
    p.add_argument("group", type=int)
    p.add_argument("pattern", type=int, nargs=4)
    p.set_defaults(fn=_cmd_gen_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    try:
        return args.fn(args)
    except PolyParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except NotSubmodularQuadratic as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE
    except (ValueError, NotRepresentable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE
    except (lpsolver.LpInternalError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
