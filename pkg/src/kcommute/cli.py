"""``kcommute`` command line: factor, verify and demo.

Exit codes: 0 success, 1 verification failed, 2 unreadable input,
3 precondition violated, 4 internal verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .commfact import factor_unitriangular, verify_certificate
from .demos import DEMOS
from .errors import PreconditionError, VerificationFailure
from .mat import Banded, DirectSum, LazyMatrix, Mat
from .ring import parse_ring
from .serialize import (FormatError, certificate_from_json, certificate_to_json, dumps, loads,
                        matrix_from_json)
from .slfact import factor_sl
from .vk import PeriodicCoupling, VKMat, factor_vk

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _seq_span(s) -> int:
    return len(s.prefix) + 2 * len(s.period)


def structure_span(A) -> int:
    """Prefix length plus twice the period length of the periodic data
    describing ``A`` (the largest over its parts)."""
    if isinstance(A, Mat):
        return A.n
    if isinstance(A, Banded):
        return max((_seq_span(s) for s in A.diagonals.values()), default=1)
    if isinstance(A, VKMat):
        c = A.m2
        cs = len(c.prefix_cols) + 2 * len(c.period_cols) if isinstance(c, PeriodicCoupling) else 1
        return A.n + max(cs, structure_span(A.m3))
    if isinstance(A, DirectSum):
        return A.head.n + structure_span(A.tail)
    return max(A.structure_length(), 1)


def default_window(A, k: int) -> int:
    size = A.n if isinstance(A, Mat) else A.corner
    return max(2 * (structure_span(A) + k), size, 4)


def _read_json(path):
    try:
        with open(path) as fh:
            return loads(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(args, report: dict, lines: list, stream=None):
    stream = stream or sys.stdout
    if args.report == "json":
        print(dumps(report), file=stream)
    else:
        print("\n".join(lines), file=stream)


def _load_input(args, ctx, obj):
    A = matrix_from_json(ctx, obj)
    if args.mode == "sl" and not isinstance(A, Mat):
        raise FormatError("mode sl needs a dense matrix")
    if args.mode == "vk" and not isinstance(A, VKMat):
        raise FormatError("mode vk needs a vk matrix")
    return A


def cmd_factor(args) -> int:
    obj = _read_json(args.input)
    try:
        ctx = parse_ring(args.ring, args.k)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    A = _load_input(args, ctx, obj)
    N = args.window or default_window(A, ctx.k)
    if N < max(A.n if isinstance(A, Mat) else A.corner, 4):
        raise FormatError(f"window {N} smaller than max(matrix size, 4)")
    check = None if isinstance(A, Mat) else N
    if args.mode == "ut":
        cert = factor_unitriangular(A, ctx, check)
    elif args.mode == "sl":
        cert = factor_sl(A, ctx)
    else:
        cert = factor_vk(A, ctx, N)
    rep = verify_certificate(cert, A, N if isinstance(A, LazyMatrix) else None)
    if not rep.passed:
        raise VerificationFailure("fresh certificate failed verification: " +
                                  "; ".join(c.detail for c in rep.failures()))
    text = dumps(certificate_to_json(cert))
    to_stdout = args.out in (None, "-")
    if not to_stdout:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    lines = [f"producer {cert.producer}; word length {cert.length}; "
             f"claimed bound 4k-6 = {4 * ctx.k - 6}"
             + ("; fallback used, exceeds 4k-6" if cert.exceeds_bound else ""),
             rep.text(), "verified" + (f" on window N = {rep.window}" if rep.window else "")]
    report = {"producer": cert.producer, "length": cert.length, "bound": 4 * ctx.k - 6,
              "exceeds_bound": cert.exceeds_bound, "verification": rep.to_dict()}
    if to_stdout:
        print(text)
    _emit(args, report, lines, sys.stderr if to_stdout else None)
    return EXIT_OK


def cmd_verify(args) -> int:
    cert = certificate_from_json(_read_json(args.cert))
    A = matrix_from_json(cert.ctx, _read_json(args.input))
    N = None
    if isinstance(A, LazyMatrix):
        N = args.window or default_window(A, cert.k)
    rep = verify_certificate(cert, A, N)
    lines = [rep.text(), "verified" if rep.passed else
             "verification failed: " + "; ".join(c.detail for c in rep.failures())]
    _emit(args, rep.to_dict(), lines)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_demo(args) -> int:
    if args.name not in DEMOS:
        print(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}", file=sys.stderr)
        return EXIT_PARSE
    out, ok = DEMOS[args.name]()
    if args.report == "json":
        print(dumps({"demo": args.name, "passed": ok, "lines": out}))
    else:
        print("\n".join(out))
        print("identity verified" if ok else "identity FAILED")
    return EXIT_OK if ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kcommute",
                                description="Exact factorization into commutators of order-k elements.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factor", help="factor a matrix and write a certificate")
    f.add_argument("--ring", default="Q", help="Q, Fp:<p> or cyclo:<m>")
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--mode", choices=["ut", "sl", "vk"], default="ut")
    f.add_argument("--input", required=True, help="matrix JSON file")
    f.add_argument("--window", type=int, help="verification window for infinite inputs")
    f.add_argument("--out", help="certificate file (stdout when omitted)")
    f.add_argument("--report", choices=["text", "json"], default="text")
    f.set_defaults(func=cmd_factor)

    v = sub.add_parser("verify", help="replay a certificate against a matrix")
    v.add_argument("--cert", required=True)
    v.add_argument("--input", required=True)
    v.add_argument("--window", type=int)
    v.add_argument("--report", choices=["text", "json"], default="text")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("demo", help="print a worked construction")
    d.add_argument("name", help=", ".join(DEMOS))
    d.add_argument("--report", choices=["text", "json"], default="text")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"precondition failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except VerificationFailure as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
