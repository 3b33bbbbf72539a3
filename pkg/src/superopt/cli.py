"""Command-line interface: ``superopt analyze | interpolate | verify``.

Exit codes: 0 success, 1 internal error, 2 no interpolant exists (Hankel norm
above one), 3 verification failure, 4 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    DiskZeroDenominator,
    NormTooLarge,
    SuperoptError,
    SymbolFileError,
    WrongTailLength,
)
from .hankel import hankel_norm
from .interpolant import unitary_interpolant
from .symfile import read_symbol, write_symbol
from .thematic import superoptimal
from .wh_index import VerifyTolerances, verify_interpolant

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _indices(text):
    if text is None or not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _power_of_two(text):
    N = int(text)
    if N < 8 or N & (N - 1):
        raise argparse.ArgumentTypeError("grid size must be a power of two >= 8")
    return N


def build_parser():
    p = _Parser(prog="superopt", description="Superoptimal approximation and unitary interpolants "
                                             "of rational matrix symbols.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_power_of_two, help="grid size for FFT evaluations")
    common.add_argument("--tol-construct", type=float, help="tolerance for unit superoptimal values")
    common.add_argument("--tol-verify", type=float, help="unitarity and Fourier-match tolerance")
    common.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", parents=[common], help="superoptimal values and thematic indices")
    a.add_argument("path", type=Path)
    i = sub.add_parser("interpolate", parents=[common], help="build a unitary interpolant")
    i.add_argument("path", type=Path)
    i.add_argument("--indices", type=_indices, default=[],
                   help="nonnegative nondecreasing indices, comma separated")
    i.add_argument("-o", "--output", type=Path, help="where to write U (default: <input>.U.json)")
    v = sub.add_parser("verify", parents=[common], help="check a candidate interpolant")
    v.add_argument("phi", type=Path)
    v.add_argument("u", type=Path)
    v.add_argument("--indices", type=_indices, default=None,
                   help="expected nonnegative indices (optional)")
    v.add_argument("--no-analysis", action="store_true",
                   help="skip the superoptimal analysis of phi and the forced-index checks")
    return p


def _settings(args, meta):
    grid = args.grid or meta.get("grid")
    if grid:
        os.environ["SUPEROPT_GRID"] = str(int(grid))
    tc = args.tol_construct if args.tol_construct is not None else meta.get("tol_construct", 1e-9)
    tv = args.tol_verify if args.tol_verify is not None else meta.get("tol_verify", 1e-8)
    return float(tc), VerifyTolerances(unitarity=float(tv), fourier=float(tv), analyticity=max(1e-7, float(tv)))


def _emit(report, path):
    text = json.dumps(report, indent=1, default=_default)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _default(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(type(x).__name__)


def cmd_analyze(args):
    sf = read_symbol(args.path)
    _settings(args, sf.meta)
    rep = superoptimal(sf.symbol)
    out = {
        "hankel_norm": hankel_norm(sf.symbol),
        "t": rep.t,
        "k": rep.k,
        "monotone": rep.monotone,
        "r": rep.unit_count(),
    }
    if all(x == 0 for x in rep.t):
        out["message"] = "already analytic"
    _emit(out, args.report)
    return EXIT_OK


def cmd_interpolate(args):
    sf = read_symbol(args.path)
    tol_c, tol_v = _settings(args, sf.meta)
    d = args.indices
    if any(x < 0 for x in d) or any(a > b for a, b in zip(d, d[1:])):
        raise UsageError("--indices must be nonnegative and nondecreasing")
    try:
        res = unitary_interpolant(sf.symbol, d, norm_tol=tol_c)
    except WrongTailLength as exc:
        raise UsageError(f"WrongTailLength: {exc}") from None
    out_path = args.output or args.path.with_suffix(".U.json")
    write_symbol(res.U, out_path)
    cert = verify_interpolant(sf.symbol, res, res.report, tol=tol_v)
    body = cert.as_dict()
    body["output"] = str(out_path)
    body["residuals"] = res.residuals.as_dict()
    body["t"] = res.report.t
    body["k"] = res.report.k
    if res.unique:
        body["note"] = "every superoptimal value equals one, so the unitary interpolant is unique"
    _emit(body, args.report)
    return EXIT_OK if cert.passed else EXIT_VERIFY


def cmd_verify(args):
    phi = read_symbol(args.phi)
    u = read_symbol(args.u)
    _, tol_v = _settings(args, phi.meta)
    if phi.n != u.n:
        raise UsageError(f"size mismatch: {phi.n} x {phi.n} symbol and {u.n} x {u.n} interpolant")
    rep = None if args.no_analysis else superoptimal(phi.symbol)
    cert = verify_interpolant(phi.symbol, u.symbol, rep, tol=tol_v, requested=args.indices)
    _emit(cert.as_dict(), args.report)
    return EXIT_OK if cert.passed else EXIT_VERIFY


COMMANDS = {"analyze": cmd_analyze, "interpolate": cmd_interpolate, "verify": cmd_verify}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return COMMANDS[args.command](args)
    except NormTooLarge as exc:
        print(f"NormTooLarge: Hankel norm {exc.norm:.12g} exceeds 1; no unitary interpolant exists",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, SymbolFileError, DiskZeroDenominator) as exc:
        name = type(exc).__name__
        print(f"{name}: {exc}" if name not in ("UsageError",) else str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SuperoptError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
