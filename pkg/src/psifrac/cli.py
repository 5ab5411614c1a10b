"""Command line: ``psifrac verify | operator | sweep``.

Exit codes: 0 success, 1 an inequality failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .errors import PsiFracError
from .iyengar import CaputoNorms, InequalityInstance, Variant, check_midpoint, midpoint_split, sweep_split
from .operators import caputo_derivative, rl_integral
from .suite import (ConfigError, RegimeSpec, build_groups, format_float, load_config,
                    parse_function_spec, parse_psi_spec, run_groups, thread_count, write_report)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_PSI_PARAM_NAMES = {"affine": ("c0", "c1"), "power": ("sigma",)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_psi(text: str, domain: str | None):
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    values = {}
    for part in filter(None, (p.strip() for p in rest.replace(",", ";").split(";"))):
        key, _, val = part.partition("=")
        values[key.strip()] = float(val)
    names = _PSI_PARAM_NAMES.get(kind, ())
    missing = [n for n in names if n not in values]
    if missing:
        raise ConfigError(f"psi {kind} needs {', '.join(missing)}")
    params = tuple(values[n] for n in names)
    dom = None
    if domain:
        dom = tuple(_number(x) for x in domain.split(","))
        if len(dom) != 2:
            raise ConfigError("--domain takes 'a,b'")
    return parse_psi_spec(kind, params, dom)


def _number(text: str) -> float:
    text = text.strip().lower()
    if text == "e":
        return math.e
    return float(text)


def _fixed(x: float) -> str:
    return format(float(x), ".15f")


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.as_printed_l1:
        cfg.as_printed_l1 = True
    if args.measure:
        cfg.measure = args.measure
    threads = args.threads if args.threads is not None else thread_count()
    rows = run_groups(build_groups(cfg), threads)
    csv_path, summary_path = write_report(rows, args.out_dir, cfg.csv_name, cfg.summary_name, cfg.name)
    failures = sum(r.failed for r in rows)
    print(f"{len(rows)} rows, {failures} failures -> {csv_path}, {summary_path}")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_operator(args) -> int:
    psi = _parse_psi(args.psi, args.domain)
    (f,) = parse_function_spec(args.fn, psi)[:1]
    points = [_number(p) for p in args.points]
    t = np.asarray(points, dtype=float)
    I = np.atleast_1d(rl_integral(args.side, f, psi, args.alpha, t))
    D = np.atleast_1d(caputo_derivative(args.side, f, psi, args.alpha, t))
    print(f"{'t':>20} {'I':>22} {'D':>22}")
    for ti, ii, di in zip(t, I, D):
        print(f"{_fixed(ti):>20} {_fixed(ii):>22} {_fixed(di):>22}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    psi = _parse_psi(args.psi, args.domain)
    (f,) = parse_function_spec(args.fn, psi)[:1]
    regime = RegimeSpec.parse(args.regime)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    failures = 0
    try:
        if args.variable == "s":
            inst = InequalityInstance(f, psi, args.alpha, regime.regime, Variant.MIDPOINT, p=regime.p)
            res = sweep_split(inst, args.grid)
            out.write("s,lhs,rhs,margin\n")
            for s, l, r in zip(res.s, res.lhs, res.rhs):
                out.write(f"{format_float(s)},{format_float(l)},{format_float(r)},{format_float(r - l)}\n")
                failures += (r - l) < -1e-6 * max(1.0, r)
            if res.degenerate:
                out.write("# constant bracket; minimizer degenerate\n")
            else:
                out.write(f"# argmin s={format_float(res.s[res.argmin])} "
                          f"(psi-midpoint s*={format_float(midpoint_split(psi))})\n")
        else:
            lo, hi = args.alpha_range
            out.write("alpha,lhs,rhs,margin\n")
            for alpha in np.linspace(lo, hi, args.grid):
                inst = InequalityInstance(f, psi, float(alpha), regime.regime, Variant.MIDPOINT,
                                          p=regime.p)
                rep = check_midpoint(inst, norms=CaputoNorms(f, psi, float(alpha)))
                out.write(f"{format_float(alpha)},{format_float(rep.lhs)},{format_float(rep.rhs)},"
                          f"{format_float(rep.margin)}\n")
                failures += not rep.passed
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_FAIL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psifrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a configured verification suite")
    v.add_argument("config")
    v.add_argument("--out-dir", default=".")
    v.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: PSIFRAC_THREADS, 0 = all cores)")
    v.add_argument("--as-printed-l1", "--as-printed-326", dest="as_printed_l1", action="store_true",
                   help="also evaluate the weighted-L1 bound with Gamma(alpha+2), alpha+1")
    v.add_argument("--measure", choices=("dpsi", "dt"), default=None)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("operator", help="tabulate psi-RL integral and psi-Caputo derivative")
    o.add_argument("--side", choices=("left", "right"), default="left")
    o.add_argument("--psi", default="identity", help="kind[:param=value;...]")
    o.add_argument("--domain", default=None, help="a,b")
    o.add_argument("--alpha", type=float, required=True)
    o.add_argument("--fn", required=True, help="e.g. monomial:beta=1")
    o.add_argument("--points", nargs="+", required=True)
    o.set_defaults(func=cmd_operator)

    s = sub.add_parser("sweep", help="sweep the split point or the order")
    s.add_argument("--psi", default="identity")
    s.add_argument("--domain", default=None)
    s.add_argument("--fn", required=True)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--regime", default="Linf", help="Linf | L1psi | Lqpsi:p=2")
    s.add_argument("--variable", choices=("s", "alpha"), default="s")
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--alpha-range", type=float, nargs=2, default=(0.1, 0.9))
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PsiFracError as exc:
        print(f"psifrac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"psifrac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
