"""Command-line surface: every engine operation plus the table reproductions.

Exit codes: 0 success, 1 usage or computation error, 2 failed ``--check``.
"""

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from .asymptotics.coeffgen import coefficients, format_qpolynomial, qpolynomial_to_json
from .asymptotics.errors import StruveAsymptoticsError
from .asymptotics.evaluate import EvalReport, error_report, error_report_at
from .asymptotics.landscape import Parameters, TraceOptions, export_path, trace_steepest
from .asymptotics.transitions import Branch, critical_beta, intercept_Q, triple_point
from .config import EngineConfig, default_config
from .tables import (
    CSV_FLOAT_FORMAT,
    check_table1,
    check_table2,
    check_table3,
    curves_frame,
    domain_grid,
    figure_paths,
    table1,
    table2,
    table3,
    write_table_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_PURE_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)i$")
_FULL = re.compile(rf"^(?P<re>[+-]?{_NUM})(?:(?P<im>[+-](?:{_NUM})?)i)?$")


def _imag_coefficient(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> complex:
    """Accepts ``a``, ``a+bi``, ``a-bi`` and ``bi``; whitespace is rejected."""
    m = _PURE_IMAG.match(text)
    if m:
        return complex(0.0, _imag_coefficient(m.group("im")))
    m = _FULL.match(text)
    if m:
        im = m.group("im")
        return complex(float(m.group("re")), 0.0 if im is None else _imag_coefficient(im))
    raise argparse.ArgumentTypeError(f"not a complex literal: {text!r} (use a, a+bi or bi)")


def format_complex(z: complex, digits: int = 10) -> str:
    return f"{z.real:.{digits}f}{z.imag:+.{digits}f}i"


def _theta_pi(text: str) -> float:
    v = float(text)
    if not abs(v) < 0.5:
        raise argparse.ArgumentTypeError(f"--theta-pi must lie in (-0.5, 0.5), got {v}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def _digits(text: str) -> int:
    v = int(text)
    if not 15 <= v <= 500:
        raise argparse.ArgumentTypeError(f"--precision must be between 15 and 500 digits, got {v}")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; exit code 2 is reserved for failed checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# -----------------------
# Output helpers
# -----------------------
def _write_text(text: str, out: Optional[str]) -> None:
    if out:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    else:
        sys.stdout.write(text)


def _emit_frame(df: pd.DataFrame, args: argparse.Namespace) -> None:
    if args.json:
        _write_text(json.dumps(df.to_dict(orient="records"), indent=2) + "\n", args.out)
    elif args.out:
        write_table_csv(df, Path(args.out))
    else:
        sys.stdout.write(df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT))


def _emit_record(record: dict, text: str, args: argparse.Namespace) -> None:
    _write_text(json.dumps(record, indent=2) + "\n" if args.json else text + "\n", args.out)


def print_table(df: pd.DataFrame) -> None:
    """Check results with short float formatting."""

    def ff(x: float) -> str:
        if x != x:  # nan
            return ""
        if x == 0 or 1e-3 <= abs(x) < 1e4:
            return f"{x:.6f}"
        return f"{x:.3e}"

    print(df.to_string(index=False, float_format=ff))


def _report_check(check: pd.DataFrame) -> int:
    print_table(check)
    failed = int((~check["ok"]).sum())
    if failed or check.empty:
        print(f"\nFAIL: {failed} of {len(check)} reference rows outside tolerance")
        return EXIT_CHECK_FAILED
    print(f"\nPASS: {len(check)} reference rows")
    return EXIT_OK


# -----------------------
# Subcommands
# -----------------------
def cmd_coeffs(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    cs = coefficients(args.kmax)
    if args.json:
        records = [{"k": k, "coeffs": qpolynomial_to_json(c)} for k, c in enumerate(cs)]
        _write_text(json.dumps(records, indent=2) + "\n", args.out)
    else:
        _write_text("".join(format_qpolynomial(c, k) + "\n" for k, c in enumerate(cs)), args.out)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    params = Parameters(args.q, args.theta_pi * math.pi)
    t = trace_steepest(params, opts)
    record = {
        "q_re": args.q.real,
        "q_im": args.q.imag,
        "theta_over_pi": args.theta_pi,
        "label": t.terminal.value,
        "endpoint": t.terminal.symbol,
        "sheet_winding": t.sheet_winding,
    }
    _emit_record(record, t.terminal.value, args)
    return EXIT_OK


def cmd_trace(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    t = trace_steepest(Parameters(args.q, args.theta_pi * math.pi), opts, full_path=True)
    logger.info("trace ended %s after %d points", t.terminal.value, len(t.points))
    _emit_frame(export_path(t), args)
    return EXIT_OK


def cmd_critical_beta(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    beta = critical_beta(args.alpha, args.theta_pi * math.pi, tuple(args.bracket), opts)
    record = {"alpha": args.alpha, "theta_over_pi": args.theta_pi, "beta": beta}
    _emit_record(record, f"{beta:.10f}", args)
    return EXIT_OK


def cmd_triple_point(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    tp = triple_point(args.theta_pi * math.pi, opts)
    record = {"theta_over_pi": args.theta_pi, "P_re": tp.q_P.real, "P_im": tp.q_P.imag, "verified": tp.verified}
    _emit_record(record, format_complex(tp.q_P), args)
    return EXIT_OK


def cmd_intercept(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    q = intercept_Q(args.theta_pi * math.pi, tuple(args.bracket), opts)
    _emit_record({"theta_over_pi": args.theta_pi, "Q": q.q_Q}, f"{q.q_Q:.10f}", args)
    return EXIT_OK


def cmd_curves(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    branches = [Branch(b) for b in args.branch]
    df = curves_frame(args.theta_pi * math.pi, args.arc_length, args.step, branches, opts)
    _emit_frame(df, args)
    return EXIT_OK


def _eval_record(r: EvalReport) -> dict:
    return {
        **r.to_row(),
        "variant": r.variant.value,
        "oracle_method": r.oracle_method.value,
        "asymptotic_re": r.asymptotic.real,
        "asymptotic_im": r.asymptotic.imag,
        "oracle_re": r.oracle.real,
        "oracle_im": r.oracle.imag,
    }


def cmd_eval(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    digits = args.precision or cfg.precision_digits
    k_max = cfg.k_max if args.kmax is None else args.kmax
    r = error_report(args.q, args.theta_pi * math.pi, args.modulus_z, k_max, digits, opts)
    _emit_frame(pd.DataFrame([_eval_record(r)]), args)
    return EXIT_OK


def cmd_eval_at(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    digits = args.precision or cfg.precision_digits
    k_max = cfg.k_max if args.kmax is None else args.kmax
    r = error_report_at(args.nu, args.z, k_max, digits, opts)
    record = {
        **_eval_record(r),
        "continuation": r.continuation,
        "value_re": r.continued_asymptotic.real,
        "value_im": r.continued_asymptotic.imag,
    }
    _emit_frame(pd.DataFrame([record]), args)
    return EXIT_OK


def cmd_table1(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    df = table1(10)
    if args.check:
        if args.out:
            _emit_frame(df, args)
        return _report_check(check_table1(df))
    _emit_frame(df, args)
    return EXIT_OK


def cmd_table2(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    df = table2(workers=args.workers or cfg.workers, opts=opts)
    if args.check:
        if args.out:
            _emit_frame(df, args)
        return _report_check(check_table2(df))
    _emit_frame(df, args)
    return EXIT_OK


def cmd_table3(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    digits = args.precision or cfg.precision_digits
    k_max = cfg.k_max if args.kmax is None else args.kmax
    df = table3(k_max=k_max, digits=digits, workers=args.workers or cfg.workers, opts=opts)
    if args.check:
        if args.out:
            _emit_frame(df, args)
        return _report_check(check_table3(df))
    _emit_frame(df, args)
    return EXIT_OK


def cmd_domains(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    df = domain_grid(
        args.theta_pi * math.pi,
        tuple(args.re_range),
        tuple(args.im_range),
        args.n,
        workers=args.workers or cfg.workers,
        opts=opts,
    )
    _emit_frame(df, args)
    return EXIT_OK


def cmd_figures(args: argparse.Namespace, cfg: EngineConfig, opts: TraceOptions) -> int:
    out_dir = Path(args.out_dir)
    for name, df in figure_paths(opts).items():
        path = out_dir / f"path_{name}.csv"
        write_table_csv(df, path)
        print(f"Wrote: {path}")
    return EXIT_OK


# -----------------------
# Parser
# -----------------------
def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text/CSV")
    common.add_argument("--out", default=None, help="write to FILE instead of stdout")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")

    point = _Parser(add_help=False)
    point.add_argument("--q", type=parse_complex, required=True, help="q = nu/z, e.g. 1.00+0.60i")
    point.add_argument("--theta-pi", type=_theta_pi, default=0.0, help="arg z in units of pi")

    theta = _Parser(add_help=False)
    theta.add_argument("--theta-pi", type=_theta_pi, default=0.0, help="arg z in units of pi")

    precision = _Parser(add_help=False)
    precision.add_argument("--precision", type=_digits, default=None, help="decimal digits (default from env)")
    precision.add_argument("--kmax", type=_nonneg_int, default=None, help="terms computed before truncation")

    workers = _Parser(add_help=False)
    workers.add_argument("--workers", type=int, default=None, help="worker processes for table rows")

    check = _Parser(add_help=False)
    check.add_argument("--check", action="store_true", help="compare against the reference values")

    parser = _Parser(prog="struve", description="Struve-function asymptotics engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="exact coefficients c_k(q)")
    p.add_argument("--kmax", type=_nonneg_int, default=10)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("classify", parents=[common, point], help="endpoint of the origin path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace", parents=[common, point], help="origin path as CSV")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("critical-beta", parents=[common, theta], help="critical Im q at fixed Re q")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--bracket", type=float, nargs=2, default=[0.0, 1.0], metavar=("LO", "HI"))
    p.set_defaults(func=cmd_critical_beta)

    p = sub.add_parser("triple-point", parents=[common, theta], help="triple point P")
    p.set_defaults(func=cmd_triple_point)

    p = sub.add_parser("intercept", parents=[common, theta], help="real-axis intercept Q")
    p.add_argument("--bracket", type=float, nargs=2, default=[0.005, 1.0], metavar=("LO", "HI"))
    p.set_defaults(func=cmd_intercept)

    p = sub.add_parser("curves", parents=[common, theta], help="transition curves leaving P")
    p.add_argument("--branch", nargs="+", choices=[b.value for b in Branch], default=[b.value for b in Branch])
    p.add_argument("--arc-length", type=_positive_float, default=1.0)
    p.add_argument("--step", type=_positive_float, default=0.02)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("eval", parents=[common, point, precision], help="error of the truncated expansion")
    p.add_argument("--modulus-z", type=_positive_float, default=40.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-at", parents=[common, precision], help="expansion error at any nu and z != 0")
    p.add_argument("--nu", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_complex, required=True, help="arg z outside the right half-plane is continued")
    p.set_defaults(func=cmd_eval_at)

    p = sub.add_parser("table1", parents=[common, check], help="coefficients c_0 .. c_10")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", parents=[common, workers, check], help="triple point and intercept by theta")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("table3", parents=[common, workers, check, precision], help="expansion errors at |z| = 40")
    p.set_defaults(func=cmd_table3)

    p = sub.add_parser("domains", parents=[common, theta, workers], help="endpoint labels over a q-grid")
    p.add_argument("--re-range", type=float, nargs=2, default=[0.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--im-range", type=float, nargs=2, default=[-1.5, 1.5], metavar=("LO", "HI"))
    p.add_argument("--n", type=int, default=41, help="grid points per axis")
    p.set_defaults(func=cmd_domains)

    p = sub.add_parser("figures", parents=[common], help="origin paths at the marked points, theta = 0.1 pi")
    p.add_argument("--out-dir", default="figures")
    p.set_defaults(func=cmd_figures)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else EXIT_ERROR

    cfg = default_config()
    level = (args.log_level or cfg.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    opts = TraceOptions.from_config(cfg)
    try:
        return args.func(args, cfg, opts)
    except StruveAsymptoticsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
