"""Command-line front end.

Every subcommand writes CSV (default) or JSON. CSV output starts with a
``#`` comment line echoing the run configuration; JSON output is
``{"config": {...}, "rows": [...]}``. The worker count and output path are
execution details and are not echoed, so output is byte-identical across
``--workers`` values.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Sequence

from multdyck import lplus, paths, random_mult
from multdyck._parallel import default_workers
from multdyck.errors import DomainError

PROG = "multdyck"
_EXECUTION_KEYS = {"command", "workers", "out", "func"}


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _floored(text: str) -> int:
    """Path lengths accept reals and are floored."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(value) or value < 1:
        raise argparse.ArgumentTypeError(f"must be a finite number >= 1, got {text}")
    return math.floor(value)


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def _seed(text: str) -> int:
    value = _nonneg_int(text)
    if value >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


# -- rendering ---------------------------------------------------------------


def _g6(x: float) -> str:
    return f"{x:.6g}"


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return _g6(v)


def _json_cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


class Output:
    """Rows plus the config header, rendered as CSV or JSON."""

    def __init__(self, config: dict[str, Any], header: list[str], rows: list[list[Any]],
                 csv_cells: list[list[str]] | None = None, bare: bool = False):
        self.config = config
        self.header = header
        self.rows = rows
        self.csv_cells = csv_cells
        self.bare = bare

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "config": self.config,
                "rows": [{h: _json_cell(v) for h, v in zip(self.header, row)} for row in self.rows],
            }
            return json.dumps(doc, sort_keys=False) + "\n"
        buf = io.StringIO()
        if self.bare:
            # scalar answers print just the value
            buf.write(_csv_cell(self.rows[0][0]) + "\n")
            return buf.getvalue()
        buf.write("# " + PROG + " " + json.dumps(self.config, sort_keys=True) + "\n")
        buf.write(",".join(self.header) + "\n")
        cells = self.csv_cells or [[_csv_cell(v) for v in row] for row in self.rows]
        for row in cells:
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


# -- subcommands --------------------------------------------------------------


def _cmd_scan(args, config) -> Output:
    if args.count_only:
        report = lplus.scan(args.limit, workers=args.workers)
        return Output(config, ["count"], [[report.count]], bare=True)
    report = lplus.scan(args.limit, workers=args.workers, walks=True)
    rows = [[w.p, w.is_member, w.min_prefix, w.first_violation] for w in report.walks]
    return Output(config, ["p", "is_member", "min_prefix", "first_violation"], rows)


def _cmd_nth(args, config) -> Output:
    p = lplus.nth_member(args.index, max_limit=args.max_limit, workers=args.workers)
    return Output(config, ["p"], [[p]], bare=True)


def _cmd_exact_m(args, config) -> Output:
    res = paths.exact_m(args.n, cap=args.cap, workers=args.workers)
    row = [res.n_max, res.dyck_count, res.total, float(res.m_value)]
    return Output(config, ["n", "count", "total", "m"], [row])


def _cmd_table1(args, config) -> Output:
    rows, cells = [], []
    for r in paths.table1(workers=args.workers):
        rows.append([r.n, r.p_n, r.dyck_count, float(r.m), r.m_ln_p])
        cells.append([str(r.n), str(r.p_n), str(r.dyck_count), f"{float(r.m):.6f}", f"{r.m_ln_p:.3f}"])
    return Output(config, ["n", "p_n", "count", "m", "m_ln_p"], rows, csv_cells=cells)


def _cmd_mc_m(args, config) -> Output:
    e = random_mult.mc_m(args.n, args.samples, seed=args.seed, workers=args.workers)
    row = [e.n_max, e.samples, e.successes, e.estimate, e.ci_low, e.ci_high, e.seed]
    return Output(config, ["n_max", "samples", "successes", "estimate", "ci_low", "ci_high", "seed"], [row])


def _cmd_moments(args, config) -> Output:
    recs = random_mult.moments(args.u_max, mode=args.mode)
    rows = []
    for r in recs:
        formula = r.formula_value if args.mode in ("formula", "both") else None
        rows.append([r.u, formula, r.exact_value, r.mc_value])
    return Output(config, ["u", "formula", "bruteforce", "mc"], rows)


def _cmd_subgaussian(args, config) -> Output:
    r = random_mult.subgaussian_check(
        args.sigma, args.k, args.gamma, args.samples, seed=args.seed, workers=args.workers
    )
    row = [r.sigma, r.k_primes, r.gamma, r.samples, r.s, r.empirical_tail, r.stderr, r.bound, r.seed]
    header = ["sigma", "k", "gamma", "samples", "s", "empirical_tail", "stderr", "bound", "seed"]
    return Output(config, header, [row])


def _cmd_tail(args, config) -> Output:
    if args.sigma is not None:
        sigma = args.sigma
        config["sigma_preset"] = None
    else:
        sigma = random_mult.sigma_preset(args.sigma_preset, args.n)
    config["sigma_value"] = sigma
    t = random_mult.tail_integral(
        args.n, sigma, args.truncation, args.samples, seed=args.seed, workers=args.workers
    )
    row = [t.n_lo, t.sigma, t.truncation, t.samples, t.mean_I, t.stderr, t.seed]
    return Output(config, ["N", "sigma", "U", "samples", "mean_I", "stderr", "seed"], [row])


def _cmd_zeta(args, config) -> Output:
    if args.signs == "all-plus":
        assignment = None
    else:
        assignment = random_mult.sample_assignment(args.cutoff, args.seed)
    z = random_mult.zeta_truncated(assignment, args.sigma, args.t, args.cutoff)
    row = [z.sigma, z.t, z.cutoff, args.signs, args.seed, z.value.real, z.value.imag, abs(z.value)]
    return Output(config, ["sigma", "t", "cutoff", "signs", "seed", "re", "im", "abs"], [row])


# -- parser -------------------------------------------------------------------


class _DefaultsFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Show defaults only where there is a meaningful one."""

    def _get_help_string(self, action):
        d = action.default
        if action.required or d is None or d is False or d is argparse.SUPPRESS:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _DefaultsFormatter
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="output format")
    common.add_argument("--out", default="-", metavar="PATH", help="output file ('-' for standard output)")
    common.add_argument(
        "--workers",
        type=_positive_int,
        default=None,
        help="worker count (default: $MULTDYCK_WORKERS, else the CPU count)",
    )
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=0, help="64-bit generator seed")

    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Quadratic characters with non-negative partial sums and multiplicative Dyck paths.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("scan", parents=[common], formatter_class=fmt,
                       help="find the primes <= X in L+")
    p.add_argument("--limit", type=_positive_int, required=True, metavar="X", help="scan primes up to X")
    p.add_argument("--count-only", action="store_true", help="print only the number of members")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("nth", parents=[common], formatter_class=fmt, help="k-th member of L+")
    p.add_argument("--index", type=_positive_int, required=True, metavar="K", help="1-based index")
    p.add_argument("--max-limit", type=_positive_int, default=None, metavar="X",
                   help="give up beyond this prime bound")
    p.set_defaults(func=_cmd_nth)

    p = sub.add_parser("exact-m", parents=[common], formatter_class=fmt,
                       help="exact m(N) by enumeration")
    p.add_argument("--n", type=_floored, required=True, metavar="N", help="path length (floored)")
    p.add_argument("--cap", type=_positive_int, default=paths.DEFAULT_CAP, metavar="C",
                   help="maximum number of primes to enumerate over")
    p.set_defaults(func=_cmd_exact_m)

    p = sub.add_parser("table1", parents=[common], formatter_class=fmt,
                       help="m(p_n) for n = 2..19")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("mc-m", parents=[common, seeded], formatter_class=fmt,
                       help="Monte Carlo estimate of m(N)")
    p.add_argument("--n", type=_floored, required=True, metavar="N", help="path length (floored)")
    p.add_argument("--samples", type=_positive_int, required=True, metavar="S", help="number of samples")
    p.set_defaults(func=_cmd_mc_m)

    p = sub.add_parser("moments", parents=[common], formatter_class=fmt,
                       help="second moment of M_f(u): formula and exact brute force")
    p.add_argument("--u-max", type=_positive_int, required=True, metavar="U", help="largest u")
    p.add_argument("--mode", choices=["formula", "brute", "both"], default="both",
                   help="which values to compute")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("subgaussian", parents=[common, seeded], formatter_class=fmt,
                       help="empirical tail of a weighted sign sum against exp(-g^2/2s)")
    p.add_argument("--sigma", type=_real, required=True, metavar="SIG", help="weights p^-SIG")
    p.add_argument("--k", type=_positive_int, required=True, metavar="K", help="use the first K primes")
    p.add_argument("--gamma", type=_real, required=True, metavar="G", help="threshold")
    p.add_argument("--samples", type=_positive_int, required=True, metavar="S", help="number of samples")
    p.set_defaults(func=_cmd_subgaussian)

    p = sub.add_parser("tail", parents=[common, seeded], formatter_class=fmt,
                       help="truncated tail integral of |M_f(u)| u^(-sigma-1) over [N, U]")
    p.add_argument("--n", type=_positive_int, required=True, metavar="N", help="lower limit N")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sigma-preset", choices=sorted(random_mult.SIGMA_PRESETS), default="half-plus",
                   help="sigma = base + 3 ln ln N / ln N with base 1/2 or 1")
    g.add_argument("--sigma", type=_real, default=None, metavar="SIG", help="explicit sigma")
    p.add_argument("--truncation", type=_real, required=True, metavar="U", help="upper limit U")
    p.add_argument("--samples", type=_positive_int, required=True, metavar="S", help="number of samples")
    p.set_defaults(func=_cmd_tail)

    p = sub.add_parser("zeta", parents=[common, seeded], formatter_class=fmt,
                       help="truncated random Dirichlet series sum f(n) n^-(sigma+it)")
    p.add_argument("--sigma", type=_real, required=True, metavar="SIG", help="real part")
    p.add_argument("--t", type=_real, required=True, metavar="T", help="imaginary part")
    p.add_argument("--cutoff", type=_positive_int, required=True, metavar="K", help="sum n <= K")
    p.add_argument("--signs", choices=["all-plus", "random"], default="random",
                   help="f = 1, or random signs from --seed")
    p.set_defaults(func=_cmd_zeta)
    return parser


def _config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = {"subcommand": args.command}
    for key, value in sorted(vars(args).items()):
        if key not in _EXECUTION_KEYS:
            cfg[key] = value
    return cfg


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers is None:
        args.workers = default_workers()
    config = _config(args)
    try:
        out = args.func(args, config)
    except DomainError as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=stderr)
        return 1
    text = out.render(args.format)
    if args.out == "-":
        stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def main() -> None:
    sys.exit(run())
