"""Command-line front end.

    friable psi exact --x 100 --y 5
    friable sunit bound --s 1
    friable decomp search --set 0,1,2,3 --mode additive
    friable report theorem1 --y 3 --a1 1 --a2 2 --n0 1 --N 1000000

Exit codes: 0 success, 2 argument errors, 3 capacity or budget errors.
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Sequence

from friable import decomp, psi, smooth_core, sunit
from friable.config import FORMATS, RunConfig
from friable.errors import ArgumentError, CapacityError, FriableError

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ARGUMENT)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _number(text: str) -> int | float:
    """Integer when the value is integral, else float ("1e6" -> 1000000)."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            value = Fraction(float(text))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value.denominator == 1:
        return value.numerator
    return float(value)


def _integer(text: str) -> int:
    value = _number(text)
    if not isinstance(value, int):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return value


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise argparse.ArgumentTypeError(str(exc))
        return [int(v) for v in data]
    if not text:
        return []
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}")


def _read_set(value: list[int] | None, path: str | None) -> list[int]:
    if value is not None:
        return value
    if path is None:
        raise ArgumentError("a set is required (--set or --set-file)")
    text = sys.stdin.read() if path == "-" else open(path).read()
    return list(smooth_core.SortedIntSet(_int_list(text)))


def _jsonable(value: Any) -> Any:
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        if value.is_integer() and abs(value) < 2**53:
            return int(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    return value


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


class Output:
    """Serialises a report as a mapping plus an optional list of rows."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, report: dict, rows: list[dict] | None = None, items: list | None = None):
        report = _jsonable(report)
        if self.fmt == "json":
            self.stream.write(json.dumps(report, separators=(",", ":")) + "\n")
        elif self.fmt == "csv":
            buf = io.StringIO()
            if rows is not None:
                names = list(rows[0]) if rows else []
                writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: _csv_cell(v) for k, v in row.items()})
            else:
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(["key", "value"])
                for k, v in report.items():
                    writer.writerow([k, _csv_cell(v)])
            self.stream.write(buf.getvalue())
        else:
            if items is not None:
                self.stream.write("".join(f"{v}\n" for v in items))
            else:
                for k, v in report.items():
                    self.stream.write(f"{k}: {_csv_cell(v)}\n")


def _csv_cell(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(_csv_cell(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(_jsonable(v), separators=(",", ":"))
    return str(_jsonable(v))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _table(cfg: RunConfig, top: int) -> smooth_core.FactorTable:
    if top > cfg.table_limit:
        raise CapacityError(f"needs a factor table up to {top}, table limit is {cfg.table_limit}", top)
    return smooth_core.build_factor_table(max(top, 1))


def _threshold(args, cfg: RunConfig) -> smooth_core.SmoothnessThreshold:
    text = getattr(args, "y", None)
    if text is None:
        text = cfg.threshold
    if text is None:
        raise ArgumentError("a threshold is required (--y)")
    return smooth_core.SmoothnessThreshold.parse(str(text))


def cmd_sieve_gpf(args, cfg, out):
    table = _table(cfg, args.n)
    out.emit({"n": args.n, "gpf": smooth_core.greatest_prime_factor(args.n, table)})


def cmd_sieve_window(args, cfg, out):
    threshold = _threshold(args, cfg)
    if args.lo > args.hi:
        raise ArgumentError(f"inverted window [{args.lo}, {args.hi}]")
    table = _table(cfg, args.hi)
    fn = smooth_core.shifted_friable_window if args.shifted else smooth_core.friable_window
    window = fn(threshold, args.lo, args.hi, table)
    report = {"y": threshold.describe(), "lo": args.lo, "hi": args.hi, "shifted": args.shifted,
              "count": len(window), "elements": list(window)}
    out.emit(report, rows=[{"n": v} for v in window], items=list(window))


def cmd_sieve_primecount(args, cfg, out):
    out.emit({"y": args.y, "pi": smooth_core.prime_count(args.y)})


def cmd_psi_exact(args, cfg, out):
    out.emit({"x": args.x, "y": args.y, "count": psi.psi_exact(args.x, args.y)})


def cmd_psi_base2(args, cfg, out):
    out.emit({"x": args.x, "count": psi.psi_base2(args.x)})


def cmd_psi_debruijn(args, cfg, out):
    rep = psi.debruijn_ratio(args.x, args.y)
    report = {"x": rep.x, "y": rep.y, "count": rep.count, "Z": rep.Z, "log_psi": rep.log_psi,
              "ratio": rep.ratio, "in_corridor": cfg.corridor.contains(rep.ratio),
              "corridor": [cfg.corridor_lo, cfg.corridor_hi]}
    out.emit(report)


def _solution_rows(sol: sunit.SolutionList) -> list[dict]:
    rows = []
    for x, y in sol.solutions:
        rows.append({"X": str(x.value), "Y": str(y.value),
                     "X_exponents": list(x.exponents), "Y_exponents": list(y.exponents)})
    return rows


def _emit_solutions(out, sol, extra=None):
    report = sol.to_dict()
    report["certification"] = sunit.certify_count(sol).to_dict()
    if extra:
        report.update(extra)
    out.emit(report, rows=_solution_rows(sol),
             items=[f"{x.value} {y.value}" for x, y in sol.solutions])


def cmd_sunit_solve(args, cfg, out):
    eq = sunit.SUnitEquation(args.U, args.V)
    S = sunit.PrimeSet(tuple(args.S))
    sol = sunit.enumerate_solutions(eq, S, args.bound, args.domain, cfg.enumeration_budget)
    _emit_solutions(out, sol)


def cmd_sunit_pairs(args, cfg, out):
    if args.lo > args.hi:
        raise ArgumentError(f"inverted window [{args.lo}, {args.hi}]")
    sol = sunit.smooth_pair_difference(args.y, args.d, args.lo, args.hi, _table(cfg, args.hi))
    _emit_solutions(out, sol)


def cmd_sunit_mpairs(args, cfg, out):
    top = args.N - 1
    mp = sunit.multiplicative_pairs(args.a1, args.a2, args.y, args.n0, args.N,
                                    _table(cfg, max(top, 1)))
    _emit_solutions(out, mp.solutions, {"b_values": mp.b_values})


def cmd_sunit_bound(args, cfg, out):
    exponent = sunit.bs_exponent(args.s)
    report = {"s": args.s, "exponent": exponent}
    if args.materialize or exponent <= 64:
        report["value"] = str(1 << exponent)
    out.emit(report)


def _limits(cfg: RunConfig) -> decomp.SearchLimits:
    return decomp.SearchLimits(cfg.max_nodes, cfg.max_set_size, cfg.max_certificates)


def _target(args) -> decomp.WindowSet:
    elements = _read_set(args.set, args.set_file)
    if args.n0 is None and args.N is None:
        return decomp.WindowSet.full(elements)
    s = smooth_core.SortedIntSet(elements)
    n0 = args.n0 if args.n0 is not None else (s[0] if s else 0)
    N = args.N if args.N is not None else (s[-1] if s else n0)
    return decomp.WindowSet(s, n0, N)


def cmd_decomp_search(args, cfg, out):
    target = _target(args)
    result = decomp.search_decompositions(target, args.mode, args.max_element, _limits(cfg),
                                          workers=cfg.threads)
    rows = [c.to_dict() for c in result.certificates]
    out.emit(result.to_dict(), rows=rows,
             items=[f"{list(c.B)} {list(c.C)}" for c in result.certificates] or [result.status])
    return EXIT_CAPACITY if result.status == decomp.BUDGET_EXCEEDED else EXIT_OK


def cmd_decomp_verify(args, cfg, out):
    target = _target(args)
    lo = args.lo if args.lo is not None else target.n0
    hi = args.hi if args.hi is not None else target.N
    cert = decomp.DecompositionCertificate(args.B, args.C, args.mode, lo, hi)
    ok = decomp.verify_certificate(target, cert)
    out.emit({"valid": ok, "certificate": cert.to_dict(), "target": target.to_dict()})


def cmd_decomp_growth(args, cfg, out):
    scales = decomp.growth_scales(args.A, args.B, args.m, args.D_max)
    out.emit({"m": args.m, "D_max": args.D_max, "count": len(scales), "D": scales},
             rows=[{"D": d} for d in scales], items=scales)


def _pipeline_table(cfg, top):
    return _table(cfg, max(top, 1))


def cmd_report_theorem1(args, cfg, out):
    threshold = _threshold(args, cfg)
    rep = decomp.theorem1_pipeline(threshold, args.a1, args.a2, args.n0, args.N,
                                   _pipeline_table(cfg, args.N))
    out.emit(rep.to_dict())


def cmd_report_theorem2(args, cfg, out):
    threshold = _threshold(args, cfg)
    rep = decomp.theorem2_pipeline(threshold, args.a1, args.a2, args.n0, args.N, args.m,
                                   _pipeline_table(cfg, args.N - 1))
    out.emit(rep.to_dict())


def cmd_report_classify(args, cfg, out):
    label = decomp.case_classifier(args.log_N, args.y)
    out.emit({"log_N": args.log_N, "y": args.y, "loglog_N": math.log(args.log_N),
              "upper": decomp.HYPOTHESIS_SCALE * args.log_N, "case": label})


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    S = argparse.SUPPRESS
    p.add_argument("--format", choices=FORMATS, default=S)
    p.add_argument("--threads", type=_integer, default=S)
    p.add_argument("--config", default=S, help="JSON file with RunConfig keys")
    p.add_argument("--table-limit", dest="table_limit", type=_integer, default=S)
    p.add_argument("--max-nodes", dest="max_nodes", type=_integer, default=S)
    p.add_argument("--max-set-size", dest="max_set_size", type=_integer, default=S)
    p.add_argument("--max-certificates", dest="max_certificates", type=_integer, default=S)
    p.add_argument("--enumeration-budget", dest="enumeration_budget", type=_integer, default=S)
    p.add_argument("--corridor-lo", dest="corridor_lo", type=float, default=S)
    p.add_argument("--corridor-hi", dest="corridor_hi", type=float, default=S)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="friable", description=__doc__.split("\n")[0], parents=[common])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, func, help):
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(func=func)
        return p

    def add_set_args(p):
        p.add_argument("--set", type=_int_list, default=None, help="comma separated or JSON array")
        p.add_argument("--set-file", default=None, help="JSON array or one integer per line; - for stdin")
        p.add_argument("--n0", type=_integer, default=None)
        p.add_argument("--N", type=_integer, default=None)
        p.add_argument("--mode", choices=decomp.MODES, default=decomp.ADDITIVE)

    g = groups.add_parser("sieve", help="factor tables and smooth windows").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(g, "gpf", cmd_sieve_gpf, "greatest prime factor of n")
    p.add_argument("--n", type=_integer, required=True)
    p = leaf(g, "window", cmd_sieve_window, "y-smooth integers in [lo, hi]")
    p.add_argument("--y", default=None, help="threshold: 5, log:0.5 or power:0.25")
    p.add_argument("--lo", type=_integer, default=1)
    p.add_argument("--hi", type=_integer, required=True)
    p.add_argument("--shifted", action="store_true", help="the shifted set F_y + 1")
    p = leaf(g, "primecount", cmd_sieve_primecount, "number of primes <= y")
    p.add_argument("--y", type=_number, required=True)

    g = groups.add_parser("psi", help="smooth counting function").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(g, "exact", cmd_psi_exact, "exact Psi(x, y)")
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--y", type=_number, required=True)
    p = leaf(g, "base2", cmd_psi_base2, "Psi(x, 2) by bit length")
    p.add_argument("--x", type=_integer, required=True)
    p = leaf(g, "debruijn", cmd_psi_debruijn, "log Psi(x, y) against de Bruijn's Z")
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--y", type=_number, required=True)

    g = groups.add_parser("sunit", help="S-unit equations").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(g, "solve", cmd_sunit_solve, "bounded solutions of U X + V Y = 1")
    p.add_argument("--U", type=_rational, required=True)
    p.add_argument("--V", type=_rational, required=True)
    p.add_argument("--S", type=_int_list, required=True, help="primes, e.g. 2,3,5")
    p.add_argument("--bound", type=_integer, required=True, help="max |exponent|")
    p.add_argument("--domain", choices=sunit.DOMAINS, default=sunit.SIGNED)
    p = leaf(g, "pairs", cmd_sunit_pairs, "y-smooth pairs at distance d in a window")
    p.add_argument("--y", type=_number, required=True)
    p.add_argument("--d", type=_integer, required=True)
    p.add_argument("--lo", type=_integer, default=1)
    p.add_argument("--hi", type=_integer, required=True)
    p = leaf(g, "mpairs", cmd_sunit_mpairs, "b with a1 b - 1 and a2 b - 1 both y-smooth")
    for name in ("a1", "a2", "n0", "N"):
        p.add_argument(f"--{name}", type=_integer, required=True)
    p.add_argument("--y", type=_number, required=True)
    p = leaf(g, "bound", cmd_sunit_bound, "the 2^(8(2s+2)) solution-count bound")
    p.add_argument("--s", type=_integer, required=True)
    p.add_argument("--materialize", action="store_true", help="print the value even when huge")

    g = groups.add_parser("decomp", help="set decompositions").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = leaf(g, "search", cmd_decomp_search, "all exact decompositions of a finite set")
    add_set_args(p)
    p.add_argument("--max-element", dest="max_element", type=_integer, default=None)
    p = leaf(g, "verify", cmd_decomp_verify, "check a certificate on a window")
    add_set_args(p)
    p.add_argument("--B", type=_int_list, required=True)
    p.add_argument("--C", type=_int_list, required=True)
    p.add_argument("--lo", type=_integer, default=None)
    p.add_argument("--hi", type=_integer, default=None)
    p = leaf(g, "growth", cmd_decomp_growth, "scales D with A(mD)B(mD) < (m^2+1)A(D)B(D)")
    p.add_argument("--A", type=_int_list, required=True)
    p.add_argument("--B", type=_int_list, required=True)
    p.add_argument("--m", type=_integer, required=True)
    p.add_argument("--D-max", dest="D_max", type=_integer, required=True)

    g = groups.add_parser("report", help="theorem pipelines").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, func in (("theorem1", cmd_report_theorem1), ("theorem2", cmd_report_theorem2)):
        p = leaf(g, name, func, f"two-sided inequality report for theorem {name[-1]}")
        p.add_argument("--y", default=None, help="cutoff y(N): 3, log:0.5, power:0.25")
        for arg in ("a1", "a2", "n0", "N"):
            p.add_argument(f"--{arg}", type=_integer, required=True)
        if name == "theorem2":
            p.add_argument("--m", type=_integer, required=True)
    p = leaf(g, "classify", cmd_report_classify, "CASE1 / CASE2 / out-of-hypothesis")
    p.add_argument("--log-N", dest="log_N", type=float, required=True, help="natural log of N")
    p.add_argument("--y", type=float, required=True)
    return parser


_CONFIG_KEYS = ("format", "threads", "table_limit", "max_nodes", "max_set_size",
                "max_certificates", "enumeration_budget", "corridor_lo", "corridor_hi")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        overrides = {k: getattr(args, k) for k in _CONFIG_KEYS if hasattr(args, k)}
        cfg = RunConfig.load(getattr(args, "config", None), overrides)
        code = args.func(args, cfg, Output(cfg.format, stdout))
        return EXIT_OK if code is None else code
    except CapacityError as exc:
        print(f"friable: capacity error: {exc}", file=stderr)
        return EXIT_CAPACITY
    except (ArgumentError, FriableError) as exc:
        print(f"friable: error: {exc}", file=stderr)
        return EXIT_ARGUMENT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
