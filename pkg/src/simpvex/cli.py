"""Command-line front end.

Subcommands:
    moments   kernel moment table, closed form vs quadrature
    check     run one case config through the pipeline
    corpus    run the bundled corpus (JSON or CSV report)
    scan      tightness scan of |defect| / rhs over an (a, b, q) grid

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 all pass,
1 bound violation, 2 hypothesis unmet under --strict, 3 input or
configuration error.  A violation anywhere forces exit 1 regardless of
other verdicts.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import bounds as bounds_mod
from . import kernel, quadrature, runner
from .errors import CaseConfigError, SimpvexError
from .invexity import Domain, EtaMap

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_UNMET_STRICT = 2
EXIT_INPUT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def _info(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _write_output(text: str, out_path: Optional[str]) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tolerances(args) -> runner.Tolerances:
    overrides = {}
    for key in ("oracle", "slack", "invexity"):
        value = getattr(args, f"tol_{key}", None)
        if value is not None:
            overrides[key] = value
    return runner.DEFAULT_TOLERANCES.merged(overrides)


def _add_tolerance_flags(sub) -> None:
    sub.add_argument("--tol-oracle", dest="tol_oracle", type=float, default=None,
                     help="quadrature oracle tolerance (default 1e-11)")
    sub.add_argument("--tol-slack", dest="tol_slack", type=float, default=None,
                     help="slack tolerance for violations (default 1e-12)")
    sub.add_argument("--tol-invexity", dest="tol_invexity", type=float, default=None,
                     help="sampled-property tolerance (default 1e-12)")


def _parse_floats(text: str, flag: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise CaseConfigError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise CaseConfigError(f"{flag} expects at least one number")
    return values


def _parse_pair(text: str, flag: str):
    values = _parse_floats(text, flag)
    if len(values) != 2:
        raise CaseConfigError(f"{flag} expects exactly two numbers, got {text!r}")
    return values[0], values[1]


def _parse_eta(text: str) -> EtaMap:
    kind, sep, value = text.partition(":")
    if kind in ("difference", "abs_example") and not sep:
        return EtaMap.from_config({"kind": kind})
    if kind == "expression" and sep:
        return EtaMap.from_config({"kind": "expression", "value": value})
    raise CaseConfigError(
        f"--eta expects 'difference', 'abs_example' or 'expression:<expr>', got {text!r}")


def cmd_moments(args) -> int:
    ps = _parse_floats(args.p, "--p")
    rows = ["p,closed_form,numeric,abs_diff"]
    for p in ps:
        if p < 1.0:
            raise CaseConfigError(f"moment order must be >= 1, got {p!r}")
        closed = kernel.moment_p(p)
        numeric = quadrature.integrate_with_breakpoints(
            lambda t: abs(t - 1.0 / 6.0) ** p, 0.0, 0.5, [1.0 / 6.0], 1e-13).value
        rows.append(f"{p!r},{closed!r},{numeric!r},{abs(closed - numeric)!r}")
    _write_output("\n".join(rows) + "\n", args.out)
    return EXIT_PASS


def cmd_check(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise CaseConfigError(f"cannot read {args.config!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise CaseConfigError(
            f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    case = runner.load_case(config, _tolerances(args))
    _info(args, f"running case {case.name!r}")
    result = runner.run_case(case)
    report = runner.RunReport([result], 0.0)
    _write_output(report.to_json(), args.out)
    _info(args, f"verdict: {result.verdict}")
    return runner.aggregate_exit_code([result], strict=args.strict)


def cmd_corpus(args) -> int:
    tol = _tolerances(args)
    cases = runner.load_corpus(args.filter, tol)
    _info(args, f"loaded {len(cases)} corpus case(s)")
    report = runner.run_corpus(cases=cases, tolerances=tol)
    if args.format == "csv":
        _write_output(report.to_csv(), args.out)
    else:
        _write_output(report.to_json(), args.out)
    counts = report.counts
    _info(args, ("verdicts: " + ", ".join(
        f"{key}={counts[key]}" for key in
        ("pass", "hypothesis_unmet", "violation", "input_error"))))
    return runner.aggregate_exit_code(report.results, strict=args.strict)


def cmd_scan(args) -> int:
    tol = _tolerances(args)
    eta = _parse_eta(args.eta)
    lo, hi = _parse_pair(args.K, "--K")
    try:
        domain = Domain(lo, hi)
    except ValueError as exc:
        raise CaseConfigError(str(exc))
    config = {
        "name": args.name,
        "f": args.f,
        "df": args.df,
        "F": args.F,
        "d4sup": args.d4sup,
        "K": [lo, hi],
    }
    model = bounds_mod.FunctionModel.from_config(config)
    model.validate()
    theorems = args.theorems.split(",") if args.theorems else list(runner.THEOREM_IDS)
    for theorem in theorems:
        if theorem not in runner.THEOREM_IDS:
            raise CaseConfigError(f"unknown theorem id {theorem!r}")
    results = runner.tightness_scan(
        model, eta, domain,
        _parse_pair(args.a_range, "--a-range"),
        _parse_pair(args.b_range, "--b-range"),
        _parse_floats(args.q, "--q"),
        args.steps, theorems, tol)
    rows = ["theorem,status,ratio,a,b,q,cells,skipped"]
    for r in results:
        def cell(x):
            return "" if x is None else repr(x) if isinstance(x, float) else str(x)
        rows.append(",".join([r.theorem, r.status, cell(r.ratio), cell(r.at_a),
                              cell(r.at_b), cell(r.at_q), str(r.cells), str(r.skipped)]))
    _write_output("\n".join(rows) + "\n", args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simpvex",
                     description="Simpson defect bounds on invex intervals.")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_moments = sub.add_parser("moments", help="kernel moment table (CSV)",
                               description="Print closed-form vs numeric kernel moments.")
    p_moments.add_argument("--p", required=True,
                           help="comma-separated moment orders, each >= 1")
    p_moments.add_argument("--out", default=None, help="write output to this path")
    p_moments.set_defaults(fn=cmd_moments)

    p_check = sub.add_parser("check", help="run one case config",
                             description="Validate and run a single JSON case config.")
    p_check.add_argument("config", help="path to a case config JSON file")
    p_check.add_argument("--strict", action="store_true",
                         help="exit 2 when a hypothesis is unmet")
    p_check.add_argument("--out", default=None, help="write the JSON report to this path")
    _add_tolerance_flags(p_check)
    p_check.set_defaults(fn=cmd_check)

    p_corpus = sub.add_parser("corpus", help="run the bundled corpus",
                              description="Run the bundled verification corpus.")
    p_corpus.add_argument("--filter", default=None,
                          help="only run cases whose name contains this substring")
    p_corpus.add_argument("--format", choices=("json", "csv"), default="json")
    p_corpus.add_argument("--strict", action="store_true",
                          help="exit 2 when a hypothesis is unmet")
    p_corpus.add_argument("--out", default=None, help="write the report to this path")
    _add_tolerance_flags(p_corpus)
    p_corpus.set_defaults(fn=cmd_corpus)

    p_scan = sub.add_parser("scan", help="tightness scan over (a, b, q)",
                            description="Scan |defect|/rhs ratios over a grid.")
    p_scan.add_argument("--name", default="scan", help="model name used in diagnostics")
    p_scan.add_argument("--f", required=True, help="function expression over x")
    p_scan.add_argument("--df", required=True, help="derivative expression over x")
    p_scan.add_argument("--F", default=None, help="optional antiderivative expression")
    p_scan.add_argument("--d4sup", type=float, default=None,
                        help="sup of |f''''|, enables the CLASSICAL bound")
    p_scan.add_argument("--eta", default="difference",
                        help="'difference', 'abs_example' or 'expression:<expr>'")
    p_scan.add_argument("--K", required=True, help="domain as 'lo,hi'")
    p_scan.add_argument("--a-range", dest="a_range", required=True, help="'lo,hi'")
    p_scan.add_argument("--b-range", dest="b_range", required=True, help="'lo,hi'")
    p_scan.add_argument("--q", default="1,2", help="comma-separated exponents")
    p_scan.add_argument("--steps", type=int, default=9, help="grid steps per axis")
    p_scan.add_argument("--theorems", default=None,
                        help="comma-separated theorem ids (default: all)")
    p_scan.add_argument("--out", default=None, help="write output to this path")
    _add_tolerance_flags(p_scan)
    p_scan.set_defaults(fn=cmd_scan)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CaseConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SimpvexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
